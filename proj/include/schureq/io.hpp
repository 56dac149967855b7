#pragma once

#include "schureq/distribution.hpp"
#include "schureq/oracle.hpp"
#include "schureq/schur_model.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace schureq {

using OrderedJson = nlohmann::ordered_json;

/// Probability vector from a stream of one value per line. Blank lines and
/// lines starting with '#' are skipped.
std::vector<double> parse_pmf_text(std::istream& in);

/// Probability vector from two-column CSV "index,probability"; indices must
/// run 0, 1, 2, ... in order.
std::vector<double> parse_pmf_csv(std::istream& in);

/// Load a pmf file, auto-detecting the format by the presence of a comma in
/// the first content line. Throws std::runtime_error with the path and line
/// on malformed input.
std::vector<double> read_pmf_file(const std::string& path);

void write_pmf_text(const std::vector<double>& pmf, std::ostream& out);
void write_pmf_csv(const std::vector<double>& pmf, std::ostream& out);

/// {kind, lambda|q|pmf, tail_tolerance, truncation_bound}.
OrderedJson distribution_to_json(const DiscreteDistribution& dist);
DiscreteDistribution distribution_from_json(const OrderedJson& doc);

/// {base, n, tail_tolerance}: enough to rebuild the model.
OrderedJson model_to_json(const SchurModel& model);
SchurModel model_from_json(const OrderedJson& doc);

OrderedJson report_to_json(const VerificationReport& report);

/// Full-precision decimal rendering that round-trips the double exactly.
std::string format_full(double v);

/// Fixed five decimals with ties rounded away from zero, e.g. -0.14286.
std::string format_fixed5(double v);

}  // namespace schureq

#include "schureq/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace schureq {
namespace {

bool blank_or_comment(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

double parse_double_strict(const std::string& token, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": not a number: '" + token +
                                 "'");
    }
    while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
    if (used != token.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": trailing characters in '" +
                                 token + "'");
    }
    return v;
}

}  // namespace

std::vector<double> parse_pmf_text(std::istream& in) {
    std::vector<double> pmf;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        pmf.push_back(parse_double_strict(line, line_no));
    }
    return pmf;
}

std::vector<double> parse_pmf_csv(std::istream& in) {
    std::vector<double> pmf;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 'index,probability'");
        }
        const std::string index_field = line.substr(0, comma);
        const std::string value_field = line.substr(comma + 1);
        if (first_content && !index_field.empty() &&
            !std::isdigit(static_cast<unsigned char>(index_field.front()))) {
            first_content = false;  // header row
            continue;
        }
        first_content = false;
        const double index = parse_double_strict(index_field, line_no);
        if (index != static_cast<double>(pmf.size())) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected index " +
                                     std::to_string(pmf.size()));
        }
        pmf.push_back(parse_double_strict(value_field, line_no));
    }
    return pmf;
}

std::vector<double> read_pmf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pmf file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    // Format detection: a comma in the first content line means CSV.
    bool csv = false;
    {
        std::istringstream probe(buffer.str());
        std::string line;
        while (std::getline(probe, line)) {
            if (blank_or_comment(line)) continue;
            csv = line.find(',') != std::string::npos;
            break;
        }
    }
    std::istringstream content(buffer.str());
    try {
        return csv ? parse_pmf_csv(content) : parse_pmf_text(content);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_fixed5(double v) {
    const bool negative = std::signbit(v);
    const double y = std::abs(v) * 1e5;
    const double frac = y - std::floor(y);
    // Ties round away from zero; the window absorbs representation noise in
    // values that are exact five-decimal halves.
    double rounded = (std::abs(frac - 0.5) < 1e-9) ? std::floor(y) + 1.0 : std::floor(y + 0.5);
    const auto k = static_cast<std::uint64_t>(rounded);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%llu.%05llu", (negative && k != 0) ? "-" : "",
                  static_cast<unsigned long long>(k / 100000),
                  static_cast<unsigned long long>(k % 100000));
    return buf;
}

void write_pmf_text(const std::vector<double>& pmf, std::ostream& out) {
    for (double v : pmf) out << format_full(v) << "\n";
}

void write_pmf_csv(const std::vector<double>& pmf, std::ostream& out) {
    for (std::size_t x = 0; x < pmf.size(); ++x) {
        out << x << "," << format_full(pmf[x]) << "\n";
    }
}

OrderedJson distribution_to_json(const DiscreteDistribution& dist) {
    OrderedJson doc;
    switch (dist.family()) {
        case Family::Poisson:
            doc["kind"] = "poisson";
            doc["lambda"] = dist.parameter();
            break;
        case Family::Geometric:
            doc["kind"] = "geometric";
            doc["q"] = dist.parameter();
            break;
        case Family::Explicit:
            doc["kind"] = "explicit";
            doc["pmf"] = dist.weights();
            if (dist.discarded_mass() > 0.0) doc["tail_mass"] = dist.discarded_mass();
            break;
    }
    doc["tail_tolerance"] = dist.tail_tolerance();
    doc["truncation_bound"] = dist.truncation_bound();
    return doc;
}

DiscreteDistribution distribution_from_json(const OrderedJson& doc) {
    const std::string kind = doc.at("kind").get<std::string>();
    const double tol = doc.value("tail_tolerance", kDefaultTailTolerance);
    const std::uint64_t bound = doc.value("truncation_bound", kDefaultTruncationBound);
    if (kind == "poisson") {
        return DiscreteDistribution::poisson(doc.at("lambda").get<double>(), tol, bound);
    }
    if (kind == "geometric") {
        return DiscreteDistribution::geometric(doc.at("q").get<double>(), tol, bound);
    }
    if (kind == "explicit") {
        return DiscreteDistribution::from_pmf_with_tail(doc.at("pmf").get<std::vector<double>>(),
                                                        doc.value("tail_mass", 0.0), tol, bound);
    }
    throw std::runtime_error("unknown distribution kind: " + kind);
}

OrderedJson model_to_json(const SchurModel& model) {
    OrderedJson doc;
    doc["base"] = distribution_to_json(model.base());
    doc["n"] = model.dimension();
    doc["tail_tolerance"] = model.base().tail_tolerance();
    return doc;
}

SchurModel model_from_json(const OrderedJson& doc) {
    return build_model(distribution_from_json(doc.at("base")), doc.at("n").get<unsigned>());
}

OrderedJson report_to_json(const VerificationReport& report) {
    OrderedJson doc;
    doc["checks"] = OrderedJson::array();
    for (const CheckResult& c : report.checks) {
        OrderedJson entry;
        entry["name"] = c.name;
        entry["pass"] = c.pass;
        entry["max_abs_error"] = c.max_abs_error;
        entry["tolerance"] = c.tolerance;
        if (c.location) entry["location"] = *c.location;
        doc["checks"].push_back(std::move(entry));
    }
    doc["all_pass"] = report.all_pass();
    return doc;
}

}  // namespace schureq

#include "schureq/cli.hpp"

#include "schureq/distribution.hpp"
#include "schureq/equilibrium.hpp"
#include "schureq/errors.hpp"
#include "schureq/io.hpp"
#include "schureq/oracle.hpp"
#include "schureq/schur_model.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <string>
#include <vector>

namespace schureq {
namespace {

enum class Format { Json, Csv, Table };

Format parse_format(const std::string& name) {
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    return Format::Table;
}

std::string format_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct BaseArgs {
    std::string family;
    double lambda = 1.0;
    double q = 0.5;
    std::string pmf_file;
};

void add_base_options(CLI::App* cmd, BaseArgs& args) {
    auto* family = cmd->add_option("--family", args.family, "closed-form base: poisson|geometric")
                       ->check(CLI::IsMember({"poisson", "geometric"}));
    cmd->add_option("--lambda", args.lambda, "Poisson rate (with --family poisson)");
    cmd->add_option("--q", args.q, "geometric survival ratio (with --family geometric)");
    auto* file = cmd->add_option("--pmf-file", args.pmf_file,
                                 "explicit base from file (one probability per line, or index,probability CSV)")
                     ->check(CLI::ExistingFile);
    family->excludes(file);
    file->excludes(family);
}

DiscreteDistribution make_base(const BaseArgs& args, double tail_tol) {
    if (args.family == "poisson") return DiscreteDistribution::poisson(args.lambda, tail_tol);
    if (args.family == "geometric") return DiscreteDistribution::geometric(args.q, tail_tol);
    if (!args.pmf_file.empty()) {
        return DiscreteDistribution::from_pmf(read_pmf_file(args.pmf_file), tail_tol);
    }
    throw std::invalid_argument("a base distribution is required: --family or --pmf-file");
}

void emit_pmf(const std::vector<double>& pmf, Format format, const char* json_key, unsigned n_or_order,
              const char* n_label, std::ostream& out) {
    switch (format) {
        case Format::Json: {
            OrderedJson doc;
            doc[n_label] = n_or_order;
            doc[json_key] = pmf;
            out << doc.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            write_pmf_csv(pmf, out);
            break;
        case Format::Table:
            out << std::left << std::setw(10) << "x" << "p(x)\n";
            for (std::size_t x = 0; x < pmf.size(); ++x) {
                out << std::left << std::setw(10) << x << format_g6(pmf[x]) << "\n";
            }
            break;
    }
}

std::vector<double> sum_pmf_sequence(const SchurModel& model) {
    const double tol = model.base().tail_tolerance();
    const bool finite = model.base().is_explicit();
    const std::uint64_t hard_stop =
        finite ? model.base().support_size() : model.base().truncation_bound();
    std::vector<double> seq;
    double cum = 0.0;
    for (std::uint64_t z = 0;; ++z) {
        const double p = sum_pmf(model, z);
        seq.push_back(p);
        cum += p;
        if (1.0 - cum <= tol) break;
        if (z + model.dimension() - 1 >= hard_stop) {
            if (finite) break;
            throw NonConvergentError("sum pmf sequence did not converge within the bound");
        }
    }
    return seq;
}

int cmd_eqdist(const BaseArgs& base_args, unsigned order, double tail_tol, Format format,
               std::ostream& out) {
    const EquilibriumChain chain = nth_equilibrium(make_base(base_args, tail_tol), order);
    emit_pmf(chain.levels[order].weights(), format, "pmf", order, "order", out);
    return 0;
}

int cmd_marginal(const SchurModel& model, Format format, std::ostream& out) {
    emit_pmf(model.marginal().weights(), format, "marginal_pmf", model.dimension(), "n", out);
    return 0;
}

int cmd_sum(const SchurModel& model, Format format, std::ostream& out) {
    emit_pmf(sum_pmf_sequence(model), format, "sum_pmf", model.dimension(), "n", out);
    return 0;
}

int cmd_joint(const SchurModel& model, const std::vector<std::uint64_t>& at, Format format,
              std::ostream& out) {
    const double survival = joint_survival(model, at);
    const double pmf = joint_pmf(model, at);
    switch (format) {
        case Format::Json: {
            OrderedJson doc;
            doc["n"] = model.dimension();
            doc["at"] = at;
            doc["survival"] = survival;
            doc["pmf"] = pmf;
            doc["pmf_raw"] = joint_pmf_raw(model, at);
            out << doc.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "survival,pmf\n" << format_full(survival) << "," << format_full(pmf) << "\n";
            break;
        case Format::Table:
            out << "survival  " << format_g6(survival) << "\n";
            out << "pmf       " << format_g6(pmf) << "\n";
            break;
    }
    return 0;
}

int cmd_rho(const SchurModel& model, const std::string& method_name, Format format,
            std::ostream& out) {
    RhoMethod method = RhoMethod::MarginalForm;
    if (method_name == "base-moment") method = RhoMethod::BaseMomentForm;
    if (method_name == "closed") method = RhoMethod::ClosedForm;
    const RhoResult rho = correlation(model, method);
    switch (format) {
        case Format::Json: {
            OrderedJson doc;
            doc["n"] = model.dimension();
            doc["method"] = rho_method_name(rho.method);
            doc["rho"] = rho.value;
            out << doc.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "method,rho\n" << rho_method_name(rho.method) << "," << format_full(rho.value)
                << "\n";
            break;
        case Format::Table:
            out << format_fixed5(rho.value) << "\n";
            break;
    }
    return 0;
}

int cmd_moments(const SchurModel& model, unsigned max_j, Format format, std::ostream& out) {
    const unsigned n = model.dimension();
    std::vector<std::vector<double>> grid(n);
    for (unsigned i = 0; i < n; ++i) {
        for (unsigned j = 1; j <= max_j; ++j) {
            grid[i].push_back(equilibrium_moment(model.chain(), i, j));
        }
    }
    switch (format) {
        case Format::Json: {
            OrderedJson doc;
            doc["n"] = n;
            doc["max_j"] = max_j;
            doc["moments"] = grid;
            out << doc.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "i";
            for (unsigned j = 1; j <= max_j; ++j) out << ",j=" << j;
            out << "\n";
            for (unsigned i = 0; i < n; ++i) {
                out << i;
                for (double v : grid[i]) out << "," << format_full(v);
                out << "\n";
            }
            break;
        case Format::Table:
            out << std::left << std::setw(6) << "i";
            for (unsigned j = 1; j <= max_j; ++j) {
                out << std::setw(16) << ("j=" + std::to_string(j));
            }
            out << "\n";
            for (unsigned i = 0; i < n; ++i) {
                out << std::left << std::setw(6) << i;
                for (double v : grid[i]) out << std::setw(16) << format_g6(v);
                out << "\n";
            }
            break;
    }
    return 0;
}

int cmd_coeffs(unsigned n_max, Format format, std::ostream& out) {
    const CoefficientTriangle triangle = coefficient_triangle(n_max);
    switch (format) {
        case Format::Json: {
            OrderedJson doc;
            doc["n_max"] = n_max;
            OrderedJson columns;
            for (unsigned n = 1; n <= n_max; ++n) {
                OrderedJson column = OrderedJson::array();
                for (unsigned r = 1; r <= n; ++r) {
                    column.push_back(rational_string(triangle.rows[n][r]));
                }
                columns[std::to_string(n)] = std::move(column);
            }
            doc["columns"] = std::move(columns);
            out << doc.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            write_coefficients_csv(triangle, out);
            break;
        case Format::Table: {
            const unsigned first = n_max >= 2 ? 2 : 1;
            std::size_t width = 6;
            for (unsigned n = first; n <= n_max; ++n) {
                for (unsigned r = 1; r <= n; ++r) {
                    width = std::max(width, rational_string(triangle.rows[n][r]).size() + 2);
                }
            }
            out << std::left << std::setw(6) << "r";
            for (unsigned n = first; n <= n_max; ++n) {
                out << std::setw(static_cast<int>(width)) << ("n=" + std::to_string(n));
            }
            out << "\n";
            for (unsigned r = 1; r <= n_max; ++r) {
                out << std::left << std::setw(6) << r;
                for (unsigned n = first; n <= n_max; ++n) {
                    out << std::setw(static_cast<int>(width))
                        << (r <= n ? rational_string(triangle.rows[n][r]) : "");
                }
                out << "\n";
            }
            break;
        }
    }
    return 0;
}

int cmd_poisson_rho(const std::vector<double>& lambdas, const std::vector<unsigned>& ns,
                    Format format, std::ostream& out) {
    std::vector<std::vector<double>> grid(lambdas.size());
    for (std::size_t row = 0; row < lambdas.size(); ++row) {
        for (unsigned n : ns) grid[row].push_back(poisson_rho(lambdas[row], n));
    }
    switch (format) {
        case Format::Json: {
            OrderedJson doc;
            doc["lambdas"] = lambdas;
            doc["ns"] = ns;
            doc["rho"] = grid;
            out << doc.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "lambda";
            for (unsigned n : ns) out << ",n=" << n;
            out << "\n";
            for (std::size_t row = 0; row < lambdas.size(); ++row) {
                out << format_full(lambdas[row]);
                for (double v : grid[row]) out << "," << format_fixed5(v);
                out << "\n";
            }
            break;
        case Format::Table:
            out << std::left << std::setw(10) << "lambda";
            for (unsigned n : ns) out << std::setw(12) << ("n=" + std::to_string(n));
            out << "\n";
            for (std::size_t row = 0; row < lambdas.size(); ++row) {
                out << std::left << std::setw(10) << format_g6(lambdas[row]);
                for (double v : grid[row]) out << std::setw(12) << format_fixed5(v);
                out << "\n";
            }
            break;
    }
    return 0;
}

int cmd_verify(const SchurModel& model, const std::string& fault, Format format,
               std::ostream& out) {
    SchurModel subject = model;
    if (fault == "mean-product") {
        subject = model.with_mean_product(model.mean_product() * 1.05);
    }
    const VerificationReport report = verify_model(subject);
    switch (format) {
        case Format::Json:
            out << report_to_json(report).dump(2) << "\n";
            break;
        case Format::Csv:
            out << "name,pass,max_abs_error,tolerance,location\n";
            for (const CheckResult& c : report.checks) {
                out << "\"" << c.name << "\"," << (c.pass ? "true" : "false") << ","
                    << format_full(c.max_abs_error) << "," << format_full(c.tolerance) << ","
                    << (c.location ? "\"" + *c.location + "\"" : "") << "\n";
            }
            break;
        case Format::Table:
            print_report(report, out);
            break;
    }
    return report.all_pass() ? 0 : 4;
}

int cmd_sample(const SchurModel& model, std::uint64_t seed, std::uint64_t count,
               std::ostream& out) {
    const auto draws = sample(model, seed, static_cast<std::size_t>(count));
    for (const auto& vec : draws) {
        for (std::size_t i = 0; i < vec.size(); ++i) {
            if (i > 0) out << ",";
            out << vec[i];
        }
        out << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Schur-constant multivariate equilibrium models on discrete distributions"};
    app.name("schureq");
    app.require_subcommand(1);
    // Let --format / --tail-tol appear after the subcommand name too.
    app.fallthrough();

    std::string format_name = "table";
    double tail_tol = kDefaultTailTolerance;
    app.add_option("--format", format_name, "output format")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--tail-tol", tail_tol, "truncation tail tolerance")
        ->check(CLI::PositiveNumber)
        ->envname("SCHUREQ_TAIL_TOL");

    BaseArgs base_args;
    unsigned order = 1;
    unsigned n = 2;
    unsigned max_j = 4;
    unsigned n_max = 10;
    std::vector<std::uint64_t> at;
    std::string method = "marginal";
    std::vector<double> lambdas = {0.01, 0.5, 1.0, 5.0, 10.0, 100.0};
    std::vector<unsigned> ns = {2, 3, 4, 5};
    std::string fault;
    std::uint64_t seed = 1;
    std::uint64_t count = 0;

    CLI::App* eqdist = app.add_subcommand("eqdist", "pmf of the k-th order equilibrium law");
    add_base_options(eqdist, base_args);
    eqdist->add_option("--order", order, "equilibrium order k")->check(CLI::Range(0u, 64u));

    CLI::App* model_cmd = app.add_subcommand("model", "queries on an n-dimensional model");
    model_cmd->require_subcommand(1);
    CLI::App* marginal_cmd = model_cmd->add_subcommand("marginal", "marginal pmf");
    CLI::App* sum_cmd = model_cmd->add_subcommand("sum", "pmf of the coordinate sum");
    CLI::App* joint_cmd = model_cmd->add_subcommand("joint", "joint survival/pmf at a point");
    CLI::App* rho_cmd = model_cmd->add_subcommand("rho", "pairwise Pearson correlation");
    CLI::App* moments_cmd = model_cmd->add_subcommand("moments", "equilibrium moment grid");
    for (CLI::App* cmd : {marginal_cmd, sum_cmd, joint_cmd, rho_cmd, moments_cmd}) {
        add_base_options(cmd, base_args);
        cmd->add_option("--n", n, "model dimension")->check(CLI::Range(2u, kMaxDimension));
    }
    joint_cmd->add_option("--at", at, "coordinates, comma separated")
        ->required()
        ->delimiter(',');
    rho_cmd->add_option("--method", method, "marginal|base-moment|closed")
        ->check(CLI::IsMember({"marginal", "base-moment", "closed"}));
    moments_cmd->add_option("--max-j", max_j, "highest moment order")->check(CLI::Range(1u, 12u));

    CLI::App* tables_cmd = app.add_subcommand("tables", "reference tables");
    tables_cmd->require_subcommand(1);
    CLI::App* coeffs_cmd = tables_cmd->add_subcommand("coeffs", "antidifference coefficients");
    coeffs_cmd->add_option("--n-max", n_max, "largest column")->check(CLI::Range(1u, 64u));
    CLI::App* prho_cmd = tables_cmd->add_subcommand("poisson-rho", "Poisson correlation grid");
    prho_cmd->add_option("--lambdas", lambdas, "rates, comma separated")->delimiter(',');
    prho_cmd->add_option("--ns", ns, "dimensions, comma separated")->delimiter(',');

    CLI::App* verify_cmd = app.add_subcommand("verify", "run the consistency suite");
    add_base_options(verify_cmd, base_args);
    verify_cmd->add_option("--n", n, "model dimension")->check(CLI::Range(2u, kMaxDimension));
    verify_cmd->add_option("--inject-fault", fault, "test fixture: corrupt a model constant")
        ->check(CLI::IsMember({"mean-product"}));

    CLI::App* sample_cmd = app.add_subcommand("sample", "draw vectors, CSV output");
    add_base_options(sample_cmd, base_args);
    sample_cmd->add_option("--n", n, "model dimension")->check(CLI::Range(2u, kMaxDimension));
    sample_cmd->add_option("--seed", seed, "generator seed");
    sample_cmd->add_option("--count", count, "number of draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    const Format format = parse_format(format_name);
    try {
        if (app.got_subcommand(eqdist)) {
            return cmd_eqdist(base_args, order, tail_tol, format, out);
        }
        if (app.got_subcommand(model_cmd)) {
            const SchurModel model = build_model(make_base(base_args, tail_tol), n);
            if (model_cmd->got_subcommand(marginal_cmd)) return cmd_marginal(model, format, out);
            if (model_cmd->got_subcommand(sum_cmd)) return cmd_sum(model, format, out);
            if (model_cmd->got_subcommand(joint_cmd)) return cmd_joint(model, at, format, out);
            if (model_cmd->got_subcommand(rho_cmd)) return cmd_rho(model, method, format, out);
            return cmd_moments(model, max_j, format, out);
        }
        if (app.got_subcommand(tables_cmd)) {
            if (tables_cmd->got_subcommand(coeffs_cmd)) return cmd_coeffs(n_max, format, out);
            return cmd_poisson_rho(lambdas, ns, format, out);
        }
        if (app.got_subcommand(verify_cmd)) {
            const SchurModel model = build_model(make_base(base_args, tail_tol), n);
            return cmd_verify(model, fault, format, out);
        }
        if (app.got_subcommand(sample_cmd)) {
            const SchurModel model = build_model(make_base(base_args, tail_tol), n);
            return cmd_sample(model, seed, count, out);
        }
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace schureq

#include "cli.hpp"

#include "csv.hpp"
#include "json_writer.hpp"

#include "firth/error.hpp"
#include "firth/fit.hpp"
#include "firth/harness.hpp"
#include "firth/separation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace firth::cli {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

std::string_view subcommand_name(Subcommand s) {
    switch (s) {
    case Subcommand::Fit: return "fit";
    case Subcommand::CheckSeparation: return "check-separation";
    case Subcommand::Verify: return "verify";
    }
    return "unknown";
}

json to_json(const FitResult& r) {
    json trace = json::array();
    for (const TracePoint& t : r.trace) trace.push_back({{"objective", t.objective}, {"beta_norm", t.beta_norm}});
    return {
        {"status", to_string(r.status)},
        {"penalized", r.penalized},
        {"link", to_string(r.link)},
        {"beta_hat", vec(r.beta_hat)},
        {"se", vec(r.se)},
        {"objective", r.objective},
        {"grad_norm", r.grad_norm},
        {"iterations", r.iterations},
        {"h", vec(r.h)},
        {"trace", trace},
    };
}

json to_json(const SeparationReport& r) {
    json sides = json::array();
    for (SideClass s : r.classification) sides.push_back(to_string(s));
    return {
        {"separated", r.separated},
        {"kind", to_string(r.kind)},
        {"direction", vec(r.direction)},
        {"lp_optimum", r.lp_optimum},
        {"classification", sides},
    };
}

json to_json(const harness::EnvelopeReport& r) {
    json j{
        {"link", to_string(r.link)},
        {"z_lo", r.z_lo},
        {"z_hi", r.z_hi},
        {"step", r.step},
        {"points", r.points},
        {"sup_f", r.sup_f},
        {"argmax_z", r.argmax_z},
        {"sup_f_half_step", r.sup_f_half_step},
        {"finite_everywhere", r.finite_everywhere},
        {"sup_stable", r.sup_stable},
        {"ok", r.ok()},
    };
    switch (r.link) {
    case LinkKind::Logit: j["logit_bound_ok"] = r.logit_bound_ok; break;
    case LinkKind::Probit: j["mills_ok"] = r.mills_ok; break;
    case LinkKind::Cloglog:
        j["g_pos"] = r.g_pos;
        j["g_neg"] = r.g_neg;
        j["g_limits_ok"] = r.g_limits_ok;
        j["f_below_g"] = r.f_below_g;
        break;
    }
    return j;
}

json to_json(const harness::DecayReport& r) {
    json pts = json::array();
    for (const auto& p : r.points) pts.push_back({{"radius", p.radius}, {"log_sup", p.log_sup}, {"sup", p.sup}});
    json j{
        {"design", r.design_id},
        {"link", to_string(r.link)},
        {"n", r.n},
        {"p", r.p},
        {"points", pts},
        {"a", r.a},
        {"c", r.c},
        {"envelope_constant", r.envelope_constant},
        {"log_coefficient", r.log_coefficient},
        {"bound_rate", r.bound_rate},
        {"fitted_rate", r.fitted_rate},
        {"strictly_decreasing", r.strictly_decreasing},
        {"log_decay_ratio", r.log_decay_ratio},
        {"decay_ok", r.decay_ok},
        {"ok", r.ok()},
    };
    if (r.square) {
        j["product_checks"] = r.product_checks;
        j["product_failures"] = r.product_failures;
    }
    return j;
}

json to_json(const harness::InequalityReport& r) {
    return {
        {"design", r.design_id},
        {"link", to_string(r.link)},
        {"envelope_constant", r.envelope_constant},
        {"checks", r.checks},
        {"failures", r.failures},
        {"worst_log_margin", r.worst_log_margin},
        {"ok", r.ok()},
    };
}

json to_json(const harness::ExistenceReport& r) {
    json links = json::array();
    for (const auto& l : r.links) {
        links.push_back({
            {"link", to_string(l.link)},
            {"mle_status", to_string(l.mle_status)},
            {"mle_beta_norm", l.mle_beta_norm},
            {"penalized_status", to_string(l.penalized_status)},
            {"beta_hat", vec(l.beta_hat)},
            {"beta_hat_norm", l.beta_hat_norm},
            {"grad_norm", l.grad_norm},
            {"objective", l.sphere.objective},
            {"threshold", l.sphere.threshold},
            {"max_far_objective", l.sphere.max_far},
            {"sphere_restriction_ok", l.sphere.above_threshold && l.sphere.beats_far},
            {"ok", l.ok},
        });
    }
    return {
        {"dataset", r.dataset_id},
        {"separated", r.separated},
        {"separation", to_string(r.separation)},
        {"links", links},
        {"ok", r.ok()},
    };
}

json to_json(const harness::VerificationReport& r) {
    const auto list = [](const auto& items) {
        json arr = json::array();
        for (const auto& item : items) arr.push_back(to_json(item));
        return arr;
    };
    return {
        {"seed", r.seed},
        {"ok", r.ok()},
        {"envelopes", list(r.envelopes)},
        {"decay", list(r.decays)},
        {"inequalities", list(r.inequalities)},
        {"existence", list(r.existence)},
    };
}

struct LoadedData {
    Dataset ds;
    std::vector<std::string> names;
};

LoadedData load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    CsvTable table = parse_csv(in);
    return {validate_dataset(table.rows), std::move(table.covariate_names)};
}

json data_json(const LoadedData& d) {
    return {{"n", d.ds.n()}, {"p", d.ds.p()}, {"rank", d.ds.rank()}, {"covariates", d.names}};
}

void emit(const RunSpec& spec, const json& doc, std::ostream& out) {
    const std::string text = dump_json(doc);
    if (spec.out) {
        std::ofstream file(*spec.out, std::ios::binary | std::ios::trunc);
        if (!file || !(file << text) || !file.flush()) throw std::runtime_error("cannot write '" + *spec.out + "'");
    } else {
        out << text;
        out.flush();
    }
}

json header(const RunSpec& spec) { return {{"schema", kSchemaVersion}, {"run", spec.to_json()}}; }

int run_fit(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    const LoadedData data = load(*spec.input);
    data.ds.require_full_rank();
    FitConfig cfg;
    cfg.grad_tol = spec.tol;
    cfg.max_iter = spec.max_iter;
    const FitResult fit = spec.penalized ? fit_penalized(data.ds, spec.link, cfg) : fit_mle(data.ds, spec.link, cfg);
    const SeparationReport sep = detect_separation(data.ds);

    json doc = header(spec);
    doc["data"] = data_json(data);
    doc["fit"] = to_json(fit);
    doc["separation"] = to_json(sep);
    emit(spec, doc, out);

    err << (spec.penalized ? "penalized" : "unpenalized") << ' ' << to_string(spec.link) << " fit: "
        << to_string(fit.status) << " after " << fit.iterations << " iterations, |grad| = " << fit.grad_norm
        << ", separation: " << to_string(sep.kind) << '\n';
    return fit.status == FitStatus::Converged ? kExitOk : kExitNotConverged;
}

int run_check_separation(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    const LoadedData data = load(*spec.input);
    const SeparationReport sep = detect_separation(data.ds);
    json doc = header(spec);
    doc["data"] = data_json(data);
    doc["separation"] = to_json(sep);
    emit(spec, doc, out);
    err << "separation: " << to_string(sep.kind) << '\n';
    return kExitOk;
}

int run_verify(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    std::optional<Dataset> extra;
    json data;
    if (spec.input) {
        LoadedData loaded = load(*spec.input);
        loaded.ds.require_full_rank();
        data = data_json(loaded);
        extra = std::move(loaded.ds);
    }
    const harness::VerificationReport rep = harness::run_verification(spec.seed, extra);
    json doc = header(spec);
    if (extra) doc["data"] = data;
    doc["verification"] = to_json(rep);
    emit(spec, doc, out);

    const auto failed = [](const auto& items) {
        return std::count_if(items.begin(), items.end(), [](const auto& r) { return !r.ok(); });
    };
    err << "verify (seed " << spec.seed << "): " << (rep.ok() ? "all checks passed" : "FAILED")
        << " [envelope " << failed(rep.envelopes) << ", decay " << failed(rep.decays) << ", inequality "
        << failed(rep.inequalities) << ", existence " << failed(rep.existence) << " failing]\n";
    return rep.ok() ? kExitOk : kExitNotConverged;
}

}  // namespace

json RunSpec::to_json() const {
    json j{
        {"subcommand", subcommand_name(subcommand)},
        {"input", input ? json(*input) : json(nullptr)},
        {"out", out ? json(*out) : json(nullptr)},
    };
    if (subcommand == Subcommand::Fit) {
        j["link"] = to_string(link);
        j["penalized"] = penalized;
        j["tol"] = tol;
        j["max_iter"] = max_iter;
    }
    if (subcommand == Subcommand::Verify) j["seed"] = seed;
    return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Jeffreys-prior penalized binomial regression"};
    app.name("firth");
    app.require_subcommand(1);

    RunSpec spec;
    std::string link_name = "logit";
    std::string input, out_path;
    bool no_penalty = false;

    CLI::App* fit = app.add_subcommand("fit", "fit a binomial regression model");
    fit->add_option("input", input, "CSV file with header y,m,x1,...,xp")->required();
    fit->add_option("--link", link_name, "logit, probit or cloglog")
        ->check(CLI::IsMember({"logit", "probit", "cloglog"}));
    fit->add_flag("--no-penalty", no_penalty, "maximize the plain likelihood");
    fit->add_option("--tol", spec.tol, "gradient tolerance (infinity norm)")->check(CLI::PositiveNumber);
    fit->add_option("--max-iter", spec.max_iter, "iteration limit")->check(CLI::PositiveNumber);
    fit->add_option("--out", out_path, "write JSON here instead of standard output");

    CLI::App* sep = app.add_subcommand("check-separation", "look for a separating direction");
    sep->add_option("input", input, "CSV file with header y,m,x1,...,xp")->required();
    sep->add_option("--out", out_path, "write JSON here instead of standard output");

    CLI::App* verify = app.add_subcommand("verify", "run the numerical verification suite");
    verify->add_option("input", input, "optional CSV file checked alongside the built-in designs");
    verify->add_option("--seed", spec.seed, "seed for sampled directions and generated data");
    verify->add_option("--out", out_path, "write JSON here instead of standard output");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitDataError;
    }

    if (fit->parsed()) spec.subcommand = Subcommand::Fit;
    else if (sep->parsed()) spec.subcommand = Subcommand::CheckSeparation;
    else spec.subcommand = Subcommand::Verify;
    if (!input.empty()) spec.input = input;
    if (!out_path.empty()) spec.out = out_path;
    spec.link = parse_link(link_name);
    spec.penalized = !no_penalty;

    try {
        switch (spec.subcommand) {
        case Subcommand::Fit: return run_fit(spec, out, err);
        case Subcommand::CheckSeparation: return run_check_separation(spec, out, err);
        case Subcommand::Verify: return run_verify(spec, out, err);
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.code()) {
        case ErrorCode::NonIntegerCount:
        case ErrorCode::CountOutOfRange:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::EmptyData:
        case ErrorCode::NonFiniteInput:
        case ErrorCode::RankDeficient:
        case ErrorCode::InvalidArgument:
        case ErrorCode::ZeroRowNorm:
            return kExitDataError;
        default:
            return kExitInternal;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace firth::cli

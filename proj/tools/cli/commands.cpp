#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "format.hpp"
#include "method.hpp"
#include "plot.hpp"
#include "survscore/censim.hpp"
#include "survscore/error.hpp"
#include "survscore/km.hpp"
#include "survscore/kmtest.hpp"
#include "survscore/permute.hpp"
#include "survscore/pseudo.hpp"
#include "survscore/survdata.hpp"
#include "survscore/wlrt.hpp"

namespace survscore::cli {

namespace {

using json = nlohmann::ordered_json;

struct GlobalOptions {
    std::string input;
    std::string output = "-";
    std::string format;  // csv|json; each command has its own default
};

struct PermOptions {
    std::string mode;  // "", exact, mc
    std::uint64_t replicates = 10'000;
    std::uint64_t seed = 20240101;
    unsigned threads = 0;
};

// Rounded to the printed precision so JSON and CSV agree.
double round6(double v) {
    if (!std::isfinite(v)) return v;
    return std::stod(format_number(v));
}

json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round6(v);
}

void emit(const GlobalOptions& g, const std::string& text, std::ostream& out) {
    if (g.output.empty() || g.output == "-") {
        out << text;
        return;
    }
    std::ofstream f(g.output, std::ios::binary);
    if (!f) throw Error("cannot write '" + g.output + "'");
    f << text;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    f << text;
}

TrialDataset load(const GlobalOptions& g) {
    if (g.input.empty()) throw Error("--input is required");
    return read_dataset(g.input);
}

std::string resolved_format(const GlobalOptions& g, const std::string& fallback) {
    const std::string f = g.format.empty() ? fallback : g.format;
    if (f != "csv" && f != "json") throw Error("--format must be csv or json");
    return f;
}

// Rows of named numeric columns rendered as CSV or as a JSON array of objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // already formatted

    std::string render(const std::string& format) const {
        if (format == "csv") {
            std::string out;
            for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
            out += "\n";
            for (const auto& row : rows) {
                for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_field(row[c]);
                out += "\n";
            }
            return out;
        }
        json arr = json::array();
        for (const auto& row : rows) {
            json obj = json::object();
            for (std::size_t c = 0; c < columns.size(); ++c) {
                const std::string& cell = row[c];
                char* end = nullptr;
                const double v = std::strtod(cell.c_str(), &end);
                if (!cell.empty() && end == cell.c_str() + cell.size()) {
                    obj[columns[c]] = v;
                } else {
                    obj[columns[c]] = cell;
                }
            }
            arr.push_back(std::move(obj));
        }
        return arr.dump(2) + "\n";
    }
};

std::vector<std::string> subject_cells(const Subject& s) {
    return {format_number(s.time), s.arm == Arm::experimental ? "1" : "0", s.event ? "1" : "0"};
}

void add_method_flags(CLI::App* sub, MethodOptions& m) {
    sub->add_option("--rho", m.rho, "Fleming-Harrington rho")->capture_default_str();
    sub->add_option("--gamma", m.gamma, "Fleming-Harrington gamma")->capture_default_str();
    sub->add_option("--sstar", m.sstar, "modest weighting cap s*")->capture_default_str();
}

void add_estimand_flags(CLI::App* sub, MethodOptions& m) {
    sub->add_option("--tau", m.tau, "restriction time (rmst, ahsw)");
    sub->add_option("--kappa", m.kappa, "milestone time");
    sub->add_option("--tau1", m.tau1, "window start (wmst)");
    sub->add_option("--tau2", m.tau2, "window end (wmst)");
    sub->add_option("--backend", m.backend, "survival estimator")
        ->check(CLI::IsMember({"km", "exp", "pwexp"}))
        ->capture_default_str();
    sub->add_option("--breakpoints", m.breakpoints, "piecewise-exponential breakpoints, comma separated")
        ->capture_default_str();
    sub->add_option("--pooling", m.pooling, "fit per arm or pooled")
        ->check(CLI::IsMember({"arm", "pooled"}))
        ->capture_default_str();
    sub->add_flag("--linear", m.linear_ahsw, "report AHSW on the ratio scale instead of log");
}

// --- km -------------------------------------------------------------------

void cmd_km(const GlobalOptions& g, bool pooled, std::ostream& out) {
    const TrialDataset ds = load(g);
    Table t{{"time", "survival", "arm"}, {}};
    const auto add_curve = [&](const TrialDataset& part, const std::string& label) {
        if (part.empty()) return;
        t.rows.push_back({"0", "1", label});
        if (part.event_count() == 0) return;
        const StepSurvival s = km_fit(part);
        for (std::size_t m = 0; m < s.times().size(); ++m) {
            t.rows.push_back({format_number(s.times()[m]), format_number(s.values()[m]), label});
        }
    };
    if (pooled) {
        add_curve(ds, "pooled");
    } else {
        const auto [control, experimental] = split_by_arm(ds);
        add_curve(control, "0");
        add_curve(experimental, "1");
    }
    emit(g, t.render(resolved_format(g, "csv")), out);
}

// --- scores ---------------------------------------------------------------

void cmd_scores(const GlobalOptions& g, MethodOptions m, bool with_table, std::ostream& out) {
    const TrialDataset ds = load(g);
    const auto spec = std::get<WeightSpec>(to_method_spec(m));
    const RiskTable rt = build_risk_table(ds);
    const StepSurvival pooled = km_fit(ds);
    const auto weights = compute_weights(rt, pooled, spec);
    const ScoreSet scores = standardize(compute_scores(ds, rt, weights, spec));

    Table t{{"time", "arm", "event", "weight", "score", "scaled_score"}, {}};
    if (with_table) {
        for (const char* c : {"at_risk", "events", "censored", "survival"}) t.columns.emplace_back(c);
    }
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const Subject& s = ds[k];
        const double surv = pooled.left(s.time);
        auto row = subject_cells(s);
        row.push_back(format_number(spec.weight(surv)));
        row.push_back(format_number(scores.raw[k]));
        row.push_back(format_number(scores.scaled[k]));
        if (with_table) {
            int at_risk = 0;
            int events = 0;
            int censored = 0;
            for (const auto& other : ds.subjects()) {
                if (other.time >= s.time) ++at_risk;
                if (other.time == s.time) ++(other.event ? events : censored);
            }
            row.push_back(std::to_string(at_risk));
            row.push_back(std::to_string(s.event ? events : 0));
            row.push_back(std::to_string(s.event ? 0 : censored));
            row.push_back(format_number(surv));
        }
        t.rows.push_back(std::move(row));
    }
    emit(g, t.render(resolved_format(g, "csv")), out);
}

// --- pseudo ---------------------------------------------------------------

void cmd_pseudo(const GlobalOptions& g, const MethodOptions& m, bool with_table, std::ostream& out) {
    const TrialDataset ds = load(g);
    const EstimandSpec spec = to_estimand_spec(m, m.estimand);
    const PseudoSet ps = standardize_pseudo(pseudo_values(ds, spec));

    Table t{{"time", "arm", "event", "pseudo", "scaled_pseudo"}, {}};
    if (with_table) t.columns.emplace_back("loo_estimate");
    for (std::size_t k = 0; k < ds.size(); ++k) {
        auto row = subject_cells(ds[k]);
        row.push_back(format_number(ps.values[k]));
        row.push_back(format_number(ps.scaled[k]));
        if (with_table) row.push_back(format_number(ps.loo_estimates[k]));
        t.rows.push_back(std::move(row));
    }
    emit(g, t.render(resolved_format(g, "csv")), out);
}

// --- test -----------------------------------------------------------------

void cmd_test(const GlobalOptions& g, const MethodOptions& m, const PermOptions& perm, bool flip,
              std::ostream& out) {
    const TrialDataset ds = load(g);
    ds.require_two_arms();

    TestResult result;
    std::vector<double> values;  // per-subject values for permutation inference
    Direction direction = Direction::lower;
    std::optional<double> var_perm;

    if (m.method == "rmst" || m.method == "milestone") {
        if (m.method == "rmst") {
            if (!m.tau) throw Error("--tau is required for rmst");
            result = rmst_test(ds, *m.tau);
        } else {
            if (!m.kappa) throw Error("--kappa is required for milestone");
            result = milestone_test(ds, *m.kappa);
        }
        if (!perm.mode.empty()) {
            throw Error("permutation inference needs per-subject values; use --method pseudo --estimand " +
                        m.method);
        }
    } else {
        const MethodSpec spec = to_method_spec(m);
        if (const auto* w = std::get_if<WeightSpec>(&spec)) {
            auto test = wlrt_test(ds, *w);
            result = std::move(test.result);
            values = std::move(test.scores.raw);
            var_perm = perm_moments(values, ds.experimental_count()).var_sum;
        } else {
            const auto& e = std::get<EstimandSpec>(spec);
            const PseudoSet ps = pseudo_values(ds, e);
            result = pseudo_test(ps, ds.arms());
            values = ps.values;
            direction = larger_is_better(e.estimand) ? Direction::upper : Direction::lower;
        }
    }

    if (flip) {
        result.p_one_sided = 1.0 - result.p_one_sided;
        direction = direction == Direction::lower ? Direction::upper : Direction::lower;
    }

    json j = json::object();
    j["method"] = result.method;
    j["statistic"] = json_number(result.statistic);
    j["variance"] = json_number(result.variance);
    j["z"] = json_number(result.z);
    j["p_one_sided"] = json_number(result.p_one_sided);
    j["warnings"] = result.warnings;
    j["direction"] = flip ? "reversed" : "default";
    if (var_perm) j["variance_permutation"] = json_number(*var_perm);

    std::optional<PermutationResult> pr;
    if (!perm.mode.empty()) {
        PermutationPlan plan;
        if (perm.mode == "exact") {
            plan.mode = PermutationPlan::Mode::exact;
        } else if (perm.mode == "mc") {
            plan.mode = PermutationPlan::Mode::monte_carlo;
        } else {
            throw Error("--perm must be exact or mc");
        }
        plan.replicates = perm.replicates;
        plan.seed = perm.seed;
        plan.threads = perm.threads;
        plan.direction = direction;
        pr = permutation_p(values, ds.arms(), plan);

        json pj = json::object();
        pj["mode"] = perm.mode;
        pj["p"] = json_number(pr->p);
        pj["extreme"] = pr->extreme;
        pj["total"] = pr->total;
        if (plan.mode == PermutationPlan::Mode::monte_carlo) {
            pj["standard_error"] = json_number(pr->standard_error);
            pj["seed"] = perm.seed;
        }
        j["permutation"] = std::move(pj);
    }

    if (resolved_format(g, "json") == "json") {
        emit(g, j.dump(2) + "\n", out);
        return;
    }
    Table t{{"method", "statistic", "variance", "z", "p_one_sided"}, {}};
    t.rows.push_back({result.method, format_number(result.statistic), format_number(result.variance),
                      format_number(result.z), format_number(result.p_one_sided)});
    if (pr) {
        t.columns.emplace_back("p_permutation");
        t.rows.back().push_back(format_number(pr->p));
    }
    emit(g, t.render("csv"), out);
}

// --- censor ---------------------------------------------------------------

void cmd_censor(const GlobalOptions& g, double c_max, std::uint64_t seed, std::ostream& out) {
    const TrialDataset ds = load(g);
    emit(g, format_dataset(inject_censoring(ds, c_max, seed)), out);
}

// --- plot / compare -------------------------------------------------------

std::filesystem::path require_svg_output(const GlobalOptions& g) {
    if (g.output.empty() || g.output == "-") throw Error("--output <file.svg> is required");
    return g.output;
}

void write_panels(const GlobalOptions& g, const std::vector<PlotPanel>& panels) {
    const auto svg_path = require_svg_output(g);
    auto csv_path = svg_path;
    csv_path.replace_extension(".csv");
    if (csv_path == svg_path) csv_path += ".csv";
    write_file(svg_path, render_svg(panels));
    write_file(csv_path, plot_data_csv(panels));
}

void cmd_plot(const GlobalOptions& g, const MethodOptions& m) {
    const TrialDataset ds = load(g);
    const auto values = standardized_values(ds, to_method_spec(m));
    write_panels(g, {make_panel(ds, values.title, values.standardized)});
}

void cmd_compare(const GlobalOptions& g, const std::vector<std::string>& panel_specs) {
    if (panel_specs.size() < 2) throw Error("compare needs at least two --panel specs");
    const TrialDataset ds = load(g);
    std::vector<PlotPanel> panels;
    for (const auto& text : panel_specs) {
        const auto values = standardized_values(ds, parse_method_spec(text));
        panels.push_back(make_panel(ds, values.title, values.standardized));
    }
    write_panels(g, panels);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"survscore: weighted log-rank scores and survival pseudo-values on a common scale"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("-i,--input", g.input, "input CSV with header time,arm,event");
    app.add_option("-o,--output", g.output, "output path ('-' for stdout)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    MethodOptions m;
    bool table = false;
    bool pooled_km = false;

    auto* km = app.add_subcommand("km", "Kaplan-Meier curves as time,survival,arm");
    km->add_flag("--pooled", pooled_km, "one curve over both arms");

    auto* scores = app.add_subcommand("scores", "per-subject weighted log-rank scores");
    scores->add_option("--test", m.method, "weighting")
        ->check(CLI::IsMember({"logrank", "fh", "mw"}))
        ->capture_default_str();
    add_method_flags(scores, m);
    scores->add_flag("--table", table, "append at_risk,events,censored,survival columns");

    auto* pseudo = app.add_subcommand("pseudo", "per-subject jackknife pseudo-values");
    pseudo->add_option("--estimand", m.estimand, "estimand")
        ->check(CLI::IsMember({"rmst", "milestone", "wmst", "ahsw"}))
        ->capture_default_str();
    add_estimand_flags(pseudo, m);
    pseudo->add_flag("--table", table, "append the leave-one-out estimate column");

    PermOptions perm;
    bool flip = false;
    auto* test = app.add_subcommand("test", "run one test and report a JSON result");
    test->add_option("--method", m.method, "test")
        ->check(CLI::IsMember({"rmst", "milestone", "logrank", "fh", "mw", "pseudo"}))
        ->required();
    test->add_option("--estimand", m.estimand, "estimand for --method pseudo")
        ->check(CLI::IsMember({"rmst", "milestone", "wmst", "ahsw"}));
    add_method_flags(test, m);
    add_estimand_flags(test, m);
    test->add_option("--perm", perm.mode, "permutation p-value")->check(CLI::IsMember({"exact", "mc"}));
    test->add_option("--replicates", perm.replicates, "Monte Carlo replicates")->capture_default_str();
    test->add_option("--seed", perm.seed, "Monte Carlo seed")->capture_default_str();
    test->add_option("--threads", perm.threads, "Monte Carlo threads (0 = all cores)");
    test->add_flag("--flip", flip, "reverse the one-sided direction");

    double c_max = 26.0;
    std::uint64_t censor_seed = 1;
    auto* censor = app.add_subcommand("censor", "add Uniform(0, max) censoring");
    censor->add_option("--max", c_max, "upper bound of the censoring distribution")->capture_default_str();
    censor->add_option("--seed", censor_seed, "generator seed")->capture_default_str();

    auto* plot = app.add_subcommand("plot", "SVG of standardized scores against time");
    plot->add_option("--method", m.method, "method")
        ->check(CLI::IsMember({"logrank", "fh", "mw", "pseudo", "rmst", "milestone", "wmst", "ahsw"}))
        ->capture_default_str();
    plot->add_option("--estimand", m.estimand, "estimand for --method pseudo");
    add_method_flags(plot, m);
    add_estimand_flags(plot, m);

    std::vector<std::string> panel_specs;
    auto* compare = app.add_subcommand("compare", "multi-panel SVG comparing methods");
    compare->add_option("--panel", panel_specs, "method spec, e.g. logrank, mw:sstar=0.5, milestone:kappa=18")
        ->required();

    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("survscore");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "survscore: error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*km) cmd_km(g, pooled_km, out);
        else if (*scores) cmd_scores(g, m, table, out);
        else if (*pseudo) cmd_pseudo(g, m, table, out);
        else if (*test) cmd_test(g, m, perm, flip, out);
        else if (*censor) cmd_censor(g, c_max, censor_seed, out);
        else if (*plot) cmd_plot(g, m);
        else if (*compare) cmd_compare(g, panel_specs);
    } catch (const std::exception& e) {
        err << "survscore: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace survscore::cli

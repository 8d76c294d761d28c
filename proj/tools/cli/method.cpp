#include "method.hpp"

#include <charconv>
#include <cmath>

#include "survscore/error.hpp"

namespace survscore::cli {

namespace {

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw Error("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return v;
}

double require(const std::optional<double>& v, std::string_view flag, std::string_view estimand) {
    if (!v) throw Error("--" + std::string(flag) + " is required for " + std::string(estimand));
    return *v;
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text, char separator) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = text.find(separator, start);
        out.push_back(parse_number(text.substr(start, pos == std::string_view::npos ? pos : pos - start),
                                   "breakpoints"));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

EstimandSpec to_estimand_spec(const MethodOptions& opts, std::string_view estimand) {
    EstimandSpec spec;
    if (estimand == "rmst") {
        spec.estimand = Rmst{require(opts.tau, "tau", estimand)};
    } else if (estimand == "milestone") {
        spec.estimand = Milestone{require(opts.kappa, "kappa", estimand)};
    } else if (estimand == "wmst") {
        spec.estimand = Wmst{require(opts.tau1, "tau1", estimand), require(opts.tau2, "tau2", estimand)};
    } else if (estimand == "ahsw") {
        spec.estimand = Ahsw{require(opts.tau, "tau", estimand), !opts.linear_ahsw};
    } else {
        throw Error("unknown estimand '" + std::string(estimand) + "'");
    }

    if (opts.backend == "km") {
        spec.backend = Backend::km;
    } else if (opts.backend == "exp") {
        spec.backend = Backend::exponential;
    } else if (opts.backend == "pwexp") {
        spec.backend = Backend::piecewise;
        spec.breakpoints = parse_number_list(opts.breakpoints, ',');
    } else {
        throw Error("unknown backend '" + opts.backend + "' (expected km, exp or pwexp)");
    }

    if (opts.pooling == "arm") {
        spec.pooling = Pooling::per_arm;
    } else if (opts.pooling == "pooled") {
        spec.pooling = Pooling::pooled;
    } else {
        throw Error("unknown pooling '" + opts.pooling + "' (expected arm or pooled)");
    }
    spec.validate();
    return spec;
}

MethodSpec to_method_spec(const MethodOptions& opts) {
    const auto& m = opts.method;
    if (m == "logrank") return WeightSpec::logrank();
    if (m == "fh") return WeightSpec::fleming_harrington(opts.rho, opts.gamma);
    if (m == "mw") return WeightSpec::modest(opts.sstar);
    if (m == "pseudo") return to_estimand_spec(opts, opts.estimand);
    if (m == "rmst" || m == "milestone" || m == "wmst" || m == "ahsw") return to_estimand_spec(opts, m);
    throw Error("unknown method '" + m + "'");
}

MethodSpec parse_method_spec(std::string_view text) {
    MethodOptions opts;
    const std::size_t colon = text.find(':');
    opts.method = std::string(text.substr(0, colon));
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const std::size_t comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);

            const std::size_t eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw Error("panel option '" + std::string(item) + "' is not key=value");
            }
            const std::string key(item.substr(0, eq));
            const std::string_view value = item.substr(eq + 1);
            if (key == "rho") {
                opts.rho = parse_number(value, key);
            } else if (key == "gamma") {
                opts.gamma = parse_number(value, key);
            } else if (key == "sstar") {
                opts.sstar = parse_number(value, key);
            } else if (key == "estimand") {
                opts.estimand = std::string(value);
            } else if (key == "tau") {
                opts.tau = parse_number(value, key);
            } else if (key == "kappa") {
                opts.kappa = parse_number(value, key);
            } else if (key == "tau1") {
                opts.tau1 = parse_number(value, key);
            } else if (key == "tau2") {
                opts.tau2 = parse_number(value, key);
            } else if (key == "backend") {
                opts.backend = std::string(value);
            } else if (key == "breakpoints") {
                std::string list(value);
                for (char& c : list) {
                    if (c == '/') c = ',';
                }
                opts.breakpoints = list;
            } else if (key == "pooling") {
                opts.pooling = std::string(value);
            } else if (key == "log") {
                opts.linear_ahsw = value == "0" || value == "false";
            } else {
                throw Error("unknown panel option '" + key + "'");
            }
        }
    }
    return to_method_spec(opts);
}

std::string describe(const MethodSpec& spec) {
    return std::visit([](const auto& s) { return s.describe(); }, spec);
}

MethodValues standardized_values(const TrialDataset& ds, const MethodSpec& spec) {
    MethodValues out;
    out.title = describe(spec);
    if (const auto* w = std::get_if<WeightSpec>(&spec)) {
        auto test = wlrt_test(ds, *w);
        if (test.scores.scaled.empty()) throw Error("degenerate score range");
        out.standardized = std::move(test.scores.scaled);
    } else {
        out.standardized = standardize_pseudo(pseudo_values(ds, std::get<EstimandSpec>(spec))).scaled;
    }
    return out;
}

}  // namespace survscore::cli

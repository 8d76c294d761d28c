#pragma once

// Selecting a scoring method from command-line options or a compact panel
// spec such as "mw:sstar=0.5" or "milestone:kappa=18,backend=pwexp".

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "survscore/pseudo.hpp"
#include "survscore/survdata.hpp"
#include "survscore/wlrt.hpp"

namespace survscore::cli {

using MethodSpec = std::variant<WeightSpec, EstimandSpec>;

struct MethodOptions {
    std::string method = "logrank";  // logrank|fh|mw|pseudo|rmst|milestone|wmst|ahsw
    double rho = 0.0;
    double gamma = 1.0;
    double sstar = 0.5;
    std::string estimand = "rmst";  // used when method == "pseudo"
    std::optional<double> tau;
    std::optional<double> kappa;
    std::optional<double> tau1;
    std::optional<double> tau2;
    std::string backend = "km";  // km|exp|pwexp
    std::string breakpoints = "2,4,6,8";
    std::string pooling = "arm";  // arm|pooled
    bool linear_ahsw = false;
};

MethodSpec to_method_spec(const MethodOptions& opts);
EstimandSpec to_estimand_spec(const MethodOptions& opts, std::string_view estimand);

/// "name[:key=value[,key=value...]]"; breakpoints inside a spec use '/'.
MethodSpec parse_method_spec(std::string_view text);

std::string describe(const MethodSpec& spec);

std::vector<double> parse_number_list(std::string_view text, char separator);

struct MethodValues {
    std::string title;
    std::vector<double> standardized;  // score orientation: low = good outcome
};

MethodValues standardized_values(const TrialDataset& ds, const MethodSpec& spec);

}  // namespace survscore::cli

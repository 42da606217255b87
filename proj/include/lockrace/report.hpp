#pragma once

#include <optional>
#include <string>

namespace lockrace {

enum class EvalMethod { closed_form, quadrature, monte_carlo };

std::string to_string(EvalMethod m);
EvalMethod eval_method_from_string(const std::string& s);

// Per-agent valuation of a strategy profile.
struct UtilityReport {
    double success_prob = 0.0;   // P(win the reward)
    double expected_cost = 0.0;  // E[ā(d)], time-integrated rate units
    double utility = 0.0;        // success_prob - nu * expected_cost
    EvalMethod method = EvalMethod::closed_form;
    std::optional<double> std_error;  // monte_carlo only (stderr of utility)
};

}  // namespace lockrace

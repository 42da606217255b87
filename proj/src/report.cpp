#include "lockrace/report.hpp"

#include <stdexcept>

namespace lockrace {

std::string to_string(EvalMethod m) {
    switch (m) {
        case EvalMethod::closed_form: return "closed_form";
        case EvalMethod::quadrature: return "quadrature";
        case EvalMethod::monte_carlo: return "monte_carlo";
    }
    return "closed_form";
}

EvalMethod eval_method_from_string(const std::string& s) {
    if (s == "closed_form") return EvalMethod::closed_form;
    if (s == "quadrature") return EvalMethod::quadrature;
    if (s == "monte_carlo") return EvalMethod::monte_carlo;
    throw std::invalid_argument("unknown evaluation method: " + s);
}

}  // namespace lockrace

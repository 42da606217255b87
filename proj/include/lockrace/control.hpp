#pragma once

#include <cstddef>
#include <vector>

namespace lockrace {

// Piecewise-constant rate process on [0, span); identically zero outside.
// Right-continuous: level k applies on [t_k, t_{k+1}).  Immutable.
class PiecewiseConstantControl {
  public:
    PiecewiseConstantControl();  // span 0, no segments
    // breakpoints strictly increasing, starting at 0; levels.size() + 1 == breakpoints.size().
    PiecewiseConstantControl(std::vector<double> breakpoints, std::vector<double> levels);

    static PiecewiseConstantControl constant(double level, double span);
    static PiecewiseConstantControl zero(double span);

    double rate_at(double t) const;     // a(t); 0 for t < 0 or t >= span
    double cumulative(double t) const;  // ā(t) = ∫₀^min(t,span) a, exact
    double span() const { return span_; }
    double max_level() const;
    std::size_t segments() const { return levels_.size(); }
    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& levels() const { return levels_; }

    // Restriction to [from, span], re-based to start at 0.
    PiecewiseConstantControl tail(double from) const;

    bool is_zero() const;

  private:
    std::vector<double> breaks_;  // t_0 = 0 < t_1 < ... < t_n = span
    std::vector<double> levels_;  // value on [t_k, t_{k+1})
    std::vector<double> cum_;     // ā(t_k)
    double span_ = 0.0;
};

// ā(t) as a free function, matching the model-layer operation name.
double cumulative_rate(const PiecewiseConstantControl& a, double t);

// Γ(psi) on [0, span]: rate beta on [0, psi), silent afterwards.
PiecewiseConstantControl make_threshold_control(double psi, double beta, double span);

// Γ(psi): run at the full rate until psi, then stop.
struct ThresholdPolicy {
    double psi = 0.0;
    double rate = 0.0;
    PiecewiseConstantControl control(double span) const {
        return make_threshold_control(psi, rate, span);
    }
};

}  // namespace lockrace

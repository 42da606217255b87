#include "lockrace/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lockrace {

PiecewiseConstantControl::PiecewiseConstantControl() : breaks_{0.0}, cum_{0.0} {}

PiecewiseConstantControl::PiecewiseConstantControl(std::vector<double> breakpoints,
                                                   std::vector<double> levels)
    : breaks_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (breaks_.empty() || breaks_.front() != 0.0)
        throw std::invalid_argument("control breakpoints must start at 0");
    if (breaks_.size() != levels_.size() + 1)
        throw std::invalid_argument("control needs one level per breakpoint interval");
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
        if (!(breaks_[k] < breaks_[k + 1]))
            throw std::invalid_argument("control breakpoints must be strictly increasing");
    }
    for (double v : levels_) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("control levels must be finite and non-negative");
    }
    span_ = breaks_.back();
    cum_.resize(breaks_.size());
    cum_[0] = 0.0;
    for (std::size_t k = 0; k < levels_.size(); ++k)
        cum_[k + 1] = cum_[k] + levels_[k] * (breaks_[k + 1] - breaks_[k]);
}

PiecewiseConstantControl PiecewiseConstantControl::constant(double level, double span) {
    if (span <= 0.0) return PiecewiseConstantControl{};
    return PiecewiseConstantControl({0.0, span}, {level});
}

PiecewiseConstantControl PiecewiseConstantControl::zero(double span) {
    return constant(0.0, span);
}

double PiecewiseConstantControl::rate_at(double t) const {
    if (t < 0.0 || t >= span_ || levels_.empty()) return 0.0;
    // index of the segment containing t (right-continuous)
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return levels_[k];
}

double PiecewiseConstantControl::cumulative(double t) const {
    if (t <= 0.0 || levels_.empty()) return 0.0;
    if (t >= span_) return cum_.back();
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return cum_[k] + levels_[k] * (t - breaks_[k]);
}

double PiecewiseConstantControl::max_level() const {
    double m = 0.0;
    for (double v : levels_) m = std::max(m, v);
    return m;
}

PiecewiseConstantControl PiecewiseConstantControl::tail(double from) const {
    if (from <= 0.0) return *this;
    if (from >= span_) return PiecewiseConstantControl{};
    std::vector<double> br{0.0}, lv;
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        if (breaks_[k + 1] <= from) continue;
        lv.push_back(levels_[k]);
        br.push_back(breaks_[k + 1] - from);
    }
    return PiecewiseConstantControl(std::move(br), std::move(lv));
}

bool PiecewiseConstantControl::is_zero() const {
    for (double v : levels_)
        if (v != 0.0) return false;
    return true;
}

double cumulative_rate(const PiecewiseConstantControl& a, double t) {
    if (t < 0.0) throw std::invalid_argument("cumulative_rate requires t >= 0");
    return a.cumulative(t);
}

PiecewiseConstantControl make_threshold_control(double psi, double beta, double span) {
    if (!(psi >= 0.0) || !(beta >= 0.0) || !(span >= 0.0))
        throw std::invalid_argument("make_threshold_control requires non-negative psi, beta, span");
    if (psi > span) throw std::invalid_argument("make_threshold_control requires psi <= span");
    if (span == 0.0) return PiecewiseConstantControl{};
    if (psi == 0.0) return PiecewiseConstantControl::zero(span);
    if (psi >= span) return PiecewiseConstantControl::constant(beta, span);
    return PiecewiseConstantControl({0.0, psi, span}, {beta, 0.0});
}

}  // namespace lockrace

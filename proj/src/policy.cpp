#include "lockrace/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace lockrace {

StageTwoPlan::StageTwoPlan(Kind k, double rate, Maker maker)
    : kind_(k), rate_(rate), maker_(std::move(maker)) {}

StageTwoPlan StageTwoPlan::silent() { return StageTwoPlan(Kind::silent, 0.0, {}); }

StageTwoPlan StageTwoPlan::full_on(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("full_on plan requires beta > 0");
    return StageTwoPlan(Kind::full_on, beta, {});
}

StageTwoPlan StageTwoPlan::custom(Maker maker) {
    if (!maker) throw std::invalid_argument("custom plan requires a maker");
    return StageTwoPlan(Kind::custom, 0.0, std::move(maker));
}

PiecewiseConstantControl StageTwoPlan::control_for(double tau, double horizon) const {
    double residual = horizon - tau;
    if (residual < 0.0) throw std::invalid_argument("stage-2 plan queried beyond the horizon");
    switch (kind_) {
        case Kind::silent:
            return PiecewiseConstantControl::zero(residual);
        case Kind::full_on:
            return PiecewiseConstantControl::constant(rate_, residual);
        case Kind::custom: {
            PiecewiseConstantControl c = maker_(tau, residual);
            if (std::abs(c.span() - residual) > 1e-12 * (1.0 + residual))
                throw std::invalid_argument("stage-2 plan produced a control with the wrong span");
            return c;
        }
    }
    return PiecewiseConstantControl{};
}

TwoStagePolicy TwoStagePolicy::gamma2(double psi, double beta, double horizon) {
    TwoStagePolicy pi;
    pi.stage1 = make_threshold_control(psi, beta, horizon);
    pi.on_success = StageTwoPlan::full_on(beta);
    pi.on_failure = StageTwoPlan::silent();
    return pi;
}

TwoStagePolicy TwoStagePolicy::one_lock(const PiecewiseConstantControl& stage1) {
    TwoStagePolicy pi;
    pi.stage1 = stage1;
    return pi;
}

}  // namespace lockrace

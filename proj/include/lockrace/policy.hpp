#pragma once

#include <functional>

#include "lockrace/control.hpp"

namespace lockrace {

// Continuation rule for the second lock: maps the own first-contact time tau
// to the control used on the residual horizon [0, T - tau].
//
// The silent / full_on kinds cover every policy the theorems produce and admit
// closed-form evaluation; custom carries an arbitrary map (evaluated by
// quadrature downstream).
class StageTwoPlan {
  public:
    enum class Kind { silent, full_on, custom };

    // maker(tau, residual) must return a control with span == residual.
    using Maker = std::function<PiecewiseConstantControl(double tau, double residual)>;

    static StageTwoPlan silent();
    static StageTwoPlan full_on(double beta);
    static StageTwoPlan custom(Maker maker);

    // Control for a contact at tau with deadline horizon; span horizon - tau.
    PiecewiseConstantControl control_for(double tau, double horizon) const;

    Kind kind() const { return kind_; }
    double rate() const { return rate_; }

  private:
    StageTwoPlan(Kind k, double rate, Maker maker);
    Kind kind_ = Kind::silent;
    double rate_ = 0.0;
    Maker maker_;
};

// State-dependent two-stage open-loop policy pi = {a_1, a_2(z_2)}.
struct TwoStagePolicy {
    PiecewiseConstantControl stage1;
    StageTwoPlan on_success = StageTwoPlan::silent();
    StageTwoPlan on_failure = StageTwoPlan::silent();

    // Gamma_2(psi): Gamma(psi) at the start; on success at tau, full effort for
    // the remaining horizon; on failure, silence.
    static TwoStagePolicy gamma2(double psi, double beta, double horizon);

    // One-lock policy lifted into the two-stage container (plans unused).
    static TwoStagePolicy one_lock(const PiecewiseConstantControl& stage1);
};

}  // namespace lockrace

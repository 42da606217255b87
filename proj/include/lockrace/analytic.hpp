#pragma once

#include "lockrace/control.hpp"
#include "lockrace/params.hpp"
#include "lockrace/policy.hpp"
#include "lockrace/report.hpp"

namespace lockrace::analytic {

// f(t) = exp(-ā(t)) a(t), density of the contact process.
double contact_density(const PiecewiseConstantControl& a, double t);

// exp(-ā_j(s)): probability the opponent has not contacted the lock by s.
double opponent_survival(const PiecewiseConstantControl& a_j, double s);

// E[ā(d)] with d = min(first contact, horizon):
//   ā(U) e^{-ā(U)} + ∫₀^U ā e^{-ā} a, evaluated per segment in closed form.
double expected_cost(const PiecewiseConstantControl& a, double horizon);

// P₁ = ∫₀^T exp(-ā_j) exp(-ā_i) a_i, per-segment closed form.
double success_prob_one_lock(const PiecewiseConstantControl& a_i,
                             const PiecewiseConstantControl& a_j, double T);

// J = P₁ - nu · expected_cost.
UtilityReport utility_one_lock(const PiecewiseConstantControl& a_i,
                               const PiecewiseConstantControl& a_j, const GameParams& p);

// The same utility through the single-integral form
//   ∫₀^T (e^{-ā_j} - nu ā_i) e^{-ā_i} a_i - nu ā_i(T) e^{-ā_i(T)};
// kept as a separate code path to cross-check the decomposition.
double utility_one_lock_direct(const PiecewiseConstantControl& a_i,
                               const PiecewiseConstantControl& a_j, const GameParams& p);

// Value and optimal action for the uncontested acquisition problem: reward c on
// contact within U, starting effort state x.
struct SilentResponse {
    double value = 0.0;
    double action = 0.0;  // beta if nu <= c, else 0
};
SilentResponse silent_value(double reward, double nu, double beta, double horizon, double x);

// P₂ = ∫₀^T exp(-ā_j(s)) (1 - exp(-ā₂(T-s))) f₁(s) ds with ā₂ taken from
// pi_i.on_success(s).  Closed form for silent/full_on plans; outer adaptive
// quadrature (inner still closed form) for custom plans.
double success_prob_two_lock(const TwoStagePolicy& pi_i,
                             const PiecewiseConstantControl& a_j_stage1, double T);

// J = P₂ - nu (stage-1 cost + expected stage-2 cost).  Only the opponent's
// stage-1 control enters agent i's utility.
UtilityReport utility_two_lock(const TwoStagePolicy& pi_i, const TwoStagePolicy& pi_j,
                               const GameParams& p);

}  // namespace lockrace::analytic

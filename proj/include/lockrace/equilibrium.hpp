#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lockrace/control.hpp"
#include "lockrace/params.hpp"
#include "lockrace/policy.hpp"

namespace lockrace::eq {

struct ConditionCheck {
    std::string name;
    bool applicable = true;  // false when a denominator makes the inequality meaningless
    bool satisfied = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct BestResponseResult {
    ThresholdPolicy policy;
    std::string note;  // branch taken ("full horizon", "theta", "silence (nu >= 1)")
};

struct EquilibriumResult {
    int locks = 1;
    int n_agents = 2;
    std::vector<double> thresholds;  // per agent, original labels
    std::vector<double> rates;       // per agent beta
    std::string regime;
    bool certified = false;
    bool conjectural = false;
    bool boundary_tie = false;
    std::vector<ConditionCheck> conditions;
    std::string oracle_hint;  // suggested certify invocation when uncertified

    ThresholdPolicy threshold_policy(std::size_t agent) const;
    TwoStagePolicy two_stage_policy(std::size_t agent, double horizon) const;
};

// Theorem-2 best response of agent i against Gamma(psi_j).  nu >= 1 yields
// Gamma(0) with a silence note instead of an error.
BestResponseResult best_response_one_lock(double psi_j, const GameParams& p);

// Theorem-3 one-lock Nash equilibrium (agents relabeled internally so that
// beta_j >= beta_i, restored on output).
EquilibriumResult nash_one_lock(const GameParams& p);

// Continuation value of agent i at the second decision epoch against a
// Gamma_2 opponent: (1-nu)(1 - exp(-beta_i (T - tau))) on success, 0 on failure.
double stage2_value(const StageState& z2, const GameParams& p);

enum class Agent { i, j };

// Unique root in [0, T] of
//   F(psi) = exp(-b_opp psi) - exp(-b_own (T - psi) - b_opp psi) - nu/(1-nu),
// by bisection to |F| <= 1e-12 (clamps to 0 when the min saturates at 1).
// Requires nu < 1/2 and exp(-beta_i T) <= (1-2nu)/(1-nu); throws std::domain_error
// naming the applicable regime otherwise.
double solve_psi_fixed_point(const GameParams& p, Agent which);

// The two Theorem-4 inequalities at a candidate threshold pair.
std::vector<ConditionCheck> check_ne_conditions(double psi_i, double psi_j, const GameParams& p);

// Theorem-4 two-lock equilibrium across all regimes; interior candidates are
// certified only when both conditions hold.
EquilibriumResult nash_two_lock(const GameParams& p);

// Symmetric N-player conjecture (always flagged conjectural); requires
// beta_i == beta_j, reduces exactly to the two-agent solvers at N = 2.
EquilibriumResult nash_n_player_conjecture(const GameParams& p);

}  // namespace lockrace::eq

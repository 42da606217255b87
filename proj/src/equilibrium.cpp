#include "lockrace/equilibrium.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lockrace/analytic.hpp"

namespace lockrace::eq {

namespace {

constexpr double kValueTol = 1e-10;  // value-level mutual-best-response tolerance

double theta_nu(double nu, double beta_opp, double T) {
    return std::min(-std::log(nu) / beta_opp, T);
}

// Difference between a unilateral best response's value and the profile value
// for the agent holding a_own (one lock).
double br_value_gap(const PiecewiseConstantControl& a_own, double psi_opp,
                    const PiecewiseConstantControl& a_opp, const GameParams& p_own) {
    BestResponseResult br = best_response_one_lock(psi_opp, p_own);
    double j_prof = analytic::utility_one_lock(a_own, a_opp, p_own).utility;
    double j_br =
        analytic::utility_one_lock(br.policy.control(p_own.horizon), a_opp, p_own).utility;
    return j_br - j_prof;
}

}  // namespace

ThresholdPolicy EquilibriumResult::threshold_policy(std::size_t agent) const {
    return ThresholdPolicy{thresholds.at(agent), rates.at(agent)};
}

TwoStagePolicy EquilibriumResult::two_stage_policy(std::size_t agent, double horizon) const {
    return TwoStagePolicy::gamma2(thresholds.at(agent), rates.at(agent), horizon);
}

BestResponseResult best_response_one_lock(double psi_j, const GameParams& raw) {
    GameParams p = validate_params(raw);
    if (psi_j < 0.0 || psi_j > p.horizon)
        throw std::invalid_argument("psi_j must lie in [0, horizon]");
    BestResponseResult r;
    r.policy.rate = p.beta_i;
    if (p.nu >= 1.0) {
        r.policy.psi = 0.0;
        r.note = "silence (nu >= 1)";
        return r;
    }
    if (p.nu < std::exp(-p.beta_j * psi_j)) {
        r.policy.psi = p.horizon;
        r.note = "full horizon";
    } else {
        r.policy.psi = theta_nu(p.nu, p.beta_j, p.horizon);
        r.note = "theta";
    }
    return r;
}

EquilibriumResult nash_one_lock(const GameParams& raw) {
    GameParams p = validate_params(raw);
    EquilibriumResult res;
    res.locks = 1;
    res.rates = {p.beta_i, p.beta_j};

    if (p.nu >= 1.0) {
        res.thresholds = {0.0, 0.0};
        res.regime = "silence (nu >= 1)";
        res.certified = true;
        return res;
    }

    const bool swapped = p.beta_i > p.beta_j;
    GameParams q = swapped ? swap_agents(p) : p;  // q.beta_j >= q.beta_i

    double psi_slow, psi_fast;
    if (q.beta_i == q.beta_j) {
        psi_slow = theta_nu(q.nu, q.beta_j, q.horizon);
        psi_fast = theta_nu(q.nu, q.beta_i, q.horizon);
        res.regime = "symmetric";
    } else {
        psi_slow = theta_nu(q.nu, q.beta_j, q.horizon);
        psi_fast = q.horizon;
        res.regime = "asymmetric (faster agent plays full horizon)";
    }
    res.thresholds = swapped ? std::vector<double>{psi_fast, psi_slow}
                             : std::vector<double>{psi_slow, psi_fast};

    // Certify by value-level mutual best response.
    auto c_i = make_threshold_control(res.thresholds[0], p.beta_i, p.horizon);
    auto c_j = make_threshold_control(res.thresholds[1], p.beta_j, p.horizon);
    double gap_i = br_value_gap(c_i, res.thresholds[1], c_j, p);
    double gap_j = br_value_gap(c_j, res.thresholds[0], c_i, swap_agents(p));
    res.certified = gap_i <= kValueTol && gap_j <= kValueTol;
    return res;
}

double stage2_value(const StageState& z2, const GameParams& raw) {
    GameParams p = validate_params(raw);
    if (p.locks != 2) throw std::invalid_argument("stage2_value requires locks == 2");
    if (p.nu >= 1.0) throw std::invalid_argument("stage2_value requires nu < 1");
    if (z2.flag == ContactFlag::start)
        throw std::invalid_argument("stage2_value needs a post-contact state");
    if (z2.contact_time < 0.0 || z2.contact_time > p.horizon)
        throw std::invalid_argument("contact_time must lie in [0, horizon]");
    if (z2.flag == ContactFlag::failure) return 0.0;
    return (1.0 - p.nu) * -std::expm1(-p.beta_i * (p.horizon - z2.contact_time));
}

double solve_psi_fixed_point(const GameParams& raw, Agent which) {
    GameParams p = validate_params(raw);
    const double T = p.horizon;
    if (p.nu >= 0.5)
        throw std::domain_error("nu >= 1/2: the silence regime applies, no interior fixed point");
    const double bound = (1.0 - 2.0 * p.nu) / (1.0 - p.nu);
    const double bmin = std::min(p.beta_i, p.beta_j);
    const double bmax = std::max(p.beta_i, p.beta_j);
    if (std::exp(-bmin * T) > bound) {
        throw std::domain_error(std::exp(-bmax * T) > bound
                                    ? "regime 'both silent' applies, no interior fixed point"
                                    : "regime 'one silent' applies, no interior fixed point");
    }

    // own-threshold decay uses the opponent's rate, the residual chase the own rate
    const double a = (which == Agent::i) ? p.beta_j : p.beta_i;
    const double b = (which == Agent::i) ? p.beta_i : p.beta_j;
    auto F = [&](double psi) {
        return std::exp(-a * psi) - std::exp(-b * (T - psi) - a * psi) - p.nu / (1.0 - p.nu);
    };
    if (F(0.0) <= 0.0) return 0.0;  // the min clamps at 1
    double lo = 0.0, hi = T, mid = 0.5 * T;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double f = F(mid);
        if (std::abs(f) <= 1e-12) return mid;
        (f > 0.0 ? lo : hi) = mid;
    }
    return mid;
}

std::vector<ConditionCheck> check_ne_conditions(double psi_i, double psi_j,
                                                const GameParams& raw) {
    GameParams p = validate_params(raw);
    if (p.nu >= 0.5) throw std::domain_error("conditions (Theorem 4) require nu < 1/2");
    const double T = p.horizon;
    std::vector<ConditionCheck> out(2);

    ConditionCheck& c1 = out[0];
    c1.name = "condition_1 (deviations against psi_j*)";
    double den1 = std::exp(-p.beta_j * psi_j) - p.nu;
    c1.lhs = std::exp(-p.beta_i * (T - psi_j));
    c1.applicable = den1 > 0.0;
    c1.rhs = c1.applicable ? (std::exp(-p.beta_j * psi_j) - 2.0 * p.nu) / den1 : 0.0;
    c1.satisfied = c1.applicable && c1.lhs > c1.rhs;

    ConditionCheck& c2 = out[1];
    c2.name = "condition_2 (deviations against psi_i*)";
    double den2 = std::exp(-p.beta_i * psi_i) - p.nu;
    c2.lhs = std::exp(-p.beta_j * (T - psi_i));
    c2.applicable = den2 > 0.0;
    c2.rhs = c2.applicable ? (std::exp(-p.beta_i * psi_i) - 2.0 * p.nu) / den2 : 0.0;
    c2.satisfied = c2.applicable && c2.lhs > c2.rhs;
    return out;
}

EquilibriumResult nash_two_lock(const GameParams& raw) {
    GameParams p = validate_params(raw);
    EquilibriumResult res;
    res.locks = 2;
    res.rates = {p.beta_i, p.beta_j};

    if (p.nu >= 0.5) {
        res.thresholds = {0.0, 0.0};
        res.regime = "silence (nu >= 1/2)";
        res.certified = true;
        return res;
    }

    const bool swapped = p.beta_i > p.beta_j;
    GameParams q = swapped ? swap_agents(p) : p;  // q.beta_j >= q.beta_i
    const double T = q.horizon;
    const double bound = (1.0 - 2.0 * q.nu) / (1.0 - q.nu);

    double psi_slow = 0.0, psi_fast = 0.0;
    if (std::exp(-q.beta_j * T) > bound) {
        res.regime = "both silent";
        res.certified = true;
    } else if (std::exp(-q.beta_i * T) >= bound) {
        res.regime = "one silent";
        psi_fast = T + std::log(bound) / q.beta_j;
        res.certified = true;
        res.boundary_tie = std::abs(std::exp(-q.beta_i * T) - bound) <= 1e-14 * bound;
    } else {
        res.regime = "interior";
        psi_slow = solve_psi_fixed_point(q, Agent::i);
        psi_fast = solve_psi_fixed_point(q, Agent::j);
        res.conditions = check_ne_conditions(psi_slow, psi_fast, q);
        res.certified = true;
        for (const auto& c : res.conditions)
            res.certified = res.certified && c.applicable && c.satisfied;
        if (!res.certified) {
            std::ostringstream os;
            os << "certify --locks 2 --beta-i " << p.beta_i << " --beta-j " << p.beta_j
               << " --nu " << p.nu << " --horizon " << p.horizon << " --segments 80";
            res.oracle_hint = os.str();
        }
    }
    res.thresholds = swapped ? std::vector<double>{psi_fast, psi_slow}
                             : std::vector<double>{psi_slow, psi_fast};
    return res;
}

EquilibriumResult nash_n_player_conjecture(const GameParams& raw) {
    GameParams p = validate_params(raw);
    if (p.beta_i != p.beta_j)
        throw std::invalid_argument(
            "n-player conjecture requires symmetric rates (beta_i == beta_j)");
    const int N = p.n_agents;
    if (N == 2) return p.locks == 1 ? nash_one_lock(p) : nash_two_lock(p);

    const double beta = p.beta_i;
    const double T = p.horizon;
    EquilibriumResult res;
    res.locks = p.locks;
    res.n_agents = N;
    res.rates.assign(static_cast<std::size_t>(N), beta);
    res.conjectural = true;

    double psi = 0.0;
    if (p.locks == 1) {
        if (p.nu >= 1.0) {
            res.regime = "n-player silence (nu >= 1)";
        } else if (std::exp(-beta * (N - 1) * T) <= p.nu) {
            psi = -std::log(p.nu) / ((N - 1) * beta);
            res.regime = "n-player symmetric (one lock)";
        } else {
            psi = T;
            res.regime = "n-player symmetric (one lock, full horizon)";
        }
    } else {
        if (p.nu >= 0.5) {
            res.regime = "n-player silence (nu >= 1/2)";
        } else {
            GameParams eff = p;
            eff.beta_i = beta;
            eff.beta_j = (N - 1) * beta;
            eff.n_agents = 2;
            const double bound = (1.0 - 2.0 * p.nu) / (1.0 - p.nu);
            if (std::exp(-eff.beta_j * T) > bound || std::exp(-eff.beta_i * T) >= bound) {
                res.regime = "n-player symmetric (two locks, clamped to silence)";
            } else {
                psi = solve_psi_fixed_point(eff, Agent::i);
                res.regime = "n-player symmetric (two locks)";
            }
        }
    }
    res.thresholds.assign(static_cast<std::size_t>(N), psi);
    return res;
}

}  // namespace lockrace::eq

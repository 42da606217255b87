#include "lockrace/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lockrace/quadrature.hpp"

namespace lockrace::analytic {

namespace {

// (1 - e^{-mu dt}) / mu, the exact integral of e^{-mu u} over [0, dt].
double decay_integral(double mu, double dt) {
    if (mu == 0.0) return dt;
    return -std::expm1(-mu * dt) / mu;
}

// (e^{mu dt} - 1) / mu; mu of either sign.
double growth_integral(double mu, double dt) {
    if (mu == 0.0) return dt;
    return std::expm1(mu * dt) / mu;
}

struct MergedSeg {
    double t0, dt;
    double ri, rj;    // rates of a_i, a_j on the segment
    double xi, xj;    // cumulatives at t0
};

std::vector<MergedSeg> merge_segments(const PiecewiseConstantControl& a_i,
                                      const PiecewiseConstantControl& a_j, double T) {
    std::vector<double> knots{0.0, T};
    for (double b : a_i.breakpoints())
        if (b > 0.0 && b < T) knots.push_back(b);
    for (double b : a_j.breakpoints())
        if (b > 0.0 && b < T) knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    std::vector<MergedSeg> segs;
    segs.reserve(knots.size());
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        MergedSeg s;
        s.t0 = knots[k];
        s.dt = knots[k + 1] - knots[k];
        s.ri = a_i.rate_at(s.t0);
        s.rj = a_j.rate_at(s.t0);
        s.xi = a_i.cumulative(s.t0);
        s.xj = a_j.cumulative(s.t0);
        segs.push_back(s);
    }
    return segs;
}

// ∫ e^{-ā_j - ā_i} a_i over the segment.
double seg_win(const MergedSeg& s) {
    if (s.ri == 0.0) return 0.0;
    return s.ri * std::exp(-s.xi - s.xj) * decay_integral(s.ri + s.rj, s.dt);
}

// ∫ e^{-b (T - t)} e^{-ā_j - ā_i} a_i over the segment.
double seg_win_weighted(const MergedSeg& s, double b, double T) {
    if (s.ri == 0.0) return 0.0;
    return s.ri * std::exp(-s.xi - s.xj - b * (T - s.t0)) *
           growth_integral(b - s.ri - s.rj, s.dt);
}

// ∫ ā_i e^{-ā_i} a_i over the segment: [-(x+1)e^{-x}] between the endpoints.
double seg_cost(const MergedSeg& s) {
    double x1 = s.xi + s.ri * s.dt;
    return (s.xi + 1.0) * std::exp(-s.xi) - (x1 + 1.0) * std::exp(-x1);
}

// Expected net stage-2 contribution per outer node for custom plans.
struct StageTwoAt {
    double reward;  // 1 - e^{-ā₂(U)}
    double cost;    // expected_cost of the plan control over U
};
StageTwoAt stage2_at(const StageTwoPlan& plan, double tau, double T) {
    switch (plan.kind()) {
        case StageTwoPlan::Kind::silent:
            return {0.0, 0.0};
        case StageTwoPlan::Kind::full_on: {
            double v = -std::expm1(-plan.rate() * (T - tau));
            return {v, v};
        }
        case StageTwoPlan::Kind::custom: {
            PiecewiseConstantControl c = plan.control_for(tau, T);
            double x = c.cumulative(c.span());
            return {-std::expm1(-x), expected_cost(c, c.span())};
        }
    }
    return {0.0, 0.0};
}

bool closed_form_plan(const StageTwoPlan& plan) {
    return plan.kind() != StageTwoPlan::Kind::custom;
}

}  // namespace

double contact_density(const PiecewiseConstantControl& a, double t) {
    return std::exp(-a.cumulative(t)) * a.rate_at(t);
}

double opponent_survival(const PiecewiseConstantControl& a_j, double s) {
    return std::exp(-a_j.cumulative(s));
}

double expected_cost(const PiecewiseConstantControl& a, double horizon) {
    PiecewiseConstantControl none;
    double integral = 0.0;
    for (const MergedSeg& s : merge_segments(a, none, horizon)) integral += seg_cost(s);
    double xU = a.cumulative(horizon);
    return xU * std::exp(-xU) + integral;
}

double success_prob_one_lock(const PiecewiseConstantControl& a_i,
                             const PiecewiseConstantControl& a_j, double T) {
    double p = 0.0;
    for (const MergedSeg& s : merge_segments(a_i, a_j, T)) p += seg_win(s);
    return p;
}

UtilityReport utility_one_lock(const PiecewiseConstantControl& a_i,
                               const PiecewiseConstantControl& a_j, const GameParams& p) {
    UtilityReport r;
    r.success_prob = success_prob_one_lock(a_i, a_j, p.horizon);
    r.expected_cost = expected_cost(a_i, p.horizon);
    r.utility = r.success_prob - p.nu * r.expected_cost;
    r.method = EvalMethod::closed_form;
    return r;
}

double utility_one_lock_direct(const PiecewiseConstantControl& a_i,
                               const PiecewiseConstantControl& a_j, const GameParams& p) {
    double acc = 0.0;
    for (const MergedSeg& s : merge_segments(a_i, a_j, p.horizon))
        acc += seg_win(s) - p.nu * seg_cost(s);
    double xT = a_i.cumulative(p.horizon);
    return acc - p.nu * xT * std::exp(-xT);
}

SilentResponse silent_value(double reward, double nu, double beta, double horizon, double x) {
    SilentResponse r;
    if (nu <= reward) {
        r.value = ((reward - nu) * -std::expm1(-beta * horizon) - nu * x) * std::exp(-x);
        r.action = beta;
    } else {
        r.value = -nu * x * std::exp(-x);
        r.action = 0.0;
    }
    return r;
}

double success_prob_two_lock(const TwoStagePolicy& pi_i,
                             const PiecewiseConstantControl& a_j_stage1, double T) {
    const auto& plan = pi_i.on_success;
    if (plan.kind() == StageTwoPlan::Kind::silent) return 0.0;
    if (plan.kind() == StageTwoPlan::Kind::full_on) {
        double b = plan.rate();
        double p = 0.0;
        for (const MergedSeg& s : merge_segments(pi_i.stage1, a_j_stage1, T))
            p += seg_win(s) - seg_win_weighted(s, b, T);
        return p;
    }
    // custom plan: outer adaptive quadrature, inner integral in closed form
    auto integrand = [&](double s) {
        double f1 = contact_density(pi_i.stage1, s);
        if (f1 == 0.0) return 0.0;
        return opponent_survival(a_j_stage1, s) * stage2_at(plan, s, T).reward * f1;
    };
    std::vector<double> knots{0.0, T};
    for (double b : pi_i.stage1.breakpoints())
        if (b > 0.0 && b < T) knots.push_back(b);
    for (double b : a_j_stage1.breakpoints())
        if (b > 0.0 && b < T) knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    return integrate_adaptive_segmented(integrand, knots, 1e-11).value;
}

UtilityReport utility_two_lock(const TwoStagePolicy& pi_i, const TwoStagePolicy& pi_j,
                               const GameParams& p) {
    const double T = p.horizon;
    const PiecewiseConstantControl& a_j = pi_j.stage1;
    UtilityReport r;
    double cost1 = expected_cost(pi_i.stage1, T);

    if (closed_form_plan(pi_i.on_success) && closed_form_plan(pi_i.on_failure)) {
        auto segs = merge_segments(pi_i.stage1, a_j, T);
        PiecewiseConstantControl none;
        auto segs_solo = merge_segments(pi_i.stage1, none, T);

        double p2 = 0.0, cost2s = 0.0, cost2f = 0.0;
        if (pi_i.on_success.kind() == StageTwoPlan::Kind::full_on) {
            double b = pi_i.on_success.rate();
            for (const MergedSeg& s : segs) p2 += seg_win(s) - seg_win_weighted(s, b, T);
            cost2s = p2;  // full effort: expected stage-2 cost equals its success mass
        }
        if (pi_i.on_failure.kind() == StageTwoPlan::Kind::full_on) {
            double b = pi_i.on_failure.rate();
            double with_opp = 0.0, solo = 0.0;
            for (const MergedSeg& s : segs) with_opp += seg_win(s) - seg_win_weighted(s, b, T);
            for (const MergedSeg& s : segs_solo) solo += seg_win(s) - seg_win_weighted(s, b, T);
            cost2f = solo - with_opp;
        }
        r.success_prob = p2;
        r.expected_cost = cost1 + cost2s + cost2f;
        r.utility = p2 - p.nu * r.expected_cost;
        r.method = EvalMethod::closed_form;
        return r;
    }

    // general plans: iterated integral, outer adaptive, inner closed form
    auto integrand_reward = [&](double s) {
        double f1 = contact_density(pi_i.stage1, s);
        if (f1 == 0.0) return 0.0;
        return opponent_survival(a_j, s) * stage2_at(pi_i.on_success, s, T).reward * f1;
    };
    auto integrand_cost2 = [&](double s) {
        double f1 = contact_density(pi_i.stage1, s);
        if (f1 == 0.0) return 0.0;
        double surv = opponent_survival(a_j, s);
        return f1 * (surv * stage2_at(pi_i.on_success, s, T).cost +
                     (1.0 - surv) * stage2_at(pi_i.on_failure, s, T).cost);
    };
    std::vector<double> knots{0.0, T};
    for (double b : pi_i.stage1.breakpoints())
        if (b > 0.0 && b < T) knots.push_back(b);
    for (double b : a_j.breakpoints())
        if (b > 0.0 && b < T) knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    r.success_prob = integrate_adaptive_segmented(integrand_reward, knots, 1e-11).value;
    r.expected_cost = cost1 + integrate_adaptive_segmented(integrand_cost2, knots, 1e-11).value;
    r.utility = r.success_prob - p.nu * r.expected_cost;
    r.method = EvalMethod::quadrature;
    return r;
}

}  // namespace lockrace::analytic

#include "lockrace/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lockrace/analytic.hpp"
#include "lockrace/quadrature.hpp"

namespace lockrace::oracle {

namespace {

constexpr double kOuterTol = 1e-10;


void require_converged(const QuadratureResult& r, const char* what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": quadrature panel budget exhausted, achieved error estimate "
           << r.error_estimate;
        throw std::runtime_error(os.str());
    }
}

std::vector<double> knots_of(const PiecewiseConstantControl& a, const PiecewiseConstantControl& b,
                             double T) {
    std::vector<double> k{0.0, T};
    for (double t : a.breakpoints())
        if (t > 0.0 && t < T) k.push_back(t);
    for (double t : b.breakpoints())
        if (t > 0.0 && t < T) k.push_back(t);
    std::sort(k.begin(), k.end());
    k.erase(std::unique(k.begin(), k.end()), k.end());
    return k;
}

// ---- generic open-loop objective  J(a) = ∫ (phi(s) - nu x) e^{-x} a ds - nu x(T) e^{-x(T)} ----

struct ExpTerm {
    double coef;
    double rate;  // coef * exp(-rate * s)
};

struct PiecewiseExpSum {
    std::vector<double> knots;                  // 0 = k_0 < ... < k_m = T
    std::vector<std::vector<ExpTerm>> terms;    // per interval

    double eval(double s) const {
        std::size_t idx = 0;
        while (idx + 2 < knots.size() && s >= knots[idx + 1]) ++idx;
        double v = 0.0;
        for (const ExpTerm& t : terms[idx]) v += t.coef * std::exp(-t.rate * s);
        return v;
    }
};

// survival exp(-ā_j(s)) as a piecewise exponential sum
PiecewiseExpSum survival_expsum(const PiecewiseConstantControl& a_j, double T) {
    PiecewiseExpSum f;
    f.knots.push_back(0.0);
    for (double b : a_j.breakpoints())
        if (b > 0.0 && b < T) f.knots.push_back(b);
    f.knots.push_back(T);
    std::sort(f.knots.begin(), f.knots.end());
    f.knots.erase(std::unique(f.knots.begin(), f.knots.end()), f.knots.end());
    for (std::size_t i = 0; i + 1 < f.knots.size(); ++i) {
        double t0 = f.knots[i];
        double r = a_j.rate_at(t0);
        double x0 = a_j.cumulative(t0);
        f.terms.push_back({ExpTerm{std::exp(-x0 + r * t0), r}});
    }
    return f;
}

std::vector<ExpTerm> scale_terms(const std::vector<ExpTerm>& ts, double c) {
    std::vector<ExpTerm> out;
    out.reserve(ts.size());
    for (const ExpTerm& t : ts) out.push_back({t.coef * c, t.rate});
    return out;
}

std::vector<ExpTerm> multiply_terms(const std::vector<ExpTerm>& a, const std::vector<ExpTerm>& b) {
    std::vector<ExpTerm> out;
    out.reserve(a.size() * b.size());
    for (const ExpTerm& ta : a)
        for (const ExpTerm& tb : b) out.push_back({ta.coef * tb.coef, ta.rate + tb.rate});
    return out;
}

// net stage-2 value (reward - nu cost) of a silent/full_on plan at contact time s,
// as exponential terms in s valid on [0, T]
std::vector<ExpTerm> plan_net_terms(const StageTwoPlan& plan, bool success_branch, double nu,
                                    double T) {
    const double gain = success_branch ? 1.0 - nu : -nu;
    switch (plan.kind()) {
        case StageTwoPlan::Kind::silent:
            return {};
        case StageTwoPlan::Kind::full_on: {
            double b = plan.rate();
            // gain * (1 - e^{-b (T - s)})
            return {ExpTerm{gain, 0.0}, ExpTerm{-gain * std::exp(-b * T), -b}};
        }
        case StageTwoPlan::Kind::custom:
            throw std::invalid_argument("grid search supports silent/full_on stage-2 plans only");
    }
    return {};
}

double decay_integral(double mu, double dt) {
    if (mu == 0.0) return dt;
    return -std::expm1(-mu * dt) / mu;
}

struct GridSearchProblem {
    int n = 0;
    double T = 0.0;
    double nu = 0.0;
    std::vector<double> levels;  // ascending
    PiecewiseExpSum phi;         // owned: pieces point into phi.terms

    // per grid segment: sub-pieces where phi's term list is constant
    struct Piece {
        double s0, dt, offset;  // offset = s0 - segment start
        const std::vector<ExpTerm>* terms;
    };
    std::vector<std::vector<Piece>> pieces;

    void build(PiecewiseExpSum phi_in) {
        phi = std::move(phi_in);
        pieces.assign(static_cast<std::size_t>(n), {});
        const double dt_seg = T / n;
        for (int k = 0; k < n; ++k) {
            double a = k * dt_seg, b = (k + 1) * dt_seg;
            std::vector<double> cuts{a, b};
            for (double kn : phi.knots)
                if (kn > a && kn < b) cuts.push_back(kn);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                std::size_t idx = 0;
                while (idx + 2 < phi.knots.size() && cuts[i] >= phi.knots[idx + 1]) ++idx;
                pieces[static_cast<std::size_t>(k)].push_back(
                    Piece{cuts[i], cuts[i + 1] - cuts[i], cuts[i] - a, &phi.terms[idx]});
            }
        }
    }

    // ∫_segment (phi - nu x) e^{-x} u ds with x = x0 + u (s - segment start)
    double segment_objective(int k, double x0, double u) const {
        double acc = 0.0;
        for (const Piece& pc : pieces[static_cast<std::size_t>(k)]) {
            const double xp = x0 + u * pc.offset;
            if (u != 0.0) {
                for (const ExpTerm& t : *pc.terms) {
                    acc += t.coef * std::exp(-t.rate * pc.s0 - xp) * u *
                           decay_integral(t.rate + u, pc.dt);
                }
            }
            const double x1 = xp + u * pc.dt;
            acc -= nu * ((xp + 1.0) * std::exp(-xp) - (x1 + 1.0) * std::exp(-x1));
        }
        return acc;
    }

    double terminal(double x) const { return -nu * x * std::exp(-x); }

    double evaluate(const std::vector<int>& choice) const {
        double x = 0.0, acc = 0.0;
        const double dt_seg = T / n;
        for (int k = 0; k < n; ++k) {
            double u = levels[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)])];
            acc += segment_objective(k, x, u);
            x += u * dt_seg;
        }
        return acc + terminal(x);
    }
};

// commensurate-lattice detection: every level an integer multiple of the
// smallest positive level
bool lattice_multipliers(const std::vector<double>& levels, std::vector<long>& mult,
                         long& max_mult) {
    double q = 0.0;
    for (double v : levels)
        if (v > 0.0) q = (q == 0.0) ? v : std::min(q, v);
    if (q == 0.0) return false;
    mult.clear();
    max_mult = 0;
    for (double v : levels) {
        double m = v / q;
        long mi = std::lround(m);
        if (std::abs(m - mi) > 1e-9) return false;
        mult.push_back(mi);
        max_mult = std::max(max_mult, mi);
    }
    return true;
}

struct RawSearchOutcome {
    std::vector<int> choice;
    double objective = 0.0;
    std::string certificate;
    bool exhaustive = false;
    long evaluated = 0;
};

// exact argmax over the level lattice by backward dynamic programming
RawSearchOutcome dp_search(const GridSearchProblem& pr, const std::vector<long>& mult,
                           long max_mult) {
    const int n = pr.n;
    const double dt_seg = pr.T / n;
    double q = std::numeric_limits<double>::infinity();
    for (double v : pr.levels)
        if (v > 0.0) q = std::min(q, v);
    const double qd = q * dt_seg;  // lattice spacing in x

    const long nstates = max_mult * n + 1;
    std::vector<double> next(static_cast<std::size_t>(nstates)),
        cur(static_cast<std::size_t>(nstates));
    std::vector<std::vector<int>> choice(static_cast<std::size_t>(n),
                                         std::vector<int>(static_cast<std::size_t>(nstates), 0));
    for (long c = 0; c < nstates; ++c) next[static_cast<std::size_t>(c)] = pr.terminal(c * qd);

    RawSearchOutcome out;
    for (int k = n - 1; k >= 0; --k) {
        const long reach = max_mult * k + 1;  // states reachable at the start of segment k
        for (long c = 0; c < reach; ++c) {
            double best = -std::numeric_limits<double>::infinity();
            int best_l = 0;
            for (std::size_t l = 0; l < pr.levels.size(); ++l) {
                long c2 = c + mult[l];
                double v = pr.segment_objective(k, c * qd, pr.levels[l]) +
                           next[static_cast<std::size_t>(c2)];
                ++out.evaluated;
                if (v > best) {
                    best = v;
                    best_l = static_cast<int>(l);
                }
            }
            cur[static_cast<std::size_t>(c)] = best;
            choice[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] = best_l;
        }
        std::swap(cur, next);  // `next` now holds the stage-k values
    }

    out.choice.assign(static_cast<std::size_t>(n), 0);
    long c = 0;
    for (int k = 0; k < n; ++k) {
        int l = choice[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
        out.choice[static_cast<std::size_t>(k)] = l;
        c += mult[static_cast<std::size_t>(l)];
    }
    out.objective = pr.evaluate(out.choice);
    out.certificate = "exhaustive (dp)";
    out.exhaustive = true;
    return out;
}

RawSearchOutcome enumerate_search(const GridSearchProblem& pr) {
    RawSearchOutcome out;
    std::vector<int> v(static_cast<std::size_t>(pr.n), 0);
    out.choice = v;
    out.objective = -std::numeric_limits<double>::infinity();
    const int L = static_cast<int>(pr.levels.size());
    bool done = false;
    while (!done) {
        double val = pr.evaluate(v);
        ++out.evaluated;
        if (val > out.objective) {  // strict: lexicographically first max wins
            out.objective = val;
            out.choice = v;
        }
        int k = pr.n - 1;
        while (k >= 0) {
            if (++v[static_cast<std::size_t>(k)] < L) break;
            v[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        done = k < 0;
    }
    out.certificate = "exhaustive (enumeration)";
    out.exhaustive = true;
    return out;
}

RawSearchOutcome ascent_search(const GridSearchProblem& pr, std::uint64_t seed) {
    // splitmix64 for the random starts
    auto next_rand = [state = seed]() mutable {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    const int L = static_cast<int>(pr.levels.size());
    RawSearchOutcome out;
    out.objective = -std::numeric_limits<double>::infinity();
    for (int start = 0; start < 8; ++start) {
        std::vector<int> v(static_cast<std::size_t>(pr.n));
        for (int k = 0; k < pr.n; ++k)
            v[static_cast<std::size_t>(k)] = static_cast<int>(next_rand() % L);
        double val = pr.evaluate(v);
        ++out.evaluated;
        bool improved = true;
        int sweeps = 0;
        while (improved && sweeps++ < 500) {
            improved = false;
            for (int k = 0; k < pr.n; ++k) {
                int keep = v[static_cast<std::size_t>(k)];
                int best_l = keep;
                double best_v = val;
                for (int l = 0; l < L; ++l) {
                    if (l == keep) continue;
                    v[static_cast<std::size_t>(k)] = l;
                    double w = pr.evaluate(v);
                    ++out.evaluated;
                    if (w > best_v) {
                        best_v = w;
                        best_l = l;
                    }
                }
                v[static_cast<std::size_t>(k)] = best_l;
                if (best_l != keep) {
                    val = best_v;
                    improved = true;
                }
            }
        }
        if (val > out.objective || (val == out.objective && v < out.choice)) {
            out.objective = val;
            out.choice = v;
        }
    }
    out.certificate = "local (coordinate ascent)";
    out.exhaustive = false;
    return out;
}

RawSearchOutcome run_search(const GridSearchProblem& pr, const GridSpec& g) {
    std::vector<long> mult;
    long max_mult = 0;
    if (lattice_multipliers(pr.levels, mult, max_mult) &&
        (max_mult * pr.n + 1) * static_cast<long>(pr.levels.size()) * pr.n <= 50'000'000L) {
        return dp_search(pr, mult, max_mult);
    }
    const double log_space = pr.n * std::log(static_cast<double>(pr.levels.size()));
    if (log_space <= 20.0 * std::log(2.0) + 1e-9) return enumerate_search(pr);
    if (!g.allow_local_search) {
        throw std::invalid_argument(
            "grid search space exceeds the exhaustive cap (2^20); enable allow_local_search "
            "for coordinate ascent");
    }
    return ascent_search(pr, g.search_seed);
}

PiecewiseConstantControl control_from_choice(const GridSearchProblem& pr,
                                             const std::vector<int>& choice) {
    const double dt_seg = pr.T / pr.n;
    std::vector<double> breaks{0.0}, levels;
    for (int k = 0; k < pr.n; ++k) {
        double u = pr.levels[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)])];
        if (!levels.empty() && levels.back() == u) {
            breaks.back() = (k + 1) * dt_seg;  // extend the previous run
        } else {
            levels.push_back(u);
            breaks.push_back((k + 1) * dt_seg);
        }
    }
    breaks.back() = pr.T;
    return PiecewiseConstantControl(std::move(breaks), std::move(levels));
}

}  // namespace

std::vector<double> GridSpec::effective_levels(double beta) const {
    std::vector<double> out;
    if (levels.empty()) {
        out = n_segments <= 12 ? std::vector<double>{0.0, 0.5 * beta, beta}
                               : std::vector<double>{0.0, beta};
    } else {
        out = levels;
        for (double v : out) {
            if (v < 0.0 || v > beta * (1.0 + 1e-12))
                throw std::invalid_argument("grid levels must lie in [0, beta]");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

UtilityReport quadrature_utility(const PiecewiseConstantControl& a_i,
                                 const PiecewiseConstantControl& a_j, const GameParams& raw) {
    GameParams p = validate_params(raw);
    const double T = p.horizon;
    auto knots = knots_of(a_i, a_j, T);

    auto win_integrand = [&](double s) {
        double a = a_i.rate_at(s);
        if (a == 0.0) return 0.0;
        return std::exp(-a_j.cumulative(s)) * std::exp(-a_i.cumulative(s)) * a;
    };
    auto cost_integrand = [&](double s) {
        double a = a_i.rate_at(s);
        if (a == 0.0) return 0.0;
        double x = a_i.cumulative(s);
        return x * std::exp(-x) * a;
    };
    auto j_integrand = [&](double s) {
        double a = a_i.rate_at(s);
        if (a == 0.0) return 0.0;
        double x = a_i.cumulative(s);
        return (std::exp(-a_j.cumulative(s)) - p.nu * x) * std::exp(-x) * a;
    };

    QuadratureResult qp = integrate_adaptive_segmented(win_integrand, knots, kOuterTol);
    QuadratureResult qc = integrate_adaptive_segmented(cost_integrand, knots, kOuterTol);
    QuadratureResult qj = integrate_adaptive_segmented(j_integrand, knots, kOuterTol);
    require_converged(qp, "success probability");
    require_converged(qc, "expected cost");
    require_converged(qj, "utility");

    const double xT = a_i.cumulative(T);
    UtilityReport r;
    r.success_prob = qp.value;
    r.expected_cost = xT * std::exp(-xT) + qc.value;
    r.utility = qj.value - p.nu * xT * std::exp(-xT);
    r.method = EvalMethod::quadrature;
    return r;
}

double quadrature_silent_utility(const PiecewiseConstantControl& a, double reward, double nu,
                                 double horizon) {
    PiecewiseConstantControl none;
    auto knots = knots_of(a, none, horizon);
    auto integrand = [&](double s) {
        double r = a.rate_at(s);
        if (r == 0.0) return 0.0;
        double x = a.cumulative(s);
        return (reward - nu * x) * std::exp(-x) * r;
    };
    QuadratureResult q = integrate_adaptive_segmented(integrand, knots, kOuterTol);
    require_converged(q, "silent-opponent utility");
    const double xU = a.cumulative(horizon);
    return q.value - nu * xU * std::exp(-xU);
}

UtilityReport two_stage_utility(const TwoStagePolicy& pi_i, const TwoStagePolicy& pi_j,
                                const GameParams& raw) {
    GameParams p = validate_params(raw);
    if (p.locks != 2) throw std::invalid_argument("two_stage_utility requires locks == 2");
    const double T = p.horizon;
    const PiecewiseConstantControl& a1 = pi_i.stage1;
    const PiecewiseConstantControl& aj = pi_j.stage1;

    // Inner stage-2 integrals: fixed-order Gauss-Legendre per smooth segment —
    // machine-precision values without an adaptive noise floor under the outer
    // Simpson recursion.
    auto inner_reward = [&](const PiecewiseConstantControl& c) {
        double acc = 0.0;
        auto f = [&](double u) { return std::exp(-c.cumulative(u)) * c.rate_at(u); };
        const auto& br = c.breakpoints();
        for (std::size_t k = 0; k + 1 < br.size(); ++k)
            acc += integrate_gauss(f, br[k], br[k + 1]);
        return acc;
    };
    auto inner_cost = [&](const PiecewiseConstantControl& c) {
        double acc = 0.0;
        auto f = [&](double u) {
            double x = c.cumulative(u);
            return x * std::exp(-x) * c.rate_at(u);
        };
        const auto& br = c.breakpoints();
        for (std::size_t k = 0; k + 1 < br.size(); ++k)
            acc += integrate_gauss(f, br[k], br[k + 1]);
        double xU = c.cumulative(c.span());
        return xU * std::exp(-xU) + acc;
    };

    auto knots = knots_of(a1, aj, T);
    auto reward_integrand = [&](double s) {
        double a = a1.rate_at(s);
        if (a == 0.0) return 0.0;
        double f1 = std::exp(-a1.cumulative(s)) * a;
        return std::exp(-aj.cumulative(s)) * inner_reward(pi_i.on_success.control_for(s, T)) * f1;
    };
    auto cost2_integrand = [&](double s) {
        double a = a1.rate_at(s);
        if (a == 0.0) return 0.0;
        double f1 = std::exp(-a1.cumulative(s)) * a;
        double surv = std::exp(-aj.cumulative(s));
        double cs = inner_cost(pi_i.on_success.control_for(s, T));
        double cf = inner_cost(pi_i.on_failure.control_for(s, T));
        return f1 * (surv * cs + (1.0 - surv) * cf);
    };
    auto cost1_integrand = [&](double s) {
        double a = a1.rate_at(s);
        if (a == 0.0) return 0.0;
        double x = a1.cumulative(s);
        return x * std::exp(-x) * a;
    };

    QuadratureResult q_reward = integrate_adaptive_segmented(reward_integrand, knots, kOuterTol);
    QuadratureResult q_cost2 = integrate_adaptive_segmented(cost2_integrand, knots, kOuterTol);
    QuadratureResult q_cost1 = integrate_adaptive_segmented(cost1_integrand, knots, kOuterTol);
    require_converged(q_reward, "stage-2 reward");
    require_converged(q_cost2, "stage-2 cost");
    require_converged(q_cost1, "stage-1 cost");

    const double x1T = a1.cumulative(T);
    UtilityReport r;
    r.success_prob = q_reward.value;
    r.expected_cost = x1T * std::exp(-x1T) + q_cost1.value + q_cost2.value;
    r.utility = r.success_prob - p.nu * r.expected_cost;
    r.method = EvalMethod::quadrature;
    return r;
}

SearchResult grid_best_response(const PiecewiseConstantControl& a_j, const GameParams& raw,
                                const GridSpec& g) {
    GameParams p = validate_params(raw);
    if (g.n_segments < 1) throw std::invalid_argument("n_segments must be at least 1");

    GridSearchProblem pr;
    pr.n = g.n_segments;
    pr.T = p.horizon;
    pr.nu = p.nu;
    pr.levels = g.effective_levels(p.beta_i);
    pr.build(survival_expsum(a_j, p.horizon));

    RawSearchOutcome raw_out = run_search(pr, g);
    SearchResult res;
    res.control = control_from_choice(pr, raw_out.choice);
    res.utility = quadrature_utility(res.control, a_j, p).utility;
    res.certificate = raw_out.certificate;
    res.exhaustive = raw_out.exhaustive;
    res.evaluated = raw_out.evaluated;
    return res;
}

TwoStageSearchResult grid_best_response_two_stage(const TwoStagePolicy& pi_j,
                                                  const GameParams& raw, const GridSpec& g) {
    GameParams p = validate_params(raw);
    if (p.locks != 2) throw std::invalid_argument("two-stage search requires locks == 2");
    if (g.n_segments < 1) throw std::invalid_argument("n_segments must be at least 1");

    // Stage 2 from the proved closed form: full effort on success iff nu < 1
    // (silence on the nu = 1 tie), silence on failure.
    StageTwoPlan on_success =
        p.nu < 1.0 ? StageTwoPlan::full_on(p.beta_i) : StageTwoPlan::silent();
    StageTwoPlan on_failure = StageTwoPlan::silent();

    PiecewiseExpSum surv = survival_expsum(pi_j.stage1, p.horizon);
    std::vector<ExpTerm> net_s = plan_net_terms(on_success, true, p.nu, p.horizon);
    std::vector<ExpTerm> net_f = plan_net_terms(on_failure, false, p.nu, p.horizon);

    // phi = surv * (net_s - net_f) + net_f
    PiecewiseExpSum phi;
    phi.knots = surv.knots;
    std::vector<ExpTerm> diff = net_s;
    for (const ExpTerm& t : scale_terms(net_f, -1.0)) diff.push_back(t);
    for (const auto& interval_terms : surv.terms) {
        std::vector<ExpTerm> ts = multiply_terms(interval_terms, diff);
        for (const ExpTerm& t : net_f) ts.push_back(t);
        phi.terms.push_back(std::move(ts));
    }

    GridSearchProblem pr;
    pr.n = g.n_segments;
    pr.T = p.horizon;
    pr.nu = p.nu;
    pr.levels = g.effective_levels(p.beta_i);
    pr.build(phi);

    RawSearchOutcome raw_out = run_search(pr, g);

    TwoStageSearchResult res;
    res.policy.stage1 = control_from_choice(pr, raw_out.choice);
    res.policy.on_success = on_success;
    res.policy.on_failure = on_failure;
    res.utility = two_stage_utility(res.policy, pi_j, p).utility;
    res.certificate = raw_out.certificate;
    res.exhaustive = raw_out.exhaustive;
    res.evaluated = raw_out.evaluated;

    if (g.stage2_mode == GridSpec::StageTwoMode::full_grid) {
        // Cross-check the stage-2 collapse: per-tau grid searches against a
        // silent opponent must not beat the closed-form continuation value.
        double max_gap = 0.0;
        const int probes = 8;
        for (int k = 0; k < probes; ++k) {
            double tau = (k + 0.5) * p.horizon / probes;
            double residual = p.horizon - tau;
            GridSearchProblem p2;
            p2.n = 16;
            p2.T = residual;
            p2.nu = p.nu;
            p2.levels = g.effective_levels(p.beta_i);
            PiecewiseExpSum one;
            one.knots = {0.0, residual};
            one.terms = {{ExpTerm{1.0, 0.0}}};
            p2.build(one);
            RawSearchOutcome s2 = run_search(p2, g);
            double closed = analytic::silent_value(1.0, p.nu, p.beta_i, residual, 0.0).value;
            max_gap = std::max(max_gap, s2.objective - closed);
        }
        std::ostringstream os;
        os << res.certificate << "; stage-2 collapse cross-checked at " << probes
           << " contact times, max search-over-closed-form gap " << max_gap;
        res.certificate = os.str();
    }
    return res;
}

}  // namespace lockrace::oracle

#include "lockrace/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lockrace::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Neumaier-compensated accumulator: deterministic sums independent of
// magnitude ordering quirks.
struct KahanSum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

Rng::Rng(RngSpec spec) {
    std::uint64_t seeder = spec.seed ^ (0xD1B54A32D192ED03ull * (spec.stream + 1));
    for (auto& word : s_) word = splitmix64(seeder);
}

std::uint64_t Rng::next_u64() {
    // xoshiro256++
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
    // u in [0,1) => 1-u in (0,1]; -log1p(-u) is exact near 0
    return -std::log1p(-uniform01()) / rate;
}

double sample_contact_time(const PiecewiseConstantControl& a, Rng& rng) {
    const auto& breaks = a.breakpoints();
    const auto& levels = a.levels();
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double r = levels[k];
        if (r <= 0.0) continue;
        const double seg = breaks[k + 1] - breaks[k];
        const double e = rng.exponential(r);
        if (e < seg) return breaks[k] + e;
    }
    return std::numeric_limits<double>::infinity();
}

EpisodeOutcome simulate_episode(std::span<const TwoStagePolicy> policies, const GameParams& raw,
                                Rng& rng) {
    GameParams p = validate_params(raw);
    const std::size_t n = policies.size();
    if (n < 2) throw std::invalid_argument("simulate_episode needs at least 2 agents");
    const double T = p.horizon;

    EpisodeOutcome ep;
    ep.agents.resize(n);

    // stage 1: independent clocks, costs accrue until own contact or the deadline
    for (std::size_t k = 0; k < n; ++k) {
        AgentOutcome& ag = ep.agents[k];
        ag.tau1 = sample_contact_time(policies[k].stage1, rng);
        ag.contacted1 = ag.tau1 <= T;
        ag.cost = policies[k].stage1.cumulative(std::min(ag.tau1, T));
    }

    // lock-1 winner: earliest contact before the deadline; exact float ties by coin
    double best = std::numeric_limits<double>::infinity();
    for (const AgentOutcome& ag : ep.agents)
        if (ag.contacted1) best = std::min(best, ag.tau1);
    if (std::isfinite(best)) {
        std::vector<int> tied;
        for (std::size_t k = 0; k < n; ++k)
            if (ep.agents[k].contacted1 && ep.agents[k].tau1 == best)
                tied.push_back(static_cast<int>(k));
        ep.winner = tied.size() == 1
                        ? tied.front()
                        : tied[static_cast<std::size_t>(rng.next_u64() % tied.size())];
        ep.agents[static_cast<std::size_t>(ep.winner)].lock1_success = true;
    }

    if (p.locks == 1) {
        if (ep.winner >= 0) ep.agents[static_cast<std::size_t>(ep.winner)].reward = 1.0;
        return ep;
    }

    // stage 2: every agent that contacted before T switches per its own flag;
    // only the winner's second contact carries the reward
    for (std::size_t k = 0; k < n; ++k) {
        AgentOutcome& ag = ep.agents[k];
        if (!ag.contacted1 || ag.tau1 >= T) continue;
        const StageTwoPlan& plan =
            ag.lock1_success ? policies[k].on_success : policies[k].on_failure;
        PiecewiseConstantControl c2 = plan.control_for(ag.tau1, T);
        const double residual = T - ag.tau1;
        const double tau2rel = sample_contact_time(c2, rng);
        ag.cost += c2.cumulative(std::min(tau2rel, residual));
        if (tau2rel <= residual) {
            ag.tau2 = ag.tau1 + tau2rel;
            ag.contacted2 = true;
        }
        if (ag.lock1_success && ag.contacted2) ag.reward = 1.0;
    }
    return ep;
}

std::vector<UtilityReport> estimate_utilities(std::span<const TwoStagePolicy> policies,
                                              const GameParams& raw, const EstimateOptions& opt) {
    GameParams p = validate_params(raw);
    if (opt.reps < 1) throw std::invalid_argument("reps must be at least 1");
    const std::size_t n = policies.size();
    std::vector<KahanSum> reward(n), cost(n), util(n), util_sq(n);

    for (long rep = 0; rep < opt.reps; ++rep) {
        Rng rng(RngSpec{opt.rng.seed, opt.rng.stream + static_cast<std::uint64_t>(rep)});
        EpisodeOutcome ep = simulate_episode(policies, p, rng);
        for (std::size_t k = 0; k < n; ++k) {
            const AgentOutcome& ag = ep.agents[k];
            const double u = ag.reward - p.nu * ag.cost;
            reward[k].add(ag.reward);
            cost[k].add(ag.cost);
            util[k].add(u);
            util_sq[k].add(u * u);
        }
    }

    const double m = static_cast<double>(opt.reps);
    std::vector<UtilityReport> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        UtilityReport& r = out[k];
        r.success_prob = reward[k].value() / m;
        r.expected_cost = cost[k].value() / m;
        r.utility = util[k].value() / m;
        r.method = EvalMethod::monte_carlo;
        double var = opt.reps > 1
                         ? std::max(0.0, (util_sq[k].value() - m * r.utility * r.utility) / (m - 1.0))
                         : 0.0;
        r.std_error = std::sqrt(var / m);
    }
    return out;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf,
                    double t_end) {
    const std::size_t n = samples.size();
    if (n == 0) throw std::invalid_argument("ks_statistic needs samples");
    std::vector<double> finite;
    finite.reserve(n);
    for (double s : samples)
        if (s <= t_end) finite.push_back(s);
    std::sort(finite.begin(), finite.end());

    const double dn = static_cast<double>(n);
    double d = 0.0;
    for (std::size_t i = 0; i < finite.size(); ++i) {
        const double f = cdf(finite[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / dn - f));
        d = std::max(d, std::abs(static_cast<double>(i) / dn - f));
    }
    // right end: the empirical mass stays at |finite|/n up to t_end
    d = std::max(d, std::abs(static_cast<double>(finite.size()) / dn - cdf(t_end)));
    return d;
}

std::vector<DeviationPoint> deviation_probe(std::span<const TwoStagePolicy> profile,
                                            const GameParams& raw,
                                            std::span<const double> psi_grid,
                                            const EstimateOptions& opt) {
    GameParams p = validate_params(raw);
    if (profile.size() < 2) throw std::invalid_argument("deviation_probe needs a full profile");

    // base estimate; identical streams across points give common random numbers
    std::vector<TwoStagePolicy> pols(profile.begin(), profile.end());
    const double beta0 = std::max(pols[0].stage1.max_level(), p.beta_i);

    std::vector<DeviationPoint> out;
    out.reserve(psi_grid.size());
    for (double psi : psi_grid) {
        std::vector<TwoStagePolicy> dev = pols;
        dev[0] = p.locks == 2 ? TwoStagePolicy::gamma2(psi, beta0, p.horizon)
                              : TwoStagePolicy::one_lock(
                                    make_threshold_control(psi, beta0, p.horizon));
        KahanSum diff_sum, diff_sq, alt_sum;
        for (long rep = 0; rep < opt.reps; ++rep) {
            RngSpec spec{opt.rng.seed, opt.rng.stream + static_cast<std::uint64_t>(rep)};
            Rng rng_a(spec), rng_b(spec);
            EpisodeOutcome base = simulate_episode(pols, p, rng_a);
            EpisodeOutcome alt = simulate_episode(dev, p, rng_b);
            const double u0 = base.agents[0].reward - p.nu * base.agents[0].cost;
            const double u1 = alt.agents[0].reward - p.nu * alt.agents[0].cost;
            diff_sum.add(u1 - u0);
            diff_sq.add((u1 - u0) * (u1 - u0));
            alt_sum.add(u1);
        }
        const double m = static_cast<double>(opt.reps);
        DeviationPoint pt;
        pt.psi = psi;
        pt.diff = diff_sum.value() / m;
        pt.utility = alt_sum.value() / m;
        double var = opt.reps > 1
                         ? std::max(0.0, (diff_sq.value() - m * pt.diff * pt.diff) / (m - 1.0))
                         : 0.0;
        pt.std_error = std::sqrt(var / m);
        out.push_back(pt);
    }
    return out;
}

}  // namespace lockrace::mc

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "lockrace/control.hpp"
#include "lockrace/params.hpp"
#include "lockrace/policy.hpp"
#include "lockrace/report.hpp"

namespace lockrace::mc {

// Seed plus stream id; distinct streams are disjoint, identical specs reproduce
// bit-identical draws on every platform.
struct RngSpec {
    std::uint64_t seed = 42;
    std::uint64_t stream = 0;
};

// xoshiro256++ seeded through splitmix64; uniforms take the top 53 bits.
class Rng {
  public:
    explicit Rng(RngSpec spec);
    std::uint64_t next_u64();
    double uniform01();                 // [0, 1)
    double exponential(double rate);    // rate > 0
  private:
    std::uint64_t s_[4];
};

struct AgentOutcome {
    double tau1 = std::numeric_limits<double>::infinity();  // absolute first-lock contact
    double tau2 = std::numeric_limits<double>::infinity();  // absolute second-lock contact
    bool contacted1 = false;       // tau1 <= T
    bool lock1_success = false;    // first among all agents
    bool contacted2 = false;
    double cost = 0.0;             // realized ∫ a over active durations, both stages
    double reward = 0.0;
};

struct EpisodeOutcome {
    std::vector<AgentOutcome> agents;
    int winner = -1;  // lock-1 winner, -1 if nobody contacted in time
};

// First event of the controlled Poisson clock: exact per-segment exponential
// inversion; +inf when no contact occurs within the span.
double sample_contact_time(const PiecewiseConstantControl& a, Rng& rng);

// One play of the acquisition game under the information protocol: each agent
// learns only its own contact outcome, at its own contact time.
EpisodeOutcome simulate_episode(std::span<const TwoStagePolicy> policies, const GameParams& p,
                                Rng& rng);

struct EstimateOptions {
    long reps = 1'000'000;
    RngSpec rng;  // replica r uses stream rng.stream + r
};

// Sample means of (reward, cost, reward - nu*cost) per agent with the stderr of
// the utility.  Deterministic given the RngSpec.
std::vector<UtilityReport> estimate_utilities(std::span<const TwoStagePolicy> policies,
                                              const GameParams& p, const EstimateOptions& opt);

// Kolmogorov-Smirnov statistic of a censored contact-time sample against
// F(t) = cdf(t) on [0, t_end]; samples beyond t_end (or +inf) count as censored.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf,
                    double t_end);

struct DeviationPoint {
    double psi = 0.0;        // agent-0 deviation threshold
    double utility = 0.0;    // MC estimate of agent 0's utility at the deviation
    double diff = 0.0;       // utility - utility(profile), common random numbers
    double std_error = 0.0;  // stderr of diff
};

// Unilateral threshold-deviation probe: agent 0 deviates over a psi grid while
// everyone else plays the profile; common random numbers across points.
std::vector<DeviationPoint> deviation_probe(std::span<const TwoStagePolicy> profile,
                                            const GameParams& p,
                                            std::span<const double> psi_grid,
                                            const EstimateOptions& opt);

}  // namespace lockrace::mc

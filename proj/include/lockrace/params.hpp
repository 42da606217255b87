#pragma once

namespace lockrace {

// Game primitives: two (or N) agents race to contact one or two locks before
// the deadline, controlling the rate of their Poisson contact clocks.
struct GameParams {
    double beta_i = 1.0;   // max contact rate of agent i
    double beta_j = 1.0;   // max contact rate of agent j
    double nu = 0.5;       // cost per unit of time-integrated rate
    double horizon = 1.0;  // deadline T
    int locks = 1;         // 1 or 2
    int n_agents = 2;      // > 2 only for the N-player conjecture ops
};

// Returns the params unchanged if all invariants hold; throws
// std::invalid_argument naming the offending field otherwise.
GameParams validate_params(const GameParams& raw);

// Exchange the roles of agents i and j.
GameParams swap_agents(const GameParams& p);

enum class ContactFlag { start, success, failure };

// Information state at a decision epoch: z_k = (flag, own contact time).
struct StageState {
    ContactFlag flag = ContactFlag::start;
    double contact_time = 0.0;  // meaningless when flag == start
};

}  // namespace lockrace

#include "lockrace/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lockrace {

namespace {
void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

GameParams validate_params(const GameParams& raw) {
    require(std::isfinite(raw.beta_i) && raw.beta_i > 0.0, "beta_i must be positive");
    require(std::isfinite(raw.beta_j) && raw.beta_j > 0.0, "beta_j must be positive");
    require(std::isfinite(raw.nu) && raw.nu > 0.0, "nu must be positive");
    require(std::isfinite(raw.horizon) && raw.horizon > 0.0, "horizon must be positive");
    require(raw.locks == 1 || raw.locks == 2, "locks must be 1 or 2");
    require(raw.n_agents >= 2, "n_agents must be at least 2");
    return raw;
}

GameParams swap_agents(const GameParams& p) {
    GameParams q = p;
    q.beta_i = p.beta_j;
    q.beta_j = p.beta_i;
    return q;
}

}  // namespace lockrace

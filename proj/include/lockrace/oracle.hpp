#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lockrace/control.hpp"
#include "lockrace/params.hpp"
#include "lockrace/policy.hpp"
#include "lockrace/report.hpp"

namespace lockrace::oracle {

// Discretization of the action space for brute-force best-response search.
struct GridSpec {
    int n_segments = 40;
    std::vector<double> levels;  // empty -> {0, beta} (n <= 12 also probes beta/2)
    enum class StageTwoMode { theorem1, full_grid } stage2_mode = StageTwoMode::theorem1;
    bool allow_local_search = true;      // permit coordinate ascent beyond the exhaustive cap
    std::uint64_t search_seed = 1234;    // seeds the local-search random starts

    std::vector<double> effective_levels(double beta) const;
};

// One-lock utility by adaptive quadrature of the optimal-control form
//   J = ∫₀^T (h_j(s) - nu x(s)) e^{-x(s)} a_i(s) ds + g(x(T)),
// with x = ā_i evaluated exactly.  Independent of the closed-form path.
UtilityReport quadrature_utility(const PiecewiseConstantControl& a_i,
                                 const PiecewiseConstantControl& a_j, const GameParams& p);

// Uncontested problem with reward c over [0, horizon] (Theorem-1 setting).
double quadrature_silent_utility(const PiecewiseConstantControl& a, double reward, double nu,
                                 double horizon);

// Two-lock utility by backward evaluation with nested quadrature (stage-2
// reward/cost integrals per outer node are themselves quadratures).
UtilityReport two_stage_utility(const TwoStagePolicy& pi_i, const TwoStagePolicy& pi_j,
                                const GameParams& p);

struct SearchResult {
    PiecewiseConstantControl control;
    double utility = 0.0;        // quadrature utility of the argmax
    std::string certificate;     // "exhaustive (dp)" | "exhaustive (enumeration)" | "local (coordinate ascent)"
    bool exhaustive = false;
    long evaluated = 0;
};

// Brute-force best response over the level grid.  Exhaustive (lattice DP or
// enumeration when |levels|^n <= 2^20); otherwise coordinate ascent from 8
// random starts when allowed, else throws suggesting the local mode.
SearchResult grid_best_response(const PiecewiseConstantControl& a_j, const GameParams& p,
                                const GridSpec& g);

struct TwoStageSearchResult {
    TwoStagePolicy policy;
    double utility = 0.0;
    std::string certificate;
    bool exhaustive = false;
    long evaluated = 0;
};

// Two-lock best response against pi_j: stage 2 from the proved closed form
// (full effort on success iff nu < 1, silence on failure), stage 1 by grid
// search against the induced continuation values.  full_grid mode additionally
// cross-checks the stage-2 collapse by per-tau searches.
TwoStageSearchResult grid_best_response_two_stage(const TwoStagePolicy& pi_j, const GameParams& p,
                                                  const GridSpec& g);

}  // namespace lockrace::oracle

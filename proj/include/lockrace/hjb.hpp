#pragma once

#include <functional>
#include <string>
#include <vector>

namespace lockrace::hjb {

// An evaluable candidate value surface W(t, x) for one stage's optimal control
// problem, with closed-form partials where available.
struct CandidateValue {
    std::string name;
    double horizon = 0.0;      // terminal time of this stage's problem
    double beta_own = 0.0;     // control bound
    double switch_time = 0.0;  // declared bang-bang switch t1 (full rate before, silent after)
    std::vector<double> seams; // interior times where W is continuous but not C^1

    std::function<double(double, double)> value;        // W(t, x)
    std::function<double(double, double)> dvalue_dt;    // W_t, empty if not closed-form
    std::function<double(double, double)> dvalue_dx;    // W_x
    std::function<double(double, double, double)> running_cost;  // L(t, x, a)
    std::function<double(double)> terminal;             // g(x)

    bool has_closed_partials() const { return static_cast<bool>(dvalue_dt) && static_cast<bool>(dvalue_dx); }
};

// Candidate for the uncontested problem (reward c, horizon U):
//   nu <= c:  W = (-nu x - nu + c) e^{-x} + kappa e^{-x + beta t},  kappa = e^{-beta U}(nu - c)
//   nu  > c:  W = -nu x e^{-x}
CandidateValue candidate_W_silent(double reward, double nu, double beta, double horizon);

// The t1 the proof pairs with Gamma(psi): theta_nu = min(-ln(nu)/beta_j, T) when
// exp(-beta_j psi) <= nu, else T.
double threshold_switch_time(double beta_j, double nu, double psi, double horizon);

// Three-piece candidate for the best response against Gamma(psi), with the
// two-branch kappa_1.  Throws std::invalid_argument naming the violated case if
// (psi, t1) is inconsistent with the case analysis.
CandidateValue candidate_W_threshold(double beta_i, double beta_j, double nu, double psi,
                                     double t1, double horizon);

struct GridSpec2D {
    double h_t = 1e-3;
    double h_x = 1e-3;
    double x_max = 0.0;  // 0 -> beta_own * horizon + 1
};

struct ResidualReport {
    double max_residual = 0.0;    // max |W_t + sup_a {L + a W_x}| over interior nodes
    double boundary_error = 0.0;  // max |W(T, x) - g(x)|
    long sign_violations = 0;     // bang-bang structure violations outside seam bands
    double h_t = 0.0, h_x = 0.0;
    bool used_closed_partials = true;
    bool ok = true;       // false on non-finite candidate evaluation
    std::string note;
};

// Evaluates the HJB residual on the grid.  sup over a is an endpoint comparison
// {0, beta_own} (the bracket is affine in a).  One-cell exclusion bands are
// applied around each seam.  Non-finite values are reported, not thrown.
ResidualReport hjb_residual(const CandidateValue& cand, const GridSpec2D& grid,
                            bool force_finite_difference = false);

}  // namespace lockrace::hjb

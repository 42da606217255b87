#include "lockrace/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lockrace::hjb {

namespace {

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol; }

}  // namespace

CandidateValue candidate_W_silent(double reward, double nu, double beta, double horizon) {
    if (!(beta > 0.0) || !(horizon > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("candidate_W_silent requires positive beta, horizon, nu");
    CandidateValue cand;
    cand.name = "silent";
    cand.horizon = horizon;
    cand.beta_own = beta;
    cand.terminal = [nu](double x) { return -nu * x * std::exp(-x); };
    cand.running_cost = [reward, nu](double t, double x, double a) {
        (void)t;
        return (reward - nu * x) * std::exp(-x) * a;
    };
    if (nu <= reward) {
        const double kappa = std::exp(-beta * horizon) * (nu - reward);
        cand.switch_time = horizon;
        cand.value = [=](double t, double x) {
            return (-nu * x - nu + reward) * std::exp(-x) + kappa * std::exp(-x + beta * t);
        };
        cand.dvalue_dx = [=](double t, double x) {
            return (nu * x - reward) * std::exp(-x) - kappa * std::exp(-x + beta * t);
        };
        cand.dvalue_dt = [=](double t, double x) {
            (void)x;
            return beta * kappa * std::exp(-x + beta * t);
        };
    } else {
        cand.switch_time = 0.0;
        cand.value = [nu](double t, double x) {
            (void)t;
            return -nu * x * std::exp(-x);
        };
        cand.dvalue_dx = [nu](double t, double x) {
            (void)t;
            return (nu * x - nu) * std::exp(-x);
        };
        cand.dvalue_dt = [](double, double) { return 0.0; };
    }
    return cand;
}

double threshold_switch_time(double beta_j, double nu, double psi, double horizon) {
    if (std::exp(-beta_j * psi) <= nu) return std::min(-std::log(nu) / beta_j, horizon);
    return horizon;
}

CandidateValue candidate_W_threshold(double beta_i, double beta_j, double nu, double psi,
                                     double t1, double horizon) {
    if (!(beta_i > 0.0) || !(beta_j > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("candidate_W_threshold requires positive rates and nu");
    if (psi < 0.0 || psi > horizon)
        throw std::invalid_argument("candidate_W_threshold requires 0 <= psi <= horizon");

    const bool case1 = std::exp(-beta_j * psi) <= nu;
    const double expected_t1 = threshold_switch_time(beta_j, nu, psi, horizon);
    if (!near(t1, expected_t1)) {
        std::ostringstream os;
        if (case1) {
            os << "case 1 (exp(-beta_j psi) <= nu) requires t1 = theta_nu = " << expected_t1
               << ", got " << t1;
        } else {
            os << "case 2 (exp(-beta_j psi) > nu) requires t1 = horizon = " << expected_t1
               << ", got " << t1;
        }
        throw std::invalid_argument(os.str());
    }
    t1 = expected_t1;

    const double C = beta_i / (beta_i + beta_j);
    double kappa1;
    if (nu >= std::exp(-psi * beta_j)) {
        kappa1 = nu * std::exp(-beta_i * t1) - C * std::exp(-(beta_i + beta_j) * t1);
    } else {
        kappa1 = nu * std::exp(-beta_i * t1) - C * std::exp(-(beta_i + beta_j) * psi) +
                 std::exp(-beta_j * psi) * (std::exp(-beta_i * psi) - std::exp(-beta_i * t1));
    }
    const double A = (std::exp(-beta_j * psi) - nu) * std::exp(-beta_i * t1);
    const double B = std::exp(-beta_j * psi);

    CandidateValue cand;
    cand.name = case1 ? "threshold (case 1)" : "threshold (case 2)";
    cand.horizon = horizon;
    cand.beta_own = beta_i;
    cand.switch_time = t1;
    for (double s : {psi, t1})
        if (s > 0.0 && s < horizon) cand.seams.push_back(s);
    std::sort(cand.seams.begin(), cand.seams.end());
    cand.seams.erase(std::unique(cand.seams.begin(), cand.seams.end()), cand.seams.end());

    // piece index: 0 for t < min(t1, psi); 1 for psi <= t < t1; 2 for t >= t1
    auto piece = [psi, t1](double t) {
        if (t >= t1) return 2;
        if (t >= psi) return 1;
        return 0;
    };
    cand.value = [=](double t, double x) {
        switch (piece(t)) {
            case 0:
                return (-nu * x - nu) * std::exp(-x) + C * std::exp(-x - beta_j * t) +
                       kappa1 * std::exp(-x + beta_i * t);
            case 1:
                return -A * std::exp(-x + beta_i * t) + (B - nu * x - nu) * std::exp(-x);
            default:
                return -nu * x * std::exp(-x);
        }
    };
    cand.dvalue_dx = [=](double t, double x) {
        switch (piece(t)) {
            case 0:
                return nu * x * std::exp(-x) - C * std::exp(-x - beta_j * t) -
                       kappa1 * std::exp(-x + beta_i * t);
            case 1:
                return A * std::exp(-x + beta_i * t) - (B - nu * x) * std::exp(-x);
            default:
                return (nu * x - nu) * std::exp(-x);
        }
    };
    cand.dvalue_dt = [=](double t, double x) {
        switch (piece(t)) {
            case 0:
                return -(beta_i * beta_j / (beta_i + beta_j)) * std::exp(-x - beta_j * t) +
                       beta_i * kappa1 * std::exp(-x + beta_i * t);
            case 1:
                return -beta_i * A * std::exp(-x + beta_i * t);
            default:
                return 0.0;
        }
    };
    cand.running_cost = [=](double t, double x, double a) {
        return (std::exp(-beta_j * std::min(t, psi)) - nu * x) * std::exp(-x) * a;
    };
    cand.terminal = [nu](double x) { return -nu * x * std::exp(-x); };
    return cand;
}

ResidualReport hjb_residual(const CandidateValue& cand, const GridSpec2D& grid,
                            bool force_finite_difference) {
    if (!(grid.h_t > 0.0) || !(grid.h_x > 0.0))
        throw std::invalid_argument("grid spacings must be positive");
    const double x_max = grid.x_max > 0.0 ? grid.x_max : cand.beta_own * cand.horizon + 1.0;
    if (x_max < cand.beta_own * cand.horizon)
        throw std::invalid_argument("x_max must cover the reachable states beta * horizon");

    ResidualReport rep;
    rep.h_t = grid.h_t;
    rep.h_x = grid.h_x;
    rep.used_closed_partials = cand.has_closed_partials() && !force_finite_difference;

    const long nt = std::lround(cand.horizon / grid.h_t);
    const long nx = std::lround(x_max / grid.h_x);
    const double beta = cand.beta_own;
    const double sign_tol = rep.used_closed_partials ? 1e-12 : 1e-5;

    auto fail = [&](double t, double x) {
        rep.ok = false;
        std::ostringstream os;
        os << "non-finite candidate evaluation at (t=" << t << ", x=" << x << ")";
        rep.note = os.str();
    };

    for (long k = 1; k < nt && rep.ok; ++k) {
        const double t = static_cast<double>(k) * grid.h_t;
        bool in_seam_band = false;
        for (double s : cand.seams)
            in_seam_band = in_seam_band || std::abs(t - s) <= grid.h_t;
        const bool near_switch = std::abs(t - cand.switch_time) <= grid.h_t || in_seam_band;

        for (long l = 1; l < nx; ++l) {
            const double x = static_cast<double>(l) * grid.h_x;
            double wt, wx;
            if (rep.used_closed_partials) {
                wt = cand.dvalue_dt(t, x);
                wx = cand.dvalue_dx(t, x);
            } else {
                wt = (cand.value(t + grid.h_t, x) - cand.value(t - grid.h_t, x)) / (2.0 * grid.h_t);
                wx = (cand.value(t, x + grid.h_x) - cand.value(t, x - grid.h_x)) / (2.0 * grid.h_x);
            }
            const double b0 = cand.running_cost(t, x, 0.0);
            const double bb = cand.running_cost(t, x, beta) + beta * wx;
            if (!std::isfinite(wt) || !std::isfinite(wx) || !std::isfinite(b0) ||
                !std::isfinite(bb)) {
                fail(t, x);
                break;
            }
            if (!in_seam_band) {
                const double resid = wt + std::max(b0, bb);
                rep.max_residual = std::max(rep.max_residual, std::abs(resid));
            }
            if (!near_switch) {
                const double slope = (bb - b0) / beta;  // per-unit-rate gain of acting
                if (t < cand.switch_time && slope < -sign_tol) ++rep.sign_violations;
                if (t > cand.switch_time && slope > sign_tol) ++rep.sign_violations;
            }
        }
    }

    for (long l = 0; l <= nx && rep.ok; ++l) {
        const double x = static_cast<double>(l) * grid.h_x;
        const double err = std::abs(cand.value(cand.horizon, x) - cand.terminal(x));
        if (!std::isfinite(err)) {
            fail(cand.horizon, x);
            break;
        }
        rep.boundary_error = std::max(rep.boundary_error, err);
    }
    return rep;
}

}  // namespace lockrace::hjb

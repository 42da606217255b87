#include "lockrace/quadrature.hpp"

#include <cmath>

namespace lockrace {

namespace {

struct AdaptiveState {
    const std::function<double(double)>* f;
    double tol;
    long budget;
    long used = 0;
    double error_acc = 0.0;
    bool converged = true;
};

double simpson(double fa, double fm, double fb, double h) {
    return (fa + 4.0 * fm + fb) * h / 6.0;
}

// Classic adaptive Simpson with Richardson extrapolation.  depth limits
// runaway recursion on pathological integrands; the panel budget is the
// documented stopping rule.
double adapt(AdaptiveState& st, double a, double b, double fa, double fm, double fb, double whole,
             double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = (*st.f)(lm), frm = (*st.f)(rm);
    st.used += 2;
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double err = (left + right - whole) / 15.0;
    if (std::abs(err) <= tol || depth >= 48 || st.used >= st.budget) {
        st.error_acc += std::abs(err);
        return left + right + err;
    }
    // floor keeps rounding noise in the integrand from forcing endless splits
    double child_tol = std::max(0.5 * tol, 1e-16);
    return adapt(st, a, m, fa, flm, fm, left, child_tol, depth + 1) +
           adapt(st, m, b, fm, frm, fb, right, child_tol, depth + 1);
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, long max_panels) {
    QuadratureResult res;
    if (!(b > a)) return res;
    AdaptiveState st{&f, abs_tol, max_panels};
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    st.used = 3;
    double whole = simpson(fa, fm, fb, b - a);
    res.value = adapt(st, a, b, fa, fm, fb, whole, abs_tol, 0);
    res.error_estimate = st.error_acc;
    res.panels = st.used;
    res.converged = st.error_acc <= abs_tol;
    return res;
}

QuadratureResult integrate_adaptive_segmented(const std::function<double(double)>& f,
                                              std::span<const double> knots, double abs_tol,
                                              long max_panels) {
    QuadratureResult total;
    if (knots.size() < 2) return total;
    std::size_t pieces = knots.size() - 1;
    for (std::size_t k = 0; k < pieces; ++k) {
        if (!(knots[k + 1] > knots[k])) continue;
        QuadratureResult r =
            integrate_adaptive(f, knots[k], knots[k + 1], abs_tol / static_cast<double>(pieces),
                               max_panels);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.panels += r.panels;
    }
    total.converged = total.error_estimate <= abs_tol;
    return total;
}

namespace {

struct GaussRule {
    std::vector<double> nodes, weights;  // on [-1, 1]
};

// Nodes by Newton iteration on the Legendre recurrence.
GaussRule make_gauss_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int order) {
    static const GaussRule rule24 = make_gauss_rule(24);
    const GaussRule rule = order == 24 ? rule24 : make_gauss_rule(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

}  // namespace lockrace

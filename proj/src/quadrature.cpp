#include "expstable/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "expstable/errors.hpp"

namespace expstable {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& g, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = g(lm);
    const double frm = g(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(g, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(g, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        double abs_tol, int max_depth) {
    if (!(a < b)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = g(a);
    const double fb = g(b);
    const double fm = g(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return simpson_rec(g, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

double integrate_exp_weighted(const TestFunction& f, double abs_tol) {
    const auto integrand = [&f](double x) { return f.eval(x) * std::exp(-x); };

    double lo = f.support.lo;
    double hi = f.support.hi;
    const bool left_open = !std::isfinite(lo);
    const bool right_open = !std::isfinite(hi);

    double core_lo = left_open ? (right_open ? -1.0 : hi - 1.0) : lo;
    double core_hi = right_open ? (left_open ? 1.0 : lo + 1.0) : hi;

    std::vector<double> cuts;
    cuts.push_back(core_lo);
    cuts.push_back(core_hi);
    for (double b : f.breakpoints) {
        if (std::isfinite(b) && b > core_lo && b < core_hi) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += adaptive_simpson(integrand, cuts[i], cuts[i + 1], abs_tol);
    }

    // The weight kills the right tail for bounded f; extend until a block
    // stops contributing.
    if (right_open) {
        double a = core_hi;
        for (int block = 0; block < 400; ++block) {
            const double piece = adaptive_simpson(integrand, a, a + 4.0, abs_tol);
            total += piece;
            a += 4.0;
            if (std::abs(piece) < 0.25 * abs_tol) break;
            if (block == 399) throw NonIntegrableError("right tail of <f, e^{-x}dx> did not converge");
        }
    }

    // Left extension fights the growing weight: demand decaying blocks.
    if (left_open) {
        double b = core_lo;
        double prev = kInf;
        int growing = 0;
        for (int block = 0; block < 400; ++block) {
            const double piece = adaptive_simpson(integrand, b - 4.0, b, abs_tol);
            total += piece;
            b -= 4.0;
            if (std::abs(piece) < 0.25 * abs_tol) break;
            growing = (std::abs(piece) >= prev) ? growing + 1 : 0;
            prev = std::abs(piece);
            if (growing >= 3 || block == 399) {
                throw NonIntegrableError("left tail of <f, e^{-x}dx> did not converge");
            }
        }
    }
    return total;
}

}  // namespace expstable

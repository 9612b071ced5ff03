#include "wpcn/numerics.hpp"

#include <cmath>

namespace wpcn {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// Series around the branch point x = -1/e, in p = sqrt(2(1 + e*x)).
double branch_point_guess(double x) {
    const double p = std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
    // w = -1 + p - p^2/3 + 11 p^3/72 - 43 p^4/540
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)));
}

double initial_guess(double x) {
    if (x < -0.25) return branch_point_guess(x);
    if (x < 1.0) {
        // w ~ x (1 - x + 3x^2/2) near 0
        return x * (1.0 - x * (1.0 - 1.5 * x));
    }
    // Asymptotic: w ~ ln x - ln ln x
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x, const RootFindConfig& cfg) {
    if (std::isnan(x)) throw DomainError("lambert_w0: NaN input");
    if (x < -kInvE) {
        // Allow round-off at the branch point itself.
        if (x > -kInvE - 1e-15) return -1.0;
        throw DomainError("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) return 0.0;

    const double tol = cfg.abs_tol * std::max(1.0, std::fabs(x));
    double w = initial_guess(x);
    if (w < -1.0) w = -1.0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        if (std::fabs(f) <= tol) return w;
        // Halley step
        const double fp = ew * (w + 1.0);
        const double fpp = ew * (w + 2.0);
        double denom = fp - 0.5 * f * fpp / fp;
        double step;
        if (denom != 0.0 && std::isfinite(denom)) {
            step = f / denom;
        } else {
            step = f / fp;
        }
        double w_next = w - step;
        if (w_next < -1.0) w_next = 0.5 * (w - 1.0);  // stay on principal branch
        if (!std::isfinite(w_next)) break;
        w = w_next;
    }

    // Fallback: bisection on g(w) = w e^w - x over [-1, max(w, ln(x)+1)].
    double lo = -1.0;
    double hi = std::max(1.0, std::max(w, x > 0 ? std::log(x) + 1.0 : 0.0));
    while (hi * std::exp(hi) < x) hi *= 2.0;
    for (int it = 0; it < 2 * cfg.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = mid * std::exp(mid) - x;
        if (std::fabs(f) <= tol) return mid;
        if (f < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double bisect_root(const std::function<double(double)>& f, double lb, double ub,
                   const RootFindConfig& cfg) {
    if (lb > ub) throw BracketError("bisect_root: lb > ub");
    double flb = f(lb);
    double fub = f(ub);
    if (flb == 0.0) return lb;
    if (fub == 0.0) return ub;
    if (flb * fub > 0.0) throw BracketError("bisect_root: no sign change on [lb, ub]");

    for (int it = 0; it < cfg.max_iter && (ub - lb) > 2.0 * cfg.abs_tol; ++it) {
        const double mid = 0.5 * (lb + ub);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm * flb < 0.0) {
            ub = mid;
            fub = fm;
        } else {
            lb = mid;
            flb = fm;
        }
    }
    return 0.5 * (lb + ub);
}

}  // namespace wpcn

#pragma once

#include <functional>
#include <stdexcept>

namespace wpcn {

struct RootFindConfig {
    double abs_tol = 1e-12;
    int max_iter = 200;
};

// Principal branch of the Lambert W function, defined for x >= -1/e.
// Residual |w*exp(w) - x| <= tol * max(1, |x|).
double lambert_w0(double x, const RootFindConfig& cfg = {});

// Bisection on a sign-changing scalar function. Requires f(lb)*f(ub) <= 0.
double bisect_root(const std::function<double(double)>& f, double lb, double ub,
                   const RootFindConfig& cfg = {});

class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class BracketError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace wpcn

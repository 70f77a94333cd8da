#pragma once

#include <cstddef>
#include <functional>
#include <limits>

namespace expcomp {

using RealFunction = std::function<double(double)>;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ln Γ(a) for a > 0. Throws DomainError otherwise.
double ln_gamma(double a);

/// Γ(a) for a > 0; throws OutOfRangeError on overflow.
double gamma_function(double a);

/// ψ(a) = d/da ln Γ(a), a > 0.
double digamma(double a);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_lower_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), a > 0, x >= 0.
double regularized_upper_gamma(double a, double x);

/// Upper incomplete gamma Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt.
///
/// Any real shape is accepted when x > 0; for a <= 0 the routine lifts the
/// shape into (0, 1] with Γ(a+1, x) = a Γ(a, x) + x^a e^{-x} (or starts from
/// E1 for nonpositive integers) unless x is large enough for the continued
/// fraction, which converges for every a. x == 0 is allowed for a > 0 and
/// returns Γ(a). Throws DomainError for x < 0 or (x == 0, a <= 0), and
/// OutOfRangeError if the value overflows.
double upper_incomplete_gamma(double a, double x);

/// Exponential integral E1(x) = Γ(0, x), x > 0.
double exponential_integral_e1(double x);

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double abs_tolerance = 1e-10;
  double rel_tolerance = 1e-10;
  std::size_t max_evaluations = 4'000'000;
};

/// Globally adaptive Gauss-Legendre quadrature of f over (lo, hi).
///
/// hi may be +infinity; the tail beyond max(lo, 0) + 1 is mapped with
/// y = A·exp(s/(1-s)), which keeps slowly decaying power tails smooth in s.
/// The estimate satisfies abs_error_estimate <= max(abs_tol, rel_tol·|value|)
/// or ConvergenceError is thrown once max_evaluations is exhausted.
QuadratureResult adaptive_quadrature(const RealFunction& f, double lo, double hi,
                                     const QuadratureOptions& options = {});

struct RootOptions {
  double relative_tolerance = 1e-12;
  double absolute_tolerance = 1e-300;
  int max_iterations = 500;
};

/// Brent's method with bisection fallback on [lo, hi]. Requires
/// f(lo)·f(hi) <= 0, otherwise InvalidBracketError.
double find_root_bracketed(const RealFunction& f, double lo, double hi,
                           const RootOptions& options = {});

}  // namespace expcomp

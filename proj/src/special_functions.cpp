#include "expcomp/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "expcomp/errors.hpp"

namespace expcomp {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxSeriesTerms = 100000;

double lgamma_threadsafe(double a) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(a, &sign);
#else
  return std::lgamma(a);
#endif
}

// Σ_{n>=0} x^n / (a (a+1) ... (a+n)), so that γ(a, x) = x^a e^{-x} · series.
double lower_gamma_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kMaxSeriesTerms; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) return sum;
  }
  throw ConvergenceError("incomplete gamma series did not converge (a=" + std::to_string(a) +
                         ", x=" + std::to_string(x) + ")");
}

// Modified Lentz continued fraction h with Γ(a, x) = x^a e^{-x} · h.
// Converges for every real a when x > 0; fast once x is moderately large.
double upper_gamma_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxSeriesTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge (a=" +
                         std::to_string(a) + ", x=" + std::to_string(x) + ")");
}

double checked_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw OutOfRangeError(std::string(what) + " overflows");
  return value;
}

// Γ(a, x) for a > 0, x > 0.
double upper_gamma_positive(double a, double x) {
  if (x < a + 1.0) {
    const double lower_log = a * std::log(x) - x + std::log(lower_gamma_series(a, x));
    const double log_gamma_a = lgamma_threadsafe(a);
    const double p = std::exp(lower_log - log_gamma_a);
    return std::exp(log_gamma_a + std::log1p(-p));
  }
  return std::exp(a * std::log(x) - x) * upper_gamma_fraction(a, x);
}

}  // namespace

double ln_gamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("ln_gamma requires a finite a > 0, got " + std::to_string(a));
  }
  return lgamma_threadsafe(a);
}

double gamma_function(double a) {
  return checked_finite(std::exp(ln_gamma(a)), "gamma function");
}

double digamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("digamma requires a finite a > 0, got " + std::to_string(a));
  }
  double result = 0.0;
  while (a < 12.0) {
    result -= 1.0 / a;
    a += 1.0;
  }
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  result += std::log(a) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return result;
}

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("regularized_lower_gamma requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) {
    return std::exp(a * std::log(x) - x - lgamma_threadsafe(a)) * lower_gamma_series(a, x);
  }
  return 1.0 - regularized_upper_gamma(a, x);
}

double regularized_upper_gamma(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw DomainError("regularized_upper_gamma requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - regularized_lower_gamma(a, x);
  return std::exp(a * std::log(x) - x - lgamma_threadsafe(a)) * upper_gamma_fraction(a, x);
}

double exponential_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("E1 requires x > 0");
  if (x >= 1.0) return std::exp(-x) * upper_gamma_fraction(0.0, x);
  // E1(x) = -γ - ln x - Σ_{k>=1} (-x)^k / (k · k!)
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= -x / k;
    const double contribution = term / k;
    sum += contribution;
    if (std::abs(contribution) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(x) - sum;
}

double upper_incomplete_gamma(double a, double x) {
  if (std::isnan(a) || std::isnan(x)) throw DomainError("upper_incomplete_gamma: NaN argument");
  if (x < 0.0) throw DomainError("upper_incomplete_gamma requires x >= 0");
  if (std::isinf(x)) return 0.0;
  if (x == 0.0) {
    if (a > 0.0) return gamma_function(a);
    throw DomainError("upper_incomplete_gamma diverges for x = 0 and a <= 0");
  }
  if (a > 0.0) return checked_finite(upper_gamma_positive(a, x), "upper incomplete gamma");
  if (x >= 1.0) {
    return checked_finite(std::exp(a * std::log(x) - x) * upper_gamma_fraction(a, x),
                          "upper incomplete gamma");
  }

  // Lift into (0, 1] (or to 0 for integers) and step down with
  // Γ(s-1, x) = (Γ(s, x) - x^{s-1} e^{-x}) / (s-1).
  const double lifts = std::ceil(-a);
  const bool integer_shape = (a == -lifts);
  const int steps = static_cast<int>(lifts);
  double value = integer_shape ? exponential_integral_e1(x) : upper_gamma_positive(a + steps, x);
  const double log_x = std::log(x);
  for (int j = steps; j >= 1; --j) {
    const double s_minus_one = a + (j - 1);
    value = (value - std::exp(s_minus_one * log_x - x)) / s_minus_one;
  }
  return checked_finite(value, "upper incomplete gamma");
}

// ---------------------------------------------------------------------------
// Adaptive quadrature

namespace {

constexpr int kGaussPoints = 15;

struct GaussRule {
  std::array<double, kGaussPoints> nodes{};
  std::array<double, kGaussPoints> weights{};
};

// Legendre roots by Newton iteration on the three-term recurrence.
GaussRule make_gauss_rule() {
  GaussRule rule;
  constexpr int n = kGaussPoints;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      derivative = n * (z * p0 - p1) / (z * z - 1.0);
      const double previous = z;
      z = previous - p0 / derivative;
      if (std::abs(z - previous) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

struct Segment {
  double a;
  double b;
  double left;   // rule over [a, mid]
  double right;  // rule over [mid, b]
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(const RealFunction& g, const QuadratureOptions& options)
      : g_(g), options_(options) {}

  double rule(double a, double b) {
    const auto& r = gauss_rule();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < kGaussPoints; ++i) {
      const double v = g_(mid + half * r.nodes[i]);
      if (std::isnan(v)) throw DomainError("integrand returned NaN");
      sum += r.weights[i] * v;
    }
    evaluations_ += kGaussPoints;
    return sum * half;
  }

  Segment make_segment(double a, double b, double coarse) {
    const double mid = 0.5 * (a + b);
    const double left = rule(a, mid);
    const double right = rule(mid, b);
    const double value = left + right;
    return {a, b, left, right, value, std::abs(value - coarse)};
  }

  QuadratureResult run(const std::vector<double>& breaks) {
    std::priority_queue<Segment> heap;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double a = breaks[i];
      const double b = breaks[i + 1];
      heap.push(make_segment(a, b, rule(a, b)));
    }
    double frozen_value = 0.0;
    double frozen_error = 0.0;
    std::size_t iteration = 0;
    auto totals = [&]() {
      double value = frozen_value;
      double error = frozen_error;
      auto copy = heap;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
      return std::pair{value, error};
    };
    auto [value, error] = totals();
    while (true) {
      const double tolerance = std::max(options_.abs_tolerance, options_.rel_tolerance * std::abs(value));
      if (error <= tolerance) break;
      if (heap.empty() || heap.top().error <= 0.0) break;
      if (evaluations_ >= options_.max_evaluations) {
        throw ConvergenceError("adaptive quadrature exhausted " + std::to_string(evaluations_) +
                               " evaluations (estimate " + std::to_string(value) +
                               ", error " + std::to_string(error) + ")");
      }
      Segment worst = heap.top();
      heap.pop();
      const double mid = 0.5 * (worst.a + worst.b);
      if (!(mid > worst.a && mid < worst.b) ||
          (worst.b - worst.a) <= 64.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
        frozen_value += worst.value;
        frozen_error += worst.error;
        continue;
      }
      Segment left = make_segment(worst.a, mid, worst.left);
      Segment right = make_segment(mid, worst.b, worst.right);
      value += left.value + right.value - worst.value;
      error += left.error + right.error - worst.error;
      heap.push(left);
      heap.push(right);
      if (++iteration % 512 == 0) std::tie(value, error) = totals();
    }
    std::tie(value, error) = totals();
    const double tolerance = std::max(options_.abs_tolerance, options_.rel_tolerance * std::abs(value));
    if (error > tolerance) {
      throw ConvergenceError("adaptive quadrature could not reach tolerance (error " +
                             std::to_string(error) + " > " + std::to_string(tolerance) + ")");
    }
    return {value, error, evaluations_};
  }

 private:
  const RealFunction& g_;
  QuadratureOptions options_;
  std::size_t evaluations_ = 0;
};

}  // namespace

QuadratureResult adaptive_quadrature(const RealFunction& f, double lo, double hi,
                                     const QuadratureOptions& options) {
  if (!std::isfinite(lo)) throw DomainError("adaptive_quadrature: lower limit must be finite");
  if (!(lo < hi)) throw DomainError("adaptive_quadrature: requires lo < hi");

  if (std::isfinite(hi)) {
    AdaptiveIntegrator integrator(f, options);
    return integrator.run({lo, hi});
  }

  // v in [0, span) -> y = lo + v;  v in [span, span + 1) -> tail map from anchor.
  const double anchor = lo > 0.0 ? lo : 1.0;
  const double span = anchor - lo;
  const RealFunction mapped = [&f, lo, anchor, span](double v) -> double {
    if (v < span) return f(lo + v);
    const double s = v - span;
    if (s >= 1.0) return 0.0;
    const double u = s / (1.0 - s);
    const double y = anchor * std::exp(u);
    if (!std::isfinite(y)) return 0.0;
    const double fy = f(y);
    if (fy == 0.0) return 0.0;
    const double jac = y / ((1.0 - s) * (1.0 - s));
    const double out = fy * jac;
    return std::isfinite(out) ? out : 0.0;
  };
  AdaptiveIntegrator integrator(mapped, options);
  if (span > 0.0) return integrator.run({0.0, span, span + 1.0});
  return integrator.run({0.0, 1.0});
}

// ---------------------------------------------------------------------------
// Brent root finder

double find_root_bracketed(const RealFunction& f, double lo, double hi, const RootOptions& options) {
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (std::isnan(fa) || std::isnan(fb)) throw DomainError("find_root_bracketed: NaN at bracket end");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw InvalidBracketError("find_root_bracketed: f(lo) and f(hi) have the same sign");
  }
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * kEps * std::abs(b) +
                       0.5 * std::max(options.relative_tolerance * std::abs(b), options.absolute_tolerance);
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if (std::isnan(fb)) throw DomainError("find_root_bracketed: NaN during iteration");
  }
  throw ConvergenceError("find_root_bracketed: iteration limit reached");
}

}  // namespace expcomp

#include "expcomp/models.hpp"

#include <array>
#include <cmath>
#include <string>

#include "expcomp/errors.hpp"
#include "expcomp/special_functions.hpp"

namespace expcomp {
namespace {

constexpr std::array kAllModels{ModelId::ExpIgPareto, ModelId::ExpExpPareto, ModelId::IgPareto1p,
                                ModelId::ExpPareto1p, ModelId::Weibull,      ModelId::InverseGamma};

double power(double x, double exponent) {
  if (x == 0.0) return exponent > 0.0 ? 0.0 : kInfinity;
  if (std::isinf(x)) return exponent > 0.0 ? kInfinity : 0.0;
  return std::exp(exponent * std::log(x));
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be finite and > 0, got " + std::to_string(value));
  }
}

// Pareto piece with shape β on [θ, ∞), conditional on exceeding θ.
PieceFunctions pareto_piece(double theta, double beta) {
  PieceFunctions out;
  const double log_norm = std::log(beta) + beta * std::log(theta);
  out.log_density = [log_norm, beta](double log_x) { return log_norm - (beta + 1.0) * log_x; };
  out.cdf = [theta, beta](double u) {
    if (!(u > theta)) return 0.0;
    return -std::expm1(-beta * std::log(u / theta));
  };
  out.incomplete_moment = [theta, beta](double u, double r) {
    if (!(u > theta)) return 0.0;
    const double log_ratio = std::log(u / theta);
    const double d = r - beta;
    if (d == 0.0) return beta * power(theta, r) * log_ratio;
    return beta * power(theta, r) * std::expm1(d * log_ratio) / d;
  };
  out.inverse_cdf = [theta, beta](double p) { return theta * std::exp(-std::log1p(-p) / beta); };
  out.inverse_survival = [theta, beta](double s) { return theta * std::exp(-std::log(s) / beta); };
  return out;
}

const ExpParetoConstants& solved_exp_constants() {
  static const ExpParetoConstants constants = [] {
    const double alpha = find_root_bracketed(
        [](double a) { return (a + 1.0) * std::exp(-(a + 1.0)) - a; }, 0.3, 0.4,
        RootOptions{1e-15, 1e-300, 500});
    return ExpParetoConstants{1.0 / (2.0 - std::exp(-(alpha + 1.0))), alpha};
  }();
  return constants;
}

const IgParetoConstants& solved_ig_constants() {
  static const IgParetoConstants constants = [] {
    const double alpha = IgParetoConstants::printed().alpha;
    const double log_gamma = ln_gamma(alpha);
    const double k = find_root_bracketed(
        [&](double v) { return std::exp(alpha * std::log(v) - v - log_gamma) - (alpha - v); }, 0.1,
        0.2, RootOptions{1e-15, 1e-300, 500});
    const double c = 1.0 / (1.0 + regularized_upper_gamma(alpha, k));
    return IgParetoConstants{c, k, alpha, alpha - k};
  }();
  return constants;
}

void require_unit_exponent(ModelId model, double eta) {
  if (eta != 1.0) {
    throw DomainError(std::string(model_key(model)) + " has its exponent fixed at 1");
  }
}

}  // namespace

std::span<const ModelId> all_models() { return kAllModels; }

int parameter_count(ModelId model) {
  switch (model) {
    case ModelId::ExpIgPareto:
    case ModelId::ExpExpPareto:
    case ModelId::Weibull:
    case ModelId::InverseGamma:
      return 2;
    case ModelId::IgPareto1p:
    case ModelId::ExpPareto1p:
      return 1;
  }
  return 0;
}

bool is_composite(ModelId model) {
  return model != ModelId::Weibull && model != ModelId::InverseGamma;
}

bool has_free_exponent(ModelId model) {
  return model == ModelId::ExpIgPareto || model == ModelId::ExpExpPareto;
}

std::string_view model_key(ModelId model) {
  switch (model) {
    case ModelId::ExpIgPareto:
      return "exp-ig-pareto";
    case ModelId::ExpExpPareto:
      return "exp-exp-pareto";
    case ModelId::IgPareto1p:
      return "ig-pareto-1p";
    case ModelId::ExpPareto1p:
      return "exp-pareto-1p";
    case ModelId::Weibull:
      return "weibull";
    case ModelId::InverseGamma:
      return "inverse-gamma";
  }
  return "unknown";
}

std::string_view model_label(ModelId model) {
  switch (model) {
    case ModelId::ExpIgPareto:
      return "Exponentiated IG-Pareto";
    case ModelId::ExpExpPareto:
      return "Exponentiated exp-Pareto";
    case ModelId::IgPareto1p:
      return "IG-Pareto (one-parameter)";
    case ModelId::ExpPareto1p:
      return "exp-Pareto (one-parameter)";
    case ModelId::Weibull:
      return "Weibull";
    case ModelId::InverseGamma:
      return "Inverse Gamma";
  }
  return "unknown";
}

std::optional<ModelId> parse_model(std::string_view key) {
  for (ModelId m : kAllModels) {
    if (model_key(m) == key) return m;
  }
  return std::nullopt;
}

IgParetoConstants IgParetoConstants::printed() {
  return IgParetoConstants{0.711384, 0.144351, 0.308298, 0.163947};
}

IgParetoConstants IgParetoConstants::solved() { return solved_ig_constants(); }

ExpParetoConstants ExpParetoConstants::printed() { return ExpParetoConstants{0.574, 0.349976}; }

ExpParetoConstants ExpParetoConstants::solved() { return solved_exp_constants(); }

CompositeSpec ig_pareto_parent(double theta, const IgParetoConstants& k) {
  require_positive(theta, "theta");
  const double alpha = k.alpha;
  const double scale = k.k * theta;  // inverse gamma scale kθ
  const double log_gamma_alpha = ln_gamma(alpha);
  const double gamma_alpha = std::exp(log_gamma_alpha);

  PieceFunctions head;
  head.log_density = [alpha, scale, log_gamma_alpha](double log_x) {
    return alpha * std::log(scale) - (alpha + 1.0) * log_x - scale * std::exp(-log_x) -
           log_gamma_alpha;
  };
  head.cdf = [alpha, scale](double u) {
    if (!(u > 0.0)) return 0.0;
    return regularized_upper_gamma(alpha, scale / u);
  };
  head.incomplete_moment = [alpha, scale, gamma_alpha](double u, double r) {
    if (!(u > 0.0)) return 0.0;
    return power(scale, r) * upper_incomplete_gamma(alpha - r, scale / u) / gamma_alpha;
  };
  return CompositeSpec("ig-pareto", std::move(head), pareto_piece(theta, k.pareto_shape()), theta,
                       k.c, k.pareto_shape());
}

CompositeSpec exp_pareto_parent(double theta, const ExpParetoConstants& k) {
  require_positive(theta, "theta");
  const double rate = (k.alpha + 1.0) / theta;

  PieceFunctions head;
  head.log_density = [rate](double log_x) { return std::log(rate) - rate * std::exp(log_x); };
  head.cdf = [rate](double u) { return u > 0.0 ? -std::expm1(-rate * u) : 0.0; };
  head.incomplete_moment = [rate](double u, double r) {
    if (!(u > 0.0)) return 0.0;
    return power(rate, -r) * gamma_function(r + 1.0) * regularized_lower_gamma(r + 1.0, rate * u);
  };
  head.inverse_cdf = [rate](double p) { return -std::log1p(-p) / rate; };
  return CompositeSpec("exp-pareto", std::move(head), pareto_piece(theta, k.alpha), theta, k.c,
                       k.alpha);
}

ExponentiatedComposite exp_ig_pareto(double theta, double eta, const IgParetoConstants& k) {
  return exponentiate(ig_pareto_parent(theta, k), eta);
}

ExponentiatedComposite exp_exp_pareto(double theta, double eta, const ExpParetoConstants& k) {
  return exponentiate(exp_pareto_parent(theta, k), eta);
}

// ---------------------------------------------------------------------------

WeibullDensity::WeibullDensity(double shape, double scale) : shape_(shape), scale_(scale) {
  require_positive(shape, "Weibull shape");
  require_positive(scale, "Weibull scale");
}

double WeibullDensity::log_pdf(double y) const {
  if (!(y > 0.0)) return -kInfinity;
  const double z = std::log(y / scale_);
  return std::log(shape_ / scale_) + (shape_ - 1.0) * z - std::exp(shape_ * z);
}

double WeibullDensity::pdf(double y) const { return std::exp(log_pdf(y)); }

double WeibullDensity::cdf(double y) const {
  if (!(y > 0.0)) return 0.0;
  return -std::expm1(-power(y / scale_, shape_));
}

double WeibullDensity::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile requires u in (0, 1)");
  return scale_ * power(-std::log1p(-u), 1.0 / shape_);
}

InverseGammaDensity::InverseGammaDensity(double shape, double scale) : shape_(shape), scale_(scale) {
  require_positive(shape, "inverse gamma shape");
  require_positive(scale, "inverse gamma scale");
  log_norm_ = shape_ * std::log(scale_) - ln_gamma(shape_);
}

double InverseGammaDensity::log_pdf(double y) const {
  if (!(y > 0.0)) return -kInfinity;
  return log_norm_ - (shape_ + 1.0) * std::log(y) - scale_ / y;
}

double InverseGammaDensity::pdf(double y) const { return std::exp(log_pdf(y)); }

double InverseGammaDensity::cdf(double y) const {
  if (!(y > 0.0)) return 0.0;
  return regularized_upper_gamma(shape_, scale_ / y);
}

// ---------------------------------------------------------------------------

ExponentiatedComposite build_composite(ModelId model, double theta, double eta) {
  switch (model) {
    case ModelId::ExpIgPareto:
      return exp_ig_pareto(theta, eta);
    case ModelId::ExpExpPareto:
      return exp_exp_pareto(theta, eta);
    case ModelId::IgPareto1p:
      require_unit_exponent(model, eta);
      return exp_ig_pareto(theta, 1.0);
    case ModelId::ExpPareto1p:
      require_unit_exponent(model, eta);
      return exp_exp_pareto(theta, 1.0);
    case ModelId::Weibull:
    case ModelId::InverseGamma:
      break;
  }
  throw DomainError(std::string(model_key(model)) + " is not a composite model");
}

Density build(ModelId model, double theta, double eta) {
  switch (model) {
    case ModelId::Weibull:
      return WeibullDensity(eta, theta);
    case ModelId::InverseGamma:
      return InverseGammaDensity(eta, theta);
    default:
      return build_composite(model, theta, eta);
  }
}

double log_pdf(const Density& d, double y) {
  return std::visit([y](const auto& v) { return v.log_pdf(y); }, d);
}

double pdf(const Density& d, double y) {
  return std::visit([y](const auto& v) { return v.pdf(y); }, d);
}

double cdf(const Density& d, double y) {
  return std::visit([y](const auto& v) { return v.cdf(y); }, d);
}

// ---------------------------------------------------------------------------
// Closed-form moments, written out per family rather than through the generic
// piece machinery so that the two routes stay independent.

namespace {

void check_composite_args(ModelId model, double theta, double eta) {
  if (!is_composite(model)) {
    throw DomainError(std::string(model_key(model)) + " has no composite closed form");
  }
  require_positive(theta, "theta");
  require_positive(eta, "eta");
  if (!has_free_exponent(model)) require_unit_exponent(model, eta);
}

bool is_ig_family(ModelId model) {
  return model == ModelId::ExpIgPareto || model == ModelId::IgPareto1p;
}

[[noreturn]] void throw_infinite(double t, double eta, double limit) {
  throw InfiniteMomentError("moment of order " + std::to_string(t) + " is infinite (t/eta = " +
                            std::to_string(t / eta) + " >= " + std::to_string(limit) + ")");
}

}  // namespace

double moment_closed_form(ModelId model, double theta, double eta, double t) {
  check_composite_args(model, theta, eta);
  if (!(t > 0.0)) throw DomainError("moment order must be > 0");
  const double r = t / eta;
  if (is_ig_family(model)) {
    const auto k = IgParetoConstants::solved();
    const double shape = k.alpha - k.k;
    if (r >= shape || t >= shape * eta) throw_infinite(t, eta, shape);
    return k.c * (power(k.k * theta, r) * upper_incomplete_gamma(k.alpha - r, k.k) /
                      gamma_function(k.alpha) -
                  shape * power(theta, r) / (k.k - k.alpha + r));
  }
  const auto k = ExpParetoConstants::solved();
  if (r >= k.alpha || t >= k.alpha * eta) throw_infinite(t, eta, k.alpha);
  const double a1 = k.alpha + 1.0;
  return k.c * power(theta / a1, r) *
             (gamma_function(r + 1.0) - upper_incomplete_gamma(r + 1.0, a1)) +
         k.c * k.alpha * power(theta, r) / (k.alpha - r);
}

double limited_moment_closed_form(ModelId model, double theta, double eta, double t, double b) {
  check_composite_args(model, theta, eta);
  require_positive(b, "cap b");
  if (!(t >= 0.0)) throw DomainError("limited moment order must be >= 0");
  if (t == 0.0) return 1.0;
  const double r = t / eta;
  const double bp = power(theta, 1.0 / eta);
  const double bt = power(b, t);
  const double b_eta = power(b, eta);

  if (is_ig_family(model)) {
    const auto k = IgParetoConstants::solved();
    const double a = k.alpha;
    const double kt = k.k * theta;
    const double g_alpha = gamma_function(a);
    const double beta = a - k.k;
    if (b < bp) {
      const double x = kt / b_eta;
      return k.c * ((upper_incomplete_gamma(a - r, x) * power(kt, r) +
                     bt * upper_incomplete_gamma(a, k.k) - bt * upper_incomplete_gamma(a, x)) /
                        g_alpha +
                    bt);
    }
    const double head = upper_incomplete_gamma(a - r, k.k) * power(kt, r) / g_alpha;
    if (b == bp) return k.c * (head + bt);
    const double tail_survival = power(b, t - eta * beta) * power(theta, beta);
    const double d = k.k - a + r;
    const double middle = d == 0.0 ? beta * power(theta, beta) * std::log(b_eta / theta)
                                   : beta * (tail_survival - power(theta, r)) / d;
    return k.c * (head + middle + tail_survival);
  }

  const auto k = ExpParetoConstants::solved();
  const double a = k.alpha;
  const double a1 = a + 1.0;
  const double scale = power(theta / a1, r);
  const double g = gamma_function(r + 1.0);
  if (b < bp) {
    const double x = a1 * b_eta / theta;
    return k.c * (scale * (g - upper_incomplete_gamma(r + 1.0, x)) +
                  bt * (std::exp(-x) - std::exp(-a1)) + bt);
  }
  const double head = scale * (g - upper_incomplete_gamma(r + 1.0, a1));
  if (b == bp) return k.c * (head + bt);
  const double tail_survival = power(b, t - eta * a) * power(theta, a);
  const double middle = r == a ? a * power(theta, a) * std::log(b_eta / theta)
                               : a * power(theta, a) *
                                     (power(b, t - eta * a) - power(theta, r - a)) / (r - a);
  return k.c * (head + middle + tail_survival);
}

}  // namespace expcomp

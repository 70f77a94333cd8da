#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "expcomp/composite.hpp"

namespace expcomp {

enum class ModelId { ExpIgPareto, ExpExpPareto, IgPareto1p, ExpPareto1p, Weibull, InverseGamma };

std::span<const ModelId> all_models();

/// Free parameters: 2, 2, 1, 1, 2, 2 in enumeration order.
int parameter_count(ModelId model);
bool is_composite(ModelId model);
/// True for the two-parameter composites whose exponent is estimated.
bool has_free_exponent(ModelId model);

/// Command-line key, e.g. "exp-exp-pareto".
std::string_view model_key(ModelId model);
std::string_view model_label(ModelId model);
std::optional<ModelId> parse_model(std::string_view key);

/// Inverse gamma head / Pareto tail constants. a = α - k is the Pareto shape.
struct IgParetoConstants {
  double c;
  double k;
  double alpha;
  double a;

  /// Values as tabulated in the literature (six decimals).
  static IgParetoConstants printed();
  /// α as printed; k re-solved from the continuity condition
  /// k^α e^{-k} / Γ(α) = α - k and c = 1 / (1 + Q(α, k)) to full precision.
  static IgParetoConstants solved();

  double pareto_shape() const { return alpha - k; }
};

/// Exponential head / Pareto tail constants.
struct ExpParetoConstants {
  double c;
  double alpha;

  static ExpParetoConstants printed();
  /// α from (α+1) e^{-(α+1)} = α and c = 1 / (2 - e^{-(α+1)}) to full precision.
  static ExpParetoConstants solved();
};

/// Parent composites (η = 1) with breakpoint θ.
CompositeSpec ig_pareto_parent(double theta, const IgParetoConstants& k = IgParetoConstants::solved());
CompositeSpec exp_pareto_parent(double theta,
                                const ExpParetoConstants& k = ExpParetoConstants::solved());

ExponentiatedComposite exp_ig_pareto(double theta, double eta,
                                     const IgParetoConstants& k = IgParetoConstants::solved());
ExponentiatedComposite exp_exp_pareto(double theta, double eta,
                                      const ExpParetoConstants& k = ExpParetoConstants::solved());

class WeibullDensity {
 public:
  WeibullDensity(double shape, double scale);
  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }
  double log_pdf(double y) const;
  double pdf(double y) const;
  double cdf(double y) const;
  double quantile(double u) const;

 private:
  double shape_;
  double scale_;
};

class InverseGammaDensity {
 public:
  InverseGammaDensity(double shape, double scale);
  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }
  double log_pdf(double y) const;
  double pdf(double y) const;
  double cdf(double y) const;

 private:
  double shape_;
  double scale_;
  double log_norm_;
};

using Density = std::variant<ExponentiatedComposite, WeibullDensity, InverseGammaDensity>;

/// Composite families take (θ, η); the one-parameter variants require η = 1.
/// Baselines read θ as scale and η as shape.
Density build(ModelId model, double theta, double eta);
ExponentiatedComposite build_composite(ModelId model, double theta, double eta);

double log_pdf(const Density& d, double y);
double pdf(const Density& d, double y);
double cdf(const Density& d, double y);

/// E(Y^t) in closed form; InfiniteMomentError beyond the tail index.
double moment_closed_form(ModelId model, double theta, double eta, double t);

/// E[(Y ∧ b)^t] in closed form (three branches around θ^{1/η}).
double limited_moment_closed_form(ModelId model, double theta, double eta, double t, double b);

}  // namespace expcomp

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "expcomp/models.hpp"
#include "expcomp/special_functions.hpp"

namespace expcomp {

/// Candidate set for the exponent: a coarse lattice on [lower, upper] followed
/// by refinement rounds of 21 points at one tenth of the previous step around
/// the incumbent.
struct EtaGrid {
  double lower = 0.05;
  double upper = 20.0;
  double coarse_step = 0.05;
  int refinement_rounds = 2;

  /// Throws DomainError unless 0 < lower < upper, step > 0, rounds >= 0 and the
  /// coarse lattice has at least 10 points.
  void validate() const;
  std::vector<double> coarse_points() const;
  std::vector<double> refinement_points(double center, double step) const;
  double final_resolution() const;
};

struct FitResult {
  ModelId model = ModelId::ExpExpPareto;
  /// Breakpoint θ for composites; scale for the baselines.
  double theta = 0.0;
  /// Exponent η for composites (1 for one-parameter variants); shape for baselines.
  double eta = 0.0;
  /// Number of observations below θ^{1/η} (0 for baselines).
  std::size_t m = 0;
  /// -Σ log f(y_i) at the estimates.
  double nll = 0.0;
  std::size_t n = 0;
  int p = 0;
};

/// Ascending copy of a strictly positive sample with cached logs.
class PreparedSample {
 public:
  explicit PreparedSample(std::span<const double> y);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> logs() const noexcept { return logs_; }
  /// log_prefix()[m] = Σ_{i<=m} ln y_(i), with log_prefix()[0] = 0.
  std::span<const double> log_prefix() const noexcept { return log_prefix_; }

 private:
  std::vector<double> values_;
  std::vector<double> logs_;
  std::vector<double> log_prefix_;
};

/// Stationary point in θ of the exponentiated exp-Pareto likelihood with m
/// observations in the head: (α+1) Σ_{i<=m} y_i^η / ((α+1)m - αn).
/// Throws DomainError when the denominator is not positive.
double theta_profile_exp_pareto(double eta, std::size_t m, std::span<const double> sorted_y);

/// Stationary point for the exponentiated IG-Pareto likelihood:
/// (αm + (α-k)(n-m)) / (k Σ_{i<=m} y_i^{-η}).
double theta_profile_ig_pareto(double eta, std::size_t m, std::span<const double> sorted_y);

using ThetaProfile = std::function<double(double eta, std::size_t m, std::span<const double> y)>;

struct SplitEstimate {
  std::size_t m = 0;
  double theta = 0.0;
};

/// Sequential scan m = 1, ..., n-1 keeping the first profile estimate with
/// y_m^η <= θ <= y_{m+1}^η. Profiles that reject an m (DomainError) are skipped.
std::optional<SplitEstimate> detect_m(double eta, std::span<const double> sorted_y,
                                      const ThetaProfile& profile);

/// Same scan through the active SIMD kernels for a composite model.
std::optional<SplitEstimate> detect_m(ModelId model, double eta, const PreparedSample& sample);

/// Closed-form log-likelihood of a composite model when exactly the first m
/// order statistics lie in the head.
double profile_log_likelihood(ModelId model, double eta, std::size_t m, double theta,
                              const PreparedSample& sample);

struct EtaEvaluation {
  double eta = 0.0;
  std::optional<SplitEstimate> split;
  double log_likelihood = -kInfinity;
};

EtaEvaluation evaluate_eta(ModelId model, double eta, const PreparedSample& sample);

/// Every bracket-consistent m for one η (exhaustive; used as an oracle and by
/// diagnostics).
std::vector<SplitEstimate> all_bracketed(ModelId model, double eta, const PreparedSample& sample);

/// Maximum-likelihood fit. Composite models use the profile grid search
/// (one-parameter variants evaluate η = 1 only); baselines use profile
/// equations solved by root finding. Requires n >= 10 positive observations.
/// Throws FitFailure if no grid point yields a bracket-consistent estimate.
FitResult fit(ModelId model, std::span<const double> y, const EtaGrid& grid = {});

/// -Σ log f(y_i | θ, η) through the model's log-density.
double negative_log_likelihood(ModelId model, double theta, double eta, std::span<const double> y);

}  // namespace expcomp

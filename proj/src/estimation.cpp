#include "expcomp/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "expcomp/errors.hpp"
#include "expcomp/simd/kernels.hpp"
#include "expcomp/special_functions.hpp"

namespace expcomp {
namespace {

constexpr std::size_t kMinSampleSize = 10;

bool is_ig_family(ModelId model) {
  return model == ModelId::ExpIgPareto || model == ModelId::IgPareto1p;
}

void require_composite(ModelId model) {
  if (!is_composite(model)) {
    throw DomainError(std::string(model_key(model)) + " is not a composite model");
  }
}

void check_split(std::size_t m, std::size_t n) {
  if (m < 1 || m > n) {
    throw DomainError("split index m must lie in [1, n]; got m=" + std::to_string(m) +
                      ", n=" + std::to_string(n));
  }
}

// Transformed values for one η: powers[i] = y_(i+1)^η and the prefix sums the
// profile needs (of y^η for exp-Pareto, of y^{-η} for IG-Pareto).
struct EtaWorkspace {
  std::vector<double> powers;
  std::vector<double> prefix;
};

EtaWorkspace transform(ModelId model, double eta, const PreparedSample& sample) {
  const auto& kernels = simd::active_kernels();
  const std::size_t n = sample.size();
  EtaWorkspace ws{std::vector<double>(n), std::vector<double>(n)};
  kernels.scaled_exp(sample.logs(), eta, ws.powers);
  if (is_ig_family(model)) {
    kernels.scaled_exp(sample.logs(), -eta, ws.prefix);
  } else {
    std::copy(ws.powers.begin(), ws.powers.end(), ws.prefix.begin());
  }
  double running = 0.0;
  for (double& v : ws.prefix) {
    running += v;
    v = running;
  }
  return ws;
}

simd::LinearFractional profile_coefficients(ModelId model, std::size_t n) {
  const double nd = static_cast<double>(n);
  simd::LinearFractional f;
  if (is_ig_family(model)) {
    const auto k = IgParetoConstants::solved();
    // (k·m + (α-k)·n) / (k·R_m)
    f.q = k.k;
    f.r = (k.alpha - k.k) * nd;
    f.u = k.k;
  } else {
    const auto k = ExpParetoConstants::solved();
    // (α+1)·S_m / ((α+1)·m - α·n)
    f.p = k.alpha + 1.0;
    f.v = k.alpha + 1.0;
    f.w = -k.alpha * nd;
  }
  return f;
}

double effective_eta(ModelId model, double eta) { return has_free_exponent(model) ? eta : 1.0; }

// Weibull: the shape solves Σ y^k ln y / Σ y^k - 1/k - mean(ln y) = 0.
FitResult fit_weibull(const PreparedSample& s) {
  const auto logs = s.logs();
  const double n = static_cast<double>(s.size());
  const double log_max = logs.back();
  double mean_log = 0.0;
  for (double l : logs) mean_log += l;
  mean_log /= n;
  auto weighted = [&](double k) {
    double sw = 0.0;
    double swl = 0.0;
    for (double l : logs) {
      const double w = std::exp(k * (l - log_max));
      sw += w;
      swl += w * l;
    }
    return std::pair{sw, swl};
  };
  auto score = [&](double k) {
    const auto [sw, swl] = weighted(k);
    return swl / sw - 1.0 / k - mean_log;
  };
  double lo = 0.05;
  double hi = 2.0;
  while (score(lo) > 0.0) {
    lo *= 0.5;
    if (lo < 1e-8) throw FitFailure("Weibull shape bracket collapsed");
  }
  while (score(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw FitFailure("Weibull shape bracket diverged (constant data?)");
  }
  const double shape = find_root_bracketed(score, lo, hi);
  const double scale = std::exp(log_max + (std::log(weighted(shape).first) - std::log(n)) / shape);
  FitResult out;
  out.model = ModelId::Weibull;
  out.theta = scale;
  out.eta = shape;
  return out;
}

// Inverse gamma: ln a - ψ(a) = ln(mean(1/y)) + mean(ln y), then β = a / mean(1/y).
FitResult fit_inverse_gamma(const PreparedSample& s) {
  const double n = static_cast<double>(s.size());
  double mean_inv = 0.0;
  double mean_log = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    mean_inv += 1.0 / s.values()[i];
    mean_log += s.logs()[i];
  }
  mean_inv /= n;
  mean_log /= n;
  const double target = std::log(mean_inv) + mean_log;
  if (!(target > 0.0)) throw FitFailure("inverse gamma fit needs non-constant data");
  auto score = [&](double a) { return std::log(a) - digamma(a) - target; };
  double lo = 1e-3;
  double hi = 1.0;
  while (score(lo) < 0.0) {
    lo *= 0.1;
    if (lo < 1e-12) throw FitFailure("inverse gamma shape bracket collapsed");
  }
  while (score(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e9) throw FitFailure("inverse gamma shape bracket diverged");
  }
  const double shape = find_root_bracketed(score, lo, hi);
  FitResult out;
  out.model = ModelId::InverseGamma;
  out.theta = shape / mean_inv;
  out.eta = shape;
  return out;
}

bool better(const EtaEvaluation& candidate, const EtaEvaluation& incumbent) {
  if (!candidate.split) return false;
  if (!incumbent.split) return true;
  if (candidate.log_likelihood != incumbent.log_likelihood) {
    return candidate.log_likelihood > incumbent.log_likelihood;
  }
  return candidate.eta < incumbent.eta;
}

}  // namespace

// ---------------------------------------------------------------------------

void EtaGrid::validate() const {
  if (!(lower > 0.0) || !(upper > lower) || !(coarse_step > 0.0) || refinement_rounds < 0 ||
      !std::isfinite(upper)) {
    throw DomainError("eta grid requires 0 < lower < upper, step > 0 and rounds >= 0");
  }
  if (coarse_points().size() < 10) throw DomainError("eta grid must contain at least 10 points");
}

std::vector<double> EtaGrid::coarse_points() const {
  const auto count = static_cast<std::size_t>(std::floor((upper - lower) / coarse_step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(lower + static_cast<double>(i) * coarse_step);
  return out;
}

std::vector<double> EtaGrid::refinement_points(double center, double step) const {
  std::vector<double> out;
  for (int j = -10; j <= 10; ++j) {
    const double eta = center + j * step;
    if (eta >= lower - 1e-12 && eta <= upper + 1e-12 && eta > 0.0) out.push_back(eta);
  }
  return out;
}

double EtaGrid::final_resolution() const {
  return coarse_step / std::pow(10.0, refinement_rounds);
}

PreparedSample::PreparedSample(std::span<const double> y) : values_(y.begin(), y.end()) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw DomainError("observations must be finite and strictly positive (index " +
                        std::to_string(i) + ")");
    }
  }
  std::sort(values_.begin(), values_.end());
  logs_.resize(values_.size());
  log_prefix_.resize(values_.size() + 1, 0.0);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    logs_[i] = std::log(values_[i]);
    log_prefix_[i + 1] = log_prefix_[i] + logs_[i];
  }
}

double theta_profile_exp_pareto(double eta, std::size_t m, std::span<const double> sorted_y) {
  const std::size_t n = sorted_y.size();
  check_split(m, n);
  const double alpha = ExpParetoConstants::solved().alpha;
  const double denominator =
      (alpha + 1.0) * static_cast<double>(m) - alpha * static_cast<double>(n);
  if (!(denominator > 0.0)) {
    throw DomainError("exp-Pareto profile needs (alpha+1)m - alpha n > 0; m=" + std::to_string(m) +
                      ", n=" + std::to_string(n));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += std::pow(sorted_y[i], eta);
  return (alpha + 1.0) * sum / denominator;
}

double theta_profile_ig_pareto(double eta, std::size_t m, std::span<const double> sorted_y) {
  const std::size_t n = sorted_y.size();
  check_split(m, n);
  const auto k = IgParetoConstants::solved();
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += std::pow(sorted_y[i], -eta);
  if (!(sum > 0.0)) throw DomainError("IG-Pareto profile is degenerate (zero reciprocal sum)");
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  return (k.alpha * md + (k.alpha - k.k) * (nd - md)) / (k.k * sum);
}

std::optional<SplitEstimate> detect_m(double eta, std::span<const double> sorted_y,
                                      const ThetaProfile& profile) {
  const std::size_t n = sorted_y.size();
  for (std::size_t m = 1; m < n; ++m) {
    double theta;
    try {
      theta = profile(eta, m, sorted_y);
    } catch (const DomainError&) {
      continue;
    }
    if (std::pow(sorted_y[m - 1], eta) <= theta && theta <= std::pow(sorted_y[m], eta)) {
      return SplitEstimate{m, theta};
    }
  }
  return std::nullopt;
}

std::optional<SplitEstimate> detect_m(ModelId model, double eta, const PreparedSample& sample) {
  require_composite(model);
  eta = effective_eta(model, eta);
  const EtaWorkspace ws = transform(model, eta, sample);
  const auto f = profile_coefficients(model, sample.size());
  const auto m = simd::active_kernels().first_bracketed(ws.prefix, ws.powers, f);
  if (!m) return std::nullopt;
  const double s = ws.prefix[*m - 1];
  const double md = static_cast<double>(*m);
  const double theta = ((f.p * s + f.q * md) + f.r) / ((f.u * s + f.v * md) + f.w);
  return SplitEstimate{*m, theta};
}

std::vector<SplitEstimate> all_bracketed(ModelId model, double eta, const PreparedSample& sample) {
  require_composite(model);
  eta = effective_eta(model, eta);
  const EtaWorkspace ws = transform(model, eta, sample);
  const auto f = profile_coefficients(model, sample.size());
  std::vector<SplitEstimate> out;
  for (std::size_t m = 1; m < sample.size(); ++m) {
    const double s = ws.prefix[m - 1];
    const double md = static_cast<double>(m);
    const double den = (f.u * s + f.v * md) + f.w;
    if (!(den > 0.0)) continue;
    const double theta = ((f.p * s + f.q * md) + f.r) / den;
    if (ws.powers[m - 1] <= theta && theta <= ws.powers[m]) out.push_back({m, theta});
  }
  return out;
}

double profile_log_likelihood(ModelId model, double eta, std::size_t m, double theta,
                              const PreparedSample& sample) {
  require_composite(model);
  eta = effective_eta(model, eta);
  const std::size_t n = sample.size();
  check_split(m, n);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double log_theta = std::log(theta);
  const double head_logs = sample.log_prefix()[m];
  const double tail_logs = sample.log_prefix()[n] - head_logs;
  const auto logs = sample.logs().first(m);

  if (is_ig_family(model)) {
    const auto k = IgParetoConstants::solved();
    const double beta = k.alpha - k.k;
    double reciprocal = 0.0;
    for (double l : logs) reciprocal += std::exp(-eta * l);
    return nd * std::log(k.c * eta) +
           md * (k.alpha * std::log(k.k * theta) - ln_gamma(k.alpha)) - k.k * theta * reciprocal -
           (k.alpha * eta + 1.0) * head_logs +
           (nd - md) * (std::log(beta) + beta * log_theta) - (beta * eta + 1.0) * tail_logs;
  }
  const auto k = ExpParetoConstants::solved();
  double powers = 0.0;
  for (double l : logs) powers += std::exp(eta * l);
  return nd * std::log(k.c * eta) + md * std::log(k.alpha + 1.0) +
         (nd - md) * std::log(k.alpha) + (k.alpha * (nd - md) - md) * log_theta -
         (k.alpha + 1.0) * powers / theta + (eta - 1.0) * head_logs -
         (k.alpha * eta + 1.0) * tail_logs;
}

EtaEvaluation evaluate_eta(ModelId model, double eta, const PreparedSample& sample) {
  EtaEvaluation out;
  out.eta = effective_eta(model, eta);
  out.split = detect_m(model, out.eta, sample);
  if (out.split) {
    out.log_likelihood =
        profile_log_likelihood(model, out.eta, out.split->m, out.split->theta, sample);
  }
  return out;
}

FitResult fit(ModelId model, std::span<const double> y, const EtaGrid& grid) {
  const PreparedSample sample(y);
  if (sample.size() < kMinSampleSize) {
    throw DomainError("fit requires at least " + std::to_string(kMinSampleSize) + " observations");
  }
  FitResult out;
  if (model == ModelId::Weibull) {
    out = fit_weibull(sample);
  } else if (model == ModelId::InverseGamma) {
    out = fit_inverse_gamma(sample);
  } else {
    EtaEvaluation best;
    if (!has_free_exponent(model)) {
      best = evaluate_eta(model, 1.0, sample);
    } else {
      grid.validate();
      for (double eta : grid.coarse_points()) {
        auto e = evaluate_eta(model, eta, sample);
        if (better(e, best)) best = e;
      }
      double step = grid.coarse_step;
      for (int round = 0; round < grid.refinement_rounds && best.split; ++round) {
        step /= 10.0;
        for (double eta : grid.refinement_points(best.eta, step)) {
          auto e = evaluate_eta(model, eta, sample);
          if (better(e, best)) best = e;
        }
      }
    }
    if (!best.split) {
      throw FitFailure(std::string("no bracket-consistent split index for ") +
                       std::string(model_key(model)) + " at any grid point");
    }
    out.model = model;
    out.theta = best.split->theta;
    out.eta = best.eta;
    out.m = best.split->m;
  }
  out.n = sample.size();
  out.p = parameter_count(model);
  out.nll = negative_log_likelihood(model, out.theta, out.eta, sample.values());
  return out;
}

double negative_log_likelihood(ModelId model, double theta, double eta, std::span<const double> y) {
  const Density d = build(model, theta, eta);
  std::vector<double> terms(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) terms[i] = log_pdf(d, y[i]);
  return -simd::active_kernels().lane_sum(terms);
}

}  // namespace expcomp

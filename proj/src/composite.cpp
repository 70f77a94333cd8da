#include "expcomp/composite.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "expcomp/errors.hpp"
#include "expcomp/special_functions.hpp"

namespace expcomp {
namespace {

double power(double x, double exponent) {
  if (x == 0.0) return exponent > 0.0 ? 0.0 : kInfinity;
  if (std::isinf(x)) return exponent > 0.0 ? kInfinity : 0.0;
  return std::pow(x, exponent);
}

// Uniform in the open interval (0, 1) from the top 53 bits.
double open_unit(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

CompositeSpec::CompositeSpec(std::string name, PieceFunctions head, PieceFunctions tail,
                             double breakpoint, double normalizer, double tail_index)
    : name_(std::move(name)),
      head_(std::move(head)),
      tail_(std::move(tail)),
      breakpoint_(breakpoint),
      normalizer_(normalizer),
      tail_index_(tail_index) {
  if (!(breakpoint_ > 0.0) || !std::isfinite(breakpoint_)) {
    throw DomainError("composite breakpoint must be finite and > 0");
  }
  if (!(normalizer_ > 0.0 && normalizer_ <= 1.0)) {
    throw DomainError("composite normalizing constant must lie in (0, 1]");
  }
  if (!head_.log_density || !head_.cdf || !head_.incomplete_moment || !tail_.log_density ||
      !tail_.cdf || !tail_.incomplete_moment) {
    throw DomainError("composite pieces need log_density, cdf and incomplete_moment");
  }
  if (!(tail_index_ > 0.0)) throw DomainError("tail index must be > 0");
}

ExponentiatedComposite::ExponentiatedComposite(CompositeSpec parent, double eta)
    : parent_(std::make_shared<const CompositeSpec>(std::move(parent))), eta_(eta) {
  if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
    throw DomainError("exponent eta must be finite and > 0, got " + std::to_string(eta_));
  }
  breakpoint_ = power(parent_->breakpoint(), 1.0 / eta_);
  head_mass_ = parent_->normalizer() * parent_->head().cdf(parent_->breakpoint());
}

double ExponentiatedComposite::piece_log_pdf(Piece piece, double y) const {
  if (!(y > 0.0)) return -kInfinity;
  const double log_y = std::log(y);
  const PieceFunctions& f = piece == Piece::Head ? parent_->head() : parent_->tail();
  return std::log(parent_->normalizer()) + f.log_density(eta_ * log_y) + std::log(eta_) +
         (eta_ - 1.0) * log_y;
}

double ExponentiatedComposite::piece_pdf(Piece piece, double y) const {
  return std::exp(piece_log_pdf(piece, y));
}

double ExponentiatedComposite::log_pdf(double y) const {
  return piece_log_pdf(y < breakpoint_ ? Piece::Head : Piece::Tail, y);
}

double ExponentiatedComposite::pdf(double y) const { return std::exp(log_pdf(y)); }

double ExponentiatedComposite::cdf(double y) const {
  if (!(y > 0.0)) return 0.0;
  const CompositeSpec& p = *parent_;
  const double c = p.normalizer();
  double value;
  if (y < breakpoint_) {
    value = c * p.head().cdf(power(y, eta_));
  } else {
    value = head_mass_ + c * (p.tail().cdf(power(y, eta_)) - p.tail().cdf(p.breakpoint()));
  }
  return std::clamp(value, 0.0, 1.0);
}

double ExponentiatedComposite::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile requires u in (0, 1), got " + std::to_string(u));
  }
  const CompositeSpec& p = *parent_;
  const double c = p.normalizer();
  const double theta = p.breakpoint();
  double x;
  if (u < head_mass_) {
    const double target = u / c;
    if (p.head().inverse_cdf) {
      x = p.head().inverse_cdf(target);
    } else {
      x = find_root_bracketed([&](double v) { return p.head().cdf(v) - target; }, 0.0, theta);
    }
  } else {
    // Survival of the tail piece: 1 - F2(x) = 1 - F2(θ) - (u - head mass) / c.
    const double survival = (1.0 - p.tail().cdf(theta)) - (u - head_mass_) / c;
    if (p.tail().inverse_survival) {
      x = p.tail().inverse_survival(survival);
    } else if (p.tail().inverse_cdf) {
      x = p.tail().inverse_cdf(1.0 - survival);
    } else {
      const double target = 1.0 - survival;
      auto g = [&](double v) { return p.tail().cdf(v) - target; };
      double hi = 2.0 * theta;
      while (g(hi) < 0.0) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw ConvergenceError("quantile: tail bracket diverged");
      }
      x = find_root_bracketed(g, theta, hi);
    }
    x = std::max(x, theta);
  }
  double y = power(x, 1.0 / eta_);
  if (u >= head_mass_) y = std::max(y, breakpoint_);
  return y;
}

std::vector<double> ExponentiatedComposite::sample(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 gen(seed);
  std::vector<double> out(n);
  for (auto& value : out) value = quantile(open_unit(gen));
  std::sort(out.begin(), out.end());
  return out;
}

double ExponentiatedComposite::moment_numeric(double t) const {
  if (!(t > 0.0)) throw DomainError("moment order must be > 0");
  const double order = t / eta_;
  const double index = parent_->tail_index();
  // Compare both ways so that t = index·η is rejected whatever the rounding.
  if (order >= index || t >= index * eta_) {
    throw InfiniteMomentError("moment of order " + std::to_string(t) +
                              " is infinite (t/eta = " + std::to_string(order) +
                              " >= tail index " + std::to_string(index) + ")");
  }
  const double log_c = std::log(parent_->normalizer());
  const double log_eta = std::log(eta_);
  auto log_term = [&](Piece piece, double log_y) {
    const PieceFunctions& f = piece == Piece::Head ? parent_->head() : parent_->tail();
    return log_c + f.log_density(eta_ * log_y) + log_eta + (eta_ - 1.0) * log_y + t * log_y;
  };
  const double u = breakpoint_;
  const double head = adaptive_quadrature(
      [&](double y) { return y > 0.0 ? std::exp(log_term(Piece::Head, std::log(y))) : 0.0; }, 0.0,
      u).value;
  // Tail: y = u·z^{-1/κ} with κ = η·index - t turns the power-law decay
  // y^{-κ-1} into a bounded integrand on (0, 1].
  const double kappa = index * eta_ - t;
  const double log_u = std::log(u);
  const double log_jacobian = std::log(u / kappa);
  const double tail = adaptive_quadrature(
      [&](double z) {
        if (!(z > 0.0)) return 0.0;
        const double log_z = std::log(z);
        const double log_y = log_u - log_z / kappa;
        return std::exp(log_term(Piece::Tail, log_y) + log_jacobian - (1.0 / kappa + 1.0) * log_z);
      },
      0.0, 1.0).value;
  return head + tail;
}

double ExponentiatedComposite::limited_moment(const LimitedMomentQuery& query) const {
  const double t = query.order;
  const double b = query.cap;
  if (!(b > 0.0)) throw DomainError("limited moment cap must be > 0");
  if (!(t >= 0.0)) throw DomainError("limited moment order must be >= 0");
  if (t == 0.0) return 1.0;
  const CompositeSpec& p = *parent_;
  const double c = p.normalizer();
  const double theta = p.breakpoint();
  const double r = t / eta_;
  const double bt = power(b, t);
  const PieceFunctions& head = p.head();
  const PieceFunctions& tail = p.tail();
  if (b < breakpoint_) {
    const double xb = power(b, eta_);
    return c * head.incomplete_moment(xb, r) + c * bt * (head.cdf(theta) - head.cdf(xb)) +
           c * bt * (1.0 - tail.cdf(theta));
  }
  if (b == breakpoint_) {
    return c * head.incomplete_moment(theta, r) + c * bt * (1.0 - tail.cdf(theta));
  }
  const double xb = power(b, eta_);
  return c * head.incomplete_moment(theta, r) +
         c * (tail.incomplete_moment(xb, r) - tail.incomplete_moment(theta, r)) +
         c * bt * (1.0 - tail.cdf(xb));
}

CompositeSpec ExponentiatedComposite::as_composite() const {
  const auto parent = parent_;
  const double eta = eta_;
  auto lift = [parent, eta](bool head_piece) {
    auto piece = [parent, head_piece]() -> const PieceFunctions& {
      return head_piece ? parent->head() : parent->tail();
    };
    PieceFunctions out;
    out.log_density = [piece, eta](double log_y) {
      return piece().log_density(eta * log_y) + std::log(eta) + (eta - 1.0) * log_y;
    };
    out.cdf = [piece, eta](double u) { return piece().cdf(power(u, eta)); };
    out.incomplete_moment = [piece, eta](double u, double r) {
      return piece().incomplete_moment(power(u, eta), r / eta);
    };
    if (piece().inverse_cdf) {
      out.inverse_cdf = [piece, eta](double q) { return power(piece().inverse_cdf(q), 1.0 / eta); };
    }
    if (piece().inverse_survival) {
      out.inverse_survival = [piece, eta](double s) {
        return power(piece().inverse_survival(s), 1.0 / eta);
      };
    }
    return out;
  };
  return CompositeSpec(parent->name() + "^(1/" + std::to_string(eta) + ")", lift(true), lift(false),
                       breakpoint_, parent->normalizer(), parent->tail_index() * eta);
}

ExponentiatedComposite exponentiate(const CompositeSpec& parent, double eta) {
  return ExponentiatedComposite(parent, eta);
}

ExponentiatedComposite exponentiate(const ExponentiatedComposite& d, double gamma) {
  return ExponentiatedComposite(d.as_composite(), gamma);
}

CompositeDiagnostics verify_composite(const ExponentiatedComposite& d) {
  CompositeDiagnostics out;
  const double u = d.breakpoint();
  out.breakpoint = u;
  out.head_density = d.piece_pdf(Piece::Head, u);
  out.tail_density = d.piece_pdf(Piece::Tail, u);
  const double h = 1e-6 * u;
  out.head_slope = (d.piece_pdf(Piece::Head, u + h) - d.piece_pdf(Piece::Head, u - h)) / (2.0 * h);
  out.tail_slope = (d.piece_pdf(Piece::Tail, u + h) - d.piece_pdf(Piece::Tail, u - h)) / (2.0 * h);
  out.continuity_gap = std::abs(out.head_density - out.tail_density) / out.head_density;
  out.derivative_gap =
      std::abs(out.head_slope - out.tail_slope) / std::max(1.0, std::abs(out.head_slope));
  const double head =
      adaptive_quadrature([&](double y) { return d.piece_pdf(Piece::Head, y); }, 0.0, u).value;
  const double tail =
      adaptive_quadrature([&](double y) { return d.piece_pdf(Piece::Tail, y); }, u, kInfinity).value;
  out.normalization_defect = std::abs(head + tail - 1.0);
  return out;
}

PieceFunctions numeric_piece(std::function<double(double)> log_density, double support_lo,
                             double support_hi) {
  auto density = [log_density](double x) {
    return x > 0.0 ? std::exp(log_density(std::log(x))) : 0.0;
  };
  PieceFunctions out;
  out.log_density = log_density;
  out.cdf = [density, support_lo, support_hi](double u) {
    const double top = std::min(u, support_hi);
    if (!(top > support_lo)) return 0.0;
    return adaptive_quadrature(density, support_lo, top).value;
  };
  out.incomplete_moment = [density, support_lo, support_hi](double u, double r) {
    const double top = std::min(u, support_hi);
    if (!(top > support_lo)) return 0.0;
    auto g = [&](double x) { return x > 0.0 ? std::pow(x, r) * density(x) : 0.0; };
    return adaptive_quadrature(g, support_lo, top).value;
  };
  return out;
}

}  // namespace expcomp

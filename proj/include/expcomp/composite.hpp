#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace expcomp {

/// Closed forms (or quadrature-backed stand-ins) for one piece of a
/// two-piece composite density, all on the parent scale x.
struct PieceFunctions {
  /// ln f_i(x), taking ln x so that extreme x stay representable.
  std::function<double(double log_x)> log_density;
  /// F_i(u) = ∫_0^u f_i(x) dx.
  std::function<double(double u)> cdf;
  /// M_i(u; r) = ∫_0^u x^r f_i(x) dx.
  std::function<double(double u, double r)> incomplete_moment;
  /// F_i^{-1}; leave empty to fall back to bracketed root finding.
  std::function<double(double p)> inverse_cdf;
  /// x with 1 - F_i(x) = s; preferred over inverse_cdf in the far tail.
  std::function<double(double s)> inverse_survival;
};

/// A spliced density c·f1 on [0, θ) and c·f2 on [θ, ∞).
class CompositeSpec {
 public:
  /// tail_index: parent moments of order r are finite iff r < tail_index
  /// (+∞ when every moment exists).
  CompositeSpec(std::string name, PieceFunctions head, PieceFunctions tail, double breakpoint,
                double normalizer, double tail_index = std::numeric_limits<double>::infinity());

  const std::string& name() const noexcept { return name_; }
  const PieceFunctions& head() const noexcept { return head_; }
  const PieceFunctions& tail() const noexcept { return tail_; }
  double breakpoint() const noexcept { return breakpoint_; }
  double normalizer() const noexcept { return normalizer_; }
  double tail_index() const noexcept { return tail_index_; }

 private:
  std::string name_;
  PieceFunctions head_;
  PieceFunctions tail_;
  double breakpoint_;
  double normalizer_;
  double tail_index_;
};

struct LimitedMomentQuery {
  double order;  // t > 0 (t = 0 accepted and gives 1)
  double cap;    // b > 0
};

enum class Piece { Head, Tail };

/// Distribution of Y = X^{1/η} for X following a CompositeSpec. Immutable.
class ExponentiatedComposite {
 public:
  ExponentiatedComposite(CompositeSpec parent, double eta);

  const CompositeSpec& parent() const noexcept { return *parent_; }
  double eta() const noexcept { return eta_; }
  /// θ^{1/η}.
  double breakpoint() const noexcept { return breakpoint_; }
  /// c·F1(θ), the probability mass below the breakpoint.
  double head_mass() const noexcept { return head_mass_; }

  /// Density of one piece's formula at y, extended past its own interval.
  double piece_pdf(Piece piece, double y) const;
  double piece_log_pdf(Piece piece, double y) const;

  /// y == breakpoint() evaluates the tail piece. Returns 0 for y <= 0.
  double pdf(double y) const;
  /// -∞ where the density is zero.
  double log_pdf(double y) const;
  double cdf(double y) const;
  double quantile(double u) const;

  /// n draws by inversion of seeded uniforms (mt19937_64), sorted ascending.
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;
  /// Inverse-CDF transform of caller-supplied uniforms in (0, 1).
  double transform_uniform(double u) const { return quantile(u); }

  /// Quadrature of ∫ y^t f_Y(y) dy; InfiniteMomentError if t/η >= tail index.
  double moment_numeric(double t) const;
  /// Three-branch evaluation through M_i, F_i of the parent.
  double limited_moment(const LimitedMomentQuery& query) const;

  /// This distribution viewed as a composite with breakpoint θ^{1/η}.
  CompositeSpec as_composite() const;

 private:
  std::shared_ptr<const CompositeSpec> parent_;
  double eta_;
  double breakpoint_;
  double head_mass_;
};

/// Rejects η <= 0 with DomainError.
ExponentiatedComposite exponentiate(const CompositeSpec& parent, double eta);

/// Exponentiating an already exponentiated composite: the result is induced by
/// the original parent with exponent η·γ.
ExponentiatedComposite exponentiate(const ExponentiatedComposite& d, double gamma);

struct CompositeDiagnostics {
  double breakpoint = 0.0;
  double head_density = 0.0;
  double tail_density = 0.0;
  double head_slope = 0.0;
  double tail_slope = 0.0;
  /// |f_head(u) - f_tail(u)| / f_head(u)
  double continuity_gap = 0.0;
  /// |f'_head(u) - f'_tail(u)| / max(1, |f'_head(u)|), central differences
  double derivative_gap = 0.0;
  /// |∫ f_Y - 1| by adaptive quadrature
  double normalization_defect = 0.0;

  bool within(double continuity_tol, double derivative_tol, double normalization_tol) const {
    return continuity_gap <= continuity_tol && derivative_gap <= derivative_tol &&
           normalization_defect <= normalization_tol;
  }
};

CompositeDiagnostics verify_composite(const ExponentiatedComposite& d);

/// Piece functions filled in numerically from a log-density supported on
/// [support_lo, support_hi). Useful for families without closed forms.
PieceFunctions numeric_piece(std::function<double(double log_x)> log_density, double support_lo,
                             double support_hi);

}  // namespace expcomp

#pragma once

/// Alloy-type random potentials on the line: the periodic background, the
/// single-site bump, the coupling distribution, and their canonical form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wegnerlab/errors.hpp"
#include "wegnerlab/random.hpp"

namespace wegnerlab {

namespace detail {

/// Linear interpolation of uniform samples spanning [lo, hi] (inclusive).
inline double interpolate_uniform(std::span<const double> samples, double lo, double hi,
                                  double x) {
  if (samples.size() == 1) return samples[0];
  const double t = (x - lo) / (hi - lo) * static_cast<double>(samples.size() - 1);
  if (t <= 0.0) return samples.front();
  const auto last = samples.size() - 1;
  if (t >= static_cast<double>(last)) return samples.back();
  const auto i = static_cast<std::size_t>(t);
  const double frac = t - static_cast<double>(i);
  if (frac == 0.0) return samples[i];
  return samples[i] + frac * (samples[i + 1] - samples[i]);
}

inline constexpr double kPositionSlack = 1e-12;

}  // namespace detail

/// Nonnegative bump u, relative to its lattice site. Stored as uniform samples
/// on [support_lo, support_hi] joined by linear interpolation; zero outside.
/// The lower-bound window is [window_center - s/2, window_center + s/2] with
/// u >= lower_bound on it.
struct SingleSitePotential {
  double support_lo = -0.15;
  double support_hi = 0.15;
  std::vector<double> samples{1.0, 1.0};
  double window_center = 0.0;
  double window_width = 0.3;
  double lower_bound = 1.0;

  /// u = chi_[-R, R], window s = 2R, kappa = 1.
  static SingleSitePotential indicator(double half_width) {
    return {-half_width, half_width, {1.0, 1.0}, 0.0, 2.0 * half_width, 1.0};
  }

  double operator()(double x) const {
    if (x < support_lo - detail::kPositionSlack || x > support_hi + detail::kPositionSlack)
      return 0.0;
    return detail::interpolate_uniform(samples, support_lo, support_hi, x);
  }

  /// Half-width R of the smallest symmetric interval [-R, R] holding the support.
  double radius() const { return std::max(std::abs(support_lo), std::abs(support_hi)); }

  double sup_norm() const {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
  }

  void validate() const {
    if (!(support_lo < support_hi) || !std::isfinite(support_lo) || !std::isfinite(support_hi))
      throw ConfigError("site support must be a bounded interval lo < hi", "model.site");
    if (samples.size() < 2)
      throw ConfigError("site profile needs at least two samples", "model.site");
    for (double v : samples) {
      if (!std::isfinite(v)) throw ConfigError("site profile must be bounded", "model.site");
      if (v < 0.0) throw ConfigError("site profile must be nonnegative", "model.site");
    }
    if (!(lower_bound > 0.0))
      throw ConfigError("lower bound kappa must be positive", "model.site");
    if (!(window_width > 0.0)) throw ConfigError("lower-bound window is empty", "model.site");
    const double wlo = window_center - 0.5 * window_width;
    const double whi = window_center + 0.5 * window_width;
    if (wlo < support_lo - detail::kPositionSlack || whi > support_hi + detail::kPositionSlack)
      throw ConfigError("lower-bound window must lie inside the support", "model.site");
    // The interpolant is piecewise linear: its minimum over the window sits at
    // a window end or at a sample node inside the window.
    double lowest = std::min((*this)(wlo), (*this)(whi));
    const double step = (support_hi - support_lo) / static_cast<double>(samples.size() - 1);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double x = support_lo + step * static_cast<double>(i);
      if (x >= wlo && x <= whi) lowest = std::min(lowest, samples[i]);
    }
    if (lowest < lower_bound * (1.0 - 1e-12))
      throw ConfigError("site profile drops below kappa inside its window", "model.site");
  }
};

/// Z-periodic background, sampled at j/m for j = 0..m-1 and interpolated
/// linearly (with wrap-around).
struct PeriodicPotential {
  std::vector<double> values{0.0};

  static PeriodicPotential zero() { return {}; }

  /// amplitude * cos(2 pi x), sampled at `samples_per_cell` points.
  static PeriodicPotential harmonic(double amplitude, int samples_per_cell = 32) {
    PeriodicPotential p;
    p.values.resize(static_cast<std::size_t>(samples_per_cell));
    for (int j = 0; j < samples_per_cell; ++j)
      p.values[static_cast<std::size_t>(j)] =
          amplitude * std::cos(2.0 * std::numbers::pi * j / samples_per_cell);
    return p;
  }

  int samples_per_cell() const { return static_cast<int>(values.size()); }

  double operator()(double x) const {
    const double m = static_cast<double>(values.size());
    double t = (x - std::floor(x)) * m;
    auto i = static_cast<std::size_t>(t);
    if (i >= values.size()) i = values.size() - 1;
    const double frac = t - static_cast<double>(i);
    const double next = values[(i + 1) % values.size()];
    return frac == 0.0 ? values[i] : values[i] + frac * (next - values[i]);
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }

  void validate() const {
    if (values.empty()) throw ConfigError("periodic potential needs samples", "model.periodic");
    for (double v : values)
      if (!std::isfinite(v)) throw ConfigError("periodic potential must be bounded", "model.periodic");
  }
};

/// Distribution of the coupling constants.
///
/// `uniform` and `table` (piecewise-linear density on uniform nodes) are the
/// bounded densities of the model. `fixed` puts every coupling at one value:
/// it is the deterministic control used to switch disorder off and to build
/// periodic reference operators.
struct CouplingDensity {
  enum class Kind { uniform, table, fixed };

  Kind kind = Kind::uniform;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;  // table only

  static CouplingDensity uniform(double a, double b) { return {Kind::uniform, a, b, {}}; }
  static CouplingDensity table(double a, double b, std::vector<double> density) {
    return {Kind::table, a, b, std::move(density)};
  }
  static CouplingDensity fixed(double v) { return {Kind::fixed, v, v, {}}; }

  double width() const { return hi - lo; }

  double pdf(double x) const {
    if (kind == Kind::fixed || x < lo || x > hi) return 0.0;
    if (kind == Kind::uniform) return 1.0 / (hi - lo);
    return detail::interpolate_uniform(values, lo, hi, x);
  }

  double sup_norm() const {
    if (kind == Kind::uniform) return 1.0 / (hi - lo);
    if (kind == Kind::fixed) return 0.0;
    return *std::max_element(values.begin(), values.end());
  }

  double cdf(double x) const {
    if (x < lo) return 0.0;
    if (x >= hi) return 1.0;
    if (kind == Kind::uniform) return (x - lo) / (hi - lo);
    const double step = segment_width();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double a = lo + step * static_cast<double>(i);
      if (x <= a + step) {
        const double t = x - a;
        const double slope = (values[i + 1] - values[i]) / step;
        return acc + values[i] * t + 0.5 * slope * t * t;
      }
      acc += 0.5 * (values[i] + values[i + 1]) * step;
    }
    return 1.0;
  }

  /// Inverse CDF on [0, 1).
  double quantile(double u) const {
    switch (kind) {
      case Kind::fixed:
        return lo;
      case Kind::uniform:
        return std::min(lo + u * (hi - lo), hi);
      case Kind::table:
        break;
    }
    const double step = segment_width();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double mass = 0.5 * (values[i] + values[i + 1]) * step;
      if (u <= acc + mass || i + 2 == values.size()) {
        // Solve f_i t + (slope/2) t^2 = u - acc for t in [0, step].
        const double target = std::max(0.0, u - acc);
        const double slope = (values[i + 1] - values[i]) / step;
        double t;
        if (std::abs(slope) * step <= 1e-14 * std::max(values[i], 1.0)) {
          t = values[i] > 0.0 ? target / values[i] : 0.0;
        } else {
          const double disc = std::max(0.0, values[i] * values[i] + 2.0 * slope * target);
          // Numerically stable root of the quadratic.
          const double denom = values[i] + std::sqrt(disc);
          t = denom > 0.0 ? 2.0 * target / denom : 0.0;
        }
        return lo + step * static_cast<double>(i) + std::clamp(t, 0.0, step);
      }
      acc += mass;
    }
    return hi;
  }

  void validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw ConfigError("coupling support must be bounded", "model.density");
    if (kind == Kind::fixed) return;
    if (!(lo < hi)) throw ConfigError("coupling support must satisfy a < b", "model.density");
    if (kind == Kind::table) {
      if (values.size() < 2)
        throw ConfigError("density table needs at least two values", "model.density");
      for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("density must be bounded", "model.density");
        if (v < 0.0) throw ConfigError("density must be nonnegative", "model.density");
      }
      double total = 0.0;
      const double step = segment_width();
      for (std::size_t i = 0; i + 1 < values.size(); ++i)
        total += 0.5 * (values[i] + values[i + 1]) * step;
      if (std::abs(total - 1.0) > 1e-12)
        throw ConfigError("density must integrate to 1 (got " + std::to_string(total) + ")",
                          "model.density");
    }
  }

 private:
  double segment_width() const { return (hi - lo) / static_cast<double>(values.size() - 1); }
};

/// Raw, user-facing description of the operator family.
struct ModelSpec {
  PeriodicPotential periodic;
  SingleSitePotential site;
  CouplingDensity coupling;
};

/// Normalized model: kappa = 1, window centred at 0, coupling support [0, w+].
///
/// The total potential at canonical position y is
///   periodic(y + origin_shift) + sum_k (background_coupling + w_k) u(y - k).
/// The background term is the part of the periodic potential that came from
/// shifting the coupling support to start at 0. `coupling_scale` and
/// `coupling_offset` map raw couplings to canonical ones:
///   w = coupling_scale * (w_raw - coupling_offset).
struct CanonicalModel {
  PeriodicPotential periodic;
  SingleSitePotential site = SingleSitePotential::indicator(0.15);
  CouplingDensity coupling = CouplingDensity::uniform(0.0, 1.0);
  double origin_shift = 0.0;
  double background_coupling = 0.0;
  double coupling_scale = 1.0;
  double coupling_offset = 0.0;

  double omega_plus() const { return coupling.hi; }

  /// Sum over all lattice sites of u(y - k).
  double site_sum(double y) const {
    const double r = site.radius();
    const auto first = static_cast<long>(std::ceil(y - r - detail::kPositionSlack));
    const auto last = static_cast<long>(std::floor(y + r + detail::kPositionSlack));
    double s = 0.0;
    for (long k = first; k <= last; ++k) s += site(y - static_cast<double>(k));
    return s;
  }

  /// Periodic part of the potential, including the absorbed background.
  double periodic_value(double y) const {
    double v = periodic(y + origin_shift);
    if (background_coupling != 0.0) v += background_coupling * site_sum(y);
    return v;
  }

  /// Uniform bound on the total potential over all realizations.
  double potential_bound() const {
    const double cells = std::ceil(2.0 * site.radius() + 1.0);
    return periodic.sup_norm() +
           (std::abs(background_coupling) + std::abs(coupling.hi)) * site.sup_norm() * cells;
  }
};

/// Default experiment model: V_per = 0, u = chi_[-0.15, 0.15], f uniform on [0, 1].
inline CanonicalModel default_model() { return {}; }

/// Shift the origin to the window centre, rescale u by 1/kappa and the
/// couplings by kappa, and move the coupling support to [0, b - a] by
/// absorbing a * sum_k u(. - k) into the periodic part. The operator family
/// is unchanged.
inline CanonicalModel canonicalize(const ModelSpec& raw) {
  raw.periodic.validate();
  raw.site.validate();
  raw.coupling.validate();

  const double kappa = raw.site.lower_bound;
  const double shift = raw.site.window_center;

  CanonicalModel out;
  out.periodic = raw.periodic;
  out.origin_shift = shift;
  out.coupling_scale = kappa;
  out.coupling_offset = raw.coupling.lo;

  out.site = raw.site;
  out.site.support_lo -= shift;
  out.site.support_hi -= shift;
  out.site.window_center = 0.0;
  out.site.lower_bound = 1.0;
  if (kappa != 1.0)
    for (double& v : out.site.samples) v /= kappa;

  const double a = raw.coupling.lo;
  out.background_coupling = kappa * a;
  switch (raw.coupling.kind) {
    case CouplingDensity::Kind::fixed:
      out.coupling = CouplingDensity::fixed(0.0);
      break;
    case CouplingDensity::Kind::uniform:
      out.coupling = CouplingDensity::uniform(0.0, kappa * (raw.coupling.hi - a));
      break;
    case CouplingDensity::Kind::table: {
      std::vector<double> scaled = raw.coupling.values;
      if (kappa != 1.0)
        for (double& v : scaled) v /= kappa;
      out.coupling = CouplingDensity::table(0.0, kappa * (raw.coupling.hi - a), std::move(scaled));
      break;
    }
  }
  return out;
}

/// Contiguous range of lattice sites [first, last].
struct SiteRange {
  long first = 0;
  long last = -1;

  std::size_t size() const { return last < first ? 0 : static_cast<std::size_t>(last - first + 1); }
  bool contains(long k) const { return k >= first && k <= last; }
};

/// Lambda^+: sites whose closed support interval [k - R, k + R] meets the
/// closed box (given in the canonical frame).
inline SiteRange coupled_sites(const CanonicalModel& model, int box_length) {
  const double r = model.site.radius();
  const double lo = -0.5 * box_length - model.origin_shift;
  const double hi = 0.5 * box_length - model.origin_shift;
  return {static_cast<long>(std::ceil(lo - r - detail::kPositionSlack)),
          static_cast<long>(std::floor(hi + r + detail::kPositionSlack))};
}

/// Lambda-tilde: lattice sites inside the closed box.
inline SiteRange box_sites(const CanonicalModel& model, int box_length) {
  const double lo = -0.5 * box_length - model.origin_shift;
  const double hi = 0.5 * box_length - model.origin_shift;
  return {static_cast<long>(std::ceil(lo - detail::kPositionSlack)),
          static_cast<long>(std::floor(hi + detail::kPositionSlack))};
}

/// One draw of the couplings over a contiguous site range.
struct Realization {
  int box_length = 0;
  long first_site = 0;
  std::vector<double> couplings;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  SiteRange sites() const {
    return {first_site, first_site + static_cast<long>(couplings.size()) - 1};
  }

  double coupling(long k) const {
    if (!sites().contains(k))
      throw ConfigError("realization has no coupling for site " + std::to_string(k));
    return couplings[static_cast<std::size_t>(k - first_site)];
  }

  /// Copy with one coupling replaced (used for finite differences; the value
  /// may leave the coupling support).
  Realization with_coupling(long k, double value) const {
    Realization r = *this;
    if (!sites().contains(k))
      throw ConfigError("realization has no coupling for site " + std::to_string(k));
    r.couplings[static_cast<std::size_t>(k - first_site)] = value;
    return r;
  }
};

/// Map a realization of the raw model to the canonical model's couplings.
inline Realization transport(const CanonicalModel& model, const Realization& raw) {
  Realization r = raw;
  for (double& w : r.couplings) w = model.coupling_scale * (w - model.coupling_offset);
  return r;
}

/// i.i.d. couplings by inverse CDF, one stream word per site in ascending
/// site order.
inline Realization sample_couplings(const CouplingDensity& density, CounterStream& stream,
                                    SiteRange sites, int box_length) {
  density.validate();
  Realization r;
  r.box_length = box_length;
  r.first_site = sites.first;
  r.seed = stream.seed();
  r.stream_id = stream.stream_id();
  r.couplings.resize(sites.size());
  for (double& w : r.couplings) w = density.quantile(stream.uniform());
  return r;
}

/// V(y_i) = periodic part + sum_{k in Lambda^+} w_k u(y_i - k) at canonical
/// positions y_i. Sites outside the realization's range must not reach any
/// position.
inline std::vector<double> sample_total_potential(const CanonicalModel& model,
                                                  const Realization& realization,
                                                  std::span<const double> positions) {
  const double r = model.site.radius();
  const SiteRange have = realization.sites();
  std::vector<double> v(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double y = positions[i];
    double total = model.periodic(y + model.origin_shift);
    const auto first = static_cast<long>(std::ceil(y - r - detail::kPositionSlack));
    const auto last = static_cast<long>(std::floor(y + r + detail::kPositionSlack));
    for (long k = first; k <= last; ++k) {
      const double u = model.site(y - static_cast<double>(k));
      if (u == 0.0) continue;
      if (!have.contains(k))
        throw ConfigError("missing coupling for site " + std::to_string(k) +
                          " needed at position " + std::to_string(y));
      total += (model.background_coupling + realization.couplings[static_cast<std::size_t>(
                                                 k - realization.first_site)]) *
               u;
    }
    v[i] = total;
  }
  return v;
}

}  // namespace wegnerlab

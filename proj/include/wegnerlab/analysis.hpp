#pragma once

/// Estimators: finite-volume and averaged IDS, the Wegner trace statistic,
/// Lipschitz modulus, hitting probability, and localization diagnostics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wegnerlab/ensemble.hpp"
#include "wegnerlab/errors.hpp"
#include "wegnerlab/model.hpp"
#include "wegnerlab/operator.hpp"
#include "wegnerlab/spectral.hpp"

namespace wegnerlab {

/// N(E) per unit length on an ascending energy grid.
struct IdsCurve {
  std::vector<double> energies;
  std::vector<double> values;
  std::vector<double> standard_error;   // pointwise, 0 for a single realization
  std::vector<double> increment_error;  // stderr of N(E_{i+1}) - N(E_i)
  int box_length = 0;
  int points_per_cell = 0;
  std::size_t realizations = 1;
};

namespace detail {

inline void require_ascending(std::span<const double> energies) {
  if (energies.empty()) throw ConfigError("energy grid is empty", "energies");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!std::isfinite(energies[i])) throw ConfigError("energy grid must be finite", "energies");
    if (i > 0 && !(energies[i] > energies[i - 1]))
      throw ConfigError("energy grid must be strictly ascending", "energies");
  }
}

inline std::vector<double> normalized_counts(const TridiagonalOperator& op,
                                             std::span<const double> energies, int box_length) {
  std::vector<double> out(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i)
    out[i] = static_cast<double>(count_below(op, energies[i])) / box_length;
  return out;
}

}  // namespace detail

/// Uniform grid of `points` energies from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return out;
}

/// N_w^l(E) = #{eigenvalues < E} / l for one realization.
inline IdsCurve finite_volume_ids(const CanonicalModel& model, const Realization& realization,
                                  const GridSpec& grid, std::span<const double> energies) {
  detail::require_ascending(energies);
  const auto op = assemble(model, realization, grid);
  IdsCurve curve;
  curve.energies.assign(energies.begin(), energies.end());
  curve.values = detail::normalized_counts(op, energies, grid.box_length);
  curve.standard_error.assign(energies.size(), 0.0);
  curve.increment_error.assign(energies.size() > 0 ? energies.size() - 1 : 0, 0.0);
  curve.box_length = grid.box_length;
  curve.points_per_cell = grid.points_per_cell;
  return curve;
}

/// Ensemble mean of the finite-volume IDS with pointwise standard errors.
inline IdsCurve averaged_ids(const EnsembleConfig& config, std::span<const double> energies,
                             unsigned workers = 1, const ProgressCallback& progress = {}) {
  detail::require_ascending(energies);
  const std::vector<double> grid_energies(energies.begin(), energies.end());
  const auto result = run_ensemble(
      config,
      [&grid_energies](const CanonicalModel& model, const Realization& realization,
                       const GridSpec& grid) {
        return detail::normalized_counts(assemble(model, realization, grid), grid_energies,
                                         grid.box_length);
      },
      workers, progress);

  IdsCurve curve;
  curve.energies = grid_energies;
  curve.values = result.mean;
  curve.standard_error = result.standard_error;
  curve.box_length = config.grid.box_length;
  curve.points_per_cell = config.grid.points_per_cell;
  curve.realizations = result.realizations;
  const std::size_t count = result.realizations;
  curve.increment_error.assign(energies.size() - 1, 0.0);
  if (count > 1) {
    for (std::size_t i = 0; i + 1 < energies.size(); ++i) {
      double mean = 0.0;
      for (std::size_t r = 0; r < count; ++r) mean += result.sample(r, i + 1) - result.sample(r, i);
      mean /= static_cast<double>(count);
      double ss = 0.0;
      for (std::size_t r = 0; r < count; ++r) {
        const double d = result.sample(r, i + 1) - result.sample(r, i) - mean;
        ss += d * d;
      }
      curve.increment_error[i] =
          std::sqrt(ss / static_cast<double>(count - 1)) / std::sqrt(static_cast<double>(count));
    }
  }
  return curve;
}

/// Largest difference quotient of the curve and where it occurs.
struct LipschitzModulus {
  double value = 0.0;
  double energy_lo = 0.0;
  double energy_hi = 0.0;
  double standard_error = 0.0;
};

/// max_i (N(E_{i+1}) - N(E_i)) / (E_{i+1} - E_i) over a uniform grid.
inline LipschitzModulus lipschitz_modulus(const IdsCurve& curve) {
  const auto& e = curve.energies;
  if (e.size() < 2) throw ConfigError("Lipschitz modulus needs at least two points", "energies");
  const double step = (e.back() - e.front()) / static_cast<double>(e.size() - 1);
  for (std::size_t i = 0; i + 1 < e.size(); ++i)
    if (std::abs((e[i + 1] - e[i]) - step) > 1e-9 * std::max(std::abs(step), 1.0))
      throw ConfigError("Lipschitz modulus needs a uniform energy grid", "energies");
  LipschitzModulus best{-std::numeric_limits<double>::infinity(), 0, 0, 0};
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const double q = (curve.values[i + 1] - curve.values[i]) / (e[i + 1] - e[i]);
    if (q > best.value) {
      best.value = q;
      best.energy_lo = e[i];
      best.energy_hi = e[i + 1];
      best.standard_error =
          i < curve.increment_error.size() ? curve.increment_error[i] / (e[i + 1] - e[i]) : 0.0;
    }
  }
  return best;
}

/// Mean eigenvalue count in [E - eps, E) over (eps, l), with the derived
/// constant C_hat = mean / (eps l) and, per l, the least-squares slope of the
/// mean against eps through the origin with its (uncentred) R^2.
struct WegnerStatistic {
  double energy = 0.0;
  std::vector<double> widths;
  std::vector<int> lengths;
  std::size_t realizations = 0;
  // Indexed [length][width].
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> standard_error;
  std::vector<std::vector<double>> c_hat;
  std::vector<std::vector<double>> c_hat_error;
  std::vector<std::vector<double>> hit_probability;
  std::vector<std::vector<double>> hit_error;
  std::vector<double> slope;
  std::vector<double> r_squared;
  std::vector<std::string> seeds_digest;
  /// Number of box eigenvalues n, per length.
  std::vector<long> dimension;
};

/// Least-squares fit y = slope * x through the origin; R^2 is uncentred,
/// 1 - SS_res / sum y^2, as is standard without an intercept. NaN when y == 0.
inline std::pair<double, double> fit_through_origin(std::span<const double> x,
                                                    std::span<const double> y) {
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss_res += (y[i] - slope * x[i]) * (y[i] - slope * x[i]);
  const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : std::numeric_limits<double>::quiet_NaN();
  return {slope, r2};
}

/// Per-realization trace of [E - eps, E) for each width, followed by the
/// hitting indicators 1{trace >= 1}.
inline std::vector<double> wegner_traces(const TridiagonalOperator& op, double energy,
                                         std::span<const double> widths) {
  std::vector<double> out(2 * widths.size());
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const auto t = trace_projection(op, SpectralWindow::below(energy, widths[i]));
    out[i] = static_cast<double>(t);
    out[widths.size() + i] = t >= 1 ? 1.0 : 0.0;
  }
  return out;
}

inline WegnerStatistic wegner_statistic(const EnsembleConfig& base, double energy,
                                        std::span<const double> widths, std::span<const int> lengths,
                                        unsigned workers = 1, const ProgressCallback& progress = {}) {
  if (!std::isfinite(energy)) throw ConfigError("Wegner energy must be finite", "wegner.energy");
  if (widths.empty() || lengths.empty())
    throw ConfigError("Wegner grid needs widths and lengths", "wegner");
  for (double eps : widths)
    if (!(eps >= 0.0) || !std::isfinite(eps))
      throw ConfigError("window widths must be finite and nonnegative", "wegner.eps");

  WegnerStatistic out;
  out.energy = energy;
  out.widths.assign(widths.begin(), widths.end());
  out.lengths.assign(lengths.begin(), lengths.end());
  out.realizations = base.realizations;
  const std::size_t nw = widths.size();
  const std::vector<double> eps(widths.begin(), widths.end());
  for (int l : lengths) {
    EnsembleConfig config = base;
    config.grid.box_length = l;
    const auto result = run_ensemble(
        config,
        [&](const CanonicalModel& model, const Realization& realization, const GridSpec& grid) {
          return wegner_traces(assemble(model, realization, grid), energy, eps);
        },
        workers, progress);
    std::vector<double> mean(result.mean.begin(), result.mean.begin() + static_cast<long>(nw));
    std::vector<double> se(result.standard_error.begin(),
                           result.standard_error.begin() + static_cast<long>(nw));
    std::vector<double> c(nw), ce(nw);
    for (std::size_t i = 0; i < nw; ++i) {
      const double scale = eps[i] * l;
      c[i] = scale > 0.0 ? mean[i] / scale : std::numeric_limits<double>::quiet_NaN();
      ce[i] = scale > 0.0 ? se[i] / scale : std::numeric_limits<double>::quiet_NaN();
    }
    const auto [slope, r2] = fit_through_origin(eps, mean);
    out.mean.push_back(mean);
    out.standard_error.push_back(se);
    out.c_hat.push_back(c);
    out.c_hat_error.push_back(ce);
    out.hit_probability.emplace_back(result.mean.begin() + static_cast<long>(nw), result.mean.end());
    out.hit_error.emplace_back(result.standard_error.begin() + static_cast<long>(nw),
                               result.standard_error.end());
    out.slope.push_back(slope);
    out.r_squared.push_back(r2);
    out.seeds_digest.push_back(result.seeds_digest);
    out.dimension.push_back(config.grid.node_count());
  }
  return out;
}

/// Fraction of realizations with at least one eigenvalue in [E - eps, E),
/// alongside the mean trace of the same window (Chebyshev/Markov pair).
struct HittingProbability {
  double probability = 0.0;
  double probability_error = 0.0;
  double mean_trace = 0.0;
  double mean_trace_error = 0.0;
};

inline HittingProbability hitting_probability(const EnsembleConfig& base, double energy,
                                              double width, int length, unsigned workers = 1) {
  if (!(width > 0.0)) throw ConfigError("window width must be positive", "wegner.eps");
  EnsembleConfig config = base;
  config.grid.box_length = length;
  const std::vector<double> eps{width};
  const auto result = run_ensemble(
      config,
      [&](const CanonicalModel& model, const Realization& realization, const GridSpec& grid) {
        return wegner_traces(assemble(model, realization, grid), energy, eps);
      },
      workers);
  return {result.mean[1], result.standard_error[1], result.mean[0], result.standard_error[0]};
}

/// Total potential along [0, cells) at spacing 1/m, couplings drawn from
/// `stream` site by site.
inline std::vector<double> chain_potential(const CanonicalModel& model, CounterStream& stream,
                                           long cells, int points_per_cell) {
  if (cells <= 0 || points_per_cell <= 0) throw ConfigError("chain must be nonempty", "localize");
  const double r = model.site.radius();
  const SiteRange sites{static_cast<long>(std::floor(-r)) - 1,
                        cells + static_cast<long>(std::ceil(r)) + 1};
  const auto realization = sample_couplings(model.coupling, stream, sites, 0);
  std::vector<double> positions(static_cast<std::size_t>(cells * points_per_cell));
  const double h = 1.0 / points_per_cell;
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<double>(i) * h;
  return sample_total_potential(model, realization, positions);
}

/// Growth rate per unit length of ||T_N ... T_1||, T_i = [[2 + h^2 (V_i - E), -1], [1, 0]].
/// The running product is renormalized every 16 steps; the result is the
/// exact log of the spectral norm of the product (>= 0 since det T_i = 1)
/// divided by the chain length N h.
inline double lyapunov_exponent(std::span<const double> potential, double energy, double spacing) {
  if (potential.empty()) throw ConfigError("empty chain", "localize");
  const double h2 = spacing * spacing;
  // Product M = [[a, b], [c, d]], applied on the left.
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double log_norm = 0.0;
  auto spectral_norm = [&] {
    const double f2 = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * det * det));
    return std::sqrt(0.5 * (f2 + disc));
  };
  for (std::size_t i = 0; i < potential.size(); ++i) {
    const double t = 2.0 + h2 * (potential[i] - energy);
    const double na = t * a - c;
    const double nb = t * b - d;
    c = a;
    d = b;
    a = na;
    b = nb;
    if (i % 16 == 15) {
      const double s = spectral_norm();
      if (!std::isfinite(s) || s == 0.0) throw NumericalFault("transfer-matrix product overflow");
      log_norm += std::log(s);
      a /= s;
      b /= s;
      c /= s;
      d /= s;
    }
  }
  const double s = spectral_norm();
  if (!std::isfinite(s)) throw NumericalFault("transfer-matrix product overflow");
  log_norm += std::log(s);
  return std::max(0.0, log_norm) / (spacing * static_cast<double>(potential.size()));
}

/// Lyapunov exponent of a fresh chain of `cells` unit cells.
inline double lyapunov_exponent(const CanonicalModel& model, CounterStream& stream, double energy,
                                long cells, int points_per_cell) {
  if (cells < 10000) throw ConfigError("Lyapunov chain needs at least 1e4 cells", "localize.chain_cells");
  const auto v = chain_potential(model, stream, cells, points_per_cell);
  return lyapunov_exponent(v, energy, 1.0 / points_per_cell);
}

/// Exponential fit to an eigenvector envelope.
struct DecayFit {
  double rate = 0.0;       // slope of log envelope per unit length; < 0 means decay
  double r_squared = 0.0;  // of the straight-line fit
  double peak_position = 0.0;
  std::size_t points = 0;
};

/// Envelope = max |psi| in each unit cell (peak filter). Fits log(envelope)
/// against distance from the global maximum by least squares. Cells whose
/// envelope lies below 1e-13 of the peak are dropped as rounding noise.
inline DecayFit decay_rate(const EigenPair& pair, std::span<const double> nodes) {
  const auto& psi = pair.vector;
  if (psi.size() != nodes.size()) throw ConfigError("eigenvector and node count differ");
  if (psi.empty()) throw ConfigError("empty eigenvector");
  std::size_t peak = 0;
  for (std::size_t i = 1; i < psi.size(); ++i)
    if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
  const double peak_abs = std::abs(psi[peak]);
  const double x0 = nodes[peak];

  std::vector<double> dist, logs;
  std::size_t i = 0;
  while (i < psi.size()) {
    const double cell = std::floor(nodes[i]);
    std::size_t best = i;
    std::size_t j = i;
    while (j < psi.size() && std::floor(nodes[j]) == cell) {
      if (std::abs(psi[j]) > std::abs(psi[best])) best = j;
      ++j;
    }
    const double env = std::abs(psi[best]);
    if (env > 1e-13 * peak_abs) {
      dist.push_back(std::abs(nodes[best] - x0));
      logs.push_back(std::log(env));
    }
    i = j;
  }
  if (dist.size() < 10) throw ConfigError("envelope shorter than 10 points");

  const auto n = static_cast<double>(dist.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    mx += dist[k];
    my += logs[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    sxy += (dist[k] - mx) * (logs[k] - my);
    sxx += (dist[k] - mx) * (dist[k] - mx);
    syy += (logs[k] - my) * (logs[k] - my);
  }
  DecayFit fit;
  fit.rate = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.r_squared = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 0.0;
  fit.peak_position = x0;
  fit.points = dist.size();
  return fit;
}

/// h (sum psi^2)^2 / sum psi^4, a length: about l for extended states.
inline double participation_ratio(const EigenPair& pair, double spacing) {
  double s2 = 0.0, s4 = 0.0;
  for (double v : pair.vector) {
    s2 += v * v;
    s4 += v * v * v * v;
  }
  return s4 > 0.0 ? spacing * s2 * s2 / s4 : 0.0;
}

/// Localization diagnostics for a set of energies and eigenstates.
struct LocalizationReport {
  struct State {
    double energy = 0.0;
    DecayFit fit;
    double participation = 0.0;
    double gamma_at_energy = 0.0;
  };
  std::vector<double> energies;
  std::vector<double> gamma;
  long chain_cells = 0;
  std::vector<State> states;
};

}  // namespace wegnerlab

#pragma once

/// Numerical checks of the matrix-level facts behind the Wegner bound:
/// Hellmann-Feynman derivatives, the uniform lower bound on the summed
/// eigenvalue derivatives, the window-mass (unique continuation) ratio, and
/// Dirichlet-Neumann bracketing with rank-two interlacing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wegnerlab/analysis.hpp"
#include "wegnerlab/errors.hpp"
#include "wegnerlab/model.hpp"
#include "wegnerlab/operator.hpp"
#include "wegnerlab/spectral.hpp"

namespace wegnerlab {

struct CaseRecord {
  std::string digest;
  double measured = 0.0;
  double reference = 0.0;  // second side of a comparison, when there is one
  double bound = 0.0;
  bool passed = true;
  bool vacuous = false;
};

struct SkipRecord {
  std::string digest;
  std::string reason;
};

struct VerificationReport {
  std::string check;
  std::vector<CaseRecord> cases;
  std::vector<SkipRecord> skipped;
  std::vector<std::string> notes;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [](const CaseRecord& c) { return !c.passed; }));
  }
  bool passed() const { return failures() == 0; }

  double min_measured() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : cases) m = std::min(m, c.measured);
    return m;
  }
  double max_measured() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : cases) m = std::max(m, c.measured);
    return m;
  }

  void merge(const VerificationReport& other) {
    cases.insert(cases.end(), other.cases.begin(), other.cases.end());
    skipped.insert(skipped.end(), other.skipped.begin(), other.skipped.end());
    for (const auto& n : other.notes)
      if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
  }
};

namespace detail {

inline std::string realization_digest(const Realization& r) {
  std::uint64_t h = mix64(r.seed ^ mix64(r.stream_id + 0x9e37));
  for (double w : r.couplings) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof w);
    std::memcpy(&bits, &w, sizeof bits);
    h = mix64(h ^ bits);
  }
  return hex64(h);
}

inline std::string case_digest(const Realization& r, const GridSpec& grid, const std::string& extra) {
  std::ostringstream s;
  s << realization_digest(r) << ":l=" << grid.box_length << ",m=" << grid.points_per_cell
    << "," << extra;
  return s.str();
}

/// Half-open node range {i : x_i in [lo, hi)}; widened to the nearest node
/// when empty. `widened` reports the rounding.
struct NodeRange {
  std::size_t first = 0;
  std::size_t last = 0;  // one past
  bool widened = false;
};

inline NodeRange node_range(std::span<const double> nodes, double lo, double hi, double spacing) {
  const double slack = 1e-9 * spacing;
  const auto first = std::lower_bound(nodes.begin(), nodes.end(), lo - slack);
  const auto last = std::lower_bound(nodes.begin(), nodes.end(), hi - slack);
  NodeRange r{static_cast<std::size_t>(first - nodes.begin()),
              static_cast<std::size_t>(last - nodes.begin()), false};
  if (r.first >= r.last && !nodes.empty()) {
    const double centre = 0.5 * (lo + hi);
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), centre);
    std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    if (i == nodes.size() || (i > 0 && centre - nodes[i - 1] <= nodes[i] - centre)) --i;
    if (std::abs(nodes[i] - centre) <= hi - lo + spacing) r = {i, i + 1, true};
  }
  return r;
}

inline double mass(std::span<const double> psi, NodeRange range, double spacing) {
  double s = 0.0;
  for (std::size_t i = range.first; i < range.last; ++i) s += psi[i] * psi[i];
  return spacing * s;
}

/// <psi, u(. - k) psi> in L^2(grid).
inline double site_overlap(const CanonicalModel& model, const TridiagonalOperator& op,
                           std::span<const double> psi, long site) {
  const double r = model.site.radius();
  const double k = static_cast<double>(site);
  const auto first = std::lower_bound(op.nodes.begin(), op.nodes.end(), k - r - kPositionSlack);
  double s = 0.0;
  for (auto it = first; it != op.nodes.end() && *it <= k + r + kPositionSlack; ++it) {
    const auto i = static_cast<std::size_t>(it - op.nodes.begin());
    s += model.site(*it - k) * psi[i] * psi[i];
  }
  return op.spacing * s;
}

}  // namespace detail

/// Box [-l/2, l/2] in the canonical frame.
inline std::pair<double, double> box_bounds(const CanonicalModel& model, const GridSpec& grid) {
  return {-0.5 * grid.box_length - model.origin_shift, 0.5 * grid.box_length - model.origin_shift};
}

/// Central difference of the index-th eigenvalue in w_k against the
/// Hellmann-Feynman overlap <psi_n, u(. - k) psi_n>. Skips (with reason) when
/// the eigenvalue gap is below 1e3 * delta * ||u||_inf or inverse iteration
/// fails.
inline VerificationReport hellmann_feynman_check(const CanonicalModel& model,
                                                 const Realization& realization,
                                                 const GridSpec& grid, std::size_t index, long site,
                                                 double delta, double tolerance = 1e-5) {
  VerificationReport report{"hellmann_feynman", {}, {}, {}};
  std::ostringstream extra;
  extra << "n=" << index << ",k=" << site << ",delta=" << delta;
  const std::string digest = detail::case_digest(realization, grid, extra.str());

  const auto op = assemble(model, realization, grid);
  if (index >= op.size()) throw std::out_of_range("eigenvalue index beyond operator size");
  const double value = kth_eigenvalue(op, index);
  double gap = std::numeric_limits<double>::infinity();
  if (index > 0) gap = std::min(gap, value - kth_eigenvalue(op, index - 1));
  if (index + 1 < op.size()) gap = std::min(gap, kth_eigenvalue(op, index + 1) - value);
  const double guard = 1e3 * delta * model.site.sup_norm();
  if (!(gap > guard)) {
    report.skipped.push_back({digest, "near-degenerate: gap " + std::to_string(gap) +
                                          " <= " + std::to_string(guard)});
    return report;
  }
  EigenPair pair;
  try {
    pair = eigenpair(op, value);
  } catch (const NonConvergence& e) {
    report.skipped.push_back({digest, e.what()});
    return report;
  }
  const double overlap = detail::site_overlap(model, op, pair.vector, site);

  const double w = realization.coupling(site);
  const auto plus = assemble(model, realization.with_coupling(site, w + delta), grid);
  const auto minus = assemble(model, realization.with_coupling(site, w - delta), grid);
  const double derivative =
      (kth_eigenvalue(plus, index) - kth_eigenvalue(minus, index)) / (2.0 * delta);
  const double discrepancy = std::abs(derivative - overlap);
  report.cases.push_back({digest, discrepancy, overlap, tolerance, discrepancy <= tolerance, false});
  return report;
}

/// Window-mass ratio for one site: mass on Lambda_s(k) over mass on Lambda_1(k),
/// both as half-open node ranges.
struct WindowRatio {
  double ratio = 0.0;
  double window_mass = 0.0;
  double cell_mass = 0.0;
  bool vacuous = false;
  bool widened = false;
};

inline WindowRatio window_ratio(std::span<const double> psi, std::span<const double> nodes,
                                double spacing, long site, double width) {
  const double k = static_cast<double>(site);
  const auto small = detail::node_range(nodes, k - 0.5 * width, k + 0.5 * width, spacing);
  const auto cell = detail::node_range(nodes, k - 0.5, k + 0.5, spacing);
  WindowRatio out;
  out.window_mass = detail::mass(psi, small, spacing);
  out.cell_mass = detail::mass(psi, cell, spacing);
  out.widened = small.widened;
  if (out.cell_mass < 1e-300) {
    out.vacuous = true;
    return out;
  }
  out.ratio = out.window_mass / out.cell_mass;
  return out;
}

/// Per-eigenvalue data of the summed-derivative lower bound.
struct EderCase {
  double energy = 0.0;
  double derivative_sum = 0.0;  // sum_k <psi, u_k psi>
  double window_mass = 0.0;     // mass on S = union of Lambda_s(k)
  double min_ratio = 0.0;       // min over k of the window-mass ratio
};

struct EderResult {
  VerificationReport report;
  std::vector<EderCase> cases;
  double min_derivative_sum = std::numeric_limits<double>::infinity();
  double min_window_mass = std::numeric_limits<double>::infinity();
};

/// For every eigenvalue in `window`: the summed Hellmann-Feynman derivatives
/// over box sites, the mass on the union of lower-bound windows, and the
/// smallest window ratio. Checks derivative_sum >= window_mass >= min_ratio
/// and derivative_sum > 0.
inline EderResult eder_lower_bound(const CanonicalModel& model, const Realization& realization,
                                   const GridSpec& grid, const SpectralWindow& window,
                                   std::size_t max_count = 100000) {
  EderResult out;
  out.report.check = "eder_lower_bound";
  const auto op = assemble(model, realization, grid);
  const auto values = eigenvalues_in(op, window, max_count, 0.0);
  const SiteRange sites = box_sites(model, grid.box_length);
  const double s = model.site.window_width;
  const double tol = 1e-12;

  for (std::size_t n = 0; n < values.size(); ++n) {
    std::ostringstream extra;
    extra << "E=" << values[n];
    const std::string digest = detail::case_digest(realization, grid, extra.str());
    if ((n > 0 && values[n] - values[n - 1] < 1e-9 * op.scale()) ||
        (n + 1 < values.size() && values[n + 1] - values[n] < 1e-9 * op.scale())) {
      out.report.skipped.push_back({digest, "near-degenerate eigenvalue"});
      continue;
    }
    EigenPair pair;
    try {
      pair = eigenpair(op, values[n]);
    } catch (const NumericalFault& e) {
      out.report.skipped.push_back({digest, e.what()});
      continue;
    }
    EderCase c;
    c.energy = pair.value;
    c.min_ratio = std::numeric_limits<double>::infinity();
    std::vector<char> in_s(op.size(), 0);
    for (long k = sites.first; k <= sites.last; ++k) {
      c.derivative_sum += detail::site_overlap(model, op, pair.vector, k);
      const double kk = static_cast<double>(k);
      const auto range = detail::node_range(op.nodes, kk - 0.5 * s, kk + 0.5 * s, op.spacing);
      for (std::size_t i = range.first; i < range.last; ++i) in_s[i] = 1;
      const auto ratio = window_ratio(pair.vector, op.nodes, op.spacing, k, s);
      if (!ratio.vacuous) c.min_ratio = std::min(c.min_ratio, ratio.ratio);
    }
    for (std::size_t i = 0; i < op.size(); ++i)
      if (in_s[i]) c.window_mass += op.spacing * pair.vector[i] * pair.vector[i];

    const bool chain1 = c.derivative_sum >= c.window_mass * (1.0 - tol) - tol;
    const bool chain2 = c.window_mass >= c.min_ratio * (1.0 - tol) - tol;
    const bool positive = c.derivative_sum > 0.0;
    out.report.cases.push_back({digest, c.derivative_sum, c.window_mass, c.min_ratio,
                                chain1 && chain2 && positive, false});
    if (!chain1) out.report.notes.push_back(digest + ": derivative sum below window mass");
    if (!chain2) out.report.notes.push_back(digest + ": window mass below min ratio");
    out.min_derivative_sum = std::min(out.min_derivative_sum, c.derivative_sum);
    out.min_window_mass = std::min(out.min_window_mass, c.window_mass);
    out.cases.push_back(c);
  }
  return out;
}

/// Ratio rho_k = mass(Lambda_s(k)) / mass(Lambda_1(k)) for one eigenfunction,
/// checked against `c_floor`. `reference` holds the implied Gronwall constant
/// C6 = log(s / rho_k), from mass(Lambda_1) <= e^C6 s^-1 mass(Lambda_s). Requires Lambda_1(k) inside the box.
inline VerificationReport unique_continuation_check(const EigenPair& pair,
                                                    const TridiagonalOperator& op,
                                                    std::pair<double, double> box, long site,
                                                    double width, double c_floor = 1e-6) {
  VerificationReport report{"unique_continuation", {}, {}, {}};
  const double k = static_cast<double>(site);
  if (k - 0.5 < box.first - 1e-12 || k + 0.5 > box.second + 1e-12)
    throw ConfigError("unit cell around site " + std::to_string(site) + " leaves the box");
  const auto r = window_ratio(pair.vector, op.nodes, op.spacing, site, width);
  std::ostringstream digest;
  digest << "E=" << pair.value << ",k=" << site << ",s=" << width;
  if (r.vacuous) {
    report.cases.push_back({digest.str(), 0.0, 0.0, c_floor, true, true});
    return report;
  }
  const double c6 = std::log(width / r.ratio);
  report.cases.push_back({digest.str(), r.ratio, c6, c_floor, r.ratio >= c_floor, false});
  if (r.widened) report.notes.push_back(digest.str() + ": window widened to one node");
  return report;
}

/// Test hook: corrupt the Neumann cut so bracketing must fail.
enum class Fault { none, neumann_sign };

/// Dirichlet-Neumann bracketing at the cuts j -+ R:
///   count_N-cut(E) >= count(E) >= count_D-cut(E), |count_cut - count| <= 2,
/// the dimension bookkeeping of both cuts, the index-wise ordering of the
/// Neumann box below the Dirichlet box, and monotonicity in w_j (dense,
/// when the operators have at most 2048 rows). Each sub-check is one case
/// whose measured value is its violation count. Energies are compared with a
/// slack of 1e-9 * 2/h^2.
inline VerificationReport bracketing_check(const CanonicalModel& model, const Realization& realization,
                                           const GridSpec& grid, long site,
                                           std::span<const double> energies,
                                           Fault fault = Fault::none) {
  VerificationReport report{"bracketing", {}, {}, {}};
  const double radius = model.site.radius();
  const auto op = assemble(model, realization, grid);
  auto neumann = split_at(op, site, radius, Boundary::neumann);
  const auto dirichlet = split_at(op, site, radius, Boundary::dirichlet);
  if (fault == Fault::neumann_sign) {
    for (std::size_t i = 0; i + 1 < neumann.size(); ++i)
      if (neumann.offdiag[i] == 0.0 && op.offdiag[i] != 0.0) {
        const double w = -op.offdiag[i];
        neumann.diag[i] += 2.0 * w;
        neumann.diag[i + 1] += 2.0 * w;
      }
  }
  for (const auto& w : neumann.warnings) report.notes.push_back(w);
  const double tau = 1e-9 * op.scale();
  const std::string base = detail::case_digest(realization, grid, "j=" + std::to_string(site));

  std::size_t order_violations = 0;
  std::size_t rank_violations = 0;
  for (double e : energies) {
    const auto c = count_below(op, e);
    const auto c_hi = count_below(op, e + tau);
    const auto c_lo = count_below(op, e - tau);
    const auto cn_hi = count_below(neumann, e + tau);
    const auto cn_lo = count_below(neumann, e - tau);
    const auto cd = count_below(dirichlet, e);
    const auto cd_hi = count_below(dirichlet, e + tau);
    if (cn_hi < c) ++order_violations;
    if (c_hi < cd) ++order_violations;
    if (cn_lo > c_hi + 2 || c_lo > cn_hi + 2) ++rank_violations;
    if (c_lo > cd_hi + 2 || cd > c_hi + 2) ++rank_violations;
  }
  report.cases.push_back({base + ",counting", static_cast<double>(order_violations), 0, 0,
                          order_violations == 0, false});
  report.cases.push_back({base + ",rank2", static_cast<double>(rank_violations), 0, 0,
                          rank_violations == 0, false});

  // Dimension bookkeeping over the whole spectrum.
  auto total = [](const TridiagonalOperator& t) {
    const double pad = 1.0 + 1e-6 * t.scale();
    return count_below(t, t.gershgorin_upper() + pad);
  };
  const std::size_t removed = op.size() - dirichlet.size();
  const bool dims_ok = total(dirichlet) == op.size() - removed && total(neumann) == op.size() &&
                       total(op) == op.size() && removed == (neumann.interfaces.size());
  report.cases.push_back({base + ",dimension", dims_ok ? 0.0 : 1.0, static_cast<double>(removed), 0,
                          dims_ok, false});

  GridSpec neumann_grid = grid;
  neumann_grid.bc = Boundary::neumann;
  GridSpec dirichlet_grid = grid;
  dirichlet_grid.bc = Boundary::dirichlet;
  if (neumann_grid.node_count() <= 2048) {
    const auto nbox = dense_spectrum(assemble(model, realization, neumann_grid)).values;
    const auto dbox = dense_spectrum(assemble(model, realization, dirichlet_grid)).values;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < dbox.size(); ++i)
      if (nbox[i] > dbox[i] + tau) ++bad;
    report.cases.push_back({base + ",box-order", static_cast<double>(bad), 0, 0, bad == 0, false});

    const auto high = dense_spectrum(assemble(model, realization.with_coupling(site, model.omega_plus()), grid)).values;
    const auto low = dense_spectrum(assemble(model, realization.with_coupling(site, 0.0), grid)).values;
    std::size_t nonmono = 0;
    for (std::size_t i = 0; i < high.size(); ++i)
      if (high[i] < low[i] - tau) ++nonmono;
    report.cases.push_back({base + ",monotone", static_cast<double>(nonmono), 0, 0, nonmono == 0, false});
  } else {
    report.skipped.push_back({base + ",box-order", "dense oracle limited to n <= 2048"});
    report.skipped.push_back({base + ",monotone", "dense oracle limited to n <= 2048"});
  }
  return report;
}

}  // namespace wegnerlab

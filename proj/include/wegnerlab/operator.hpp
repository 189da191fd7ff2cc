#pragma once

/// Finite-difference restriction of H = -d^2/dx^2 + V to the box
/// [-l/2, l/2], as a symmetric tridiagonal matrix, plus interior cuts that
/// impose extra Dirichlet or Neumann conditions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "wegnerlab/errors.hpp"
#include "wegnerlab/model.hpp"

namespace wegnerlab {

enum class Boundary { dirichlet, neumann };

inline const char* to_string(Boundary bc) {
  return bc == Boundary::dirichlet ? "dirichlet" : "neumann";
}

/// Box Lambda_l = [-l/2, l/2] with m nodes per unit cell. Nodes sit at
/// -l/2 + i/m; Dirichlet drops both end nodes, Neumann keeps them.
struct GridSpec {
  int box_length = 16;
  int points_per_cell = 32;
  Boundary bc = Boundary::dirichlet;

  double spacing() const { return 1.0 / points_per_cell; }

  /// Operator dimension n.
  long node_count() const {
    const long cells = static_cast<long>(box_length) * points_per_cell;
    return bc == Boundary::dirichlet ? cells - 1 : cells + 1;
  }

  /// Position of row i (box frame).
  double node_position(long i) const {
    const long offset = bc == Boundary::dirichlet ? i + 1 : i;
    return -0.5 * box_length + static_cast<double>(offset) * spacing();
  }

  void validate() const {
    if (box_length <= 0) throw ConfigError("box length must be positive", "grid.l");
    if (points_per_cell <= 0) throw ConfigError("points per cell must be positive", "grid.m");
    if (node_count() <= 0) throw ConfigError("grid has no interior nodes", "grid");
  }
};

/// An interior boundary condition inserted by split_at.
struct Interface {
  double requested = 0.0;  // canonical-frame position asked for
  double actual = 0.0;     // node position used
  Boundary bc = Boundary::dirichlet;
};

/// Symmetric tridiagonal operator with node positions (canonical frame) and
/// boundary metadata. offdiag[i] couples rows i and i+1.
struct TridiagonalOperator {
  std::vector<double> diag;
  std::vector<double> offdiag;
  std::vector<double> nodes;
  double spacing = 1.0;
  Boundary bc = Boundary::dirichlet;
  std::vector<Interface> interfaces;
  std::vector<std::string> warnings;

  std::size_t size() const { return diag.size(); }

  /// Stencil scale 2/h^2, the natural unit for tolerances.
  double scale() const { return 2.0 / (spacing * spacing); }

  double gershgorin_lower() const {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag.size(); ++i) {
      double radius = 0.0;
      if (i > 0) radius += std::abs(offdiag[i - 1]);
      if (i + 1 < diag.size()) radius += std::abs(offdiag[i]);
      lo = std::min(lo, diag[i] - radius);
    }
    return lo;
  }

  double gershgorin_upper() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag.size(); ++i) {
      double radius = 0.0;
      if (i > 0) radius += std::abs(offdiag[i - 1]);
      if (i + 1 < diag.size()) radius += std::abs(offdiag[i]);
      hi = std::max(hi, diag[i] + radius);
    }
    return hi;
  }

  /// Largest |offdiag| (0 for a 1x1 operator).
  double max_offdiag() const {
    double m = 0.0;
    for (double e : offdiag) m = std::max(m, std::abs(e));
    return m;
  }
};

/// Plain operator from explicit entries (unit spacing unless given).
inline TridiagonalOperator make_operator(std::vector<double> diag, std::vector<double> offdiag,
                                         double spacing = 1.0) {
  if (diag.empty()) throw ConfigError("operator must have at least one row");
  if (offdiag.size() + 1 != diag.size())
    throw ConfigError("offdiagonal must have n - 1 entries");
  TridiagonalOperator op;
  op.nodes.resize(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) op.nodes[i] = static_cast<double>(i) * spacing;
  op.diag = std::move(diag);
  op.offdiag = std::move(offdiag);
  op.spacing = spacing;
  return op;
}

/// Central differences: diag 2/h^2 + V(x_i), offdiag -1/h^2. Neumann ends use
/// the symmetric ghost reflection, diag 1/h^2 + V.
inline TridiagonalOperator assemble(const CanonicalModel& model, const Realization& realization,
                                    const GridSpec& grid) {
  grid.validate();
  if (realization.box_length != grid.box_length)
    throw ConfigError("realization box length " + std::to_string(realization.box_length) +
                          " does not match grid box length " + std::to_string(grid.box_length),
                      "grid.l");
  const long n = grid.node_count();
  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);

  TridiagonalOperator op;
  op.spacing = h;
  op.bc = grid.bc;
  op.nodes.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    op.nodes[static_cast<std::size_t>(i)] = grid.node_position(i) - model.origin_shift;

  const auto potential = sample_total_potential(model, realization, op.nodes);
  op.diag.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < op.diag.size(); ++i) op.diag[i] = 2.0 * inv_h2 + potential[i];
  if (grid.bc == Boundary::neumann) {
    op.diag.front() -= inv_h2;
    if (n > 1) op.diag.back() -= inv_h2;
  }
  op.offdiag.assign(static_cast<std::size_t>(n - 1), -inv_h2);
  return op;
}

namespace detail {

inline std::size_t nearest_node(const TridiagonalOperator& op, double x) {
  const auto it = std::lower_bound(op.nodes.begin(), op.nodes.end(), x);
  std::size_t i = static_cast<std::size_t>(it - op.nodes.begin());
  if (i == op.nodes.size()) return i - 1;
  if (i > 0 && std::abs(op.nodes[i - 1] - x) <= std::abs(op.nodes[i] - x)) --i;
  return i;
}

}  // namespace detail

/// Insert boundary conditions at the nodes nearest j - R and j + R.
///
/// Dirichlet removes each cut node (its couplings vanish with it). Neumann
/// removes the stencil edge outside each cut node: the outer edge on the left
/// cut and on the right cut, lowering both adjacent diagonals by 1/h^2 so each
/// piece ends with the same reflected stencil as a Neumann box. Either way the
/// result is block diagonal with the block of nodes in [j - R, j + R] split
/// off. A cut that does not land on a node is moved to the nearest one and a
/// warning is recorded.
inline TridiagonalOperator split_at(const TridiagonalOperator& op, long site, double radius,
                                    Boundary bc) {
  if (op.size() < 3) throw ConfigError("operator too small to cut");
  if (!(radius >= 0.0)) throw ConfigError("cut radius must be nonnegative");
  const double h = op.spacing;
  const double j = static_cast<double>(site);
  const double left_pos = j - radius;
  const double right_pos = j + radius;
  const double tol = 1e-9 * h;
  if (left_pos <= op.nodes.front() - tol || right_pos >= op.nodes.back() + tol)
    throw ConfigError("cut positions must lie strictly inside the box");

  const std::size_t p = detail::nearest_node(op, left_pos);
  const std::size_t q = detail::nearest_node(op, right_pos);
  if (p == 0 || q + 1 >= op.size())
    throw ConfigError("cut positions must be interior nodes of the box");

  TridiagonalOperator out = op;
  for (auto [want, idx] : {std::pair{left_pos, p}, std::pair{right_pos, q}}) {
    const double got = op.nodes[idx];
    if (std::abs(got - want) > tol)
      out.warnings.push_back("cut at " + std::to_string(want) + " moved to node " +
                             std::to_string(got));
  }
  out.interfaces.push_back({left_pos, op.nodes[p], bc});
  if (q != p) out.interfaces.push_back({right_pos, op.nodes[q], bc});

  if (bc == Boundary::neumann) {
    for (std::size_t edge : {p - 1, q}) {
      const double w = -out.offdiag[edge];
      out.offdiag[edge] = 0.0;
      out.diag[edge] -= w;
      out.diag[edge + 1] -= w;
    }
    return out;
  }

  // Dirichlet: drop rows p and q, zeroing the couplings across them.
  TridiagonalOperator cut;
  cut.spacing = op.spacing;
  cut.bc = op.bc;
  cut.interfaces = std::move(out.interfaces);
  cut.warnings = std::move(out.warnings);
  bool previous_kept = false;
  bool previous_removed = false;
  for (std::size_t i = 0; i < op.size(); ++i) {
    if (i == p || i == q) {
      previous_removed = true;
      continue;
    }
    if (previous_kept) cut.offdiag.push_back(previous_removed ? 0.0 : op.offdiag[i - 1]);
    cut.diag.push_back(op.diag[i]);
    cut.nodes.push_back(op.nodes[i]);
    previous_kept = true;
    previous_removed = false;
  }
  return cut;
}

/// Three-column text export: index, diag, offdiag (offdiag of the last row
/// is written as 0).
inline void write_operator_text(std::ostream& out, const TridiagonalOperator& op) {
  out.precision(17);
  for (std::size_t i = 0; i < op.size(); ++i)
    out << i << ' ' << op.diag[i] << ' ' << (i + 1 < op.size() ? op.offdiag[i] : 0.0) << '\n';
}

}  // namespace wegnerlab

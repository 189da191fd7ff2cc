#pragma once

/// Spectral primitives for symmetric tridiagonal operators.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wegnerlab/errors.hpp"
#include "wegnerlab/operator.hpp"

namespace wegnerlab {

inline constexpr double kUlp = std::numeric_limits<double>::epsilon();

/// Number of eigenvalues below `energy`, from the signs of the LDL^T pivots
/// q_i = (d_i - E) - e_{i-1}^2 / q_{i-1}. A pivot smaller than
/// ulp * (|d_i| + 2 max|e|) in magnitude is replaced by that value, negated,
/// so an eigenvalue equal to `energy` to rounding counts as below it.
inline std::size_t count_below(std::span<const double> diag, std::span<const double> offdiag,
                               double energy, double max_offdiag) {
  if (!std::isfinite(energy)) throw std::invalid_argument("count_below: energy must be finite");
  std::size_t negatives = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double e2 = i == 0 ? 0.0 : offdiag[i - 1] * offdiag[i - 1];
    q = (diag[i] - energy) - (i == 0 ? 0.0 : e2 / q);
    const double pivmin = kUlp * (std::abs(diag[i]) + 2.0 * max_offdiag);
    if (std::abs(q) < pivmin) q = -pivmin;
    negatives += q < 0.0 ? 1 : 0;
  }
  return negatives;
}

inline std::size_t count_below(const TridiagonalOperator& op, double energy) {
  return count_below(op.diag, op.offdiag, energy, op.max_offdiag());
}

/// Energy interval with explicit endpoint closure.
struct SpectralWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  /// The Wegner window [E - eps, E).
  static SpectralWindow below(double energy, double width) {
    return {energy - width, energy, true, false};
  }

  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }

  void validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
      throw std::invalid_argument("spectral window must be finite with lo <= hi");
  }
};

namespace detail {

/// Tie-breaking offset for window endpoints: one ulp of (|E| + 2/h^2).
inline double closure_nudge(const TridiagonalOperator& op, double energy) {
  return kUlp * (std::abs(energy) + op.scale());
}

/// #(lambda < x) for closed, #(lambda <= x) for open lower endpoints.
inline std::size_t count_excluded_below(const TridiagonalOperator& op, double lo, bool closed) {
  const double nudge = closure_nudge(op, lo);
  return count_below(op.diag, op.offdiag, closed ? lo - nudge : lo + nudge, op.max_offdiag());
}

}  // namespace detail

/// Number of eigenvalues in the window. Endpoints are resolved with a nudge
/// of one ulp of (|E| + 2/h^2): closed ends count eigenvalues that coincide
/// with them, open ends do not.
inline std::size_t trace_projection(const TridiagonalOperator& op, const SpectralWindow& window) {
  window.validate();
  if (window.empty()) return 0;
  const double nudge = detail::closure_nudge(op, window.hi);
  const std::size_t upper = count_below(op.diag, op.offdiag,
                                        window.hi_closed ? window.hi + nudge : window.hi - nudge,
                                        op.max_offdiag());
  const std::size_t lower = detail::count_excluded_below(op, window.lo, window.lo_closed);
  return upper > lower ? upper - lower : 0;
}

/// Default location tolerance for eigenvalues: 1e-10 * 2/h^2.
inline double default_eigen_tolerance(const TridiagonalOperator& op) { return 1e-10 * op.scale(); }

/// The index-th eigenvalue (0-based, ascending) by bisection on count_below,
/// inside [lo, hi]. A tolerance of 0 bisects until the bracket cannot shrink.
inline double kth_eigenvalue(const TridiagonalOperator& op, std::size_t index, double lo, double hi,
                             double tolerance) {
  const double emax = op.max_offdiag();
  // Invariant: count_below(lo) <= index < count_below(hi).
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tolerance || mid <= lo || mid >= hi) break;
    if (count_below(op.diag, op.offdiag, mid, emax) > index)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline double kth_eigenvalue(const TridiagonalOperator& op, std::size_t index,
                             double tolerance = 0.0) {
  if (index >= op.size()) throw std::out_of_range("eigenvalue index beyond operator size");
  const double pad = kUlp * op.scale() * 4.0 + 1e-300;
  return kth_eigenvalue(op, index, op.gershgorin_lower() - pad, op.gershgorin_upper() + pad,
                        tolerance);
}

/// All eigenvalues in the window, ascending, located by bisection to
/// `tolerance` (default 1e-10 * 2/h^2). Repeated eigenvalues are emitted once
/// per multiplicity.
inline std::vector<double> eigenvalues_in(const TridiagonalOperator& op, const SpectralWindow& window,
                                          std::size_t max_count,
                                          std::optional<double> tolerance = std::nullopt) {
  const std::size_t count = trace_projection(op, window);
  if (count > max_count)
    throw CapacityError("window holds " + std::to_string(count) + " eigenvalues, more than " +
                        std::to_string(max_count));
  std::vector<double> out;
  if (count == 0) return out;
  const double tol = tolerance.value_or(default_eigen_tolerance(op));
  const double pad = kUlp * (std::abs(window.lo) + std::abs(window.hi) + op.scale()) * 4.0;
  const double lo = std::max(window.lo - pad, op.gershgorin_lower() - pad);
  const double hi = std::min(window.hi + pad, op.gershgorin_upper() + pad);
  // First index inside the window, consistent with trace_projection.
  const std::size_t first = detail::count_excluded_below(op, window.lo, window.lo_closed);
  out.reserve(count);
  for (std::size_t k = first; k < first + count; ++k) {
    const double bracket_lo = out.empty() ? lo : std::max(lo, out.back() - 2.0 * tol);
    out.push_back(kth_eigenvalue(op, k, bracket_lo, hi, tol));
  }
  return out;
}

/// Eigenvalue with an eigenvector normalized in L^2(grid): h * sum psi_i^2 = 1.
/// `residual` is ||(H - value) psi|| in the same weighted norm.
struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

/// LU factorization with partial pivoting of a tridiagonal matrix
/// (dgttrf/dgttrs layout: lower multipliers, up to two superdiagonals).
class TridiagonalLu {
 public:
  TridiagonalLu(std::span<const double> diag, std::span<const double> offdiag, double shift)
      : n_(diag.size()), d_(diag.begin(), diag.end()), du_(offdiag.begin(), offdiag.end()),
        dl_(offdiag.begin(), offdiag.end()), du2_(n_ > 2 ? n_ - 2 : 0, 0.0), l_(n_, 0.0),
        swapped_(n_, false) {
    for (double& v : d_) v -= shift;
    double norm = 0.0;
    for (double v : d_) norm = std::max(norm, std::abs(v));
    for (double v : du_) norm = std::max(norm, 2.0 * std::abs(v));
    tiny_ = kUlp * std::max(norm, 1e-300);
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (std::abs(d_[i]) < tiny_) d_[i] = d_[i] < 0 ? -tiny_ : tiny_;
        const double f = dl_[i] / d_[i];
        l_[i] = f;
        d_[i + 1] -= f * du_[i];
        if (i + 2 < n_) du2_[i] = 0.0;
      } else {
        // Swap rows i and i+1.
        const double f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        l_[i] = f;
        const double tmp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = tmp - f * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du_[i + 1];
        }
        swapped_[i] = true;
      }
    }
    if (n_ > 0 && std::abs(d_[n_ - 1]) < tiny_) d_[n_ - 1] = d_[n_ - 1] < 0 ? -tiny_ : tiny_;
  }

  void solve(std::vector<double>& b) const {
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (swapped_[i]) {
        const double tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - l_[i] * b[i];
      } else {
        b[i + 1] -= l_[i] * b[i];
      }
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      double v = b[ii];
      if (ii + 1 < n_) v -= du_[ii] * b[ii + 1];
      if (ii + 2 < n_) v -= du2_[ii] * b[ii + 2];
      b[ii] = v / d_[ii];
    }
  }

 private:
  std::size_t n_;
  std::vector<double> d_, du_, dl_, du2_, l_;
  std::vector<bool> swapped_;
  double tiny_ = 0.0;
};

inline void apply(const TridiagonalOperator& op, std::span<const double> x, std::span<double> y) {
  const std::size_t n = op.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = op.diag[i] * x[i];
    if (i > 0) v += op.offdiag[i - 1] * x[i - 1];
    if (i + 1 < n) v += op.offdiag[i] * x[i + 1];
    y[i] = v;
  }
}

inline double euclid_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// Inverse iteration with shift `approx`. The returned value is the Rayleigh
/// quotient; the vector's largest-magnitude entry is positive. Throws
/// NonConvergence if the residual target 1e-8 * (|lambda| + 2/h^2) is not met
/// within 50 iterations.
inline EigenPair eigenpair(const TridiagonalOperator& op, double approx,
                           std::span<const double> start = {}) {
  const std::size_t n = op.size();
  if (n == 0) throw ConfigError("empty operator");
  std::vector<double> x(n);
  if (start.size() == n) {
    std::copy(start.begin(), start.end(), x.begin());
  } else {
    // Fixed pseudo-random start: never orthogonal to a parity eigenvector.
    CounterStream stream(0x5eed5eedULL, n);
    for (double& v : x) v = stream.uniform() - 0.5;
  }
  const detail::TridiagonalLu lu(op.diag, op.offdiag, approx);
  const double h = op.spacing;
  std::vector<double> hx(n);
  EigenPair pair;
  for (int iter = 1; iter <= 50; ++iter) {
    double norm = detail::euclid_norm(x);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalFault("inverse iteration breakdown");
    for (double& v : x) v /= norm;
    lu.solve(x);
    norm = detail::euclid_norm(x);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalFault("inverse iteration breakdown");
    for (double& v : x) v /= norm;

    detail::apply(op, x, hx);
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i) rayleigh += x[i] * hx[i];
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) res2 += (hx[i] - rayleigh * x[i]) * (hx[i] - rayleigh * x[i]);
    // Unit Euclidean norm equals unit L^2(grid) norm after rescaling by
    // 1/sqrt(h), and the residual ratio is scale free.
    const double residual = std::sqrt(res2);
    if (residual <= 1e-8 * (std::abs(rayleigh) + op.scale())) {
      pair.value = rayleigh;
      pair.residual = residual;
      pair.iterations = iter;
      const auto peak = std::max_element(x.begin(), x.end(),
                                         [](double a, double b) { return std::abs(a) < std::abs(b); });
      const double sign = *peak < 0.0 ? -1.0 : 1.0;
      const double to_grid = sign / std::sqrt(h);
      for (double& v : x) v *= to_grid;
      pair.vector = std::move(x);
      return pair;
    }
  }
  throw NonConvergence("inverse iteration did not converge in 50 iterations near " +
                       std::to_string(approx));
}

/// Full spectrum (and optionally eigenvectors as columns, unit Euclidean norm)
/// from a standard symmetric tridiagonal QL solve. Guarded to n <= 4096.
struct DenseSpectrum {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
};

inline constexpr std::size_t kDenseLimit = 4096;

inline DenseSpectrum dense_spectrum(const TridiagonalOperator& op, bool with_vectors = false) {
  const std::size_t n = op.size();
  if (n == 0) throw ConfigError("empty operator");
  if (n > kDenseLimit)
    throw CapacityError("dense spectrum limited to n <= 4096 (got " + std::to_string(n) + ")");
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(op.diag.data(), static_cast<Eigen::Index>(n));
  Eigen::VectorXd e(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t i = 0; i + 1 < n; ++i) e[static_cast<Eigen::Index>(i)] = op.offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalFault("dense tridiagonal eigensolve failed");
  DenseSpectrum out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

}  // namespace wegnerlab

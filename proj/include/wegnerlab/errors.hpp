#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wegnerlab {

/// Invalid model, grid or run configuration. `field()` names the offending
/// configuration entry when one is known (dotted path, e.g. "model.site").
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, std::string field = {})
      : std::invalid_argument(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numerical routine could not deliver its contract (overflow, breakdown).
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inverse iteration did not reach the residual target; usually a sign of a
/// near-degenerate eigenvalue.
class NonConvergence : public NumericalFault {
 public:
  using NumericalFault::NumericalFault;
};

/// A request exceeded a size guard (dense solve too large, too many
/// eigenvalues in a window).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A per-realization statistic threw; carries the failing realization.
class EnsembleFailure : public std::runtime_error {
 public:
  EnsembleFailure(const std::string& what, std::uint64_t master_seed,
                  std::size_t realization)
      : std::runtime_error(what),
        master_seed_(master_seed),
        realization_(realization) {}

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::size_t realization() const noexcept { return realization_; }

 private:
  std::uint64_t master_seed_;
  std::size_t realization_;
};

}  // namespace wegnerlab

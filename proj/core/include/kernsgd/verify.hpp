#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kernsgd/rng.hpp"
#include "kernsgd/theory.hpp"

namespace kernsgd {

enum class VerifyLevel { kQuick, kFull };

struct VerifyItem {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool all_pass() const;
};

/// Cross-module invariant batteries. Failures are recorded, never thrown.
VerifyReport run_verify(VerifyLevel level, unsigned threads = 1);

/// Fixed-width pass/fail table, one line per check.
void print_verify_table(std::ostream& os, const VerifyReport& report);

/// A random diagonal model for bound batteries: dimension in [1, max_dim],
/// lambda log-uniform on [1e-6, 1] then sorted, theta standard normal,
/// sigma drawn from {0, 0.5, 1}.
DiagonalModel random_diagonal_model(Rng& rng, std::size_t max_dim = 200);

struct BoundCase {
  DiagonalModel model;
  double s = 1.0;
  std::size_t n = 0;
  double kappa2 = 1.0;   // >= trace of the model
  double eta0_dec = 0.0; // admissible for the decaying bound
  double eta0_avg = 0.0; // admissible for the averaged bounds
};

BoundCase random_bound_case(Rng& rng, std::size_t max_dim = 200);

struct BoundCheck {
  std::size_t violations = 0;
  std::string first_violation;
};

/// Runs every dominance relation on one case and counts violations.
BoundCheck check_bound_case(const BoundCase& c);

}  // namespace kernsgd

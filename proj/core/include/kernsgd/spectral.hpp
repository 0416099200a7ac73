#pragma once

#include <cstddef>
#include <vector>

#include "kernsgd/kernels.hpp"

namespace kernsgd {

struct DegreeEigenvalue {
  int degree = 0;
  double mu = 0.0;            // Mercer eigenvalue mu_k (after clamping)
  double multiplicity = 0.0;  // N(d, k)
};

/// Mercer spectrum of a dot-product kernel on S^d.
class SpectralProfile {
 public:
  SpectralProfile() = default;

  /// Profile made directly from a flattened nonincreasing sequence, with no
  /// degree structure (d = 0). Throws InvalidArgument if the sequence
  /// increases anywhere or contains negative values.
  static SpectralProfile from_flat(std::vector<double> lambdas);

  int d() const { return d_; }
  const std::vector<DegreeEigenvalue>& mu() const { return mu_; }
  const std::vector<double>& lambda_flat() const { return lambda_flat_; }

  /// mu_k for a computed degree; throws InvalidArgument if k is out of range.
  double mu_at(int k) const;

  /// sum_k mu_k N(d, k) over the computed degrees.
  double kernel_trace() const { return kernel_trace_; }
  /// Phi(1), the full trace by the Mercer identity.
  double phi_at_one() const { return phi_at_one_; }
  /// kernel_trace / Phi(1).
  double captured_fraction() const { return phi_at_one_ > 0 ? kernel_trace_ / phi_at_one_ : 1.0; }
  /// True when the degree cutoff captures less than 99.9% of the trace.
  bool tail_flag() const { return captured_fraction() < 0.999; }
  /// True when lambda_flat stops before listing every computed eigenvalue.
  bool flat_truncated() const { return flat_truncated_; }
  /// Largest |negative quadrature value| that was clamped to zero.
  double max_clamp() const { return max_clamp_; }

  /// Largest eigenvalue lambda_1 (0 for an empty profile).
  double top_eigenvalue() const { return lambda_flat_.empty() ? 0.0 : lambda_flat_.front(); }

 private:
  friend SpectralProfile compute_spectrum(const KernelSpec&, int, int, int, std::size_t);
  friend SpectralProfile tampered_profile_for_testing(SpectralProfile, std::vector<double>);

  int d_ = 0;
  std::vector<DegreeEigenvalue> mu_;
  std::vector<double> lambda_flat_;
  double kernel_trace_ = 0.0;
  double phi_at_one_ = 0.0;
  double max_clamp_ = 0.0;
  bool flat_truncated_ = false;
};

/// Maximum number of flattened eigenvalues stored when flat_length = 0.
inline constexpr std::size_t kDefaultFlatCap = 2'000'000;

/// mu_k = (1/Z_d) int_{-1}^{1} Phi(t) P_{k,d}(t) (1 - t^2)^{(d-2)/2} dt for
/// k = 0..max_degree, by Gauss-Legendre quadrature in the polar angle
/// (t = cos theta, weight sin^{d-1} theta). lambda_flat lists each mu_k
/// N(d, k) times in nonincreasing order, truncated to flat_length entries
/// (0 means all of them, up to kDefaultFlatCap).
///
/// Throws InvalidArgument for d < 2, max_degree < 0 or
/// quad_nodes < 2 (max_degree + d); NumericalFailure if the trace exceeds
/// Phi(1) by more than 5% or an eigenvalue is negative beyond the noise floor.
SpectralProfile compute_spectrum(const KernelSpec& spec, int d, int max_degree, int quad_nodes,
                                 std::size_t flat_length = 0);

/// k* = max{k : lambda_k >= 1 / (eta0 n)} (1-based count), 0 if none.
std::size_t effective_dimension(const SpectralProfile& profile, double eta0, std::size_t n);
std::size_t effective_dimension(const std::vector<double>& lambdas, double eta0, std::size_t n);

struct TailSum {
  double value = 0.0;  // sum_{i > k*} lambda_i^2 over the stored sequence
  /// Upper estimate of the squared mass not stored in lambda_flat:
  /// lambda_last * (Phi(1) - sum of stored lambda_i). Zero when complete.
  double unstored_bound = 0.0;
  /// Set when the degree cutoff captures < 99.9% of the trace, so the
  /// stored sum can miss mass from degrees above the cutoff.
  bool tail_flag = false;
};

/// sum_{i > k_star} lambda_i^2; k_star must lie in [0, |lambda_flat|].
TailSum tail_sum_squared(const SpectralProfile& profile, std::size_t k_star);

/// Flattening invariant: lambda_flat nonincreasing and, when not truncated,
/// equal as a multiset to {mu_k repeated N(d, k) times}.
bool check_flattening(const SpectralProfile& profile);

/// Replaces lambda_flat without re-validation; used by the mutation tests
/// of the verify suite.
SpectralProfile tampered_profile_for_testing(SpectralProfile profile, std::vector<double> lambda_flat);

/// Ordinary least-squares slope of log(lambda_j) against log(j) over
/// 1-based indices j in [first, last], skipping zero entries.
double eigendecay_slope(const std::vector<double>& lambdas, std::size_t first, std::size_t last);

}  // namespace kernsgd

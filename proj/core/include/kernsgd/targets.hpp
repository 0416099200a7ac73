#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kernsgd/kernels.hpp"
#include "kernsgd/spectral.hpp"
#include "kernsgd/sphere.hpp"

namespace kernsgd {

/// Which degree-k zonal polynomial a harmonic target uses.
///  kSphereD:      P_{k,d}, orthogonal under the uniform measure on S^d
///                 (P_2(t) = ((d+1) t^2 - 1) / d).
///  kPaperFormula: the S^{d-1} polynomial P_{k,d-1}
///                 (P_2(t) = (d t^2 - 1) / (d - 1)), kept for literal
///                 reproduction of the published simulation formula.
enum class PolyConvention { kSphereD, kPaperFormula };

std::string to_string(PolyConvention c);
PolyConvention poly_convention_from_string(const std::string& s);

struct KernelCombination {
  KernelSpec kernel;
  std::vector<SpherePoint> anchors;
  std::vector<double> weights;
};

struct HarmonicMode {
  int degree = 0;
  SpherePoint direction;
  double scale = 1.0;
  PolyConvention convention = PolyConvention::kSphereD;
};

/// Ground-truth regression function f* plus Gaussian label noise level.
class TargetSpec {
 public:
  using Variant = std::variant<KernelCombination, HarmonicMode>;

  TargetSpec(Variant v, double noise_sigma);

  const Variant& variant() const { return variant_; }
  double noise_sigma() const { return noise_sigma_; }
  /// Ambient dimension d+1 of the points the target accepts.
  std::size_t ambient_dim() const { return ambient_dim_; }

  /// f*(x); throws InvalidArgument on dimension mismatch.
  double operator()(const SpherePoint& x) const;

  /// For kernel combinations: sum_{i,j} w_i w_j K(u_i, u_j), the squared
  /// RKHS norm. 0 for harmonic targets (not reported).
  double rkhs_norm2() const;

  /// Key/value metadata describing the target, for run output headers.
  std::vector<std::pair<std::string, std::string>> metadata() const;

 private:
  Variant variant_;
  double noise_sigma_;
  std::size_t ambient_dim_;
};

/// f* = sum_i K(., u_i) with num_anchors uniform anchors and unit weights.
TargetSpec make_kernel_target(const KernelSpec& kernel, int d, std::size_t num_anchors, std::uint64_t seed,
                              double noise_sigma = 1.0);

/// f*(x) = mu_k^{s/2} N(d,k)^{-1/2} P_k(<u, x>) with u uniform on S^d and
/// mu_k taken from the profile. Throws InvalidArgument if mu_k = 0 or the
/// profile has no degree k.
TargetSpec make_source_target(const SpectralProfile& profile, double s, int degree, std::uint64_t seed,
                              PolyConvention convention = PolyConvention::kSphereD, double noise_sigma = 1.0);

/// y_i = f*(x_i) + eps_i, eps_i ~ N(0, sigma^2) i.i.d., deterministic per seed.
std::vector<double> generate_labels(const TargetSpec& target, std::span<const SpherePoint> points,
                                    std::uint64_t seed);

double target_eval(const TargetSpec& target, const SpherePoint& x);

}  // namespace kernsgd

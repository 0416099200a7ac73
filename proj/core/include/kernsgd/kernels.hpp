#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kernsgd/sphere.hpp"

namespace kernsgd {

/// Inputs within this distance outside [-1, 1] are clamped; farther is an error.
inline constexpr double kDotClampTolerance = 1e-12;

/// Clamps t to [-1, 1] if within kDotClampTolerance, else throws InvalidArgument.
double clamp_unit(double t);

/// Arc-cosine map of order 0: (pi - arccos t) / pi.
double arc_kappa0(double t);
/// Arc-cosine map of order 1: (t (pi - arccos t) + sqrt(1 - t^2)) / pi.
double arc_kappa1(double t);

struct NtkKernel {
  int depth = 1;
};

struct PowerSeriesKernel {
  std::vector<double> coeffs;  // Phi(t) = sum_j coeffs[j] t^j
};

/// A dot-product kernel K(x, y) = Phi(<x, y>). Immutable; Phi(1) is cached.
class KernelSpec {
 public:
  using Variant = std::variant<NtkKernel, PowerSeriesKernel>;

  static KernelSpec ntk(int depth);
  static KernelSpec power_series(std::vector<double> coeffs);
  /// Phi(t) = t.
  static KernelSpec linear();

  const Variant& variant() const { return variant_; }
  bool is_ntk() const { return std::holds_alternative<NtkKernel>(variant_); }

  /// Phi(t). Validates |t| <= 1 (with clamping tolerance).
  double operator()(double t) const;

  /// kappa^2 = Phi(1) = sup_x K(x, x).
  double bound() const { return bound_; }

  /// Human-readable form, e.g. "ntk(L=2)" or "power_series[1,0.5]".
  std::string describe() const;

  /// Warnings for the positivity requirement a_j > 0 for j <= floor(gamma)+3
  /// on power-series kernels. Empty for NTK kernels.
  std::vector<std::string> coefficient_warnings(double gamma) const;

  friend bool operator==(const KernelSpec& a, const KernelSpec& b);

 private:
  explicit KernelSpec(Variant v);
  double eval_unchecked(double t) const;

  Variant variant_;
  double bound_ = 0.0;
};

double kernel_eval(const KernelSpec& spec, double t);

/// K(x_j, x) for each support point.
std::vector<double> gram_row(const KernelSpec& spec, std::span<const SpherePoint> support, const SpherePoint& x);

}  // namespace kernsgd

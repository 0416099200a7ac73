#include "kernsgd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kernsgd/errors.hpp"

namespace kernsgd {

double clamp_unit(double t) {
  if (!(std::abs(t) <= 1.0 + kDotClampTolerance)) {
    std::ostringstream os;
    os << "argument " << t << " outside [-1, 1]";
    throw InvalidArgument(os.str());
  }
  // Self inner products of unit vectors land a few ulp short of 1, which
  // acos turns into an O(1e-8) error in K(x, x).
  constexpr double kSnap = 64 * std::numeric_limits<double>::epsilon();
  if (t >= 1.0 - kSnap) return 1.0;
  if (t <= -1.0 + kSnap) return -1.0;
  return t;
}

double arc_kappa0(double t) {
  t = clamp_unit(t);
  return (std::numbers::pi - std::acos(t)) / std::numbers::pi;
}

double arc_kappa1(double t) {
  t = clamp_unit(t);
  return (t * (std::numbers::pi - std::acos(t)) + std::sqrt(std::max(0.0, 1.0 - t * t))) / std::numbers::pi;
}

KernelSpec::KernelSpec(Variant v) : variant_(std::move(v)) {
  bound_ = eval_unchecked(1.0);
  if (!(bound_ > 0.0) || !std::isfinite(bound_)) throw InvalidArgument("KernelSpec: Phi(1) must be finite and > 0");
}

KernelSpec KernelSpec::ntk(int depth) {
  if (depth < 1) throw InvalidArgument("KernelSpec::ntk: depth must be >= 1");
  return KernelSpec(NtkKernel{depth});
}

KernelSpec KernelSpec::power_series(std::vector<double> coeffs) {
  if (coeffs.empty()) throw InvalidArgument("KernelSpec::power_series: no coefficients");
  for (double a : coeffs) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("KernelSpec::power_series: coefficients must be finite and >= 0");
  }
  return KernelSpec(PowerSeriesKernel{std::move(coeffs)});
}

KernelSpec KernelSpec::linear() { return power_series({0.0, 1.0}); }

double KernelSpec::eval_unchecked(double t) const {
  if (const auto* ntk = std::get_if<NtkKernel>(&variant_)) {
    double layer = t;
    double value = t;
    for (int l = 2; l <= ntk->depth; ++l) {
      const double next = arc_kappa1(layer);
      value = value * arc_kappa0(layer) + next;
      layer = next;
    }
    return value;
  }
  const auto& c = std::get<PowerSeriesKernel>(variant_).coeffs;
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double KernelSpec::operator()(double t) const { return eval_unchecked(clamp_unit(t)); }

std::string KernelSpec::describe() const {
  std::ostringstream os;
  if (const auto* ntk = std::get_if<NtkKernel>(&variant_)) {
    os << "ntk(L=" << ntk->depth << ")";
  } else {
    const auto& c = std::get<PowerSeriesKernel>(variant_).coeffs;
    os << "power_series[";
    for (std::size_t j = 0; j < c.size(); ++j) os << (j ? "," : "") << c[j];
    os << "]";
  }
  return os.str();
}

std::vector<std::string> KernelSpec::coefficient_warnings(double gamma) const {
  std::vector<std::string> out;
  const auto* ps = std::get_if<PowerSeriesKernel>(&variant_);
  if (!ps) return out;
  const int needed = static_cast<int>(std::floor(gamma)) + 3;
  for (int j = 0; j <= needed; ++j) {
    const double a = j < static_cast<int>(ps->coeffs.size()) ? ps->coeffs[static_cast<std::size_t>(j)] : 0.0;
    if (!(a > 0.0)) {
      out.push_back("coefficient a_" + std::to_string(j) + " is zero; positivity is expected for j <= " +
                    std::to_string(needed));
    }
  }
  return out;
}

bool operator==(const KernelSpec& a, const KernelSpec& b) {
  if (a.variant_.index() != b.variant_.index()) return false;
  if (const auto* x = std::get_if<NtkKernel>(&a.variant_)) return x->depth == std::get<NtkKernel>(b.variant_).depth;
  return std::get<PowerSeriesKernel>(a.variant_).coeffs == std::get<PowerSeriesKernel>(b.variant_).coeffs;
}

double kernel_eval(const KernelSpec& spec, double t) { return spec(t); }

std::vector<double> gram_row(const KernelSpec& spec, std::span<const SpherePoint> support, const SpherePoint& x) {
  std::vector<double> row;
  row.reserve(support.size());
  for (const auto& xj : support) row.push_back(spec(dot(xj, x)));
  return row;
}

}  // namespace kernsgd

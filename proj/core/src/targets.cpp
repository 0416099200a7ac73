#include "kernsgd/targets.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "kernsgd/errors.hpp"

namespace kernsgd {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt_point(const SpherePoint& p) {
  std::ostringstream os;
  os << std::setprecision(17) << "[";
  for (std::size_t i = 0; i < p.ambient_dim(); ++i) os << (i ? " " : "") << p[i];
  os << "]";
  return os.str();
}

}  // namespace

std::string to_string(PolyConvention c) { return c == PolyConvention::kSphereD ? "sphere-d" : "paper-formula"; }

PolyConvention poly_convention_from_string(const std::string& s) {
  if (s == "sphere-d") return PolyConvention::kSphereD;
  if (s == "paper-formula") return PolyConvention::kPaperFormula;
  throw InvalidArgument("unknown polynomial convention '" + s + "' (expected sphere-d or paper-formula)");
}

TargetSpec::TargetSpec(Variant v, double noise_sigma) : variant_(std::move(v)), noise_sigma_(noise_sigma) {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("TargetSpec: noise_sigma must be >= 0");
  if (const auto* kc = std::get_if<KernelCombination>(&variant_)) {
    if (kc->anchors.empty()) throw InvalidArgument("TargetSpec: kernel combination needs at least one anchor");
    if (kc->anchors.size() != kc->weights.size()) throw InvalidArgument("TargetSpec: anchors/weights size mismatch");
    ambient_dim_ = kc->anchors.front().ambient_dim();
    for (const auto& a : kc->anchors) {
      if (a.ambient_dim() != ambient_dim_) throw InvalidArgument("TargetSpec: anchors differ in dimension");
    }
  } else {
    const auto& hm = std::get<HarmonicMode>(variant_);
    if (hm.degree < 0) throw InvalidArgument("TargetSpec: harmonic degree must be >= 0");
    if (!std::isfinite(hm.scale)) throw InvalidArgument("TargetSpec: harmonic scale must be finite");
    ambient_dim_ = hm.direction.ambient_dim();
    if (hm.convention == PolyConvention::kPaperFormula && hm.direction.sphere_dim() < 2) {
      throw InvalidArgument("TargetSpec: paper-formula convention needs d >= 2");
    }
  }
}

double TargetSpec::operator()(const SpherePoint& x) const {
  if (x.ambient_dim() != ambient_dim_) throw InvalidArgument("target_eval: dimension mismatch");
  if (const auto* kc = std::get_if<KernelCombination>(&variant_)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kc->anchors.size(); ++i) {
      if (kc->weights[i] != 0.0) acc += kc->weights[i] * kc->kernel(dot(kc->anchors[i], x));
    }
    return acc;
  }
  const auto& hm = std::get<HarmonicMode>(variant_);
  const int d = hm.direction.sphere_dim();
  const int dim = hm.convention == PolyConvention::kSphereD ? d : d - 1;
  return hm.scale * zonal_polynomial(dim, hm.degree, clamp_unit(dot(hm.direction, x)));
}

double TargetSpec::rkhs_norm2() const {
  const auto* kc = std::get_if<KernelCombination>(&variant_);
  if (!kc) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < kc->anchors.size(); ++i) {
    for (std::size_t j = 0; j < kc->anchors.size(); ++j) {
      acc += kc->weights[i] * kc->weights[j] * kc->kernel(dot(kc->anchors[i], kc->anchors[j]));
    }
  }
  return acc;
}

std::vector<std::pair<std::string, std::string>> TargetSpec::metadata() const {
  std::vector<std::pair<std::string, std::string>> out;
  if (const auto* kc = std::get_if<KernelCombination>(&variant_)) {
    out.emplace_back("target", "kernel_combination");
    out.emplace_back("target_kernel", kc->kernel.describe());
    out.emplace_back("target_anchors", std::to_string(kc->anchors.size()));
    for (std::size_t i = 0; i < kc->anchors.size(); ++i) {
      out.emplace_back("target_anchor_" + std::to_string(i), fmt_point(kc->anchors[i]));
    }
    out.emplace_back("target_rkhs_norm2", fmt(rkhs_norm2()));
  } else {
    const auto& hm = std::get<HarmonicMode>(variant_);
    out.emplace_back("target", "harmonic_mode");
    out.emplace_back("target_degree", std::to_string(hm.degree));
    out.emplace_back("target_scale", fmt(hm.scale));
    out.emplace_back("target_convention", to_string(hm.convention));
    out.emplace_back("target_direction", fmt_point(hm.direction));
  }
  out.emplace_back("noise_sigma", fmt(noise_sigma_));
  return out;
}

TargetSpec make_kernel_target(const KernelSpec& kernel, int d, std::size_t num_anchors, std::uint64_t seed,
                              double noise_sigma) {
  if (num_anchors == 0) throw InvalidArgument("make_kernel_target: need at least one anchor");
  KernelCombination kc{kernel, sample_uniform_sphere(d, num_anchors, seed), std::vector<double>(num_anchors, 1.0)};
  return TargetSpec(std::move(kc), noise_sigma);
}

TargetSpec make_source_target(const SpectralProfile& profile, double s, int degree, std::uint64_t seed,
                              PolyConvention convention, double noise_sigma) {
  if (!(s > 0.0)) throw InvalidArgument("make_source_target: s must be > 0");
  if (profile.d() < 2) throw InvalidArgument("make_source_target: profile has no sphere dimension");
  const double mu = profile.mu_at(degree);
  if (!(mu > 0.0)) {
    throw InvalidArgument("make_source_target: mu_" + std::to_string(degree) + " = 0, target would be null");
  }
  const double scale = std::pow(mu, 0.5 * s) / std::sqrt(harmonic_multiplicity_real(profile.d(), degree));
  Rng rng = make_rng(seed);
  HarmonicMode hm{degree, sample_sphere_point(profile.d(), rng), scale, convention};
  return TargetSpec(std::move(hm), noise_sigma);
}

std::vector<double> generate_labels(const TargetSpec& target, std::span<const SpherePoint> points,
                                    std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> y;
  y.reserve(points.size());
  for (const auto& x : points) {
    const double eps = noise(rng);
    y.push_back(target(x) + target.noise_sigma() * eps);
  }
  return y;
}

double target_eval(const TargetSpec& target, const SpherePoint& x) { return target(x); }

}  // namespace kernsgd

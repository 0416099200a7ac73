#include "kernsgd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "kernsgd/errors.hpp"
#include "kernsgd/quadrature.hpp"

namespace kernsgd {

double SpectralProfile::mu_at(int k) const {
  for (const auto& e : mu_) {
    if (e.degree == k) return e.mu;
  }
  throw InvalidArgument("SpectralProfile::mu_at: degree " + std::to_string(k) + " not computed");
}

SpectralProfile SpectralProfile::from_flat(std::vector<double> lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0)) throw InvalidArgument("from_flat: eigenvalues must be >= 0");
    if (i > 0 && lambdas[i] > lambdas[i - 1]) throw InvalidArgument("from_flat: sequence must be nonincreasing");
  }
  SpectralProfile p;
  p.kernel_trace_ = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  p.phi_at_one_ = p.kernel_trace_;
  p.lambda_flat_ = std::move(lambdas);
  return p;
}

SpectralProfile compute_spectrum(const KernelSpec& spec, int d, int max_degree, int quad_nodes,
                                 std::size_t flat_length) {
  if (d < 2) throw InvalidArgument("compute_spectrum: d must be >= 2");
  if (max_degree < 0) throw InvalidArgument("compute_spectrum: max_degree must be >= 0");
  if (quad_nodes < 2 * (max_degree + d)) {
    throw InvalidArgument("compute_spectrum: quad_nodes must be >= 2 (max_degree + d)");
  }

  const auto rule = gauss_legendre(quad_nodes, 0.0, std::numbers::pi);
  const std::size_t K = static_cast<std::size_t>(max_degree);
  std::vector<double> sums(K + 1, 0.0);
  std::vector<double> poly(K + 1);
  double z = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double theta = rule.nodes[q];
    const double t = std::cos(theta);
    const double w = rule.weights[q] * std::pow(std::sin(theta), d - 1);
    if (w == 0.0) continue;
    z += w;
    const double phi = spec(t);
    zonal_polynomials(d, t, poly);
    for (std::size_t k = 0; k <= K; ++k) sums[k] += w * phi * poly[k];
  }

  SpectralProfile p;
  p.d_ = d;
  p.phi_at_one_ = spec.bound();
  const double floor_tol = 1e-10 * p.phi_at_one_;
  for (std::size_t k = 0; k <= K; ++k) {
    double mu = sums[k] / z;
    if (mu < 0.0) {
      if (-mu > floor_tol) {
        std::ostringstream os;
        os << "compute_spectrum: mu_" << k << " = " << mu << " is below the quadrature noise floor "
           << -floor_tol << " (d=" << d << ", nodes=" << quad_nodes << ")";
        throw NumericalFailure(os.str());
      }
      p.max_clamp_ = std::max(p.max_clamp_, -mu);
      mu = 0.0;
    }
    const double mult = harmonic_multiplicity_real(d, static_cast<int>(k));
    p.mu_.push_back({static_cast<int>(k), mu, mult});
    p.kernel_trace_ += mu * mult;
  }
  if (p.kernel_trace_ > 1.05 * p.phi_at_one_) {
    std::ostringstream os;
    os << "compute_spectrum: trace " << p.kernel_trace_ << " exceeds Phi(1) = " << p.phi_at_one_
       << " by more than 5% (d=" << d << ", K=" << max_degree << ", nodes=" << quad_nodes
       << "); increase quad_nodes";
    throw NumericalFailure(os.str());
  }

  double total = 0.0;
  for (const auto& e : p.mu_) total += e.multiplicity;
  const std::size_t cap = flat_length == 0 ? kDefaultFlatCap : flat_length;
  std::vector<DegreeEigenvalue> order = p.mu_;
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.mu > b.mu; });
  for (const auto& e : order) {
    if (p.lambda_flat_.size() >= cap) break;
    const double room = static_cast<double>(cap - p.lambda_flat_.size());
    const auto count = static_cast<std::size_t>(std::min(e.multiplicity, room));
    p.lambda_flat_.insert(p.lambda_flat_.end(), count, e.mu);
  }
  p.flat_truncated_ = static_cast<double>(p.lambda_flat_.size()) < total;
  return p;
}

std::size_t effective_dimension(const std::vector<double>& lambdas, double eta0, std::size_t n) {
  const double threshold = 1.0 / (eta0 * static_cast<double>(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] >= threshold) k = i + 1;
  }
  return k;
}

std::size_t effective_dimension(const SpectralProfile& profile, double eta0, std::size_t n) {
  return effective_dimension(profile.lambda_flat(), eta0, n);
}

TailSum tail_sum_squared(const SpectralProfile& profile, std::size_t k_star) {
  const auto& lam = profile.lambda_flat();
  if (k_star > lam.size()) throw InvalidArgument("tail_sum_squared: k_star beyond stored sequence");
  TailSum out;
  // Smallest terms first for accuracy.
  for (std::size_t i = lam.size(); i > k_star; --i) out.value += lam[i - 1] * lam[i - 1];
  if (profile.flat_truncated() || profile.tail_flag()) {
    const double stored = std::accumulate(lam.begin(), lam.end(), 0.0);
    const double last = lam.empty() ? 0.0 : lam.back();
    out.unstored_bound = last * std::max(0.0, profile.phi_at_one() - stored);
  }
  out.tail_flag = profile.tail_flag();
  return out;
}

bool check_flattening(const SpectralProfile& profile) {
  const auto& lam = profile.lambda_flat();
  for (std::size_t i = 1; i < lam.size(); ++i) {
    if (lam[i] > lam[i - 1]) return false;
  }
  if (profile.flat_truncated() || profile.mu().empty()) return true;
  std::vector<double> expected;
  for (const auto& e : profile.mu()) expected.insert(expected.end(), static_cast<std::size_t>(e.multiplicity), e.mu);
  std::vector<double> got = lam;
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  return expected == got;
}

SpectralProfile tampered_profile_for_testing(SpectralProfile profile, std::vector<double> lambda_flat) {
  profile.lambda_flat_ = std::move(lambda_flat);
  return profile;
}

double eigendecay_slope(const std::vector<double>& lambdas, std::size_t first, std::size_t last) {
  if (first < 1 || last > lambdas.size() || first >= last) throw InvalidArgument("eigendecay_slope: bad index range");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double m = 0;
  for (std::size_t j = first; j <= last; ++j) {
    const double v = lambdas[j - 1];
    if (!(v > 0.0)) continue;
    const double x = std::log(static_cast<double>(j));
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1;
  }
  if (m < 2) throw InvalidArgument("eigendecay_slope: fewer than two positive eigenvalues in range");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace kernsgd

#include "kernsgd/sphere.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "kernsgd/errors.hpp"

namespace kernsgd {
namespace {

using BigInt = boost::multiprecision::cpp_int;

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// (2k + d - 1)/k * (k + d - 2)! / ((d - 1)! (k - 1)!), k >= 1.
BigInt multiplicity_big(int d, int k) {
  if (d < 2) throw InvalidArgument("harmonic_multiplicity: d must be >= 2, got " + std::to_string(d));
  if (k < 0) throw InvalidArgument("harmonic_multiplicity: k must be >= 0");
  if (k == 0) return 1;
  // C(k + d - 2, k - 1) built incrementally; each partial product is an
  // exact binomial coefficient so the division never truncates.
  BigInt binom = 1;
  for (int i = 1; i <= k - 1; ++i) {
    binom *= (d - 1 + i);
    binom /= i;
  }
  BigInt numerator = binom * (2 * k + d - 1);
  return numerator / k;
}

}  // namespace

SpherePoint::SpherePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw InvalidArgument("SpherePoint: need at least 2 coordinates");
  const double norm = norm_of(coords_);
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw InvalidArgument("SpherePoint: coordinates are not unit norm (|x| = " + std::to_string(norm) + ")");
  }
}

SpherePoint SpherePoint::normalized(std::vector<double> coords) {
  if (coords.size() < 2) throw InvalidArgument("SpherePoint: need at least 2 coordinates");
  const double norm = norm_of(coords);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("SpherePoint: cannot normalize zero vector");
  for (double& x : coords) x /= norm;
  return SpherePoint(std::move(coords), Unchecked{});
}

SpherePoint SpherePoint::axis(std::size_t ambient_dim, std::size_t axis) {
  if (axis >= ambient_dim) throw InvalidArgument("SpherePoint::axis: index out of range");
  std::vector<double> c(ambient_dim, 0.0);
  c[axis] = 1.0;
  return SpherePoint(std::move(c));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: ambient dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const SpherePoint& a, const SpherePoint& b) { return dot(a.coords(), b.coords()); }

SpherePoint sample_sphere_point(int d, Rng& rng) {
  if (d < 1) throw InvalidArgument("sample_sphere_point: d must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(d) + 1);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : c) {
      x = gauss(rng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  return SpherePoint::normalized(std::move(c));
}

std::vector<SpherePoint> sample_uniform_sphere(int d, std::size_t n, std::uint64_t seed) {
  if (d < 1) throw InvalidArgument("sample_uniform_sphere: d must be >= 1");
  if (n == 0) throw InvalidArgument("sample_uniform_sphere: n must be >= 1");
  Rng rng = make_rng(seed);
  std::vector<SpherePoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(sample_sphere_point(d, rng));
  return points;
}

double zonal_polynomial(int dim, int k, double t) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int j = 2; j <= k; ++j) {
    const double next = ((2.0 * j + dim - 3) * t * cur - (j - 1.0) * prev) / (j + dim - 2.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void zonal_polynomials(int dim, double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = t;
  for (std::size_t j = 2; j < out.size(); ++j) {
    const double jj = static_cast<double>(j);
    out[j] = ((2.0 * jj + dim - 3) * t * out[j - 1] - (jj - 1.0) * out[j - 2]) / (jj + dim - 2.0);
  }
}

UltrasphericalBasis::UltrasphericalBasis(int d, int max_degree) : d_(d), max_degree_(max_degree) {
  if (d < 2) throw InvalidArgument("UltrasphericalBasis: d must be >= 2");
  if (max_degree < 0) throw InvalidArgument("UltrasphericalBasis: max_degree must be >= 0");
}

double UltrasphericalBasis::eval(int k, double t) const {
  if (k < 0 || k > max_degree_) {
    throw InvalidArgument("gegenbauer_eval: degree " + std::to_string(k) + " outside [0, " +
                          std::to_string(max_degree_) + "]");
  }
  if (!(std::abs(t) <= 1.0)) throw InvalidArgument("gegenbauer_eval: |t| > 1");
  return zonal_polynomial(d_, k, t);
}

double gegenbauer_eval(const UltrasphericalBasis& basis, int k, double t) { return basis.eval(k, t); }

std::uint64_t harmonic_multiplicity(int d, int k) {
  const BigInt n = multiplicity_big(d, k);
  if (n > BigInt(std::numeric_limits<std::uint64_t>::max())) {
    throw OverflowError("harmonic_multiplicity: N(" + std::to_string(d) + ", " + std::to_string(k) +
                        ") exceeds 64-bit range");
  }
  return n.convert_to<std::uint64_t>();
}

double harmonic_multiplicity_real(int d, int k) { return multiplicity_big(d, k).convert_to<double>(); }

}  // namespace kernsgd

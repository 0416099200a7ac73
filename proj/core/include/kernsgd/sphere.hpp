#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kernsgd/rng.hpp"

namespace kernsgd {

/// A unit vector in R^{d+1}, i.e. a point on the sphere S^d.
class SpherePoint {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Takes coordinates that must already have unit norm (within
  /// kNormTolerance); throws InvalidArgument otherwise.
  explicit SpherePoint(std::vector<double> coords);

  /// Rescales a nonzero vector onto the sphere.
  static SpherePoint normalized(std::vector<double> coords);

  /// Standard basis vector e_{axis} of R^{ambient_dim}.
  static SpherePoint axis(std::size_t ambient_dim, std::size_t axis);

  std::size_t ambient_dim() const { return coords_.size(); }
  int sphere_dim() const { return static_cast<int>(coords_.size()) - 1; }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  struct Unchecked {};
  SpherePoint(std::vector<double> coords, Unchecked) : coords_(std::move(coords)) {}

  std::vector<double> coords_;
};

/// Inner product; throws InvalidArgument on ambient dimension mismatch.
double dot(const SpherePoint& a, const SpherePoint& b);
double dot(std::span<const double> a, std::span<const double> b);

/// Draws one uniform point on S^d (normalized standard Gaussian vector).
SpherePoint sample_sphere_point(int d, Rng& rng);

/// n i.i.d. uniform points on S^d, deterministic for a fixed seed.
std::vector<SpherePoint> sample_uniform_sphere(int d, std::size_t n, std::uint64_t seed);

/// Zonal polynomial of degree k for S^dim (ultraspherical parameter
/// (dim-1)/2), normalized so that P_k(1) = 1, via the three-term recurrence
///   (k + dim - 2) P_k = (2k + dim - 3) t P_{k-1} - (k - 1) P_{k-2}.
/// dim = 1 gives Chebyshev polynomials, dim = 2 Legendre polynomials.
/// No domain checks; see UltrasphericalBasis for the validated entry point.
double zonal_polynomial(int dim, int k, double t);

/// Fills out[0..K] with P_0(t) .. P_K(t) for S^dim.
void zonal_polynomials(int dim, double t, std::span<double> out);

/// Normalized ultraspherical polynomials P_{k,d}, k = 0..max_degree, for S^d.
class UltrasphericalBasis {
 public:
  UltrasphericalBasis(int d, int max_degree);

  int d() const { return d_; }
  int max_degree() const { return max_degree_; }
  double lambda() const { return 0.5 * (d_ - 1); }

  /// Throws InvalidArgument if k > max_degree or |t| > 1.
  double eval(int k, double t) const;

 private:
  int d_;
  int max_degree_;
};

double gegenbauer_eval(const UltrasphericalBasis& basis, int k, double t);

/// N(d, k): dimension of the degree-k spherical harmonics on S^d, computed
/// in exact integer arithmetic. Throws OverflowError if it exceeds uint64.
std::uint64_t harmonic_multiplicity(int d, int k);

/// Same quantity as a double; exact big-integer evaluation, rounded once.
double harmonic_multiplicity_real(int d, int k);

}  // namespace kernsgd

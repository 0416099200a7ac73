#include "kernsgd/parallel.hpp"

namespace kernsgd {

double pairwise_sum(const double* values, std::size_t count) {
  if (count <= 8) {
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += values[i];
    return acc;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

}  // namespace kernsgd

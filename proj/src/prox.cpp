#include "sasd/prox.hpp"

#include <cmath>
#include <string>

#include "sasd/errors.hpp"

namespace sasd {

void prox_l1_inplace(std::span<double> z, double rho, std::span<const double> weights,
                     bool nonnegative) {
  const bool weighted = !weights.empty();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double thr = weighted ? rho * weights[i] : rho;
    const double mag = std::abs(z[i]) - thr;
    double v = mag > 0.0 ? std::copysign(mag, z[i]) : 0.0;
    if (nonnegative && v < 0.0) v = 0.0;
    z[i] = v;
  }
}

Vec prox_l1(std::span<const double> z, double rho, std::span<const double> weights,
            bool nonnegative) {
  if (!(rho >= 0.0)) throw DomainError("prox_l1: negative threshold");
  if (!weights.empty()) {
    if (weights.size() != z.size()) throw DimensionError("prox_l1: weight length mismatch");
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] > 0.0)) {
        throw DomainError("prox_l1: weight " + std::to_string(i) + " is not positive");
      }
    }
  }
  Vec out(z.begin(), z.end());
  prox_l1_inplace(out, rho, weights, nonnegative);
  return out;
}

}  // namespace sasd

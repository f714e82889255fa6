#include "sasd/manifold.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sasd/errors.hpp"

namespace sasd {

namespace {

constexpr double kZeroStep = 1e-14;
constexpr double kAntipodalGap = 1e-9;

void require_same_size(std::span<const double> a, std::span<const double> b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": length " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
}

void require_unit(std::span<const double> a, const char* op) {
  const double n = norm2(a);
  if (!(std::abs(n - 1.0) <= kUnitNormTolerance)) {
    throw ContractError(std::string(op) + ": base point is off the sphere (norm - 1 = " + std::to_string(n - 1.0) + ")");
  }
}

template <typename Fn>
auto per_column(std::size_t count, Fn&& fn) {
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    try {
      out.push_back(fn(k));
    } catch (const SingularityError& e) {
      throw SingularityError("column " + std::to_string(k) + ": " + e.what());
    } catch (const ContractError& e) {
      throw ContractError("column " + std::to_string(k) + ": " + e.what());
    } catch (const DimensionError& e) {
      throw DimensionError("column " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

void require_columns(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("oblique: " + std::to_string(a) + " columns vs " + std::to_string(b));
  }
}

}  // namespace

Vec normalize(std::span<const double> v) {
  const double n = norm2(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("normalize: zero or non-finite vector");
  Vec out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

Vec tangent_project(std::span<const double> a, std::span<const double> z) {
  require_same_size(a, z, "tangent_project");
  require_unit(a, "tangent_project");
  Vec out(z.begin(), z.end());
  // Two passes: when z is nearly radial, one pass leaves a radial residue
  // comparable to the tangent part, which can flip a descent direction.
  for (int pass = 0; pass < 2; ++pass) {
    const double c = dot(a, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * a[i];
  }
  return out;
}

Vec retract_exp(std::span<const double> a, std::span<const double> delta) {
  require_same_size(a, delta, "retract_exp");
  const double theta = norm2(delta);
  Vec out(a.begin(), a.end());
  if (theta < kZeroStep) return out;
  const double c = std::cos(theta);
  const double s = std::sin(theta) / theta;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * c + delta[i] * s;
  return out;
}

Vec retract_exp_increment(std::span<const double> a, std::span<const double> delta) {
  require_same_size(a, delta, "retract_exp_increment");
  const double theta = norm2(delta);
  Vec out(a.size(), 0.0);
  if (theta < kZeroStep) return out;
  // cos θ - 1 = -2 sin²(θ/2)
  const double h = std::sin(0.5 * theta);
  const double cm1 = -2.0 * h * h;
  const double s = std::sin(theta) / theta;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * cm1 + delta[i] * s;
  return out;
}

Vec retract_inverse(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "retract_inverse");
  Vec perp = tangent_project(a, b);
  const double sin_part = norm2(perp);
  const double cos_part = dot(a, b);
  const double alpha = std::atan2(sin_part, cos_part);
  if (std::numbers::pi - alpha <= kAntipodalGap) {
    throw SingularityError("retract_inverse: points are antipodal");
  }
  if (sin_part == 0.0) return Vec(a.size(), 0.0);
  const double scale = alpha / sin_part;
  for (double& v : perp) v *= scale;
  return perp;
}

ObliquePoint oblique_tangent_project(const ObliquePoint& a, const std::vector<Vec>& z) {
  require_columns(a.size(), z.size());
  return per_column(a.size(), [&](std::size_t k) { return tangent_project(a[k], z[k]); });
}

ObliquePoint oblique_retract_exp(const ObliquePoint& a, const std::vector<Vec>& delta) {
  require_columns(a.size(), delta.size());
  return per_column(a.size(), [&](std::size_t k) { return retract_exp(a[k], delta[k]); });
}

std::vector<Vec> oblique_retract_inverse(const ObliquePoint& a, const ObliquePoint& b) {
  require_columns(a.size(), b.size());
  return per_column(a.size(), [&](std::size_t k) { return retract_inverse(a[k], b[k]); });
}

}  // namespace sasd

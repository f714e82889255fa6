#pragma once

// Sphere and oblique-manifold primitives. Points are plain vectors expected to
// have unit Euclidean norm; tangent vectors are plain vectors orthogonal to
// their base point. Oblique points are lists of sphere points (columns).

#include <span>
#include <vector>

#include "sasd/types.hpp"

namespace sasd {

using ObliquePoint = std::vector<Vec>;

inline constexpr double kUnitNormTolerance = 1e-8;

/// z - a<a, z>. Throws ContractError if |‖a‖ - 1| > 1e-8.
Vec tangent_project(std::span<const double> a, std::span<const double> z);

/// Exponential map a cos‖δ‖ + (δ/‖δ‖) sin‖δ‖. ‖δ‖ < 1e-14 returns a.
Vec retract_exp(std::span<const double> a, std::span<const double> delta);

/// retract_exp(a, delta) - a, evaluated without cancellation for small steps.
Vec retract_exp_increment(std::span<const double> a, std::span<const double> delta);

/// Logarithm map: the tangent vector at a whose exponential reaches b.
/// Length equals the geodesic distance. Throws SingularityError when b is
/// within 1e-9 (in angle) of -a.
Vec retract_inverse(std::span<const double> a, std::span<const double> b);

/// Scale to unit norm. Throws DomainError on the zero vector.
Vec normalize(std::span<const double> v);

// Column-wise forms. Errors are rethrown with the column index prepended.
ObliquePoint oblique_tangent_project(const ObliquePoint& a, const std::vector<Vec>& z);
ObliquePoint oblique_retract_exp(const ObliquePoint& a, const std::vector<Vec>& delta);
std::vector<Vec> oblique_retract_inverse(const ObliquePoint& a, const ObliquePoint& b);

}  // namespace sasd

#pragma once

#include <span>

#include "sasd/types.hpp"

namespace sasd {

/// Weighted soft threshold sign(z_i)·max(|z_i| − ρ·w_i, 0), followed by
/// max(·, 0) when nonnegative. Empty weights mean all ones.
/// Throws DomainError for ρ < 0 or any w_i ≤ 0.
Vec prox_l1(std::span<const double> z, double rho, std::span<const double> weights = {},
            bool nonnegative = false);

/// In-place form used on the solver hot path; no argument validation.
void prox_l1_inplace(std::span<double> z, double rho, std::span<const double> weights,
                     bool nonnegative);

}  // namespace sasd

#include "sasd/cdl.hpp"

#include <algorithm>
#include <numeric>

#include "sasd/conv.hpp"
#include "sasd/errors.hpp"
#include "sasd/pipeline.hpp"
#include "sasd/rng.hpp"

namespace sasd {

CdlInstance build_cdl_problem(const std::vector<KernelSpec>& kernels,
                              const std::vector<ActivationSpec>& activations,
                              const NoiseSpec& noise, std::uint64_t seed, bool fit_bias) {
  const std::size_t n_atoms = kernels.size();
  if (n_atoms < 1) throw DimensionError("build_cdl_problem: need at least one atom");
  if (activations.size() != n_atoms) {
    throw DimensionError("build_cdl_problem: one activation spec per kernel required");
  }
  const std::size_t n0 = kernels[0].n0;
  const std::size_t m = activations[0].m;
  for (std::size_t k = 0; k < n_atoms; ++k) {
    if (kernels[k].n0 != n0) throw DimensionError("build_cdl_problem: kernels differ in n0");
    if (activations[k].m != m) throw DimensionError("build_cdl_problem: activations differ in m");
  }
  if (n0 > m) throw DimensionError("build_cdl_problem: kernel longer than signal");

  CdlInstance inst;
  Vec y(m, 0.0);
  for (std::size_t k = 0; k < n_atoms; ++k) {
    const std::uint64_t atom_seed = derive_seed(seed, Stream::kTrial, k);
    inst.kernels.push_back(gen_kernel(kernels[k], atom_seed));
    inst.maps.push_back(gen_activation(activations[k], atom_seed));
    const Vec c = cconv(inst.maps[k], inst.kernels[k]);
    for (std::size_t i = 0; i < m; ++i) y[i] += c[i];
  }
  // Noise and bias are drawn once for the superposition.
  const Vec zero_map(m, 0.0);
  const Vec extra = gen_observation(inst.kernels[0], zero_map, noise, seed);
  for (std::size_t i = 0; i < m; ++i) y[i] += extra[i];
  inst.problem = make_problem(std::move(y), 3 * n0 - 2, n_atoms, fit_bias);
  return inst;
}

CdlScore cdl_score(const std::vector<Vec>& truth, const ObliquePoint& estimate) {
  const std::size_t n = truth.size();
  if (n != estimate.size()) throw DomainError("cdl_score: atom counts differ");
  if (n == 0) throw DomainError("cdl_score: no atoms");
  if (n > kMaxScoredAtoms) {
    throw DomainError("cdl_score: more than 6 atoms; exhaustive matching is too expensive");
  }
  // Pairwise table first; permutations only combine entries.
  std::vector<std::vector<RecoveryMatch>> table(n, std::vector<RecoveryMatch>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      table[i][j] = recovery_match(Extent{truth[i].size()}, truth[i], Extent{estimate[j].size()},
                                   estimate[j]);
    }
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  CdlScore best;
  best.error = 2.0;
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, table[i][perm[i]].error);
    if (worst < best.error) {
      best.error = worst;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t i = 0; i < n; ++i) {
    best.errors.push_back(table[i][best.permutation[i]].error);
    best.shifts.push_back(table[i][best.permutation[i]].row_offset);
  }
  return best;
}

bool has_duplicate_kernels(const ObliquePoint& estimate, double threshold) {
  if (estimate.size() < 2) return false;
  return mutual_coherence(estimate) > threshold;
}

}  // namespace sasd

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fairtransport/mask.hpp"
#include "fairtransport/matrix.hpp"

namespace fairtransport::audit {

struct HsicResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::uint32_t permutations = 0;
    double kernel_bandwidth_y = 0.0;
    std::uint64_t seed = 0;
    bool vacuous = false;  // fewer than 2 distinct labels
};

/// Median of the N(N-1)/2 pairwise Euclidean distances between rows of Y.
/// Returns 1.0 when the median is zero (constant input) so the kernel stays
/// defined; the centered Gram matrix is then identically zero anyway.
double median_pairwise_distance(const Matrix& y, ExecPolicy exec = ExecPolicy::Parallel);

/// Doubly centered Gaussian Gram matrix exp(-||y_i - y_j||^2 / (2 bw^2)).
Matrix centered_gaussian_gram(const Matrix& y, double bandwidth, ExecPolicy exec = ExecPolicy::Parallel);

/// Biased HSIC estimator (1/N^2) tr(Kc Lc) with a Gaussian kernel on Y rows
/// and the indicator kernel on atom labels. The bandwidth defaults to the
/// median heuristic; pass one explicitly to compare statistics across
/// datasets under a single kernel. Nonnegative; invariant under label
/// renaming and constant shifts of Y. Requires N >= 4.
double hsic_statistic(const Matrix& y, const std::vector<std::uint32_t>& labels,
                      ExecPolicy exec = ExecPolicy::Parallel,
                      std::optional<double> bandwidth = std::nullopt);

/// Permutation test with the add-one correction:
/// p = (1 + #{permuted >= observed}) / (permutations + 1).
/// Replicate r shuffles the labels with an RNG derived from (seed, r), so
/// serial and parallel runs agree bit-for-bit. Requires permutations >= 99.
HsicResult permutation_pvalue(const Matrix& y, const std::vector<std::uint32_t>& labels,
                              std::uint32_t permutations, std::uint64_t seed,
                              ExecPolicy exec = ExecPolicy::Parallel);

struct ConditionalGapReport {
    double max_mean_gap = 0.0;    // max over atoms of ||mean(Y|atom) - mean(Y)||_2
    double max_w2_gap_1d = 0.0;   // max over atoms and columns of W2(conditional, pooled)
};

/// Empirical surrogate for "conditioning does not alter the law": per-atom
/// mean displacement and exact 1-d 2-Wasserstein distances computed from
/// sorted samples matched on a common quantile grid of lcm(|atom|, N)
/// levels.
ConditionalGapReport conditional_gaps(const Matrix& y, const sigma::AtomPartition& partition);

}  // namespace fairtransport::audit

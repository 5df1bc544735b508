#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairtransport/mask.hpp"
#include "fairtransport/matrix.hpp"

namespace fairtransport::ot {

/// Per-atom arithmetic mean of X, one row per atom (G x d). Atoms are
/// summed member-by-member in ascending row order, so the result does not
/// depend on the execution policy.
Matrix conditional_means(const Matrix& x, const sigma::AtomPartition& partition,
                         ExecPolicy exec = ExecPolicy::Parallel);

/// Squared Euclidean cost c(i, j) = ||x_i - mu_j||^2, N x G.
Matrix cost_matrix(const Matrix& x, const Matrix& mu, ExecPolicy exec = ExecPolicy::Parallel);

struct TransportPlan {
    Matrix coupling;  // N x G, nonnegative
    std::vector<double> row_marginal;
    std::vector<double> col_marginal;
    double epsilon = 0.0;
    std::size_t iterations = 0;
    double marginal_residual = 0.0;
};

struct SinkhornOptions {
    double tol = 1e-9;          // max-norm marginal residual target
    std::size_t max_iter = 10000;
    ExecPolicy exec = ExecPolicy::Parallel;
    // Warm-start the potentials through a halving epsilon schedule before
    // iterating at the target epsilon. Changes only the starting point of
    // the final fixed-point iteration, not the problem being solved; small
    // epsilons converge orders of magnitude faster with it.
    bool epsilon_scaling = true;
    std::vector<double>* dual_trace = nullptr;  // target-epsilon sweeps only
};

/// Entropy-regularized transport between `row_marginal` and `col_marginal`
/// under `cost`, solved by log-domain Sinkhorn scaling (stable at small
/// epsilon). Marginals must be strictly positive and sum to 1 within 1e-12;
/// cost must be finite; epsilon > 0. Runs until the marginal residual is at
/// most `tol` or `max_iter` full sweeps elapse at the target epsilon; the
/// achieved residual is reported either way. `iterations` counts every
/// sweep, warm-start levels included.
TransportPlan sinkhorn(const Matrix& cost, const std::vector<double>& row_marginal,
                       const std::vector<double>& col_marginal, double epsilon,
                       const SinkhornOptions& options = {});

/// <coupling, cost>, summed row-major in fixed order.
double transport_cost(const Matrix& coupling, const Matrix& cost);

/// Scale-free default: 0.05 x median cost entry.
double default_epsilon(const Matrix& cost);

struct AtomSummary {
    std::vector<double> mean;  // d
    Matrix covariance;         // d x d, population normalization
};

struct FairProjection {
    Matrix y;                  // N x d
    std::string method;        // "algorithm1" | "quantile1d"
    std::optional<TransportPlan> plan;
    double reconstruction_error = 0.0;  // ||X - Y||_F^2 / N
    std::vector<AtomSummary> per_atom_summary;
    double epsilon_used = 0.0;          // algorithm1 only
    std::size_t grid_levels = 0;        // quantile1d only
    double independence_slack = 0.0;    // quantile1d only; 0 when atom sizes are equal
};

/// Barycentric projection onto the conditional means: cost
/// c(i, j) = ||x_i - mu_j||^2, uniform row marginal 1/N, column marginal
/// |atom_j|/N, then y_i = sum_j pi(i, j) mu_j normalized by the row sum of
/// pi. Independence from the atom label is measured downstream, not
/// guaranteed by this construction. When `epsilon` is empty the scale-free
/// default is used and recorded in `epsilon_used`.
FairProjection project_algorithm1(const Matrix& x, const sigma::AtomPartition& partition,
                                  std::optional<double> epsilon = std::nullopt,
                                  const SinkhornOptions& options = {});

/// One-dimensional quantile-barycenter projection: within each atom, values
/// are ranked (ties by row index); the barycentric quantile function
/// qbar(t) = sum_g (|atom_g|/N) q_g(t) is evaluated on m = lcm(atom sizes)
/// levels t = (l + 0.5)/m (m capped at 10000), and each row receives the
/// mean of qbar over the levels covered by its rank. With equal atom sizes
/// every rank covers exactly one level, so the within-atom empirical law of
/// y is identical across atoms; otherwise the grid-induced slack is
/// reported in `independence_slack`.
FairProjection project_quantile_1d(const Matrix& x, const sigma::AtomPartition& partition);

double reconstruction_error(const Matrix& x, const Matrix& y, ExecPolicy exec = ExecPolicy::Parallel);

}  // namespace fairtransport::ot

#include "fairtransport/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairtransport/errors.hpp"

namespace fairtransport::ot {

namespace {

void check_marginal(const std::vector<double>& marginal, const char* which) {
    double sum = 0.0;
    for (const double w : marginal) {
        if (!(w > 0.0)) throw ValidationError(std::string(which) + " marginal entries must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw ValidationError(std::string(which) + " marginal must sum to 1 (got " + std::to_string(sum) + ")");
    }
}

}  // namespace

Matrix conditional_means(const Matrix& x, const sigma::AtomPartition& partition, ExecPolicy exec) {
    if (x.rows != partition.rows()) throw ValidationError("feature matrix and partition are misaligned");
    const auto members = partition.members();
    const std::size_t groups = partition.count();
    const std::size_t d = x.cols;
    Matrix mu(groups, d);

    const auto mean_of_atom = [&](std::size_t g) {
        if (members[g].empty()) throw Error("internal: empty atom in partition");
        for (std::size_t j = 0; j < d; ++j) {
            double sum = 0.0;
            for (const std::uint32_t i : members[g]) sum += x.at(i, j);
            mu.at(g, j) = sum / static_cast<double>(members[g].size());
        }
    };

    if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t g = 0; g < static_cast<std::ptrdiff_t>(groups); ++g) {
            mean_of_atom(static_cast<std::size_t>(g));
        }
    } else {
        for (std::size_t g = 0; g < groups; ++g) mean_of_atom(g);
    }
    return mu;
}

Matrix cost_matrix(const Matrix& x, const Matrix& mu, ExecPolicy exec) {
    if (x.cols != mu.cols) throw ValidationError("feature and mean dimensions differ");
    const std::size_t n = x.rows;
    const std::size_t groups = mu.rows;
    const std::size_t d = x.cols;
    Matrix cost(n, groups);

    const auto fill_row = [&](std::size_t i) {
        for (std::size_t g = 0; g < groups; ++g) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = x.at(i, j) - mu.at(g, j);
                acc += diff * diff;
            }
            cost.at(i, g) = acc;
        }
    };

    if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            fill_row(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) fill_row(i);
    }
    return cost;
}

TransportPlan sinkhorn(const Matrix& cost, const std::vector<double>& row_marginal,
                       const std::vector<double>& col_marginal, double epsilon,
                       const SinkhornOptions& options) {
    const std::size_t n = cost.rows;
    const std::size_t m = cost.cols;
    if (row_marginal.size() != n || col_marginal.size() != m) {
        throw ValidationError("marginal lengths do not match the cost matrix");
    }
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    for (const double c : cost.data) {
        if (!std::isfinite(c)) throw ValidationError("cost matrix must be finite");
    }
    check_marginal(row_marginal, "row");
    check_marginal(col_marginal, "column");

    std::vector<double> log_a(n), log_b(m);
    for (std::size_t i = 0; i < n; ++i) log_a[i] = std::log(row_marginal[i]);
    for (std::size_t j = 0; j < m; ++j) log_b[j] = std::log(col_marginal[j]);

    // Dual potentials of the entropic problem; pi(i,j) = exp((f_i + g_j - c_ij)/eps).
    std::vector<double> f(n, 0.0), g(m, 0.0);
    // Thread-team barriers cost more than a whole sweep on desk-scale
    // problems; the sweep output is order-fixed, so the fallback is exact.
    const bool parallel = options.exec == ExecPolicy::Parallel && n * m >= 4096;
    double current_eps = epsilon;

    const auto update_f = [&](std::size_t i) {
        // f_i = eps*log a_i - eps*LSE_j((g_j - c_ij)/eps)
        const double* crow = cost.row(i);
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) peak = std::max(peak, (g[j] - crow[j]) / current_eps);
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) sum += std::exp((g[j] - crow[j]) / current_eps - peak);
        f[i] = current_eps * (log_a[i] - (peak + std::log(sum)));
    };
    const auto update_g = [&](std::size_t j) {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            peak = std::max(peak, (f[i] - cost.at(i, j)) / current_eps);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += std::exp((f[i] - cost.at(i, j)) / current_eps - peak);
        }
        g[j] = current_eps * (log_b[j] - (peak + std::log(sum)));
    };
    const auto sweep_once = [&]() {
        if (parallel) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
                update_f(static_cast<std::size_t>(i));
            }
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(m); ++j) {
                update_g(static_cast<std::size_t>(j));
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) update_f(i);
            for (std::size_t j = 0; j < m; ++j) update_g(j);
        }
    };

    TransportPlan plan;
    plan.coupling = Matrix(n, m);
    plan.row_marginal = row_marginal;
    plan.col_marginal = col_marginal;
    plan.epsilon = epsilon;

    std::size_t total_sweeps = 0;
    if (options.epsilon_scaling) {
        double peak_cost = 0.0;
        for (const double c : cost.data) peak_cost = std::max(peak_cost, std::abs(c));
        std::vector<double> schedule;
        for (double level = peak_cost * 0.5; level > 2.0 * epsilon; level *= 0.5) {
            schedule.push_back(level);
        }
        for (const double level : schedule) {
            current_eps = level;
            for (int s = 0; s < 3; ++s) {
                sweep_once();
                ++total_sweeps;
            }
        }
        current_eps = epsilon;
    }

    const auto fill_coupling_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < m; ++j) {
            plan.coupling.at(i, j) = std::exp((f[i] + g[j] - cost.at(i, j)) / epsilon);
        }
    };
    const auto residual = [&]() {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += plan.coupling.at(i, j);
            worst = std::max(worst, std::abs(s - row_marginal[i]));
        }
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += plan.coupling.at(i, j);
            worst = std::max(worst, std::abs(s - col_marginal[j]));
        }
        return worst;
    };
    const auto fill_coupling = [&]() {
        if (parallel) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
                fill_coupling_row(static_cast<std::size_t>(i));
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) fill_coupling_row(i);
        }
    };

    for (std::size_t sweep = 0; sweep < options.max_iter; ++sweep) {
        sweep_once();
        ++total_sweeps;
        fill_coupling();

        if (options.dual_trace != nullptr) {
            // D(f, g) = <f, a> + <g, b> - eps * sum_ij pi_ij; block ascent
            // makes this non-decreasing at fixed epsilon.
            double dual = 0.0;
            for (std::size_t i = 0; i < n; ++i) dual += f[i] * row_marginal[i];
            for (std::size_t j = 0; j < m; ++j) dual += g[j] * col_marginal[j];
            double mass = 0.0;
            for (const double p : plan.coupling.data) mass += p;
            dual -= epsilon * mass;
            options.dual_trace->push_back(dual);
        }

        plan.marginal_residual = residual();
        if (plan.marginal_residual <= options.tol) break;
    }
    plan.iterations = total_sweeps;
    return plan;
}

double transport_cost(const Matrix& coupling, const Matrix& cost) {
    if (!coupling.same_shape(cost)) throw ValidationError("coupling and cost shapes differ");
    double total = 0.0;
    for (std::size_t k = 0; k < coupling.data.size(); ++k) total += coupling.data[k] * cost.data[k];
    return total;
}

double default_epsilon(const Matrix& cost) {
    std::vector<double> entries = cost.data;
    if (entries.empty()) return 1.0;
    std::sort(entries.begin(), entries.end());
    const std::size_t mid = entries.size() / 2;
    double median = (entries.size() % 2 == 1) ? entries[mid] : 0.5 * (entries[mid - 1] + entries[mid]);
    if (median <= 0.0) {
        median = std::accumulate(entries.begin(), entries.end(), 0.0) / static_cast<double>(entries.size());
    }
    if (median <= 0.0) return 1.0;
    return 0.05 * median;
}

namespace {

std::vector<AtomSummary> summarize_atoms(const Matrix& y, const sigma::AtomPartition& partition) {
    const auto members = partition.members();
    const std::size_t d = y.cols;
    std::vector<AtomSummary> out(partition.count());
    for (std::size_t g = 0; g < partition.count(); ++g) {
        AtomSummary& summary = out[g];
        summary.mean.assign(d, 0.0);
        summary.covariance = Matrix(d, d);
        const double size = static_cast<double>(members[g].size());
        for (const std::uint32_t i : members[g]) {
            for (std::size_t j = 0; j < d; ++j) summary.mean[j] += y.at(i, j);
        }
        for (std::size_t j = 0; j < d; ++j) summary.mean[j] /= size;
        for (const std::uint32_t i : members[g]) {
            for (std::size_t a = 0; a < d; ++a) {
                const double da = y.at(i, a) - summary.mean[a];
                for (std::size_t b = 0; b < d; ++b) {
                    summary.covariance.at(a, b) += da * (y.at(i, b) - summary.mean[b]);
                }
            }
        }
        for (double& v : summary.covariance.data) v /= size;
    }
    return out;
}

}  // namespace

FairProjection project_algorithm1(const Matrix& x, const sigma::AtomPartition& partition,
                                  std::optional<double> epsilon, const SinkhornOptions& options) {
    if (x.rows != partition.rows()) throw ValidationError("feature matrix and partition are misaligned");
    if (x.rows == 0 || x.cols == 0) throw ValidationError("feature matrix is empty");
    for (const double v : x.data) {
        if (!std::isfinite(v)) throw ValidationError("feature matrix must be finite");
    }

    const std::size_t n = x.rows;
    const std::size_t groups = partition.count();
    const Matrix mu = conditional_means(x, partition, options.exec);
    const Matrix cost = cost_matrix(x, mu, options.exec);

    const double eps = epsilon.value_or(default_epsilon(cost));
    if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");

    std::vector<double> row_marginal(n, 1.0 / static_cast<double>(n));
    std::vector<double> col_marginal(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        col_marginal[g] = static_cast<double>(partition.atom_sizes[g]) / static_cast<double>(n);
    }

    FairProjection projection;
    projection.method = "algorithm1";
    projection.epsilon_used = eps;
    projection.plan = sinkhorn(cost, row_marginal, col_marginal, eps, options);

    // Barycentric image, normalized by the row mass so y_i is a convex
    // combination of the conditional means.
    const Matrix& pi = projection.plan->coupling;
    projection.y = Matrix(n, x.cols);
    for (std::size_t i = 0; i < n; ++i) {
        double mass = 0.0;
        for (std::size_t g = 0; g < groups; ++g) mass += pi.at(i, g);
        for (std::size_t j = 0; j < x.cols; ++j) {
            double acc = 0.0;
            for (std::size_t g = 0; g < groups; ++g) acc += pi.at(i, g) * mu.at(g, j);
            projection.y.at(i, j) = acc / mass;
        }
    }
    projection.reconstruction_error = reconstruction_error(x, projection.y, options.exec);
    projection.per_atom_summary = summarize_atoms(projection.y, partition);
    return projection;
}

FairProjection project_quantile_1d(const Matrix& x, const sigma::AtomPartition& partition) {
    if (x.cols != 1) throw ValidationError("quantile projection requires exactly one feature column");
    if (x.rows != partition.rows()) throw ValidationError("feature matrix and partition are misaligned");
    for (const double v : x.data) {
        if (!std::isfinite(v)) throw ValidationError("feature matrix must be finite");
    }

    constexpr std::size_t kGridCap = 10000;
    const std::size_t n = x.rows;
    const std::size_t groups = partition.count();
    const auto members = partition.members();

    // Within-atom ranks: sort by value, ties broken by original row index.
    std::vector<std::vector<std::uint32_t>> sorted_members(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        sorted_members[g] = members[g];
        std::sort(sorted_members[g].begin(), sorted_members[g].end(),
                  [&](std::uint32_t a, std::uint32_t b) {
                      if (x.at(a, 0) != x.at(b, 0)) return x.at(a, 0) < x.at(b, 0);
                      return a < b;
                  });
    }

    // Common grid: least common multiple of atom sizes, capped.
    std::size_t grid = 1;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t size = sorted_members[g].size();
        grid = std::min<std::size_t>(kGridCap, grid / std::gcd(grid, size) * size);
        if (grid >= kGridCap) {
            grid = kGridCap;
            break;
        }
    }

    // Barycentric quantile curve on the grid. Deviation form around atom 0's
    // quantile keeps qbar == q0 exact when all conditional laws coincide, so
    // the projection is the identity on already-independent input.
    const auto atom_quantile = [&](std::size_t g, std::size_t level) {
        const std::size_t size = sorted_members[g].size();
        const double t = (static_cast<double>(level) + 0.5) / static_cast<double>(grid);
        const std::size_t rank =
            std::min<std::size_t>(size - 1, static_cast<std::size_t>(t * static_cast<double>(size)));
        return x.at(sorted_members[g][rank], 0);
    };
    std::vector<double> qbar(grid, 0.0);
    for (std::size_t level = 0; level < grid; ++level) {
        const double base = atom_quantile(0, level);
        double correction = 0.0;
        for (std::size_t g = 0; g < groups; ++g) {
            const double weight =
                static_cast<double>(sorted_members[g].size()) / static_cast<double>(n);
            correction += weight * (atom_quantile(g, level) - base);
        }
        qbar[level] = base + correction;
    }

    FairProjection projection;
    projection.method = "quantile1d";
    projection.grid_levels = grid;
    projection.y = Matrix(n, 1);

    // Comonotone assignment: the rank-r member of an atom receives the mean
    // of qbar over the levels its rank covers.
    double slack_sq_max = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t size = sorted_members[g].size();
        std::vector<double> sums(size, 0.0);
        std::vector<std::size_t> counts(size, 0);
        for (std::size_t level = 0; level < grid; ++level) {
            const double t = (static_cast<double>(level) + 0.5) / static_cast<double>(grid);
            const std::size_t rank = std::min<std::size_t>(size - 1, static_cast<std::size_t>(t * static_cast<double>(size)));
            sums[rank] += qbar[level];
            ++counts[rank];
        }
        for (std::size_t r = 0; r < size; ++r) {
            double value;
            if (counts[r] > 0) {
                value = sums[r] / static_cast<double>(counts[r]);
            } else {
                // Atom larger than the capped grid: take the nearest level.
                const std::size_t level = std::min<std::size_t>(
                    grid - 1, static_cast<std::size_t>((static_cast<double>(r) + 0.5) *
                                                       static_cast<double>(grid) / static_cast<double>(size)));
                value = qbar[level];
            }
            projection.y.at(sorted_members[g][r], 0) = value;
        }
        // Grid-induced deviation of this atom's law from the barycenter law.
        double dev = 0.0;
        for (std::size_t level = 0; level < grid; ++level) {
            const double t = (static_cast<double>(level) + 0.5) / static_cast<double>(grid);
            const std::size_t rank = std::min<std::size_t>(size - 1, static_cast<std::size_t>(t * static_cast<double>(size)));
            const double diff = projection.y.at(sorted_members[g][rank], 0) - qbar[level];
            dev += diff * diff;
        }
        slack_sq_max = std::max(slack_sq_max, dev / static_cast<double>(grid));
    }
    projection.independence_slack = std::sqrt(slack_sq_max);
    projection.reconstruction_error = reconstruction_error(x, projection.y, ExecPolicy::Serial);
    projection.per_atom_summary = summarize_atoms(projection.y, partition);
    return projection;
}

double reconstruction_error(const Matrix& x, const Matrix& y, ExecPolicy exec) {
    if (!x.same_shape(y)) throw ValidationError("matrices must share a shape");
    const std::size_t n = x.rows;
    if (n == 0) return 0.0;
    std::vector<double> row_sq(n, 0.0);

    const auto fill = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double diff = x.at(i, j) - y.at(i, j);
            acc += diff * diff;
        }
        row_sq[i] = acc;
    };

    if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            fill(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) fill(i);
    }
    // Fixed-order reduction keeps the result identical across thread counts.
    double total = 0.0;
    for (const double v : row_sq) total += v;
    return total / static_cast<double>(n);
}

}  // namespace fairtransport::ot

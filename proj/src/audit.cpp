#include "fairtransport/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "fairtransport/errors.hpp"

namespace fairtransport::audit {

namespace {

double row_distance(const Matrix& y, std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < y.cols; ++c) {
        const double diff = y.at(i, c) - y.at(j, c);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

// splitmix64: decorrelates (seed, replicate) pairs into full 64-bit states.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Bounded uniform draw by rejection on the low bits; avoids the
// implementation-defined std::uniform_int_distribution so permutation
// streams are reproducible across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

void shuffle_labels(std::vector<std::uint32_t>& labels, std::mt19937_64& rng) {
    for (std::size_t i = labels.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(labels[i - 1], labels[j]);
    }
}

// (1/N^2) sum over same-label pairs of the pre-centered Gram matrix. Equals
// (1/N^2) tr(Kc Lc) because centering is idempotent under the trace.
// Groups are visited in first-occurrence order, so renaming the label ids
// cannot perturb the floating summation.
double labelled_pair_sum(const Matrix& gram, const std::vector<std::uint32_t>& labels) {
    const std::size_t n = labels.size();
    std::map<std::uint32_t, std::uint32_t> compact;
    std::vector<std::vector<std::uint32_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [it, inserted] = compact.emplace(labels[i], static_cast<std::uint32_t>(members.size()));
        if (inserted) members.emplace_back();
        members[it->second].push_back(static_cast<std::uint32_t>(i));
    }
    double total = 0.0;
    for (const auto& group : members) {
        for (const std::uint32_t i : group) {
            const double* row = gram.row(i);
            double acc = 0.0;
            for (const std::uint32_t j : group) acc += row[j];
            total += acc;
        }
    }
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace

double median_pairwise_distance(const Matrix& y, ExecPolicy exec) {
    const std::size_t n = y.rows;
    if (n < 2) return 1.0;
    const std::size_t pairs = n * (n - 1) / 2;
    std::vector<double> dist(pairs);

    // Disjoint writes: row i owns the n-1-i slots for pairs (i, i+1..n-1),
    // starting at sum_{r<i} (n-1-r) = i*n - i - i*(i-1)/2.
    const auto fill_row = [&](std::size_t i) {
        const std::size_t base = i * n - i - i * (i - 1) / 2;
        for (std::size_t j = i + 1; j < n; ++j) {
            dist[base + j - (i + 1)] = row_distance(y, i, j);
        }
    };
    if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n - 1); ++i) {
            fill_row(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) fill_row(i);
    }

    const std::size_t mid = pairs / 2;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
    double median = dist[mid];
    if (pairs % 2 == 0) {
        // Lower middle = the largest element left of the partition point.
        const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (lower + median);
    }
    return median > 0.0 ? median : 1.0;
}

Matrix centered_gaussian_gram(const Matrix& y, double bandwidth, ExecPolicy exec) {
    const std::size_t n = y.rows;
    if (!(bandwidth > 0.0)) throw ValidationError("kernel bandwidth must be positive");
    Matrix gram(n, n);
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);

    const auto fill_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = row_distance(y, i, j);
            gram.at(i, j) = std::exp(-d * d * inv);
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

    // Double centering: K <- K - rowmean - colmean + grandmean, in a fixed
    // summation order so the output is policy-independent.
    std::vector<double> row_mean(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += gram.at(i, j);
        row_mean[i] = acc / static_cast<double>(n);
    }
    double grand = 0.0;
    for (const double v : row_mean) grand += v;
    grand /= static_cast<double>(n);
    const auto center_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            gram.at(i, j) += grand - row_mean[i] - row_mean[j];
        }
    };
    if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            center_row(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) center_row(i);
    }
    return gram;
}

double hsic_statistic(const Matrix& y, const std::vector<std::uint32_t>& labels, ExecPolicy exec,
                      std::optional<double> bandwidth) {
    if (y.rows != labels.size()) throw ValidationError("labels and Y row counts differ");
    if (y.rows < 4) throw ValidationError("HSIC requires at least 4 rows");
    const double bw = bandwidth.value_or(median_pairwise_distance(y, exec));
    const Matrix gram = centered_gaussian_gram(y, bw, exec);
    return labelled_pair_sum(gram, labels);
}

HsicResult permutation_pvalue(const Matrix& y, const std::vector<std::uint32_t>& labels,
                              std::uint32_t permutations, std::uint64_t seed, ExecPolicy exec) {
    if (y.rows != labels.size()) throw ValidationError("labels and Y row counts differ");
    if (y.rows < 4) throw ValidationError("HSIC requires at least 4 rows");
    if (permutations < 99) throw ValidationError("at least 99 permutations required");

    HsicResult result;
    result.permutations = permutations;
    result.seed = seed;
    result.kernel_bandwidth_y = median_pairwise_distance(y, exec);
    result.vacuous =
        std::set<std::uint32_t>(labels.begin(), labels.end()).size() < 2;

    const Matrix gram = centered_gaussian_gram(y, result.kernel_bandwidth_y, exec);
    result.statistic = labelled_pair_sum(gram, labels);

    std::vector<double> permuted(permutations);
    const auto replicate = [&](std::uint32_t r) {
        std::mt19937_64 rng(mix64(seed ^ mix64(static_cast<std::uint64_t>(r) + 1)));
        std::vector<std::uint32_t> shuffled = labels;
        shuffle_labels(shuffled, rng);
        permuted[r] = labelled_pair_sum(gram, shuffled);
    };
    if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(permutations); ++r) {
            replicate(static_cast<std::uint32_t>(r));
        }
    } else {
        for (std::uint32_t r = 0; r < permutations; ++r) replicate(r);
    }

    std::uint32_t at_least = 0;
    for (const double stat : permuted) {
        if (stat >= result.statistic) ++at_least;
    }
    result.p_value = (1.0 + at_least) / (static_cast<double>(permutations) + 1.0);
    return result;
}

ConditionalGapReport conditional_gaps(const Matrix& y, const sigma::AtomPartition& partition) {
    if (y.rows != partition.rows()) throw ValidationError("Y and partition row counts differ");
    const std::size_t n = y.rows;
    const std::size_t d = y.cols;
    const auto members = partition.members();

    std::vector<double> pooled_mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) pooled_mean[c] += y.at(i, c);
    }
    for (double& v : pooled_mean) v /= static_cast<double>(n);

    ConditionalGapReport report;
    constexpr std::size_t kGridCap = std::size_t{1} << 20;

    for (std::size_t c = 0; c < d; ++c) {
        std::vector<double> pooled_sorted(n);
        for (std::size_t i = 0; i < n; ++i) pooled_sorted[i] = y.at(i, c);
        std::sort(pooled_sorted.begin(), pooled_sorted.end());

        for (std::size_t g = 0; g < partition.count(); ++g) {
            const std::size_t size = members[g].size();
            std::vector<double> cond_sorted(size);
            for (std::size_t r = 0; r < size; ++r) cond_sorted[r] = y.at(members[g][r], c);
            std::sort(cond_sorted.begin(), cond_sorted.end());

            // Exact W2 on the lcm grid: both empirical quantile functions
            // are step functions constant on each grid cell.
            std::size_t grid = size / std::gcd(size, n) * n;
            grid = std::min(grid, kGridCap);
            double acc = 0.0;
            for (std::size_t level = 0; level < grid; ++level) {
                const double t = (static_cast<double>(level) + 0.5) / static_cast<double>(grid);
                const std::size_t ri = std::min<std::size_t>(size - 1, static_cast<std::size_t>(t * static_cast<double>(size)));
                const std::size_t pi = std::min<std::size_t>(n - 1, static_cast<std::size_t>(t * static_cast<double>(n)));
                const double diff = cond_sorted[ri] - pooled_sorted[pi];
                acc += diff * diff;
            }
            report.max_w2_gap_1d = std::max(report.max_w2_gap_1d, std::sqrt(acc / static_cast<double>(grid)));
        }
    }

    for (std::size_t g = 0; g < partition.count(); ++g) {
        double gap_sq = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            double mean = 0.0;
            for (const std::uint32_t i : members[g]) mean += y.at(i, c);
            mean /= static_cast<double>(members[g].size());
            const double diff = mean - pooled_mean[c];
            gap_sq += diff * diff;
        }
        report.max_mean_gap = std::max(report.max_mean_gap, std::sqrt(gap_sq));
    }
    return report;
}

}  // namespace fairtransport::audit

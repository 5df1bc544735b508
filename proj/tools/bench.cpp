// Compares the serial reference kernels against the OpenMP variants on
// synthetic inputs and checks that both produce identical bytes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <CLI11.hpp>

#include "fairtransport/audit.hpp"
#include "fairtransport/mask.hpp"
#include "fairtransport/matrix.hpp"
#include "fairtransport/transport.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using fairtransport::ExecPolicy;
using fairtransport::Matrix;

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    Matrix m(rows, cols);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : m.data) v = dist(rng);
    return m;
}

struct BenchRow {
    const char* name;
    double serial_ms;
    double parallel_ms;
    bool identical;
};

template <typename F>
BenchRow bench(const char* name, F&& run) {
    // run(policy) returns a vector<double> snapshot of the kernel output.
    double t0 = now_ms();
    const std::vector<double> serial = run(ExecPolicy::Serial);
    const double serial_ms = now_ms() - t0;
    t0 = now_ms();
    const std::vector<double> parallel = run(ExecPolicy::Parallel);
    const double parallel_ms = now_ms() - t0;
    return BenchRow{name, serial_ms, parallel_ms, serial == parallel};
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = 4000;
    std::size_t groups = 16;
    std::size_t dims = 8;
    std::uint32_t permutations = 199;
    std::size_t sweeps = 50;

    CLI::App app{"fairtransport kernel benchmark: serial reference vs OpenMP"};
    app.add_option("--n", n, "rows");
    app.add_option("--g", groups, "atoms");
    app.add_option("--d", dims, "feature columns");
    app.add_option("--permutations", permutations, "HSIC permutation count");
    app.add_option("--sweeps", sweeps, "Sinkhorn sweeps (via max_iter)");
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
    // Spin the team up once so the first timed kernel does not pay for it.
#pragma omp parallel
    {
    }
#else
    std::printf("built without OpenMP; parallel path falls back to serial\n");
#endif
    std::printf("n=%zu g=%zu d=%zu\n\n", n, groups, dims);

    std::mt19937_64 rng(20240915);
    const Matrix x = random_matrix(n, dims, rng);
    fairtransport::sigma::AtomPartition partition;
    partition.atom_of.resize(n);
    partition.atom_sizes.assign(groups, 0);
    for (std::size_t i = 0; i < n; ++i) {
        partition.atom_of[i] = static_cast<std::uint32_t>(i % groups);
        ++partition.atom_sizes[i % groups];
    }
    partition.atom_signatures.resize(groups);  // unused by the kernels below

    std::vector<double> row_marginal(n, 1.0 / static_cast<double>(n));
    std::vector<double> col_marginal(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        col_marginal[g] = static_cast<double>(partition.atom_sizes[g]) / static_cast<double>(n);
    }

    std::vector<BenchRow> rows;

    const Matrix mu = fairtransport::ot::conditional_means(x, partition, ExecPolicy::Serial);
    rows.push_back(bench("conditional_means", [&](ExecPolicy exec) {
        return fairtransport::ot::conditional_means(x, partition, exec).data;
    }));

    rows.push_back(bench("cost_matrix", [&](ExecPolicy exec) {
        return fairtransport::ot::cost_matrix(x, mu, exec).data;
    }));

    const Matrix cost = fairtransport::ot::cost_matrix(x, mu, ExecPolicy::Serial);
    rows.push_back(bench("sinkhorn", [&](ExecPolicy exec) {
        fairtransport::ot::SinkhornOptions options;
        options.exec = exec;
        options.tol = 0.0;  // run exactly `sweeps` iterations
        options.max_iter = sweeps;
        return fairtransport::ot::sinkhorn(cost, row_marginal, col_marginal,
                                           fairtransport::ot::default_epsilon(cost), options)
            .coupling.data;
    }));

    rows.push_back(bench("median_distance", [&](ExecPolicy exec) {
        return std::vector<double>{fairtransport::audit::median_pairwise_distance(x, exec)};
    }));

    const double bandwidth = fairtransport::audit::median_pairwise_distance(x, ExecPolicy::Serial);
    rows.push_back(bench("gaussian_gram", [&](ExecPolicy exec) {
        return fairtransport::audit::centered_gaussian_gram(x, bandwidth, exec).data;
    }));

    rows.push_back(bench("hsic_permutations", [&](ExecPolicy exec) {
        const auto result =
            fairtransport::audit::permutation_pvalue(x, partition.atom_of, permutations, 7, exec);
        return std::vector<double>{result.statistic, result.p_value};
    }));

    Matrix y = x;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dims; ++j) y.at(i, j) = mu.at(partition.atom_of[i], j);
    }
    rows.push_back(bench("reconstruction_error", [&](ExecPolicy exec) {
        return std::vector<double>{fairtransport::ot::reconstruction_error(x, y, exec)};
    }));

    std::printf("%-22s %12s %12s %9s %10s\n", "kernel", "serial ms", "parallel ms", "speedup", "identical");
    for (const auto& row : rows) {
        std::printf("%-22s %12.2f %12.2f %8.2fx %10s\n", row.name, row.serial_ms, row.parallel_ms,
                    row.serial_ms / (row.parallel_ms > 0 ? row.parallel_ms : 1e-9),
                    row.identical ? "yes" : "NO");
    }

    for (const auto& row : rows) {
        if (!row.identical) return 1;
    }
    return 0;
}

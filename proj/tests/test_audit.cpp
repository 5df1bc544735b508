#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fairtransport/audit.hpp"
#include "fairtransport/errors.hpp"
#include "fairtransport/transport.hpp"
#include "oracles/dd.hpp"
#include "oracles/hsic_direct.hpp"
#include "oracles/generators.hpp"

using namespace fairtransport;
using namespace fairtransport::audit;

namespace {

Matrix one_hot(const std::vector<std::uint32_t>& labels, std::size_t classes) {
    Matrix m(labels.size(), classes, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) m.at(i, labels[i]) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("hsic statistic basics") {
    SUBCASE("constant Y gives exactly zero") {
        const Matrix y(6, 2, 3.5);
        const std::vector<std::uint32_t> labels{0, 1, 0, 1, 0, 1};
        CHECK(hsic_statistic(y, labels) == 0.0);
    }
    SUBCASE("identical labels give zero") {
        std::mt19937_64 rng(3);
        const Matrix y = oracles::random_matrix(rng, 8, 2);
        const std::vector<std::uint32_t> labels(8, 0);
        CHECK(std::abs(hsic_statistic(y, labels)) <= 1e-12);
    }
    SUBCASE("requires at least 4 rows") {
        const Matrix y(3, 1, 0.0);
        CHECK_THROWS_AS(hsic_statistic(y, {0, 1, 0}), ValidationError);
    }
    SUBCASE("nonnegative on random input") {
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = oracles::draw(rng, 4, 24);
            const Matrix y = oracles::random_matrix(rng, n, oracles::draw(rng, 1, 3));
            std::vector<std::uint32_t> labels(n);
            for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 3);
            CHECK(hsic_statistic(y, labels) >= -1e-15);
        }
    }
}

TEST_CASE("hsic matches the direct-formula double-double oracle") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 8; ++trial) {
        Matrix y = oracles::random_matrix(rng, 6, 1, -1.0, 1.0);
        std::vector<std::uint32_t> labels{0, 0, 0, 1, 1, 1};
        // Plant clear dependence so the statistic is far from zero and the
        // relative comparison is meaningful.
        for (std::size_t i = 3; i < 6; ++i) y.at(i, 0) += 3.0;
        const double expected = oracles::hsic_direct_dd(y, labels);
        const double got = hsic_statistic(y, labels);
        CHECK(std::abs(got - expected) <= 1e-12 * std::max(std::abs(expected), 1e-6));
    }
}

TEST_CASE("hsic invariances") {
    std::mt19937_64 rng(61);
    const Matrix y = oracles::random_matrix(rng, 10, 2);
    const std::vector<std::uint32_t> labels{0, 1, 2, 0, 1, 2, 0, 1, 2, 0};

    SUBCASE("relabeling atom ids is bit-exact") {
        std::vector<std::uint32_t> renamed;
        for (const auto l : labels) renamed.push_back(l == 0 ? 7 : l == 1 ? 42 : 3);
        CHECK(hsic_statistic(y, labels) == hsic_statistic(y, renamed));
    }
    SUBCASE("constant shift of Y") {
        Matrix shifted = y;
        for (double& v : shifted.data) v += 100.0;
        const double a = hsic_statistic(y, labels);
        const double b = hsic_statistic(shifted, labels);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(a, 1e-12));
    }
}

TEST_CASE("permutation p-value") {
    std::mt19937_64 rng(71);
    SUBCASE("same seed reproduces the result bit-for-bit") {
        const Matrix y = oracles::random_matrix(rng, 12, 1);
        const std::vector<std::uint32_t> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
        const HsicResult a = permutation_pvalue(y, labels, 199, 12345);
        const HsicResult b = permutation_pvalue(y, labels, 199, 12345);
        CHECK(a.statistic == b.statistic);
        CHECK(a.p_value == b.p_value);
        CHECK(a.kernel_bandwidth_y == b.kernel_bandwidth_y);
    }
    SUBCASE("maximal dependence attains the minimum p-value") {
        // Large enough that no permutation reproduces the exact partition,
        // which would tie the observed statistic.
        std::vector<std::uint32_t> labels;
        for (int i = 0; i < 24; ++i) labels.push_back(static_cast<std::uint32_t>(i % 2));
        const Matrix y = one_hot(labels, 2);
        const HsicResult result = permutation_pvalue(y, labels, 199, 9);
        CHECK(result.p_value == doctest::Approx(1.0 / 200.0));
    }
    SUBCASE("p-value bounds hold") {
        const Matrix y = oracles::random_matrix(rng, 10, 1);
        std::vector<std::uint32_t> labels(10);
        for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 2);
        const HsicResult result = permutation_pvalue(y, labels, 99, 1);
        CHECK(result.p_value >= 1.0 / 100.0);
        CHECK(result.p_value <= 1.0);
    }
    SUBCASE("independent labels are rarely flagged") {
        std::size_t below = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const Matrix y = oracles::random_matrix(rng, 24, 1);
            std::vector<std::uint32_t> labels(24);
            for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 2);
            const HsicResult result =
                permutation_pvalue(y, labels, 99, 1000 + static_cast<std::uint64_t>(trial));
            if (result.p_value < 0.05) ++below;
        }
        CHECK(below <= 8);  // expectation is 2.5 at the null
    }
    SUBCASE("vacuous flag for fewer than 2 distinct labels") {
        const Matrix y = oracles::random_matrix(rng, 6, 1);
        const HsicResult result = permutation_pvalue(y, std::vector<std::uint32_t>(6, 0), 99, 3);
        CHECK(result.vacuous);
    }
    SUBCASE("permutation count precondition") {
        const Matrix y = oracles::random_matrix(rng, 6, 1);
        CHECK_THROWS_AS(permutation_pvalue(y, {0, 1, 0, 1, 0, 1}, 98, 3), ValidationError);
    }
}

TEST_CASE("monotone discrimination along the dependence ladder") {
    // Fixed seeded instance, one kernel for the whole ladder: re-estimating
    // the median bandwidth per step is not comparable across steps (at the
    // pure one-hot endpoint half the pairwise distances collapse to zero and
    // the median jumps, deflating the statistic).
    std::mt19937_64 rng(1);
    const std::size_t n = 48;
    std::vector<std::uint32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::uint32_t>(i % 2);
    const Matrix independent = oracles::random_matrix(rng, n, 2);
    const Matrix hot = one_hot(labels, 2);
    const double bandwidth = median_pairwise_distance(independent);

    double previous = -1.0;
    for (const double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        Matrix y(n, 2);
        for (std::size_t idx = 0; idx < y.data.size(); ++idx) {
            y.data[idx] = (1.0 - alpha) * independent.data[idx] + alpha * hot.data[idx];
        }
        const double stat = hsic_statistic(y, labels, ExecPolicy::Parallel, bandwidth);
        CHECK(stat >= previous - 1e-12);
        previous = stat;
    }
}

TEST_CASE("conditional gaps") {
    SUBCASE("single atom: both gaps are exactly zero") {
        std::mt19937_64 rng(7);
        const Matrix y = oracles::random_matrix(rng, 9, 2);
        const auto partition = oracles::make_partition({9});
        const ConditionalGapReport report = conditional_gaps(y, partition);
        CHECK(report.max_mean_gap == 0.0);
        CHECK(report.max_w2_gap_1d == 0.0);
    }
    SUBCASE("quantile projection output with equal atom sizes has zero W2 gap") {
        std::mt19937_64 rng(19);
        const Matrix x = oracles::random_matrix(rng, 12, 1, -4.0, 4.0);
        const auto partition = oracles::make_partition({4, 4, 4});
        const auto projection = ot::project_quantile_1d(x, partition);
        const ConditionalGapReport report = conditional_gaps(projection.y, partition);
        CHECK(report.max_w2_gap_1d == 0.0);
        CHECK(report.max_mean_gap <= 1e-12);
    }
    SUBCASE("hand-computed 6-row instance") {
        Matrix y(6, 1);
        y.data = {1.0, 2.0, 3.0, 10.0, 20.0, 30.0};
        sigma::AtomPartition partition;
        partition.atom_of = {0, 0, 0, 1, 1, 1};
        partition.atom_sizes = {3, 3};
        partition.atom_signatures = {"0", "1"};
        const ConditionalGapReport report = conditional_gaps(y, partition);
        // Atom A vs pooled on the lcm(3,6)=6 grid:
        //   cond = [1,1,2,2,3,3], pooled = [1,2,3,10,20,30]
        //   squared diffs = [0,1,1,64,289,729] -> mean 1084/6
        CHECK(report.max_w2_gap_1d == doctest::Approx(std::sqrt(1084.0 / 6.0)).epsilon(1e-12));
        // mean(A)=2, mean(B)=20, pooled mean=11: both gaps are 9.
        CHECK(report.max_mean_gap == doctest::Approx(9.0).epsilon(1e-12));
    }
    SUBCASE("positive gap when atoms separate small and large values") {
        Matrix y(6, 1);
        y.data = {0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
        sigma::AtomPartition partition;
        partition.atom_of = {0, 0, 0, 1, 1, 1};
        partition.atom_sizes = {3, 3};
        partition.atom_signatures = {"0", "1"};
        const ConditionalGapReport report = conditional_gaps(y, partition);
        // cond A = [0,...], pooled = [0,0,0,1,1,1]: diffs are 0 thrice, 1 thrice.
        CHECK(report.max_w2_gap_1d == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
        CHECK(report.max_mean_gap == doctest::Approx(0.5).epsilon(1e-12));
    }
}

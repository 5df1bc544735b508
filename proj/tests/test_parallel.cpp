// The OpenMP kernels must reproduce the serial reference bit-for-bit: every
// parallel loop writes disjoint slots and every reduction runs in a fixed
// order, so thread count and scheduling cannot leak into results.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fairtransport/audit.hpp"
#include "fairtransport/dataset.hpp"
#include "fairtransport/mask.hpp"
#include "fairtransport/pipeline.hpp"
#include "fairtransport/transport.hpp"
#include "oracles/generators.hpp"
#include "test_util.hpp"

using namespace fairtransport;

namespace {

struct ThreadCountGuard {
#ifdef _OPENMP
    int saved = omp_get_max_threads();
    ~ThreadCountGuard() { omp_set_num_threads(saved); }
    void set(int n) { omp_set_num_threads(n); }
#else
    void set(int) {}
#endif
};

}  // namespace

TEST_CASE("transport kernels: serial and parallel outputs are identical") {
    std::mt19937_64 rng(614);
    const Matrix x = oracles::random_matrix(rng, 240, 3, -5.0, 5.0);
    const auto partition = oracles::make_partition({60, 60, 60, 60});

    ThreadCountGuard guard;
    for (const int threads : {1, 2, 7}) {
        guard.set(threads);
        CAPTURE(threads);

        const Matrix mu_serial = ot::conditional_means(x, partition, ExecPolicy::Serial);
        const Matrix mu_parallel = ot::conditional_means(x, partition, ExecPolicy::Parallel);
        CHECK(mu_serial == mu_parallel);

        const Matrix cost_serial = ot::cost_matrix(x, mu_serial, ExecPolicy::Serial);
        const Matrix cost_parallel = ot::cost_matrix(x, mu_serial, ExecPolicy::Parallel);
        CHECK(cost_serial == cost_parallel);

        std::vector<double> a(x.rows, 1.0 / static_cast<double>(x.rows));
        std::vector<double> b(4, 0.25);
        ot::SinkhornOptions serial_options, parallel_options;
        serial_options.exec = ExecPolicy::Serial;
        parallel_options.exec = ExecPolicy::Parallel;
        const auto plan_serial = ot::sinkhorn(cost_serial, a, b, 1.0, serial_options);
        const auto plan_parallel = ot::sinkhorn(cost_serial, a, b, 1.0, parallel_options);
        CHECK(plan_serial.coupling == plan_parallel.coupling);
        CHECK(plan_serial.iterations == plan_parallel.iterations);
        CHECK(plan_serial.marginal_residual == plan_parallel.marginal_residual);

        CHECK(ot::reconstruction_error(x, mu_serial.rows == x.rows ? mu_serial : x, ExecPolicy::Serial) ==
              ot::reconstruction_error(x, mu_serial.rows == x.rows ? mu_serial : x, ExecPolicy::Parallel));
    }
}

TEST_CASE("projection: serial and parallel agree bit-for-bit") {
    std::mt19937_64 rng(615);
    const Matrix x = oracles::random_matrix(rng, 120, 2, -2.0, 2.0);
    const auto partition = oracles::make_partition({40, 40, 40});

    ThreadCountGuard guard;
    ot::SinkhornOptions serial_options, parallel_options;
    serial_options.exec = ExecPolicy::Serial;
    parallel_options.exec = ExecPolicy::Parallel;
    const auto projection_serial = ot::project_algorithm1(x, partition, 0.4, serial_options);
    guard.set(2);
    const auto projection_parallel = ot::project_algorithm1(x, partition, 0.4, parallel_options);
    CHECK(projection_serial.y == projection_parallel.y);
    CHECK(projection_serial.reconstruction_error == projection_parallel.reconstruction_error);
}

TEST_CASE("audit kernels: serial and parallel agree bit-for-bit") {
    std::mt19937_64 rng(616);
    const Matrix y = oracles::random_matrix(rng, 150, 2);
    std::vector<std::uint32_t> labels(y.rows);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 3);

    ThreadCountGuard guard;
    for (const int threads : {1, 2, 7}) {
        guard.set(threads);
        CAPTURE(threads);

        CHECK(audit::median_pairwise_distance(y, ExecPolicy::Serial) ==
              audit::median_pairwise_distance(y, ExecPolicy::Parallel));

        const double bw = audit::median_pairwise_distance(y, ExecPolicy::Serial);
        CHECK(audit::centered_gaussian_gram(y, bw, ExecPolicy::Serial) ==
              audit::centered_gaussian_gram(y, bw, ExecPolicy::Parallel));

        const auto serial = audit::permutation_pvalue(y, labels, 199, 77, ExecPolicy::Serial);
        const auto parallel = audit::permutation_pvalue(y, labels, 199, 77, ExecPolicy::Parallel);
        CHECK(serial.statistic == parallel.statistic);
        CHECK(serial.p_value == parallel.p_value);
        CHECK(serial.kernel_bandwidth_y == parallel.kernel_bandwidth_y);
    }
}

TEST_CASE("mask evaluation: serial and parallel agree") {
    const auto onto = onto::parse_ontology(
        "sensitive concept S0. sensitive concept S1. data p0.\n"
        "axiom p0 < 500 => S0. axiom p0 >= 200 => S1.\n");
    std::string csv = "id,p0\n";
    std::mt19937_64 rng(617);
    for (int i = 0; i < 300; ++i) {
        csv += "r" + std::to_string(i) + "," + std::to_string(rng() % 1000) + "\n";
    }
    const auto binding = sigma::parse_binding(
        R"({"individual_column": "id",
            "data_bindings": [{"column": "p0", "property": "p0", "target": "row"}]})");
    const auto ingested = sigma::ingest_text(csv, binding, onto);
    const auto closed = onto::materialize(onto, ingested.facts);

    ThreadCountGuard guard;
    guard.set(2);
    const auto mask_serial = sigma::build_mask(onto, closed, ingested.dataset, ExecPolicy::Serial);
    const auto mask_parallel = sigma::build_mask(onto, closed, ingested.dataset, ExecPolicy::Parallel);
    CHECK(mask_serial.bits == mask_parallel.bits);
    CHECK(mask_serial.canonical_serialization() == mask_parallel.canonical_serialization());
}

TEST_CASE("full pipeline: serial equals parallel on the certificate bytes") {
    const std::filesystem::path fixtures = FAIRTRANSPORT_FIXTURE_DIR;
    RunConfig config;
    config.ontology_path = fixtures / "loan.fto";
    config.binding_path = fixtures / "loan_binding.json";
    config.data_path = fixtures / "loan.csv";
    config.method = "quantile1d";
    config.seed = 31415;
    config.permutations = 199;

    config.exec = ExecPolicy::Serial;
    const auto serial = run_pipeline(config, Stage::Certify, false, std::string("t"));
    config.exec = ExecPolicy::Parallel;
    const auto parallel = run_pipeline(config, Stage::Certify, false, std::string("t"));
    CHECK(cert::to_canonical_json(serial.certificate) == cert::to_canonical_json(parallel.certificate));
}

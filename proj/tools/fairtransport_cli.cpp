#include <cstdlib>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "fairtransport/errors.hpp"
#include "fairtransport/pipeline.hpp"
#include "fairtransport/sha256.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitAuditFailure = 4;

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_flag) {
    if (seed_given) return seed_flag;
    if (const char* env = std::getenv("FAIRTRANSPORT_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw fairtransport::ValidationError("FAIRTRANSPORT_SEED is not a valid unsigned integer");
        }
    }
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct CliOptions {
    fairtransport::RunConfig config;
    bool seed_given = false;
    std::uint64_t seed_flag = 0;
    double epsilon_flag = 0.0;
    bool epsilon_given = false;
    bool raw = false;
    bool json_output = false;
    std::string cert_path;
};

void add_pipeline_options(CLI::App* cmd, CliOptions& opts, bool needs_out) {
    cmd->add_option("--ontology", opts.config.ontology_path, "ontology file (.fto)")->required();
    cmd->add_option("--binding", opts.config.binding_path, "binding config (JSON)")->required();
    cmd->add_option("--data", opts.config.data_path, "dataset (CSV)")->required();
    auto* out = cmd->add_option("--out", opts.config.out_dir, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--method", opts.config.method, "projection method: quantile1d | algorithm1")
        ->check(CLI::IsMember({"quantile1d", "algorithm1"}));
    cmd->add_option("--epsilon", opts.epsilon_flag, "entropic regularization (algorithm1)")
        ->check(CLI::PositiveNumber)
        ->each([&opts](const std::string&) { opts.epsilon_given = true; });
    cmd->add_option("--permutations", opts.config.permutations, "HSIC permutation count")
        ->check(CLI::Range(std::uint32_t{99}, std::numeric_limits<std::uint32_t>::max()));
    cmd->add_option("--seed", opts.seed_flag, "RNG seed (also FAIRTRANSPORT_SEED)")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--p-threshold", opts.config.p_threshold, "audit p-value threshold")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--allow-trivial", opts.config.allow_trivial,
                  "proceed even when no sensitive concepts are declared");
}

int run_stage(CliOptions& opts, fairtransport::Stage stage) {
    opts.config.seed = resolve_seed(opts.seed_given, opts.seed_flag);
    if (opts.epsilon_given) opts.config.epsilon = opts.epsilon_flag;

    const fairtransport::PipelineResult result =
        fairtransport::run_pipeline(opts.config, stage, opts.raw);
    fairtransport::write_outputs(opts.config, result, stage);

    switch (stage) {
        case fairtransport::Stage::Compile:
            std::cout << "sensitive concepts: " << result.mask.cols() << "\n"
                      << "atoms: " << result.partition.count() << "\n"
                      << "missing-data warnings: " << result.missing_data_warnings << "\n";
            break;
        case fairtransport::Stage::Project:
            std::cout << "method: " << result.projection.method << "\n"
                      << "reconstruction_error: " << result.projection.reconstruction_error << "\n";
            break;
        case fairtransport::Stage::Audit:
        case fairtransport::Stage::Certify:
            std::cout << (opts.raw ? "audited: raw features\n" : "audited: fair projection\n")
                      << "hsic_statistic: " << result.hsic.statistic << "\n"
                      << "p_value: " << result.hsic.p_value << "\n"
                      << "max_w2_gap_1d: " << result.gaps.max_w2_gap_1d << "\n";
            if (stage == fairtransport::Stage::Certify) {
                std::cout << "certificate: " << (opts.config.out_dir / "cert.json").string() << "\n";
            }
            if (result.hsic.p_value < opts.config.p_threshold) {
                std::cout << "dependence detected: p_value < " << opts.config.p_threshold << "\n";
                return kExitAuditFailure;
            }
            break;
    }
    return kExitOk;
}

int run_verify(const CliOptions& opts) {
    const fairtransport::cert::Certificate certificate =
        fairtransport::cert::parse_certificate(fairtransport::read_file_bytes(opts.cert_path));
    const fairtransport::cert::VerificationReport report = fairtransport::verify_certificate(
        certificate, opts.config.ontology_path, opts.config.binding_path, opts.config.data_path);
    std::cout << (opts.json_output ? report.to_json() + "\n" : report.to_table());
    return report.pass ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "fairtransport: compiles declared sensitive concepts into a bias sigma-algebra over a\n"
        "tabular dataset, builds fair representations by optimal transport, and emits\n"
        "verifiable certificates of independence and reconstruction error."};
    app.require_subcommand(1);

    CliOptions compile_opts, project_opts, audit_opts, certify_opts, verify_opts;

    auto* compile = app.add_subcommand("compile", "build the mask matrix and atom partition");
    add_pipeline_options(compile, compile_opts, true);

    auto* project = app.add_subcommand("project", "construct the fair representation");
    add_pipeline_options(project, project_opts, true);

    auto* audit = app.add_subcommand("audit", "measure residual dependence (HSIC + conditional gaps)");
    add_pipeline_options(audit, audit_opts, true);
    audit->add_flag("--raw", audit_opts.raw, "audit the original features instead of the projection");

    auto* certify = app.add_subcommand("certify", "run the full chain and emit cert.json");
    add_pipeline_options(certify, certify_opts, true);

    auto* verify = app.add_subcommand("verify", "re-run the pipeline and check a certificate");
    verify->add_option("--cert", verify_opts.cert_path, "certificate to verify")->required();
    verify->add_option("--ontology", verify_opts.config.ontology_path, "ontology file")->required();
    verify->add_option("--binding", verify_opts.config.binding_path, "binding config")->required();
    verify->add_option("--data", verify_opts.config.data_path, "dataset")->required();
    verify->add_flag("--json", verify_opts.json_output, "machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (compile->parsed()) return run_stage(compile_opts, fairtransport::Stage::Compile);
        if (project->parsed()) return run_stage(project_opts, fairtransport::Stage::Project);
        if (audit->parsed()) return run_stage(audit_opts, fairtransport::Stage::Audit);
        if (certify->parsed()) return run_stage(certify_opts, fairtransport::Stage::Certify);
        if (verify->parsed()) return run_verify(verify_opts);
    } catch (const fairtransport::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

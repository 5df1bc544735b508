#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fairtransport/audit.hpp"
#include "fairtransport/certificate.hpp"
#include "fairtransport/dataset.hpp"
#include "fairtransport/mask.hpp"
#include "fairtransport/transport.hpp"

namespace fairtransport {

/// Everything a run needs, resolved and explicit. Persisted as run.json next
/// to the outputs so certificates are self-describing; in particular the
/// seed is always concrete by the time a config reaches the pipeline.
struct RunConfig {
    std::filesystem::path ontology_path;
    std::filesystem::path binding_path;
    std::filesystem::path data_path;
    std::filesystem::path out_dir;
    std::string method = "quantile1d";  // "algorithm1" | "quantile1d"
    std::optional<double> epsilon;
    std::uint32_t permutations = 999;
    std::uint64_t seed = 0;
    double p_threshold = 0.05;
    bool allow_trivial = false;
    ExecPolicy exec = ExecPolicy::Parallel;
};

std::string run_config_json(const RunConfig& config);

enum class Stage { Compile, Project, Audit, Certify };

struct PipelineResult {
    onto::Ontology ontology;
    sigma::Dataset dataset;
    onto::FactStore materialized;
    sigma::MaskMatrix mask;
    sigma::AtomPartition partition;
    std::uint64_t missing_data_warnings = 0;

    // Project stage onward.
    Matrix x;
    ot::FairProjection projection;

    // Audit stage onward.
    audit::HsicResult hsic;
    audit::ConditionalGapReport gaps;

    // Certify stage.
    cert::Certificate certificate;
};

/// Runs the stages in order up to `upto`. With `raw_audit` the audit runs on
/// the original features instead of the projection (the projection still
/// runs, since the certificate binds its outputs). `timestamp` overrides
/// the certificate's created_utc, for reproducibility tests.
PipelineResult run_pipeline(const RunConfig& config, Stage upto, bool raw_audit = false,
                            const std::optional<std::string>& timestamp = std::nullopt);

/// Serialized stage outputs (canonical bytes, ready to write).
std::string atoms_json(const sigma::AtomPartition& partition, const sigma::MaskMatrix& mask);
std::string fair_csv(const ot::FairProjection& projection, const std::vector<std::string>& feature_names);
std::string diagnostics_json(const ot::FairProjection& projection);
std::string audit_json(const audit::HsicResult& hsic, const audit::ConditionalGapReport& gaps);

/// Writes every output the completed stages produced into config.out_dir:
/// mask.fmm, atoms.json, run.json, then fair.csv + diagnostics.json,
/// audit.json, cert.json as the stage allows. Creates the directory.
void write_outputs(const RunConfig& config, const PipelineResult& result, Stage upto);

/// The regulator hook: recomputes the input digests, re-runs the pipeline
/// with the certificate's method/epsilon/seed/permutations, and compares
/// digests byte-exactly and results at 1e-9 relative. Overall PASS iff
/// every field matches.
cert::VerificationReport verify_certificate(const cert::Certificate& certificate,
                                            const std::filesystem::path& ontology_path,
                                            const std::filesystem::path& binding_path,
                                            const std::filesystem::path& data_path,
                                            ExecPolicy exec = ExecPolicy::Parallel);

}  // namespace fairtransport

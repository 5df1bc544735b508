#include "fairtransport/pipeline.hpp"

#include <charconv>
#include <cmath>

#include <json.hpp>

#include "fairtransport/csv.hpp"
#include "fairtransport/errors.hpp"
#include "fairtransport/sha256.hpp"

namespace fairtransport {

namespace {

using nlohmann::json;

std::string shortest_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("double formatting failed");
    return std::string(buf, ptr);
}

}  // namespace

std::string run_config_json(const RunConfig& config) {
    json j{
        {"allow_trivial", config.allow_trivial},
        {"binding", config.binding_path.string()},
        {"data", config.data_path.string()},
        {"method", config.method},
        {"ontology", config.ontology_path.string()},
        {"out", config.out_dir.string()},
        {"p_threshold", config.p_threshold},
        {"permutations", config.permutations},
        {"seed", config.seed},
    };
    if (config.epsilon) {
        j["epsilon"] = *config.epsilon;
    } else {
        j["epsilon"] = nullptr;
    }
    return j.dump();
}

PipelineResult run_pipeline(const RunConfig& config, Stage upto, bool raw_audit,
                            const std::optional<std::string>& timestamp) {
    if (config.method != "algorithm1" && config.method != "quantile1d") {
        throw ValidationError("method must be 'algorithm1' or 'quantile1d'");
    }

    PipelineResult result;
    result.ontology = onto::parse_ontology(read_file_bytes(config.ontology_path));
    const sigma::BindingConfig binding = sigma::read_binding_file(config.binding_path);

    sigma::IngestResult ingested = sigma::ingest(config.data_path, binding, result.ontology);
    result.dataset = std::move(ingested.dataset);

    onto::CoverageLog coverage;
    result.materialized = onto::materialize(result.ontology, ingested.facts, &coverage);
    result.missing_data_warnings = ingested.missing_cell_warnings + coverage.missing_data_lookups();

    result.mask = sigma::build_mask(result.ontology, result.materialized, result.dataset, config.exec,
                                    config.allow_trivial);
    result.partition = sigma::atoms(result.mask);
    if (upto == Stage::Compile) return result;

    if (result.dataset.feature_columns.empty()) {
        throw ValidationError("binding config declares no feature_columns; nothing to project");
    }
    result.x = sigma::feature_matrix(result.dataset);
    if (config.method == "quantile1d") {
        result.projection = ot::project_quantile_1d(result.x, result.partition);
    } else {
        ot::SinkhornOptions options;
        options.exec = config.exec;
        result.projection = ot::project_algorithm1(result.x, result.partition, config.epsilon, options);
    }
    if (upto == Stage::Project) return result;

    const Matrix& audited = raw_audit ? result.x : result.projection.y;
    result.hsic = audit::permutation_pvalue(audited, result.partition.atom_of, config.permutations,
                                            config.seed, config.exec);
    result.gaps = audit::conditional_gaps(audited, result.partition);
    if (upto == Stage::Audit) return result;

    cert::Certificate& certificate = result.certificate;
    certificate.created_utc = timestamp.value_or(cert::utc_timestamp_now());
    certificate.ontology_sha256 = sha256_file_hex(config.ontology_path);
    certificate.binding_sha256 = sha256_file_hex(config.binding_path);
    certificate.dataset_sha256 = sha256_file_hex(config.data_path);
    certificate.mask_sha256 = sha256_hex(result.mask.canonical_serialization());
    certificate.method = config.method;
    if (config.method == "algorithm1") {
        certificate.epsilon = result.projection.epsilon_used;
    }
    certificate.reconstruction_error = result.projection.reconstruction_error;
    certificate.hsic = result.hsic;
    certificate.gaps = result.gaps;
    certificate.missing_data_warnings = result.missing_data_warnings;
    return result;
}

std::string atoms_json(const sigma::AtomPartition& partition, const sigma::MaskMatrix& mask) {
    json atoms_array = json::array();
    for (std::size_t g = 0; g < partition.count(); ++g) {
        atoms_array.push_back(json{
            {"id", g},
            {"signature", partition.atom_signatures[g]},
            {"size", partition.atom_sizes[g]},
        });
    }
    return json{
        {"atom_of", partition.atom_of},
        {"atoms", atoms_array},
        {"concepts", mask.concepts},
    }.dump();
}

std::string fair_csv(const ot::FairProjection& projection, const std::vector<std::string>& feature_names) {
    if (feature_names.size() != projection.y.cols) {
        throw ValidationError("feature name count does not match the projection width");
    }
    CsvTable table;
    for (const auto& name : feature_names) table.header.push_back("fair_" + name);
    table.rows.reserve(projection.y.rows);
    for (std::size_t i = 0; i < projection.y.rows; ++i) {
        std::vector<std::string> row;
        row.reserve(projection.y.cols);
        for (std::size_t j = 0; j < projection.y.cols; ++j) {
            row.push_back(shortest_double(projection.y.at(i, j)));
        }
        table.rows.push_back(std::move(row));
    }
    return write_csv(table);
}

std::string diagnostics_json(const ot::FairProjection& projection) {
    json per_atom_means = json::array();
    for (const auto& summary : projection.per_atom_summary) per_atom_means.push_back(summary.mean);
    json j{
        {"iterations", projection.plan ? projection.plan->iterations : 0},
        {"marginal_residual", projection.plan ? projection.plan->marginal_residual : 0.0},
        {"method", projection.method},
        {"per_atom_means", per_atom_means},
        {"reconstruction_error", projection.reconstruction_error},
    };
    if (projection.method == "algorithm1") {
        j["epsilon"] = projection.epsilon_used;
    } else {
        j["epsilon"] = nullptr;
        j["grid_levels"] = projection.grid_levels;
        j["independence_slack"] = projection.independence_slack;
    }
    return j.dump();
}

std::string audit_json(const audit::HsicResult& hsic, const audit::ConditionalGapReport& gaps) {
    return json{
        {"gaps",
         json{
             {"max_mean_gap", gaps.max_mean_gap},
             {"max_w2_gap_1d", gaps.max_w2_gap_1d},
         }},
        {"hsic",
         json{
             {"kernel_bandwidth_y", hsic.kernel_bandwidth_y},
             {"p_value", hsic.p_value},
             {"permutations", hsic.permutations},
             {"seed", hsic.seed},
             {"statistic", hsic.statistic},
         }},
        {"vacuous", hsic.vacuous},
    }.dump();
}

void write_outputs(const RunConfig& config, const PipelineResult& result, Stage upto) {
    std::filesystem::create_directories(config.out_dir);
    write_file_bytes(config.out_dir / "run.json", run_config_json(config) + "\n");
    write_file_bytes(config.out_dir / "mask.fmm", result.mask.canonical_serialization());
    write_file_bytes(config.out_dir / "atoms.json", atoms_json(result.partition, result.mask) + "\n");
    if (upto == Stage::Compile) return;
    write_file_bytes(config.out_dir / "fair.csv",
                     fair_csv(result.projection, result.dataset.feature_columns));
    write_file_bytes(config.out_dir / "diagnostics.json", diagnostics_json(result.projection) + "\n");
    if (upto == Stage::Project) return;
    write_file_bytes(config.out_dir / "audit.json", audit_json(result.hsic, result.gaps) + "\n");
    if (upto == Stage::Audit) return;
    write_file_bytes(config.out_dir / "cert.json", cert::to_canonical_json(result.certificate) + "\n");
}

namespace {

bool close_relative(double a, double b, double tol) {
    if (a == b) return true;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= tol * scale;
}

}  // namespace

cert::VerificationReport verify_certificate(const cert::Certificate& certificate,
                                            const std::filesystem::path& ontology_path,
                                            const std::filesystem::path& binding_path,
                                            const std::filesystem::path& data_path, ExecPolicy exec) {
    cert::VerificationReport report;
    const auto digest_field = [&](const std::string& name, const std::string& expected,
                                  const std::filesystem::path& path) {
        cert::VerificationField field;
        field.name = name;
        field.expected = expected;
        try {
            field.recomputed = sha256_file_hex(path);
            field.status = field.recomputed == expected ? cert::FieldStatus::Match : cert::FieldStatus::Mismatch;
        } catch (const Error& e) {
            field.recomputed = e.what();
            field.status = cert::FieldStatus::Error;
        }
        report.fields.push_back(std::move(field));
    };
    digest_field("ontology_sha256", certificate.ontology_sha256, ontology_path);
    digest_field("binding_sha256", certificate.binding_sha256, binding_path);
    digest_field("dataset_sha256", certificate.dataset_sha256, data_path);

    RunConfig config;
    config.ontology_path = ontology_path;
    config.binding_path = binding_path;
    config.data_path = data_path;
    config.method = certificate.method;
    config.epsilon = certificate.epsilon;
    config.permutations = certificate.hsic.permutations;
    config.seed = certificate.hsic.seed;
    config.allow_trivial = true;  // the mask digest comparison still catches drift
    config.exec = exec;

    cert::VerificationField mask_field{"mask_sha256", cert::FieldStatus::Error, certificate.mask_sha256, ""};
    cert::VerificationField recon_field{"reconstruction_error", cert::FieldStatus::Error,
                                        shortest_double(certificate.reconstruction_error), ""};
    cert::VerificationField hsic_field{"hsic_statistic", cert::FieldStatus::Error,
                                       shortest_double(certificate.hsic.statistic), ""};
    try {
        const PipelineResult rerun = run_pipeline(config, Stage::Audit);
        mask_field.recomputed = sha256_hex(rerun.mask.canonical_serialization());
        mask_field.status = mask_field.recomputed == certificate.mask_sha256 ? cert::FieldStatus::Match
                                                                             : cert::FieldStatus::Mismatch;
        recon_field.recomputed = shortest_double(rerun.projection.reconstruction_error);
        recon_field.status =
            close_relative(rerun.projection.reconstruction_error, certificate.reconstruction_error, 1e-9)
                ? cert::FieldStatus::Match
                : cert::FieldStatus::Mismatch;
        hsic_field.recomputed = shortest_double(rerun.hsic.statistic);
        hsic_field.status = close_relative(rerun.hsic.statistic, certificate.hsic.statistic, 1e-9)
                                ? cert::FieldStatus::Match
                                : cert::FieldStatus::Mismatch;
    } catch (const std::exception& e) {
        const std::string reason = std::string("recompute failed: ") + e.what();
        if (mask_field.recomputed.empty()) mask_field.recomputed = reason;
        if (recon_field.recomputed.empty()) recon_field.recomputed = reason;
        if (hsic_field.recomputed.empty()) hsic_field.recomputed = reason;
    }
    report.fields.push_back(std::move(mask_field));
    report.fields.push_back(std::move(recon_field));
    report.fields.push_back(std::move(hsic_field));

    report.pass = true;
    for (const auto& field : report.fields) {
        if (field.status != cert::FieldStatus::Match) report.pass = false;
    }
    return report;
}

}  // namespace fairtransport

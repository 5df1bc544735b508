#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "fairtransport/audit.hpp"

namespace fairtransport::cert {

/// Tamper-evident record binding the pipeline's inputs (by SHA-256 over raw
/// bytes), the canonical mask serialization, and the audited results. The
/// serialization is canonical JSON: keys sorted, no insignificant
/// whitespace, numbers in shortest round-trip form.
struct Certificate {
    std::string schema_version = "1";
    std::string context = "https://fairtransport.dev/certificate/v1";
    std::string created_utc;  // RFC-3339, excluded from verification

    std::string ontology_sha256;
    std::string binding_sha256;
    std::string dataset_sha256;
    std::string mask_sha256;

    std::string method;  // "algorithm1" | "quantile1d"
    std::optional<double> epsilon;
    double reconstruction_error = 0.0;
    audit::HsicResult hsic;
    audit::ConditionalGapReport gaps;
    std::uint64_t missing_data_warnings = 0;
};

std::string to_canonical_json(const Certificate& certificate);

/// Parses and schema-checks a certificate: digest fields must be 64
/// lowercase hex chars, method must be known, all fields present with the
/// right types. Throws ValidationError on any violation.
Certificate parse_certificate(std::string_view json_text);

/// RFC-3339 UTC timestamp for "now".
std::string utc_timestamp_now();

enum class FieldStatus { Match, Mismatch, Error };

struct VerificationField {
    std::string name;
    FieldStatus status = FieldStatus::Error;
    std::string expected;
    std::string recomputed;
};

struct VerificationReport {
    std::vector<VerificationField> fields;
    bool pass = false;

    std::string to_json() const;
    std::string to_table() const;
};

}  // namespace fairtransport::cert

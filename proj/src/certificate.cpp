#include "fairtransport/certificate.hpp"

#include <cctype>
#include <chrono>
#include <ctime>

#include <json.hpp>

#include "fairtransport/errors.hpp"

namespace fairtransport::cert {

namespace {

using nlohmann::json;

bool is_hex_digest(const std::string& s) {
    if (s.size() != 64) return false;
    for (const char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)) && !(c >= 'a' && c <= 'f')) return false;
    }
    return true;
}

json hsic_to_json(const audit::HsicResult& hsic) {
    return json{
        {"kernel_bandwidth_y", hsic.kernel_bandwidth_y},
        {"p_value", hsic.p_value},
        {"permutations", hsic.permutations},
        {"seed", hsic.seed},
        {"statistic", hsic.statistic},
    };
}

json gaps_to_json(const audit::ConditionalGapReport& gaps) {
    return json{
        {"max_mean_gap", gaps.max_mean_gap},
        {"max_w2_gap_1d", gaps.max_w2_gap_1d},
    };
}

}  // namespace

std::string to_canonical_json(const Certificate& c) {
    json j{
        {"binding_sha256", c.binding_sha256},
        {"context", c.context},
        {"created_utc", c.created_utc},
        {"dataset_sha256", c.dataset_sha256},
        {"gaps", gaps_to_json(c.gaps)},
        {"hsic", hsic_to_json(c.hsic)},
        {"mask_sha256", c.mask_sha256},
        {"method", c.method},
        {"missing_data_warnings", c.missing_data_warnings},
        {"ontology_sha256", c.ontology_sha256},
        {"reconstruction_error", c.reconstruction_error},
        {"schema_version", c.schema_version},
    };
    if (c.epsilon) {
        j["epsilon"] = *c.epsilon;
    } else {
        j["epsilon"] = nullptr;
    }
    return j.dump();
}

Certificate parse_certificate(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("certificate is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("certificate must be a JSON object");

    const auto str = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) {
            throw ValidationError(std::string("certificate: missing string field '") + key + "'");
        }
        return j[key].get<std::string>();
    };
    const auto num = [](const json& obj, const char* key) -> double {
        if (!obj.contains(key) || !obj[key].is_number()) {
            throw ValidationError(std::string("certificate: missing numeric field '") + key + "'");
        }
        return obj[key].get<double>();
    };

    Certificate c;
    c.schema_version = str("schema_version");
    if (c.schema_version != "1") throw ValidationError("unsupported certificate schema_version");
    c.context = str("context");
    c.created_utc = str("created_utc");
    c.ontology_sha256 = str("ontology_sha256");
    c.binding_sha256 = str("binding_sha256");
    c.dataset_sha256 = str("dataset_sha256");
    c.mask_sha256 = str("mask_sha256");
    for (const auto* digest : {&c.ontology_sha256, &c.binding_sha256, &c.dataset_sha256, &c.mask_sha256}) {
        if (!is_hex_digest(*digest)) {
            throw ValidationError("certificate digest is not 64 lowercase hex characters: '" + *digest + "'");
        }
    }
    c.method = str("method");
    if (c.method != "algorithm1" && c.method != "quantile1d") {
        throw ValidationError("certificate method must be 'algorithm1' or 'quantile1d'");
    }
    if (!j.contains("epsilon") || (!j["epsilon"].is_null() && !j["epsilon"].is_number())) {
        throw ValidationError("certificate: epsilon must be a number or null");
    }
    if (j["epsilon"].is_number()) c.epsilon = j["epsilon"].get<double>();
    c.reconstruction_error = num(j, "reconstruction_error");
    if (!j.contains("missing_data_warnings") || !j["missing_data_warnings"].is_number_unsigned()) {
        throw ValidationError("certificate: missing_data_warnings must be a nonnegative integer");
    }
    c.missing_data_warnings = j["missing_data_warnings"].get<std::uint64_t>();

    if (!j.contains("hsic") || !j["hsic"].is_object()) throw ValidationError("certificate: missing hsic object");
    const json& h = j["hsic"];
    c.hsic.statistic = num(h, "statistic");
    c.hsic.p_value = num(h, "p_value");
    if (!h.contains("permutations") || !h["permutations"].is_number_unsigned()) {
        throw ValidationError("certificate: hsic.permutations must be a nonnegative integer");
    }
    c.hsic.permutations = h["permutations"].get<std::uint32_t>();
    if (!h.contains("seed") || !h["seed"].is_number_unsigned()) {
        throw ValidationError("certificate: hsic.seed must be a nonnegative integer");
    }
    c.hsic.seed = h["seed"].get<std::uint64_t>();
    c.hsic.kernel_bandwidth_y = num(h, "kernel_bandwidth_y");

    if (!j.contains("gaps") || !j["gaps"].is_object()) throw ValidationError("certificate: missing gaps object");
    c.gaps.max_mean_gap = num(j["gaps"], "max_mean_gap");
    c.gaps.max_w2_gap_1d = num(j["gaps"], "max_w2_gap_1d");
    return c;
}

std::string utc_timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string VerificationReport::to_json() const {
    json fields_json = json::array();
    for (const auto& field : fields) {
        const char* status = field.status == FieldStatus::Match      ? "MATCH"
                             : field.status == FieldStatus::Mismatch ? "MISMATCH"
                                                                     : "ERROR";
        fields_json.push_back(json{
            {"expected", field.expected},
            {"name", field.name},
            {"recomputed", field.recomputed},
            {"status", status},
        });
    }
    return json{{"fields", fields_json}, {"pass", pass}}.dump();
}

std::string VerificationReport::to_table() const {
    std::size_t name_width = 4;
    for (const auto& field : fields) name_width = std::max(name_width, field.name.size());
    std::string out;
    for (const auto& field : fields) {
        const char* status = field.status == FieldStatus::Match      ? "MATCH   "
                             : field.status == FieldStatus::Mismatch ? "MISMATCH"
                                                                     : "ERROR   ";
        out += field.name;
        out.append(name_width - field.name.size() + 2, ' ');
        out += status;
        if (field.status != FieldStatus::Match) {
            out += "  expected=" + field.expected + " recomputed=" + field.recomputed;
        }
        out.push_back('\n');
    }
    out += pass ? "PASS\n" : "FAIL\n";
    return out;
}

}  // namespace fairtransport::cert

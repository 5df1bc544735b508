#include "fairtransport/dataset.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

#include "fairtransport/csv.hpp"
#include "fairtransport/errors.hpp"
#include "fairtransport/sha256.hpp"

namespace fairtransport::sigma {

namespace {

using nlohmann::json;

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw ValidationError(std::string("binding config: missing string field '") + key + "'");
    }
    return j[key].get<std::string>();
}

}  // namespace

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < column_names.size(); ++i) {
        if (column_names[i] == name) return i;
    }
    return std::nullopt;
}

BindingConfig parse_binding(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("binding config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("binding config must be a JSON object");

    BindingConfig config;
    if (j.contains("individual_column") && !j["individual_column"].is_null()) {
        if (!j["individual_column"].is_string()) {
            throw ValidationError("binding config: individual_column must be a string or null");
        }
        config.individual_column = j["individual_column"].get<std::string>();
    }
    if (j.contains("role_bindings")) {
        for (const auto& rb : j["role_bindings"]) {
            config.role_bindings.push_back(RoleBinding{
                require_string(rb, "column"),
                require_string(rb, "role"),
                rb.contains("object_prefix") ? require_string(rb, "object_prefix") : "",
            });
        }
    }
    if (j.contains("data_bindings")) {
        for (const auto& db : j["data_bindings"]) {
            DataBinding binding{
                require_string(db, "column"),
                require_string(db, "property"),
                db.contains("target") ? require_string(db, "target") : "row",
            };
            if (binding.target != "row" && binding.target.rfind("role_object:", 0) != 0) {
                throw ValidationError("binding config: data binding target must be 'row' or 'role_object:<role>'");
            }
            config.data_bindings.push_back(std::move(binding));
        }
    }
    if (j.contains("feature_columns")) {
        for (const auto& fc : j["feature_columns"]) {
            if (!fc.is_string()) throw ValidationError("binding config: feature_columns must be strings");
            config.feature_columns.push_back(fc.get<std::string>());
        }
    }
    return config;
}

BindingConfig read_binding_file(const std::filesystem::path& path) {
    return parse_binding(read_file_bytes(path));
}

IngestResult ingest_text(std::string_view csv_text, const BindingConfig& binding,
                         const onto::Ontology& ontology) {
    const CsvTable table = parse_csv(csv_text);
    if (table.rows.empty()) throw ValidationError("dataset has no rows");

    IngestResult result;
    Dataset& ds = result.dataset;
    ds.column_names = table.header;
    ds.column_types.assign(table.header.size(), ColumnType::Categorical);
    ds.feature_columns = binding.feature_columns;
    ds.cells = table.rows;

    const auto column_index_or_throw = [&](const std::string& name, const char* use) {
        const auto idx = ds.column_index(name);
        if (!idx) throw ValidationError(std::string("unknown column '") + name + "' in " + use);
        return *idx;
    };

    // Validate bindings against the ontology vocabulary up front.
    for (const auto& rb : binding.role_bindings) {
        if (ontology.roles.count(rb.role) == 0) {
            throw ValidationError("binding references undeclared role '" + rb.role + "'");
        }
        column_index_or_throw(rb.column, "role binding");
    }
    std::set<std::string> bound_roles;
    for (const auto& rb : binding.role_bindings) bound_roles.insert(rb.role);
    for (const auto& db : binding.data_bindings) {
        if (ontology.data_properties.count(db.property) == 0) {
            throw ValidationError("binding references undeclared data property '" + db.property + "'");
        }
        column_index_or_throw(db.column, "data binding");
        if (db.target.rfind("role_object:", 0) == 0) {
            const std::string role = db.target.substr(std::string("role_object:").size());
            if (bound_roles.count(role) == 0) {
                throw ValidationError("data binding target role '" + role + "' has no role binding");
            }
        }
    }
    for (const auto& fc : binding.feature_columns) {
        ds.column_types[column_index_or_throw(fc, "feature_columns")] = ColumnType::NumericDecimal;
    }
    for (const auto& db : binding.data_bindings) {
        ds.column_types[column_index_or_throw(db.column, "data binding")] = ColumnType::NumericDecimal;
    }

    // Row individuals.
    std::optional<std::size_t> id_col;
    if (!binding.individual_column.empty()) {
        id_col = column_index_or_throw(binding.individual_column, "individual_column");
    }
    std::set<std::string> seen_ids;
    ds.row_ids.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        std::string id = id_col ? table.rows[i][*id_col] : "row" + std::to_string(i + 1);
        if (id.empty()) throw ValidationError("row " + std::to_string(i + 1) + " has an empty individual id");
        if (!seen_ids.insert(id).second) {
            throw ValidationError("duplicate row id '" + id + "'");
        }
        ds.row_ids.push_back(std::move(id));
    }

    // Role facts, then data facts (which may attach to role objects).
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string& subject = ds.row_ids[i];
        for (const auto& rb : binding.role_bindings) {
            const std::string& cell = row[*ds.column_index(rb.column)];
            if (cell.empty()) {
                ++result.missing_cell_warnings;
                continue;
            }
            result.facts.add_role(rb.role, subject, rb.object_prefix + cell);
        }
        for (const auto& db : binding.data_bindings) {
            const std::string& cell = row[*ds.column_index(db.column)];
            if (cell.empty()) {
                ++result.missing_cell_warnings;
                continue;
            }
            Decimal value;
            try {
                value = Decimal::parse(cell);
            } catch (const ValidationError&) {
                throw ValidationError("row " + std::to_string(i + 1) + ", column '" + db.column +
                                      "': non-numeric value '" + cell + "'");
            }
            if (db.target == "row") {
                result.facts.add_data(db.property, subject, value);
            } else {
                const std::string role = db.target.substr(std::string("role_object:").size());
                const auto objects = result.facts.role_objects(role, subject);
                if (objects.empty()) {
                    ++result.missing_cell_warnings;  // no object to attach to
                    continue;
                }
                for (const auto& object : objects) {
                    result.facts.add_data(db.property, object, value);
                }
            }
        }
    }

    onto::validate_against(ontology, result.facts);
    return result;
}

IngestResult ingest(const std::filesystem::path& csv_path, const BindingConfig& binding,
                    const onto::Ontology& ontology) {
    return ingest_text(read_file_bytes(csv_path), binding, ontology);
}

Matrix feature_matrix(const Dataset& dataset) {
    const std::size_t n = dataset.rows();
    const std::size_t d = dataset.feature_columns.size();
    Matrix x(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        const auto idx = dataset.column_index(dataset.feature_columns[j]);
        if (!idx) throw ValidationError("unknown feature column '" + dataset.feature_columns[j] + "'");
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& cell = dataset.cells[i][*idx];
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
                throw ValidationError("row " + std::to_string(i + 1) + ", feature column '" +
                                      dataset.feature_columns[j] + "': non-numeric value '" + cell + "'");
            }
            x.at(i, j) = value;
        }
    }
    return x;
}

}  // namespace fairtransport::sigma

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairtransport/factstore.hpp"
#include "fairtransport/matrix.hpp"
#include "fairtransport/ontology.hpp"

namespace fairtransport::sigma {

enum class ColumnType { Categorical, NumericDecimal };

/// Tabular sample space: one individual per row.
struct Dataset {
    std::vector<std::string> row_ids;
    std::vector<std::string> column_names;
    std::vector<ColumnType> column_types;
    std::vector<std::vector<std::string>> cells;  // row-major raw text
    std::vector<std::string> feature_columns;

    std::size_t rows() const { return row_ids.size(); }
    std::optional<std::size_t> column_index(std::string_view name) const;
};

struct RoleBinding {
    std::string column;
    std::string role;
    std::string object_prefix;  // object id = prefix + cell value
};

struct DataBinding {
    std::string column;
    std::string property;
    std::string target;  // "row" or "role_object:<role>"
};

/// Column-to-ontology wiring, read from a JSON document:
///   {"individual_column": "id" | null,
///    "role_bindings": [{"column","role","object_prefix"}],
///    "data_bindings": [{"column","property","target"}],
///    "feature_columns": ["x1", ...]}
struct BindingConfig {
    std::string individual_column;  // empty = synthetic row<i>
    std::vector<RoleBinding> role_bindings;
    std::vector<DataBinding> data_bindings;
    std::vector<std::string> feature_columns;
};

BindingConfig parse_binding(std::string_view json_text);
BindingConfig read_binding_file(const std::filesystem::path& path);

struct IngestResult {
    Dataset dataset;
    onto::FactStore facts;
    std::uint64_t missing_cell_warnings = 0;
};

/// Reads the CSV, names each row's individual, and populates role/data facts
/// per the binding. Empty optional cells emit no fact and count as warnings.
/// Deterministic for identical file bytes.
IngestResult ingest(const std::filesystem::path& csv_path, const BindingConfig& binding,
                    const onto::Ontology& ontology);
IngestResult ingest_text(std::string_view csv_text, const BindingConfig& binding,
                         const onto::Ontology& ontology);

/// N x d matrix of the dataset's feature columns. Every feature cell must
/// parse as a finite double; there is no imputation path.
Matrix feature_matrix(const Dataset& dataset);

}  // namespace fairtransport::sigma

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fairtransport/dataset.hpp"
#include "fairtransport/factstore.hpp"
#include "fairtransport/matrix.hpp"
#include "fairtransport/ontology.hpp"

namespace fairtransport::sigma {

/// N x k binary membership matrix: bit(i, j) = 1 iff row i's individual is
/// entailed to belong to the j-th sensitive concept. Columns are the
/// sensitive concept names in lexicographic order.
struct MaskMatrix {
    std::vector<std::string> concepts;  // k names, lexicographic
    std::vector<std::string> row_ids;   // N
    std::vector<std::uint8_t> bits;     // row-major N*k, values 0/1

    std::size_t rows() const { return row_ids.size(); }
    std::size_t cols() const { return concepts.size(); }
    std::uint8_t bit(std::size_t i, std::size_t j) const { return bits[i * concepts.size() + j]; }

    std::string signature(std::size_t i) const;  // k chars of '0'/'1'

    /// Hash-stable text form: header of comma-separated concept names, then
    /// one '0'/'1' signature line per row, every line LF-terminated.
    std::string canonical_serialization() const;
};

/// One materialization pass has already run; this is O(N * k) lookups.
/// Rows may be evaluated in parallel; output is identical either way.
/// Zero sensitive concepts is an error unless `allow_trivial` is set.
MaskMatrix build_mask(const onto::Ontology& ontology, const onto::FactStore& materialized,
                      const Dataset& dataset, ExecPolicy exec = ExecPolicy::Parallel,
                      bool allow_trivial = false);

/// Equivalence classes of rows under the joint signature map. Atom ids are
/// assigned by lexicographic order of signature, so the partition is
/// canonical across row shuffles of the same multiset.
struct AtomPartition {
    std::vector<std::uint32_t> atom_of;        // length N
    std::vector<std::string> atom_signatures;  // sorted lexicographically
    std::vector<std::uint32_t> atom_sizes;

    std::size_t count() const { return atom_signatures.size(); }
    std::size_t rows() const { return atom_of.size(); }

    /// Row indices per atom, ascending within each atom.
    std::vector<std::vector<std::uint32_t>> members() const;
};

AtomPartition atoms(const MaskMatrix& mask);

/// Boolean combination of generator (mask column) events.
struct EventExpr {
    enum class Kind { Generator, Not, And, Or };
    Kind kind = Kind::Generator;
    std::size_t generator = 0;
    std::vector<EventExpr> children;

    static EventExpr generator_event(std::size_t index);
    static EventExpr negation(EventExpr e);
    static EventExpr conjunction(EventExpr a, EventExpr b);
    static EventExpr disjunction(EventExpr a, EventExpr b);
};

/// Grammar: or := and ('|' and)*; and := unary ('&' unary)*;
/// unary := '!' unary | INDEX | '(' or ')'. Indices are 0-based generator
/// columns and must be < k.
EventExpr parse_event_expr(std::string_view text, std::size_t k);

/// Rows in the event, ascending. Always a union of atoms.
std::vector<std::uint32_t> event_membership(const EventExpr& expr, const AtomPartition& partition,
                                            const MaskMatrix& mask);

}  // namespace fairtransport::sigma

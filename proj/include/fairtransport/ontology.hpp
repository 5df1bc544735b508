#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fairtransport/decimal.hpp"

namespace fairtransport::onto {

enum class Cmp { Lt, Le, Gt, Ge, Eq };

std::string_view cmp_token(Cmp c);
bool cmp_holds(Cmp c, const Decimal& value, const Decimal& threshold);

/// Left-hand side of a subsumption axiom. The restricted profile admits
/// atomic concepts, existential restrictions over a nominal or a concept,
/// exact-decimal data thresholds, and flat conjunctions of the above.
struct ConceptExpr {
    enum class Kind { Atomic, ExistsNominal, ExistsConcept, DataThreshold, Conjunction };

    Kind kind = Kind::Atomic;
    std::string name;    // Atomic: concept; Exists*: role; DataThreshold: data property
    std::string object;  // ExistsNominal: individual; ExistsConcept: concept
    Cmp cmp = Cmp::Lt;
    Decimal threshold;
    std::vector<ConceptExpr> conjuncts;  // Conjunction only; flat, canonically ordered, size >= 2

    static ConceptExpr atomic(std::string concept_name);
    static ConceptExpr exists_nominal(std::string role, std::string individual);
    static ConceptExpr exists_concept(std::string role, std::string concept_name);
    static ConceptExpr data_threshold(std::string property, Cmp cmp, Decimal threshold);
    static ConceptExpr conjunction(std::vector<ConceptExpr> conjuncts);

    std::string to_string() const;

    friend bool operator==(const ConceptExpr& a, const ConceptExpr& b);
};

/// C_lhs ⊑ rhs with rhs restricted to an atomic concept name.
struct Axiom {
    ConceptExpr lhs;
    std::string rhs;

    friend bool operator==(const Axiom& a, const Axiom& b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
};

struct Ontology {
    std::set<std::string> concepts;
    std::set<std::string> roles;
    std::set<std::string> data_properties;
    std::set<std::string> individuals;  // nominals declared for use in axioms
    std::vector<Axiom> tbox;
    std::set<std::string> sensitive_markers;  // subset of concepts

    friend bool operator==(const Ontology& a, const Ontology& b);
};

/// Parses the line-oriented ontology text format:
///
///   # comment
///   concept Name.
///   sensitive concept Name.
///   role name.
///   data name.
///   individual Name.
///   axiom <expr> => ConceptName.
///
/// where <expr> is a conjunction ("and") of atomic concepts,
/// exists(role, {Individual}), exists(role, Concept), and
/// property < | <= | > | >= | = number.
///
/// Declarations may appear in any order relative to the axioms that use
/// them. Throws ParseError (syntax) or ValidationError (undeclared or
/// duplicate names, non-atomic right-hand side).
Ontology parse_ontology(std::string_view source);

/// Canonical text form: declarations sorted lexicographically within kind,
/// axioms in source order, conjuncts in canonical order. parse(print(O))
/// is structurally equal to O.
std::string print_ontology(const Ontology& ontology);

}  // namespace fairtransport::onto

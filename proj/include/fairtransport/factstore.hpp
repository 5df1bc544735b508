#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairtransport/decimal.hpp"
#include "fairtransport/ontology.hpp"

namespace fairtransport::onto {

/// Records data-value lookups that failed during entailment. Missing values
/// make thresholds evaluate false; the distinct (property, individual)
/// count surfaces in certificates so auditors can see how much of the
/// policy ran blind.
struct CoverageLog {
    std::set<std::pair<std::string, std::string>> missing;

    std::uint64_t missing_data_lookups() const { return missing.size(); }
};

/// Assertional facts: concept memberships, role edges, exact-decimal data
/// values. Set-backed, so iteration is canonical (lexicographic) and
/// serialization is byte-stable.
class FactStore {
public:
    using ConceptFact = std::pair<std::string, std::string>;          // (concept, individual)
    using RoleFact = std::array<std::string, 3>;                      // (role, subject, object)
    using DataKey = std::pair<std::string, std::string>;              // (property, individual)

    void add_concept(const std::string& concept_name, const std::string& individual);
    void add_role(const std::string& role, const std::string& subject, const std::string& object);
    /// A second differing value for the same (property, individual) is an input error.
    void add_data(const std::string& property, const std::string& individual, const Decimal& value);

    bool has_concept(const std::string& concept_name, const std::string& individual) const;
    bool has_role(const std::string& role, const std::string& subject, const std::string& object) const;
    const Decimal* data_value(const std::string& property, const std::string& individual) const;

    /// Objects b with (role, subject, b) present, in canonical order.
    std::vector<std::string> role_objects(const std::string& role, const std::string& subject) const;

    const std::set<ConceptFact>& concept_facts() const { return concept_facts_; }
    const std::set<RoleFact>& role_facts() const { return role_facts_; }
    const std::map<DataKey, Decimal>& data_facts() const { return data_facts_; }

    /// Every individual mentioned in any fact position, canonical order.
    std::set<std::string> individuals() const;

    std::size_t size() const {
        return concept_facts_.size() + role_facts_.size() + data_facts_.size();
    }

    /// Line-oriented canonical text: one fact per line, each section sorted.
    std::string canonical_serialization() const;

    friend bool operator==(const FactStore& a, const FactStore& b) {
        return a.concept_facts_ == b.concept_facts_ && a.role_facts_ == b.role_facts_ &&
               a.data_facts_ == b.data_facts_;
    }

private:
    std::set<ConceptFact> concept_facts_;
    std::set<RoleFact> role_facts_;
    std::map<DataKey, Decimal> data_facts_;
};

/// Membership of `individual` in `expr` under the minimal (materialized)
/// interpretation. A missing data value makes a threshold false and bumps
/// the coverage log when one is supplied.
bool satisfies(const ConceptExpr& expr, const std::string& individual, const FactStore& facts,
               CoverageLog* log = nullptr);

/// Least fixpoint of `facts` under the TBox: repeatedly adds rhs(x) whenever
/// lhs holds of x, until no axiom fires. Idempotent and monotone; terminates
/// after at most |concepts| * |individuals| additions.
FactStore materialize(const Ontology& ontology, const FactStore& facts, CoverageLog* log = nullptr);

/// All individuals entailed to belong to `concept`, canonical order.
/// Expects a materialized store. Throws ValidationError on unknown concept.
std::vector<std::string> extension(const std::string& concept_name, const Ontology& ontology,
                                   const FactStore& materialized);

/// Checks every concept/role/property name used by `facts` is declared.
void validate_against(const Ontology& ontology, const FactStore& facts);

}  // namespace fairtransport::onto

#include "fairtransport/factstore.hpp"

#include "fairtransport/errors.hpp"

namespace fairtransport::onto {

void FactStore::add_concept(const std::string& concept_name, const std::string& individual) {
    concept_facts_.emplace(concept_name, individual);
}

void FactStore::add_role(const std::string& role, const std::string& subject, const std::string& object) {
    role_facts_.insert(RoleFact{role, subject, object});
}

void FactStore::add_data(const std::string& property, const std::string& individual, const Decimal& value) {
    const auto [it, inserted] = data_facts_.emplace(DataKey{property, individual}, value);
    if (!inserted && it->second != value) {
        throw ValidationError("conflicting data assertions for " + property + "(" + individual + "): " +
                              it->second.to_string() + " vs " + value.to_string());
    }
}

bool FactStore::has_concept(const std::string& concept_name, const std::string& individual) const {
    return concept_facts_.count(ConceptFact{concept_name, individual}) > 0;
}

bool FactStore::has_role(const std::string& role, const std::string& subject, const std::string& object) const {
    return role_facts_.count(RoleFact{role, subject, object}) > 0;
}

const Decimal* FactStore::data_value(const std::string& property, const std::string& individual) const {
    const auto it = data_facts_.find(DataKey{property, individual});
    return it == data_facts_.end() ? nullptr : &it->second;
}

std::vector<std::string> FactStore::role_objects(const std::string& role, const std::string& subject) const {
    std::vector<std::string> out;
    const auto lo = role_facts_.lower_bound(RoleFact{role, subject, ""});
    for (auto it = lo; it != role_facts_.end() && (*it)[0] == role && (*it)[1] == subject; ++it) {
        out.push_back((*it)[2]);
    }
    return out;
}

std::set<std::string> FactStore::individuals() const {
    std::set<std::string> out;
    for (const auto& [concept_name, individual] : concept_facts_) out.insert(individual);
    for (const auto& fact : role_facts_) {
        out.insert(fact[1]);
        out.insert(fact[2]);
    }
    for (const auto& [key, value] : data_facts_) out.insert(key.second);
    return out;
}

std::string FactStore::canonical_serialization() const {
    std::string out;
    for (const auto& [concept_name, individual] : concept_facts_) {
        out += "concept\t" + concept_name + "\t" + individual + "\n";
    }
    for (const auto& fact : role_facts_) {
        out += "role\t" + fact[0] + "\t" + fact[1] + "\t" + fact[2] + "\n";
    }
    for (const auto& [key, value] : data_facts_) {
        out += "data\t" + key.first + "\t" + key.second + "\t" + value.to_string() + "\n";
    }
    return out;
}

bool satisfies(const ConceptExpr& expr, const std::string& individual, const FactStore& facts,
               CoverageLog* log) {
    switch (expr.kind) {
        case ConceptExpr::Kind::Atomic:
            return facts.has_concept(expr.name, individual);
        case ConceptExpr::Kind::ExistsNominal:
            return facts.has_role(expr.name, individual, expr.object);
        case ConceptExpr::Kind::ExistsConcept: {
            for (const auto& object : facts.role_objects(expr.name, individual)) {
                if (facts.has_concept(expr.object, object)) return true;
            }
            return false;
        }
        case ConceptExpr::Kind::DataThreshold: {
            const Decimal* value = facts.data_value(expr.name, individual);
            if (value == nullptr) {
                if (log != nullptr) log->missing.emplace(expr.name, individual);
                return false;
            }
            return cmp_holds(expr.cmp, *value, expr.threshold);
        }
        case ConceptExpr::Kind::Conjunction: {
            for (const auto& conjunct : expr.conjuncts) {
                if (!satisfies(conjunct, individual, facts, log)) return false;
            }
            return true;
        }
    }
    return false;
}

FactStore materialize(const Ontology& ontology, const FactStore& facts, CoverageLog* log) {
    FactStore result = facts;
    std::set<std::string> universe = facts.individuals();
    universe.insert(ontology.individuals.begin(), ontology.individuals.end());

    // Naive fixpoint: rescan every axiom against every individual until a
    // full sweep adds nothing. Bounded by |concepts| * |universe| additions.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& axiom : ontology.tbox) {
            for (const auto& individual : universe) {
                if (result.has_concept(axiom.rhs, individual)) continue;
                if (satisfies(axiom.lhs, individual, result, log)) {
                    result.add_concept(axiom.rhs, individual);
                    changed = true;
                }
            }
        }
    }
    return result;
}

std::vector<std::string> extension(const std::string& concept_name, const Ontology& ontology,
                                   const FactStore& materialized) {
    if (ontology.concepts.count(concept_name) == 0) {
        throw ValidationError("unknown concept '" + concept_name + "'");
    }
    std::vector<std::string> out;
    const auto lo = materialized.concept_facts().lower_bound({concept_name, ""});
    for (auto it = lo; it != materialized.concept_facts().end() && it->first == concept_name; ++it) {
        out.push_back(it->second);
    }
    return out;
}

void validate_against(const Ontology& ontology, const FactStore& facts) {
    for (const auto& [concept_name, individual] : facts.concept_facts()) {
        if (ontology.concepts.count(concept_name) == 0) {
            throw ValidationError("fact uses undeclared concept '" + concept_name + "'");
        }
    }
    for (const auto& fact : facts.role_facts()) {
        if (ontology.roles.count(fact[0]) == 0) {
            throw ValidationError("fact uses undeclared role '" + fact[0] + "'");
        }
    }
    for (const auto& [key, value] : facts.data_facts()) {
        if (ontology.data_properties.count(key.first) == 0) {
            throw ValidationError("fact uses undeclared data property '" + key.first + "'");
        }
    }
}

}  // namespace fairtransport::onto

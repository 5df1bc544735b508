#pragma once

// Seeded generators for randomized tests. Everything is driven by an
// mt19937_64 the caller owns, so failures reproduce from the seed alone.

#include <random>
#include <string>
#include <vector>

#include "fairtransport/factstore.hpp"
#include "fairtransport/mask.hpp"
#include "fairtransport/matrix.hpp"
#include "fairtransport/ontology.hpp"

namespace oracles {

inline std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

struct RandomWorld {
    fairtransport::onto::Ontology ontology;
    fairtransport::onto::FactStore facts;
    std::vector<std::string> subjects;  // "row" individuals
};

/// Random ontology in the supported profile plus a random base ABox.
/// Axiom and individual counts stay within the given bounds.
inline RandomWorld make_random_world(std::mt19937_64& rng, std::size_t max_axioms = 15,
                                     std::size_t max_individuals = 30) {
    using fairtransport::Decimal;
    using fairtransport::onto::Cmp;
    using fairtransport::onto::ConceptExpr;

    RandomWorld world;
    auto& onto = world.ontology;

    const std::size_t n_concepts = draw(rng, 2, 6);
    const std::size_t n_roles = draw(rng, 1, 3);
    const std::size_t n_props = draw(rng, 1, 2);
    const std::size_t n_nominals = draw(rng, 1, 3);
    const std::size_t n_subjects = draw(rng, 2, max_individuals > 8 ? max_individuals - 6 : 2);
    const std::size_t n_objects = draw(rng, 1, 4);

    std::vector<std::string> concepts, roles, props, nominals, objects;
    for (std::size_t i = 0; i < n_concepts; ++i) concepts.push_back("C" + std::to_string(i));
    for (std::size_t i = 0; i < n_roles; ++i) roles.push_back("r" + std::to_string(i));
    for (std::size_t i = 0; i < n_props; ++i) props.push_back("p" + std::to_string(i));
    for (std::size_t i = 0; i < n_nominals; ++i) nominals.push_back("nom" + std::to_string(i));
    for (std::size_t i = 0; i < n_objects; ++i) objects.push_back("obj" + std::to_string(i));
    for (std::size_t i = 0; i < n_subjects; ++i) world.subjects.push_back("ind" + std::to_string(i));

    onto.concepts.insert(concepts.begin(), concepts.end());
    onto.roles.insert(roles.begin(), roles.end());
    onto.data_properties.insert(props.begin(), props.end());
    onto.individuals.insert(nominals.begin(), nominals.end());
    for (const auto& c : concepts) {
        if (rng() % 3 == 0) onto.sensitive_markers.insert(c);
    }
    if (onto.sensitive_markers.empty()) onto.sensitive_markers.insert(concepts.front());

    const auto random_threshold = [&]() {
        return Decimal(static_cast<std::int64_t>(rng() % 2000) - 1000, static_cast<std::int32_t>(rng() % 3));
    };
    const auto random_term = [&]() -> ConceptExpr {
        switch (rng() % 4) {
            case 0: return ConceptExpr::atomic(concepts[rng() % concepts.size()]);
            case 1: return ConceptExpr::exists_nominal(roles[rng() % roles.size()],
                                                       nominals[rng() % nominals.size()]);
            case 2: return ConceptExpr::exists_concept(roles[rng() % roles.size()],
                                                       concepts[rng() % concepts.size()]);
            default: {
                const Cmp cmp = static_cast<Cmp>(rng() % 5);
                return ConceptExpr::data_threshold(props[rng() % props.size()], cmp, random_threshold());
            }
        }
    };

    const std::size_t n_axioms = draw(rng, 1, max_axioms);
    for (std::size_t i = 0; i < n_axioms; ++i) {
        ConceptExpr lhs = random_term();
        if (rng() % 3 == 0) {
            std::vector<ConceptExpr> conjuncts{lhs, random_term()};
            if (rng() % 2 == 0) conjuncts.push_back(random_term());
            bool nested = false;
            for (const auto& c : conjuncts) nested |= c.kind == ConceptExpr::Kind::Conjunction;
            if (!nested) lhs = ConceptExpr::conjunction(std::move(conjuncts));
        }
        onto.tbox.push_back(fairtransport::onto::Axiom{std::move(lhs), concepts[rng() % concepts.size()]});
    }

    // Base ABox: concept facts on subjects/objects, role edges from subjects
    // to nominals and auxiliary objects, data values on both.
    std::vector<std::string> all_targets = nominals;
    all_targets.insert(all_targets.end(), objects.begin(), objects.end());
    for (const auto& subject : world.subjects) {
        if (rng() % 2 == 0) world.facts.add_concept(concepts[rng() % concepts.size()], subject);
        const std::size_t edges = rng() % 3;
        for (std::size_t e = 0; e < edges; ++e) {
            world.facts.add_role(roles[rng() % roles.size()], subject,
                                 all_targets[rng() % all_targets.size()]);
        }
        if (rng() % 2 == 0) {
            world.facts.add_data(props[rng() % props.size()], subject, random_threshold());
        }
    }
    for (const auto& object : all_targets) {
        if (rng() % 2 == 0) world.facts.add_concept(concepts[rng() % concepts.size()], object);
        if (rng() % 2 == 0) {
            world.facts.add_data(props[rng() % props.size()], object, random_threshold());
        }
    }
    return world;
}

/// Random mask with N rows and k generator columns.
inline fairtransport::sigma::MaskMatrix make_random_mask(std::mt19937_64& rng, std::size_t n,
                                                         std::size_t k) {
    fairtransport::sigma::MaskMatrix mask;
    for (std::size_t j = 0; j < k; ++j) mask.concepts.push_back("S" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) mask.row_ids.push_back("row" + std::to_string(i + 1));
    mask.bits.resize(n * k);
    for (auto& bit : mask.bits) bit = static_cast<std::uint8_t>(rng() % 2);
    return mask;
}

inline fairtransport::Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                           double lo = -1.0, double hi = 1.0) {
    fairtransport::Matrix m(rows, cols);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (double& v : m.data) v = dist(rng);
    return m;
}

/// Partition with the given atom sizes, rows interleaved across atoms.
inline fairtransport::sigma::AtomPartition make_partition(const std::vector<std::uint32_t>& sizes) {
    fairtransport::sigma::AtomPartition partition;
    partition.atom_sizes = sizes;
    std::size_t n = 0;
    for (const auto s : sizes) n += s;
    partition.atom_of.reserve(n);
    std::vector<std::uint32_t> remaining = sizes;
    std::size_t g = 0;
    while (partition.atom_of.size() < n) {
        if (remaining[g % sizes.size()] > 0) {
            partition.atom_of.push_back(static_cast<std::uint32_t>(g % sizes.size()));
            --remaining[g % sizes.size()];
        }
        ++g;
    }
    for (std::size_t a = 0; a < sizes.size(); ++a) {
        partition.atom_signatures.push_back("sig" + std::to_string(a));
    }
    return partition;
}

}  // namespace oracles

#include "fairtransport/mask.hpp"

#include <algorithm>
#include <map>

#include "fairtransport/errors.hpp"

namespace fairtransport::sigma {

std::string MaskMatrix::signature(std::size_t i) const {
    std::string sig(cols(), '0');
    for (std::size_t j = 0; j < cols(); ++j) {
        if (bit(i, j)) sig[j] = '1';
    }
    return sig;
}

std::string MaskMatrix::canonical_serialization() const {
    std::string out;
    for (std::size_t j = 0; j < concepts.size(); ++j) {
        if (j > 0) out.push_back(',');
        out += concepts[j];
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < rows(); ++i) {
        out += signature(i);
        out.push_back('\n');
    }
    return out;
}

MaskMatrix build_mask(const onto::Ontology& ontology, const onto::FactStore& materialized,
                      const Dataset& dataset, ExecPolicy exec, bool allow_trivial) {
    MaskMatrix mask;
    mask.concepts.assign(ontology.sensitive_markers.begin(), ontology.sensitive_markers.end());
    if (mask.concepts.empty() && !allow_trivial) {
        throw ValidationError(
            "ontology declares no sensitive concepts; the generated algebra would be trivial "
            "(pass allow_trivial to proceed)");
    }
    mask.row_ids = dataset.row_ids;
    const std::size_t n = mask.rows();
    const std::size_t k = mask.cols();
    mask.bits.assign(n * k, 0);

    const auto eval_row = [&](std::size_t i) {
        for (std::size_t j = 0; j < k; ++j) {
            mask.bits[i * k + j] =
                materialized.has_concept(mask.concepts[j], mask.row_ids[i]) ? 1 : 0;
        }
    };

    if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            eval_row(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) eval_row(i);
    }
    return mask;
}

AtomPartition atoms(const MaskMatrix& mask) {
    const std::size_t n = mask.rows();
    if (n == 0) throw ValidationError("cannot partition an empty mask");

    std::map<std::string, std::uint32_t> index_of;  // signature -> atom id, keys sorted
    std::vector<std::string> signatures(n);
    for (std::size_t i = 0; i < n; ++i) {
        signatures[i] = mask.signature(i);
        index_of.emplace(signatures[i], 0);
    }
    AtomPartition partition;
    partition.atom_signatures.reserve(index_of.size());
    for (auto& [sig, id] : index_of) {
        id = static_cast<std::uint32_t>(partition.atom_signatures.size());
        partition.atom_signatures.push_back(sig);
    }
    partition.atom_sizes.assign(index_of.size(), 0);
    partition.atom_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t id = index_of.at(signatures[i]);
        partition.atom_of[i] = id;
        ++partition.atom_sizes[id];
    }
    return partition;
}

std::vector<std::vector<std::uint32_t>> AtomPartition::members() const {
    std::vector<std::vector<std::uint32_t>> out(count());
    for (std::size_t g = 0; g < count(); ++g) out[g].reserve(atom_sizes[g]);
    for (std::size_t i = 0; i < atom_of.size(); ++i) {
        out[atom_of[i]].push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

EventExpr EventExpr::generator_event(std::size_t index) {
    EventExpr e;
    e.kind = Kind::Generator;
    e.generator = index;
    return e;
}

EventExpr EventExpr::negation(EventExpr inner) {
    EventExpr e;
    e.kind = Kind::Not;
    e.children.push_back(std::move(inner));
    return e;
}

EventExpr EventExpr::conjunction(EventExpr a, EventExpr b) {
    EventExpr e;
    e.kind = Kind::And;
    e.children.push_back(std::move(a));
    e.children.push_back(std::move(b));
    return e;
}

EventExpr EventExpr::disjunction(EventExpr a, EventExpr b) {
    EventExpr e;
    e.kind = Kind::Or;
    e.children.push_back(std::move(a));
    e.children.push_back(std::move(b));
    return e;
}

namespace {

struct EventParser {
    std::string_view text;
    std::size_t k;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw ValidationError("malformed event expression at offset " + std::to_string(pos) + ": " + what);
    }

    EventExpr parse_or() {
        EventExpr lhs = parse_and();
        while (try_consume('|')) lhs = EventExpr::disjunction(std::move(lhs), parse_and());
        return lhs;
    }

    EventExpr parse_and() {
        EventExpr lhs = parse_unary();
        while (try_consume('&')) lhs = EventExpr::conjunction(std::move(lhs), parse_unary());
        return lhs;
    }

    EventExpr parse_unary() {
        if (try_consume('!')) return EventExpr::negation(parse_unary());
        if (try_consume('(')) {
            EventExpr inner = parse_or();
            if (!try_consume(')')) fail("expected ')'");
            return inner;
        }
        skip_ws();
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
            fail("expected generator index");
        }
        std::size_t index = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            index = index * 10 + static_cast<std::size_t>(text[pos] - '0');
            ++pos;
        }
        if (index >= k) fail("generator index " + std::to_string(index) + " out of range (k=" + std::to_string(k) + ")");
        return EventExpr::generator_event(index);
    }
};

void eval_event(const EventExpr& expr, const MaskMatrix& mask, std::vector<char>& out) {
    const std::size_t n = mask.rows();
    switch (expr.kind) {
        case EventExpr::Kind::Generator:
            for (std::size_t i = 0; i < n; ++i) out[i] = mask.bit(i, expr.generator) ? 1 : 0;
            return;
        case EventExpr::Kind::Not: {
            eval_event(expr.children[0], mask, out);
            for (std::size_t i = 0; i < n; ++i) out[i] = out[i] ? 0 : 1;
            return;
        }
        case EventExpr::Kind::And:
        case EventExpr::Kind::Or: {
            std::vector<char> rhs(n);
            eval_event(expr.children[0], mask, out);
            eval_event(expr.children[1], mask, rhs);
            if (expr.kind == EventExpr::Kind::And) {
                for (std::size_t i = 0; i < n; ++i) out[i] = (out[i] && rhs[i]) ? 1 : 0;
            } else {
                for (std::size_t i = 0; i < n; ++i) out[i] = (out[i] || rhs[i]) ? 1 : 0;
            }
            return;
        }
    }
}

}  // namespace

EventExpr parse_event_expr(std::string_view text, std::size_t k) {
    EventParser parser{text, k};
    EventExpr expr = parser.parse_or();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("unexpected trailing text");
    return expr;
}

std::vector<std::uint32_t> event_membership(const EventExpr& expr, const AtomPartition& partition,
                                            const MaskMatrix& mask) {
    if (partition.rows() != mask.rows()) {
        throw ValidationError("partition and mask row counts differ");
    }
    const auto check = [&](const EventExpr& e, const auto& self) -> void {
        if (e.kind == EventExpr::Kind::Generator && e.generator >= mask.cols()) {
            throw ValidationError("event expression references generator " + std::to_string(e.generator) +
                                  " but the mask has " + std::to_string(mask.cols()) + " columns");
        }
        for (const auto& child : e.children) self(child, self);
    };
    check(expr, check);

    std::vector<char> in_event(mask.rows());
    eval_event(expr, mask, in_event);
    std::vector<std::uint32_t> rows;
    for (std::size_t i = 0; i < mask.rows(); ++i) {
        if (in_event[i]) rows.push_back(static_cast<std::uint32_t>(i));
    }
    return rows;
}

}  // namespace fairtransport::sigma

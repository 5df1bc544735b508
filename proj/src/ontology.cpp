#include "fairtransport/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "fairtransport/errors.hpp"

namespace fairtransport::onto {

std::string_view cmp_token(Cmp c) {
    switch (c) {
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Gt: return ">";
        case Cmp::Ge: return ">=";
        case Cmp::Eq: return "=";
    }
    return "?";
}

bool cmp_holds(Cmp c, const Decimal& value, const Decimal& threshold) {
    switch (c) {
        case Cmp::Lt: return value < threshold;
        case Cmp::Le: return value <= threshold;
        case Cmp::Gt: return value > threshold;
        case Cmp::Ge: return value >= threshold;
        case Cmp::Eq: return value == threshold;
    }
    return false;
}

ConceptExpr ConceptExpr::atomic(std::string concept_name) {
    ConceptExpr e;
    e.kind = Kind::Atomic;
    e.name = std::move(concept_name);
    return e;
}

ConceptExpr ConceptExpr::exists_nominal(std::string role, std::string individual) {
    ConceptExpr e;
    e.kind = Kind::ExistsNominal;
    e.name = std::move(role);
    e.object = std::move(individual);
    return e;
}

ConceptExpr ConceptExpr::exists_concept(std::string role, std::string concept_name) {
    ConceptExpr e;
    e.kind = Kind::ExistsConcept;
    e.name = std::move(role);
    e.object = std::move(concept_name);
    return e;
}

ConceptExpr ConceptExpr::data_threshold(std::string property, Cmp cmp, Decimal threshold) {
    ConceptExpr e;
    e.kind = Kind::DataThreshold;
    e.name = std::move(property);
    e.cmp = cmp;
    e.threshold = threshold;
    return e;
}

ConceptExpr ConceptExpr::conjunction(std::vector<ConceptExpr> conjuncts) {
    if (conjuncts.size() < 2) {
        throw ValidationError("conjunction requires at least 2 conjuncts");
    }
    for (const auto& c : conjuncts) {
        if (c.kind == Kind::Conjunction) {
            throw ValidationError("conjunctions must be flat");
        }
    }
    // Canonical conjunct order: lexicographic on the printed form.
    std::sort(conjuncts.begin(), conjuncts.end(), [](const ConceptExpr& a, const ConceptExpr& b) {
        return a.to_string() < b.to_string();
    });
    ConceptExpr e;
    e.kind = Kind::Conjunction;
    e.conjuncts = std::move(conjuncts);
    return e;
}

std::string ConceptExpr::to_string() const {
    switch (kind) {
        case Kind::Atomic: return name;
        case Kind::ExistsNominal: return "exists(" + name + ", {" + object + "})";
        case Kind::ExistsConcept: return "exists(" + name + ", " + object + ")";
        case Kind::DataThreshold:
            return name + " " + std::string(cmp_token(cmp)) + " " + threshold.to_string();
        case Kind::Conjunction: {
            std::string out;
            for (std::size_t i = 0; i < conjuncts.size(); ++i) {
                if (i > 0) out += " and ";
                out += conjuncts[i].to_string();
            }
            return out;
        }
    }
    return {};
}

bool operator==(const ConceptExpr& a, const ConceptExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ConceptExpr::Kind::Atomic: return a.name == b.name;
        case ConceptExpr::Kind::ExistsNominal:
        case ConceptExpr::Kind::ExistsConcept: return a.name == b.name && a.object == b.object;
        case ConceptExpr::Kind::DataThreshold:
            return a.name == b.name && a.cmp == b.cmp && a.threshold == b.threshold;
        case ConceptExpr::Kind::Conjunction: return a.conjuncts == b.conjuncts;
    }
    return false;
}

bool operator==(const Ontology& a, const Ontology& b) {
    return a.concepts == b.concepts && a.roles == b.roles && a.data_properties == b.data_properties &&
           a.individuals == b.individuals && a.tbox == b.tbox && a.sensitive_markers == b.sensitive_markers;
}

namespace {

// One statement per line, terminated by '.'; '#' starts a comment.
struct Statement {
    std::string text;
    int line = 0;
};

struct Tokenizer {
    std::string_view text;
    int line;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    int col() const { return static_cast<int>(pos) + 1; }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!try_consume(c)) {
            throw ParseError(std::string("expected '") + c + "' " + what, line, col());
        }
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    std::string identifier(const char* what) {
        skip_ws();
        if (pos >= text.size() || !ident_start(text[pos])) {
            throw ParseError(std::string("expected ") + what, line, col());
        }
        const std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return std::string(text.substr(start, pos - start));
    }

    std::string number() {
        skip_ws();
        const std::size_t start = pos;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
            ++pos;
        }
        if (pos == start) throw ParseError("expected number", line, col());
        return std::string(text.substr(start, pos - start));
    }

    Cmp comparator() {
        skip_ws();
        const int c0 = col();
        if (try_consume('<')) return try_consume('=') ? Cmp::Le : Cmp::Lt;
        if (try_consume('>')) return try_consume('=') ? Cmp::Ge : Cmp::Gt;
        if (try_consume('=')) return Cmp::Eq;
        throw ParseError("expected comparator (<, <=, >, >=, =)", line, c0);
    }
};

enum class NameKind { Concept, Role, DataProperty, Individual };

const char* kind_label(NameKind k) {
    switch (k) {
        case NameKind::Concept: return "concept";
        case NameKind::Role: return "role";
        case NameKind::DataProperty: return "data property";
        case NameKind::Individual: return "individual";
    }
    return "?";
}

struct Declarations {
    std::map<std::string, NameKind> kinds;

    void declare(const std::string& name, NameKind kind, int line) {
        auto [it, inserted] = kinds.emplace(name, kind);
        if (!inserted) {
            throw ValidationError("line " + std::to_string(line) + ": duplicate declaration of '" + name +
                                  "' (already a " + std::string(kind_label(it->second)) + ")");
        }
    }

    void require(const std::string& name, NameKind kind, int line) const {
        const auto it = kinds.find(name);
        if (it == kinds.end()) {
            throw ValidationError("line " + std::to_string(line) + ": undeclared name '" + name + "' (expected a " +
                                  std::string(kind_label(kind)) + ")");
        }
        if (it->second != kind) {
            throw ValidationError("line " + std::to_string(line) + ": '" + name + "' is a " +
                                  std::string(kind_label(it->second)) + ", expected a " +
                                  std::string(kind_label(kind)));
        }
    }
};

ConceptExpr parse_term(Tokenizer& tok, const Declarations& decls) {
    tok.skip_ws();
    const int start_col = tok.col();
    const std::string first = tok.identifier("concept, role, or data property name");
    if (first == "exists") {
        tok.expect('(', "after 'exists'");
        const std::string role = tok.identifier("role name");
        decls.require(role, NameKind::Role, tok.line);
        tok.expect(',', "between role and filler");
        if (tok.try_consume('{')) {
            const std::string individual = tok.identifier("individual name");
            decls.require(individual, NameKind::Individual, tok.line);
            tok.expect('}', "after nominal");
            tok.expect(')', "after exists filler");
            return ConceptExpr::exists_nominal(role, individual);
        }
        const std::string concept_name = tok.identifier("concept name");
        decls.require(concept_name, NameKind::Concept, tok.line);
        tok.expect(')', "after exists filler");
        return ConceptExpr::exists_concept(role, concept_name);
    }
    if (first == "and") {
        throw ParseError("conjunction is missing its left conjunct", tok.line, start_col);
    }
    const char next = tok.peek();
    bool is_comparator = (next == '<' || next == '>');
    if (next == '=') {
        // A bare '=' is the equality comparator; '=>' is the axiom arrow.
        is_comparator = !(tok.pos + 1 < tok.text.size() && tok.text[tok.pos + 1] == '>');
    }
    if (is_comparator) {
        decls.require(first, NameKind::DataProperty, tok.line);
        const Cmp cmp = tok.comparator();
        const std::string num = tok.number();
        Decimal threshold;
        try {
            threshold = Decimal::parse(num);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), tok.line, start_col);
        }
        return ConceptExpr::data_threshold(first, cmp, threshold);
    }
    decls.require(first, NameKind::Concept, tok.line);
    return ConceptExpr::atomic(first);
}

ConceptExpr parse_expr(Tokenizer& tok, const Declarations& decls) {
    std::vector<ConceptExpr> terms;
    terms.push_back(parse_term(tok, decls));
    for (;;) {
        tok.skip_ws();
        const std::size_t save = tok.pos;
        if (tok.pos < tok.text.size() && Tokenizer::ident_start(tok.text[tok.pos])) {
            const std::string word = tok.identifier("word");
            if (word == "and") {
                terms.push_back(parse_term(tok, decls));
                continue;
            }
            tok.pos = save;
        }
        break;
    }
    if (terms.size() == 1) return std::move(terms.front());
    return ConceptExpr::conjunction(std::move(terms));
}

// Statements are '.'-terminated; a '.' between two digits is a decimal
// point instead. '#' comments out the rest of the line.
std::vector<Statement> split_statements(std::string_view source) {
    std::vector<Statement> out;
    std::string current;
    int line = 1;
    int statement_line = 1;
    bool in_comment = false;
    bool current_blank = true;

    const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)); };
    for (std::size_t pos = 0; pos < source.size(); ++pos) {
        const char c = source[pos];
        if (c == '\n') {
            ++line;
            in_comment = false;
            if (!current.empty()) current.push_back(' ');
            continue;
        }
        if (in_comment) continue;
        if (c == '#') {
            in_comment = true;
            continue;
        }
        if (c == '.') {
            const bool decimal_point = !current.empty() && is_digit(current.back()) &&
                                       pos + 1 < source.size() && is_digit(source[pos + 1]);
            if (!decimal_point) {
                const std::size_t begin = current.find_first_not_of(" \t\r");
                if (begin != std::string::npos) {
                    out.push_back(Statement{current.substr(begin), statement_line});
                }
                current.clear();
                current_blank = true;
                continue;
            }
        }
        if (current_blank && c != ' ' && c != '\t' && c != '\r') {
            statement_line = line;
            current_blank = false;
        }
        current.push_back(c);
    }
    if (!current_blank) {
        throw ParseError("statement must end with '.'", statement_line, 1);
    }
    return out;
}

}  // namespace

Ontology parse_ontology(std::string_view source) {
    const std::vector<Statement> statements = split_statements(source);

    Ontology onto;
    Declarations decls;

    // First pass: declarations, so axioms may reference names declared later.
    for (const auto& st : statements) {
        Tokenizer tok{st.text, st.line};
        std::string keyword = tok.identifier("keyword");
        if (keyword == "axiom") continue;
        if (keyword == "sensitive") {
            const std::string second = tok.identifier("'concept' after 'sensitive'");
            if (second != "concept") {
                throw ParseError("expected 'concept' after 'sensitive'", st.line, tok.col());
            }
            const std::string name = tok.identifier("concept name");
            decls.declare(name, NameKind::Concept, st.line);
            onto.concepts.insert(name);
            onto.sensitive_markers.insert(name);
        } else if (keyword == "concept") {
            const std::string name = tok.identifier("concept name");
            decls.declare(name, NameKind::Concept, st.line);
            onto.concepts.insert(name);
        } else if (keyword == "role") {
            const std::string name = tok.identifier("role name");
            decls.declare(name, NameKind::Role, st.line);
            onto.roles.insert(name);
        } else if (keyword == "data") {
            const std::string name = tok.identifier("data property name");
            decls.declare(name, NameKind::DataProperty, st.line);
            onto.data_properties.insert(name);
        } else if (keyword == "individual") {
            const std::string name = tok.identifier("individual name");
            decls.declare(name, NameKind::Individual, st.line);
            onto.individuals.insert(name);
        } else {
            throw ParseError("unknown keyword '" + keyword + "'", st.line, 1);
        }
        if (!tok.eof()) {
            throw ParseError("unexpected trailing text", st.line, tok.col());
        }
    }

    // Second pass: axioms.
    for (const auto& st : statements) {
        Tokenizer tok{st.text, st.line};
        if (tok.identifier("keyword") != "axiom") continue;
        ConceptExpr lhs = parse_expr(tok, decls);
        tok.skip_ws();
        if (!(tok.try_consume('=') && tok.try_consume('>'))) {
            throw ParseError("expected '=>' after axiom left-hand side", st.line, tok.col());
        }
        const std::string rhs = tok.identifier("atomic concept name on the right-hand side");
        if (!tok.eof()) {
            throw ParseError("right-hand side must be a single atomic concept", st.line, tok.col());
        }
        decls.require(rhs, NameKind::Concept, st.line);
        onto.tbox.push_back(Axiom{std::move(lhs), rhs});
    }

    return onto;
}

std::string print_ontology(const Ontology& ontology) {
    std::string out;
    for (const auto& name : ontology.concepts) {
        if (ontology.sensitive_markers.count(name)) {
            out += "sensitive concept " + name + ".\n";
        } else {
            out += "concept " + name + ".\n";
        }
    }
    for (const auto& name : ontology.roles) out += "role " + name + ".\n";
    for (const auto& name : ontology.data_properties) out += "data " + name + ".\n";
    for (const auto& name : ontology.individuals) out += "individual " + name + ".\n";
    for (const auto& axiom : ontology.tbox) {
        out += "axiom " + axiom.lhs.to_string() + " => " + axiom.rhs + ".\n";
    }
    return out;
}

}  // namespace fairtransport::onto

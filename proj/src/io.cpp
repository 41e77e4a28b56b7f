#include "ptdmon/io.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace ptdmon::io {

using model::AstAtom;
using model::AstSide;
using model::Event;
using model::InputError;
using model::RawPtda;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Expression grammar: atom := side op side; side := string literal | linear
// expression; term := coef '*' ident | coef | ident.

namespace {

struct Token {
    enum class Kind { Ident, Number, String, Op, Plus, Minus, Star, End } kind;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) return {Token::Kind::End, ""};
        char c = text_[pos_];
        if (c == '"') return lex_string();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident();
        if (c == '+') {
            ++pos_;
            return {Token::Kind::Plus, "+"};
        }
        if (c == '-') {
            ++pos_;
            return {Token::Kind::Minus, "-"};
        }
        if (c == '*') {
            ++pos_;
            return {Token::Kind::Star, "*"};
        }
        if (c == '<' || c == '>' || c == '=' || c == '!') {
            std::string op(1, c);
            ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '=') {
                op += '=';
                ++pos_;
            }
            if (op == "=" || op == "!")
                throw SpecSyntaxError("expected '==' or '!=' in expression '" + text_ + "'");
            return {Token::Kind::Op, op};
        }
        throw SpecSyntaxError("unexpected character '" + std::string(1, c) + "' in expression '" +
                              text_ + "'");
    }

private:
    Token lex_string() {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                ++pos_;
                out += text_[pos_];
            } else {
                out += text_[pos_];
            }
            ++pos_;
        }
        if (pos_ >= text_.size()) throw SpecSyntaxError("unterminated string in '" + text_ + "'");
        ++pos_;  // closing quote
        return {Token::Kind::String, out};
    }

    Token lex_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        return {Token::Kind::Number, text_.substr(start, pos_ - start)};
    }

    Token lex_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_' || text_[pos_] == '\''))
            ++pos_;
        return {Token::Kind::Ident, text_.substr(start, pos_ - start)};
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

class ExprParser {
public:
    explicit ExprParser(const std::string& text) : text_(text), lexer_(text) { advance(); }

    AstAtom parse_atom() {
        AstAtom atom;
        atom.text = text_;
        atom.lhs = parse_side_inner();
        if (tok_.kind != Token::Kind::Op)
            throw SpecSyntaxError("expected a comparison operator in '" + text_ + "'");
        std::string op = tok_.text;
        advance();
        atom.rhs = parse_side_inner();
        expect_end();
        if (op == "!=") {
            atom.neq = true;
        } else if (op == "==") {
            atom.rel = poly::Rel::Eq;
        } else if (op == "<") {
            atom.rel = poly::Rel::Lt;
        } else if (op == "<=") {
            atom.rel = poly::Rel::Le;
        } else if (op == ">") {
            atom.rel = poly::Rel::Gt;
        } else if (op == ">=") {
            atom.rel = poly::Rel::Ge;
        } else {
            throw SpecSyntaxError("unknown operator '" + op + "' in '" + text_ + "'");
        }
        return atom;
    }

    AstSide parse_side() {
        AstSide side = parse_side_inner();
        expect_end();
        return side;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    void expect_end() {
        if (tok_.kind != Token::Kind::End)
            throw SpecSyntaxError("trailing input after expression in '" + text_ + "'");
    }

    AstSide parse_side_inner() {
        if (tok_.kind == Token::Kind::String) {
            AstSide side;
            side.is_string_literal = true;
            side.literal = tok_.text;
            advance();
            return side;
        }
        AstSide side;
        int sign = 1;
        if (tok_.kind == Token::Kind::Minus) {
            sign = -1;
            advance();
        }
        for (;;) {
            parse_term(side, sign);
            if (tok_.kind == Token::Kind::Plus) {
                sign = 1;
                advance();
            } else if (tok_.kind == Token::Kind::Minus) {
                sign = -1;
                advance();
            } else {
                break;
            }
        }
        return side;
    }

    void parse_term(AstSide& side, int sign) {
        if (tok_.kind == Token::Kind::Number) {
            Rational coef = parse_rational_or_throw_spec(tok_.text);
            advance();
            if (tok_.kind == Token::Kind::Star) {
                advance();
                if (tok_.kind != Token::Kind::Ident)
                    throw SpecSyntaxError("expected an identifier after '*' in '" + text_ + "'");
                side.terms.emplace_back(coef * sign, tok_.text);
                advance();
            } else {
                side.constant += coef * sign;
            }
        } else if (tok_.kind == Token::Kind::Ident) {
            side.terms.emplace_back(Rational(sign), tok_.text);
            advance();
        } else {
            throw SpecSyntaxError("expected a term in '" + text_ + "'");
        }
    }

    Rational parse_rational_or_throw_spec(const std::string& t) {
        auto q = parse_rational(t);
        if (!q) throw SpecSyntaxError("malformed number '" + t + "' in '" + text_ + "'");
        return *q;
    }

    const std::string& text_;
    Lexer lexer_;
    Token tok_;
};

}  // namespace

AstAtom parse_atom(const std::string& text) { return ExprParser(text).parse_atom(); }

AstSide parse_side(const std::string& text) { return ExprParser(text).parse_side(); }

// ---------------------------------------------------------------------------
// Automaton document.

namespace {

model::Sort parse_sort(const json& j, const std::string& where) {
    if (!j.is_string() || (j != "string" && j != "number"))
        throw SpecSyntaxError(where + ": sort must be \"string\" or \"number\"");
    return j == "string" ? model::Sort::String : model::Sort::Number;
}

model::Value parse_init(const json& j, model::Sort sort, const std::string& where) {
    if (sort == model::Sort::String) {
        if (!j.is_string()) throw SpecSyntaxError(where + ": string variable needs a string init");
        return j.get<std::string>();
    }
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
    if (j.is_string()) {
        auto q = parse_rational(j.get<std::string>());
        if (q) return *q;
    }
    throw SpecSyntaxError(where + ": numeric init must be an integer or an exact rational string");
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
    std::vector<std::string> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw SpecSyntaxError(where + ": expected an array of strings");
    for (const auto& e : j) {
        if (!e.is_string()) throw SpecSyntaxError(where + ": expected an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

std::vector<AstAtom> atom_list(const json& j, const std::string& where) {
    std::vector<AstAtom> out;
    if (j.is_null()) return out;
    if (!j.is_array()) throw SpecSyntaxError(where + ": expected an array of constraint strings");
    for (const auto& e : j) {
        if (!e.is_string()) throw SpecSyntaxError(where + ": expected an array of constraint strings");
        out.push_back(parse_atom(e.get<std::string>()));
    }
    return out;
}

}  // namespace

RawPtda parse_raw_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SpecSyntaxError(std::string("automaton document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SpecSyntaxError("automaton document must be a JSON object");
    RawPtda raw;
    raw.name = doc.value("name", std::string());
    for (const auto& a : doc.value("actions", json::array())) {
        model::ActionSig sig;
        if (!a.is_object() || !a.contains("name")) throw SpecSyntaxError("actions: each entry needs a name");
        sig.name = a.at("name").get<std::string>();
        for (const auto& p : a.value("params", json::array())) {
            if (!p.is_object() || !p.contains("name") || !p.contains("sort"))
                throw SpecSyntaxError("action '" + sig.name + "': each param needs name and sort");
            sig.params.emplace_back(p.at("name").get<std::string>(),
                                    parse_sort(p.at("sort"), "action '" + sig.name + "'"));
        }
        raw.actions.push_back(std::move(sig));
    }
    raw.clocks = string_list(doc.value("clocks", json::array()), "clocks");
    raw.timing_params = string_list(doc.value("timing_params", json::array()), "timing_params");
    for (const auto& v : doc.value("variables", json::array())) {
        if (!v.is_object() || !v.contains("name") || !v.contains("sort") || !v.contains("init"))
            throw SpecSyntaxError("variables: each entry needs name, sort, and init");
        model::RawVariable var;
        var.name = v.at("name").get<std::string>();
        var.sort = parse_sort(v.at("sort"), "variable '" + var.name + "'");
        var.init = parse_init(v.at("init"), var.sort, "variable '" + var.name + "'");
        raw.variables.push_back(std::move(var));
    }
    for (const auto& p : doc.value("data_params", json::array())) {
        if (!p.is_object() || !p.contains("name") || !p.contains("sort"))
            throw SpecSyntaxError("data_params: each entry needs name and sort");
        raw.data_params.emplace_back(p.at("name").get<std::string>(),
                                     parse_sort(p.at("sort"), "data_params"));
    }
    raw.locations = string_list(doc.value("locations", json::array()), "locations");
    if (!doc.contains("initial") || !doc.at("initial").is_string())
        throw SpecSyntaxError("automaton document needs an \"initial\" location");
    raw.initial = doc.at("initial").get<std::string>();
    raw.accepting = string_list(doc.value("accepting", json::array()), "accepting");
    raw.initial_constraint = atom_list(doc.value("initial_constraint", json::array()), "initial_constraint");
    for (const auto& e : doc.value("edges", json::array())) {
        if (!e.is_object() || !e.contains("source") || !e.contains("target") || !e.contains("action"))
            throw SpecSyntaxError("edges: each entry needs source, target, and action");
        model::RawEdge edge;
        edge.source = e.at("source").get<std::string>();
        edge.target = e.at("target").get<std::string>();
        edge.action = e.at("action").get<std::string>();
        edge.timed_guard = atom_list(e.value("timed_guard", json::array()), "timed_guard");
        edge.data_guard = atom_list(e.value("data_guard", json::array()), "data_guard");
        edge.resets = string_list(e.value("resets", json::array()), "resets");
        const json updates = e.value("updates", json::object());
        for (const auto& [target, rhs] : updates.items()) {
            if (!rhs.is_string())
                throw SpecSyntaxError("updates: the expression for '" + target + "' must be a string");
            edge.updates.emplace_back(target, parse_side(rhs.get<std::string>()));
        }
        raw.edges.push_back(std::move(edge));
    }
    return raw;
}

std::pair<std::optional<model::Ptda>, std::vector<model::Diagnostic>> parse_spec_checked(
    const std::string& text) {
    return model::build(parse_raw_spec(text));
}

model::Ptda parse_spec(const std::string& text) {
    auto [ptda, diags] = parse_spec_checked(text);
    if (!ptda) {
        std::ostringstream os;
        os << "automaton is not well-formed:";
        for (const auto& d : diags) os << "\n  [" << d.rule << "] " << d.message;
        throw SpecValidationError(os.str(), diags);
    }
    return std::move(*ptda);
}

// ---------------------------------------------------------------------------
// Log format.

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Splits "a,b,..." at top level; quoted segments may contain anything.
std::vector<std::string> split_args(const std::string& text, std::size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quote = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quote) {
            cur += c;
            if (c == '\\' && i + 1 < text.size()) {
                cur += text[++i];
            } else if (c == '"') {
                in_quote = false;
            }
        } else if (c == '"') {
            cur += c;
            in_quote = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_quote) throw InputError("log line " + std::to_string(line_no) + ": unterminated string");
    out.push_back(cur);
    return out;
}

std::string unquote(const std::string& raw, std::size_t line_no) {
    std::string t = trim(raw);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < t.size(); ++i) {
            if (t[i] == '\\' && i + 2 < t.size() + 1) {
                ++i;
                out += t[i];
            } else {
                out += t[i];
            }
        }
        return out;
    }
    if (t.find_first_of(" \t(),\"") != std::string::npos)
        throw InputError("log line " + std::to_string(line_no) +
                         ": bare argument contains a delimiter; quote it: " + t);
    return t;
}

}  // namespace

std::optional<Event> LogReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::string where = "log line " + std::to_string(line_no_);
        if (t[0] != '@') throw InputError(where + ": expected '@<timestamp> <action>(...)'");
        std::size_t sp = t.find_first_of(" \t");
        if (sp == std::string::npos) throw InputError(where + ": missing action");
        auto ts = parse_rational(t.substr(1, sp - 1));
        if (!ts) throw InputError(where + ": malformed timestamp '" + t.substr(1, sp - 1) + "'");
        std::string rest = trim(t.substr(sp + 1));
        std::size_t open = rest.find('(');
        if (open == std::string::npos || rest.back() != ')')
            throw InputError(where + ": expected '<action>(<args>)'");
        Event ev;
        ev.action = trim(rest.substr(0, open));
        ev.timestamp = *ts;
        std::string argtext = rest.substr(open + 1, rest.size() - open - 2);
        int idx = ptda_.action_index(ev.action);
        if (idx < 0) throw InputError(where + ": unknown action '" + ev.action + "'");
        const auto& sig = ptda_.actions()[static_cast<std::size_t>(idx)];
        std::vector<std::string> parts;
        if (!trim(argtext).empty()) parts = split_args(argtext, line_no_);
        if (parts.size() != sig.params.size())
            throw InputError(where + ": action '" + ev.action + "' expects " +
                             std::to_string(sig.params.size()) + " argument(s), got " +
                             std::to_string(parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i) {
            std::string raw = unquote(parts[i], line_no_);
            if (sig.params[i].second == model::Sort::String) {
                ev.args.emplace_back(raw);
            } else {
                auto q = parse_rational(raw);
                if (!q)
                    throw InputError(where + ": argument " + std::to_string(i + 1) +
                                     " of action '" + ev.action + "' must be numeric, got '" + raw + "'");
                ev.args.emplace_back(*q);
            }
        }
        try {
            ptda_.check_event(ev);
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        if (any_ && ev.timestamp < last_ts_)
            throw InputError(where + ": timestamp " + to_string(ev.timestamp) +
                             " is earlier than the previous timestamp " + to_string(last_ts_));
        any_ = true;
        last_ts_ = ev.timestamp;
        return ev;
    }
    return std::nullopt;
}

model::TimedDataWord parse_log(std::istream& in, const model::Ptda& ptda) {
    LogReader reader(in, ptda);
    model::TimedDataWord word;
    while (auto ev = reader.next()) word.push_back(std::move(*ev));
    return word;
}

std::string render_event(const Event& ev) {
    std::ostringstream os;
    os << "@" << to_string(ev.timestamp) << " " << ev.action << "(";
    for (std::size_t i = 0; i < ev.args.size(); ++i) {
        if (i) os << ",";
        if (std::holds_alternative<std::string>(ev.args[i])) {
            const std::string& s = std::get<std::string>(ev.args[i]);
            if (s.empty() || s.find_first_of(" \t(),\"\\") != std::string::npos) {
                os << '"';
                for (char c : s) {
                    if (c == '"' || c == '\\') os << '\\';
                    os << c;
                }
                os << '"';
            } else {
                os << s;
            }
        } else {
            os << to_string(std::get<Rational>(ev.args[i]));
        }
    }
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Domain rendering.

std::string render_block(const monitor::Block& block, const model::Ptda& ptda) {
    std::vector<std::string> parts;
    for (const auto& [name, sort] : ptda.data_params()) {
        (void)sort;
        auto it = block.strings.find(name);
        if (it == block.strings.end()) continue;
        std::string r = it->second.render(name);
        if (!r.empty()) parts.push_back(std::move(r));
    }
    if (!block.timing.constraints().empty() || block.timing.marked_empty()) {
        std::string t = block.timing.to_string();
        if (t != "true") parts.push_back(std::move(t));
    }
    if (!block.numeric.constraints().empty() || block.numeric.marked_empty()) {
        std::string n = block.numeric.to_string();
        if (n != "true") parts.push_back(std::move(n));
    }
    if (parts.empty()) return "true";
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " && ";
        out += parts[i];
    }
    return out;
}

namespace {

json atoms_to_json(const poly::Polyhedron& p) {
    json arr = json::array();
    for (const auto& a : p.constraints()) {
        json terms = json::object();
        for (std::size_t i = 0; i < a.coef.size(); ++i)
            if (a.coef[i] != 0) terms[p.dims()[i].name] = a.coef[i].get_str();
        json atom;
        atom["terms"] = std::move(terms);
        atom["rel"] = a.rel == poly::Rel::Eq ? "=" : (a.rel == poly::Rel::Lt ? "<" : "<=");
        atom["const"] = to_string(a.cst);
        arr.push_back(std::move(atom));
    }
    return arr;
}

std::vector<poly::LinearAtom> atoms_from_json(const json& arr, const model::Ptda& ptda,
                                              const char* where) {
    std::vector<poly::LinearAtom> out;
    if (arr.is_null()) return out;
    if (!arr.is_array()) throw SpecSyntaxError(std::string(where) + ": expected an atom array");
    for (const auto& a : arr) {
        poly::LinearAtom la;
        const json terms = a.value("terms", json::object());
        for (const auto& [name, coef] : terms.items()) {
            auto id = ptda.dim_id(name);
            if (!id) throw SpecSyntaxError(std::string(where) + ": unknown parameter '" + name + "'");
            la.terms.emplace_back(*id, parse_rational_or_throw(coef.get<std::string>()));
        }
        la.constant = parse_rational_or_throw(a.value("const", std::string("0")));
        std::string rel = a.value("rel", std::string("<="));
        la.rel = rel == "=" ? poly::Rel::Eq : (rel == "<" ? poly::Rel::Lt : poly::Rel::Le);
        out.push_back(std::move(la));
    }
    return out;
}

}  // namespace

std::string render_domain(const monitor::ValidityDomain& vd, const model::Ptda& ptda,
                          DomainFormat format) {
    if (format == DomainFormat::Text) {
        std::vector<std::string> lines;
        lines.reserve(vd.blocks().size());
        for (const auto& b : vd.blocks()) lines.push_back(render_block(b, ptda));
        std::sort(lines.begin(), lines.end());
        std::string out;
        for (const auto& l : lines) out += l + "\n";
        return out;
    }
    json arr = json::array();
    std::vector<std::string> dumped;
    dumped.reserve(vd.blocks().size());
    for (const auto& b : vd.blocks()) {
        json jb;
        json strings = json::array();
        for (const auto& [name, sort] : ptda.data_params()) {
            (void)sort;
            auto it = b.strings.find(name);
            if (it == b.strings.end()) continue;
            if (it->second.is_equals()) {
                strings.push_back({{"param", name}, {"op", "="}, {"value", it->second.value()}});
            } else if (!it->second.excluded().empty()) {
                json values = json::array();
                for (const auto& s : it->second.excluded()) values.push_back(s);
                strings.push_back({{"param", name}, {"op", "not_in"}, {"values", std::move(values)}});
            }
        }
        jb["strings"] = std::move(strings);
        jb["timing"] = atoms_to_json(b.timing);
        jb["numeric"] = atoms_to_json(b.numeric);
        dumped.push_back(jb.dump());
    }
    std::sort(dumped.begin(), dumped.end());
    for (auto& d : dumped) arr.push_back(json::parse(d));
    return arr.dump(2) + "\n";
}

monitor::ValidityDomain parse_domain_json(const std::string& text, const model::Ptda& ptda) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SpecSyntaxError(std::string("domain document is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw SpecSyntaxError("domain document must be a JSON array");
    monitor::ValidityDomain vd;
    for (const auto& jb : doc) {
        monitor::Block b{poly::Polyhedron::universe(ptda.tp_dims()), {},
                         poly::Polyhedron::universe(ptda.vp_dims())};
        for (const auto& name : ptda.string_param_names())
            b.strings.emplace(name, strdom::StringParamConstraint::unconstrained());
        for (const auto& s : jb.value("strings", json::array())) {
            std::string name = s.at("param").get<std::string>();
            if (!b.strings.count(name))
                throw SpecSyntaxError("domain block: unknown string parameter '" + name + "'");
            if (s.at("op") == "=") {
                b.strings.at(name) = strdom::StringParamConstraint::equals(s.at("value").get<std::string>());
            } else {
                std::set<std::string> excluded;
                for (const auto& v : s.at("values")) excluded.insert(v.get<std::string>());
                b.strings.at(name) = strdom::StringParamConstraint::not_in(std::move(excluded));
            }
        }
        b.timing = b.timing.intersect(atoms_from_json(jb.value("timing", json::array()), ptda, "timing"));
        b.numeric = b.numeric.intersect(atoms_from_json(jb.value("numeric", json::array()), ptda, "numeric"));
        vd.add(std::move(b));
    }
    return vd;
}

}  // namespace ptdmon::io

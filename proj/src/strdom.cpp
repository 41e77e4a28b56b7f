#include "ptdmon/strdom.hpp"

#include <sstream>

namespace ptdmon::strdom {

StringParamConstraint StringParamConstraint::equals(std::string value) {
    StringParamConstraint c;
    c.is_equals_ = true;
    c.value_ = std::move(value);
    return c;
}

StringParamConstraint StringParamConstraint::not_in(std::set<std::string> excluded) {
    StringParamConstraint c;
    c.excluded_ = std::move(excluded);
    return c;
}

bool StringParamConstraint::admits(const std::string& s) const {
    return is_equals_ ? s == value_ : !excluded_.count(s);
}

bool StringParamConstraint::includes(const StringParamConstraint& other) const {
    if (other.is_equals_) return admits(other.value_);
    if (is_equals_) return false;  // a co-finite set is never inside a singleton
    for (const auto& s : excluded_)
        if (!other.excluded_.count(s)) return false;
    return true;
}

bool StringParamConstraint::operator==(const StringParamConstraint& other) const {
    return is_equals_ == other.is_equals_ && value_ == other.value_ && excluded_ == other.excluded_;
}

std::string StringParamConstraint::render(const std::string& param_name) const {
    if (is_equals_) return param_name + " = \"" + value_ + "\"";
    if (excluded_.empty()) return "";
    std::ostringstream os;
    os << param_name << " ∉ {";
    bool first = true;
    for (const auto& s : excluded_) {
        if (!first) os << ",";
        first = false;
        os << "\"" << s << "\"";
    }
    os << "}";
    return os.str();
}

StringState::StringState(std::map<std::string, std::string> vars, std::vector<std::string> param_names)
    : vars_(std::move(vars)) {
    for (auto& p : param_names) params_.emplace(std::move(p), StringParamConstraint::unconstrained());
}

std::optional<std::string> StringState::resolve(const Operand& op,
                                                const std::map<std::string, std::string>& locals) const {
    switch (op.kind) {
        case Operand::Kind::Const:
            return op.name;
        case Operand::Kind::Var: {
            auto it = vars_.find(op.name);
            if (it == vars_.end()) throw StrError("undeclared string variable '" + op.name + "'");
            return it->second;
        }
        case Operand::Kind::Local: {
            auto it = locals.find(op.name);
            if (it == locals.end()) throw StrError("unbound local variable '" + op.name + "'");
            return it->second;
        }
        default:
            return std::nullopt;
    }
}

std::optional<StringState> StringState::assume_atom(const Atom& atom,
                                                    const std::map<std::string, std::string>& locals) const {
    const bool lhs_param = atom.lhs.kind == Operand::Kind::Param;
    const bool rhs_param = atom.rhs.kind == Operand::Kind::Param;
    if (lhs_param && rhs_param) {
        auto li = params_.find(atom.lhs.name), ri = params_.find(atom.rhs.name);
        if (li == params_.end() || ri == params_.end())
            throw StrError("undeclared string parameter in comparison");
        if (li->second.is_equals() && ri->second.is_equals()) {
            bool eq = li->second.value() == ri->second.value();
            if (eq == atom.equal) return *this;
            return std::nullopt;
        }
        // Co-finite cross-parameter correlations are outside this domain; the
        // loader rejects such atoms up front.
        throw StrError("unsupported comparison between string parameters '" + atom.lhs.name +
                       "' and '" + atom.rhs.name + "'");
    }
    if (lhs_param || rhs_param) {
        const Operand& p = lhs_param ? atom.lhs : atom.rhs;
        const Operand& o = lhs_param ? atom.rhs : atom.lhs;
        auto pit = params_.find(p.name);
        if (pit == params_.end()) throw StrError("undeclared string parameter '" + p.name + "'");
        std::string s = *resolve(o, locals);
        const StringParamConstraint& c = pit->second;
        if (atom.equal) {
            if (!c.admits(s)) return std::nullopt;
            StringState next = *this;
            next.params_.at(p.name) = StringParamConstraint::equals(std::move(s));
            return next;
        }
        if (c.is_equals()) {
            if (c.value() == s) return std::nullopt;
            return *this;
        }
        StringState next = *this;
        auto excl = c.excluded();
        excl.insert(std::move(s));
        next.params_.at(p.name) = StringParamConstraint::not_in(std::move(excl));
        return next;
    }
    std::string a = *resolve(atom.lhs, locals);
    std::string b = *resolve(atom.rhs, locals);
    if ((a == b) == atom.equal) return *this;
    return std::nullopt;
}

StringState StringState::apply_update(const std::vector<std::pair<std::string, Operand>>& updates,
                                      const std::map<std::string, std::string>& locals) const {
    std::vector<std::pair<std::string, std::string>> resolved;
    resolved.reserve(updates.size());
    for (const auto& [target, rhs] : updates) {
        if (!vars_.count(target)) throw StrError("undeclared string variable '" + target + "'");
        auto v = resolve(rhs, locals);
        if (!v) throw StrError("string parameter cannot appear in an update right-hand side");
        resolved.emplace_back(target, std::move(*v));
    }
    StringState next = *this;
    for (auto& [target, value] : resolved) next.vars_.at(target) = std::move(value);
    return next;
}

bool StringState::operator==(const StringState& other) const {
    return vars_ == other.vars_ && params_ == other.params_;
}

std::string StringState::canonical_key() const {
    std::ostringstream os;
    for (const auto& [k, v] : vars_) os << k << "=\"" << v << "\";";
    os << "|";
    for (const auto& [k, c] : params_) {
        if (c.is_equals()) {
            os << k << "=\"" << c.value() << "\";";
        } else {
            os << k << "!{";
            for (const auto& s : c.excluded()) os << "\"" << s << "\",";
            os << "};";
        }
    }
    return os.str();
}

}  // namespace ptdmon::strdom

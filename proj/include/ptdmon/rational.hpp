// Exact arbitrary-precision rational arithmetic (thin layer over GMP).
#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace ptdmon {

using Integer = mpz_class;
using Rational = mpq_class;

// Renders p/q, omitting "/1" for integers.
inline std::string to_string(const Rational& q) {
    return q.get_str();
}

// Accepts integer ("42"), fraction ("3/2"), and decimal ("0.25", "-1.5") literals.
inline std::optional<Rational> parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    auto is_int = [](const std::string& s) {
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash), den = text.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) return std::nullopt;
        Rational q;
        if (q.set_str(text, 10) != 0) return std::nullopt;
        if (q.get_den() == 0) return std::nullopt;
        q.canonicalize();
        return q;
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
        if (whole.empty() || whole == "-" || whole == "+") whole += "0";
        if (!is_int(whole) || frac.empty() || !is_int(frac) || frac[0] == '-' || frac[0] == '+')
            return std::nullopt;
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Rational q{Integer(whole)};
        Rational f{Integer(frac), scale};
        f.canonicalize();
        if (whole[0] == '-')
            q -= f;
        else
            q += f;
        return q;
    }
    if (!is_int(text)) return std::nullopt;
    Rational q;
    if (q.set_str(text, 10) != 0) return std::nullopt;
    q.canonicalize();
    return q;
}

inline Rational parse_rational_or_throw(const std::string& text) {
    auto q = parse_rational(text);
    if (!q) throw std::invalid_argument("malformed rational literal: '" + text + "'");
    return *q;
}

}  // namespace ptdmon

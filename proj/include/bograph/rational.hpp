#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bograph {

using Int = boost::multiprecision::cpp_int;

/// Exact rational scalar used everywhere ahead of numeric instantiation.
using Rat = boost::rational<Int>;

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rat& r) {
    std::string s = r.numerator().str();
    if (r.denominator() != 1) {
        s += '/';
        s += r.denominator().str();
    }
    return s;
}

/// Parses "3", "-3/4", "0.25", "2.5e-3" into an exact rational.
inline std::optional<Rat> parse_rational(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    Int numerator = 0;
    Int denominator = 1;
    bool any_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        numerator = numerator * 10 + (text[pos] - '0');
        any_digit = true;
        ++pos;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            numerator = numerator * 10 + (text[pos] - '0');
            denominator *= 10;
            any_digit = true;
            ++pos;
        }
    } else if (pos < text.size() && text[pos] == '/') {
        ++pos;
        Int den = 0;
        bool den_digit = false;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            den = den * 10 + (text[pos] - '0');
            den_digit = true;
            ++pos;
        }
        if (!den_digit || den == 0) return std::nullopt;
        denominator = den;
    }
    if (!any_digit) return std::nullopt;
    if (pos + 1 < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_negative = false;
        if (text[pos] == '+' || text[pos] == '-') {
            exp_negative = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size()) return std::nullopt;
        int exponent = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            exponent = exponent * 10 + (text[pos] - '0');
            if (exponent > 4096) return std::nullopt;
            ++pos;
        }
        Int scale = 1;
        for (int i = 0; i < exponent; ++i) scale *= 10;
        if (exp_negative)
            denominator *= scale;
        else
            numerator *= scale;
    }
    if (pos != text.size()) return std::nullopt;
    if (negative) numerator = -numerator;
    return Rat(numerator, denominator);
}

inline Rat parse_rational_or_throw(std::string_view text) {
    auto r = parse_rational(text);
    if (!r) throw std::invalid_argument("not a rational literal: " + std::string(text));
    return *r;
}

}  // namespace bograph

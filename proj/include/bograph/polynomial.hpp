#pragma once

#include "bograph/rational.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bograph {

/// Power product of parameter names, e.g. Geer_4^2 * D_4.
/// Ordered lexicographically over the (name, exponent) sequence so that
/// polynomial term order is total and stable across runs.
struct Monomial {
    std::map<std::string, int> exponents;  // exponent > 0 for every entry

    bool is_one() const { return exponents.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [_, e] : exponents) d += e;
        return d;
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial out = a;
        for (const auto& [name, e] : b.exponents) {
            int& slot = out.exponents[name];
            slot += e;
            if (slot == 0) out.exponents.erase(name);
        }
        return out;
    }

    /// Component-wise minimum; the largest monomial dividing both.
    friend Monomial gcd(const Monomial& a, const Monomial& b) {
        Monomial out;
        for (const auto& [name, e] : a.exponents) {
            auto it = b.exponents.find(name);
            if (it != b.exponents.end()) {
                int m = std::min(e, it->second);
                if (m > 0) out.exponents[name] = m;
            }
        }
        return out;
    }

    friend Monomial lcm(const Monomial& a, const Monomial& b) {
        Monomial out = a;
        for (const auto& [name, e] : b.exponents) {
            int& slot = out.exponents[name];
            slot = std::max(slot, e);
        }
        return out;
    }

    /// Exact quotient; requires b | a.
    friend Monomial operator/(const Monomial& a, const Monomial& b) {
        Monomial out = a;
        for (const auto& [name, e] : b.exponents) {
            auto it = out.exponents.find(name);
            if (it == out.exponents.end() || it->second < e)
                throw std::invalid_argument("monomial division not exact");
            it->second -= e;
            if (it->second == 0) out.exponents.erase(it);
        }
        return out;
    }

    auto operator<=>(const Monomial& other) const = default;
};

/// Multivariate polynomial with exact rational coefficients, stored expanded.
class Poly {
public:
    Poly() = default;
    explicit Poly(Rat constant) {
        if (constant != Rat(0)) terms_[Monomial{}] = std::move(constant);
    }
    static Poly variable(const std::string& name, int exponent = 1) {
        Poly p;
        Monomial m;
        if (exponent != 0) m.exponents[name] = exponent;
        p.terms_[m] = Rat(1);
        return p;
    }

    const std::map<Monomial, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
    }

    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (!is_constant()) throw std::logic_error("polynomial is not constant");
        return terms_.begin()->second;
    }

    bool is_monomial() const { return terms_.size() == 1; }

    /// Leading term under the monomial order (largest monomial).
    std::pair<Monomial, Rat> leading() const {
        if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
        return *terms_.rbegin();
    }

    void add_term(const Monomial& m, const Rat& c) {
        if (c == Rat(0)) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == Rat(0)) terms_.erase(it);
        }
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly out = a;
        for (const auto& [m, c] : b.terms_) out.add_term(m, c);
        return out;
    }

    friend Poly operator-(const Poly& a) {
        Poly out;
        for (const auto& [m, c] : a.terms_) out.terms_[m] = -c;
        return out;
    }

    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly out;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
        return out;
    }

    friend Poly operator*(const Poly& a, const Rat& k) { return a * Poly(k); }

    Poly pow(int e) const {
        if (e < 0) throw std::invalid_argument("negative power on polynomial");
        Poly out{Rat(1)};
        Poly base = *this;
        while (e > 0) {
            if (e & 1) out = out * base;
            base = base * base;
            e >>= 1;
        }
        return out;
    }

    /// Largest monomial dividing every term (1 for the zero polynomial).
    Monomial monomial_content() const {
        Monomial g;
        bool first = true;
        for (const auto& [m, _] : terms_) {
            g = first ? m : gcd(g, m);
            first = false;
            if (g.is_one()) break;
        }
        return g;
    }

    Poly divide_monomial(const Monomial& m) const {
        Poly out;
        for (const auto& [mm, c] : terms_) out.terms_[mm / m] = c;
        return out;
    }

    template <typename Fn>
    Rat evaluate(Fn&& binding) const {
        Rat acc(0);
        for (const auto& [m, c] : terms_) {
            Rat v = c;
            for (const auto& [name, e] : m.exponents) {
                Rat x = binding(name);
                for (int i = 0; i < e; ++i) v *= x;
            }
            acc += v;
        }
        return acc;
    }

    void collect_params(std::vector<std::string>& out) const {
        for (const auto& [m, _] : terms_)
            for (const auto& [name, e] : m.exponents) out.push_back(name);
    }

    auto operator<=>(const Poly& other) const = default;

private:
    std::map<Monomial, Rat> terms_;
};

}  // namespace bograph

#pragma once

#include "bograph/polynomial.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <sstream>

namespace bograph {

struct EvalError : std::runtime_error {
    enum class Kind { MissingParameter, DivisionByZero };
    Kind kind;
    std::string detail;
    EvalError(Kind k, std::string d)
        : std::runtime_error(k == Kind::MissingParameter ? "missing parameter: " + d
                                                         : "division by zero: " + d),
          kind(k),
          detail(std::move(d)) {}
};

/// Canonical form of a parameter expression: a single fraction of expanded
/// polynomials with lexicographically sorted monomials, integer coefficients
/// with common content cleared, common monomial factors cancelled, and a
/// positive-leading-coefficient denominator. Two expressions that differ only
/// by rearrangement (commutation, association, distribution) canonicalize to
/// the same representative.
class RationalFn {
public:
    RationalFn() : num_(), den_(Rat(1)) {}
    explicit RationalFn(Rat constant) : num_(std::move(constant)), den_(Rat(1)) {}
    static RationalFn variable(const std::string& name) {
        return RationalFn(Poly::variable(name), Poly(Rat(1)));
    }
    RationalFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        normalize();
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const {
        return den_ == Poly(Rat(1)) && num_ == Poly(Rat(1));
    }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }

    Rat constant_value() const {
        return num_.constant_value() / den_.constant_value();
    }

    friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
        if (a.den_ == b.den_) return RationalFn(a.num_ + b.num_, a.den_);
        return RationalFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RationalFn operator-(const RationalFn& a) { return RationalFn(-a.num_, a.den_); }
    friend RationalFn operator-(const RationalFn& a, const RationalFn& b) { return a + (-b); }

    friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
        // Structural cross-cancellation keeps polynomial denominators reduced.
        if (a.num_ == b.den_ && !a.num_.is_zero()) return RationalFn(b.num_, a.den_);
        if (b.num_ == a.den_ && !b.num_.is_zero()) return RationalFn(a.num_, b.den_);
        return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
    }

    friend RationalFn operator/(const RationalFn& a, const RationalFn& b) {
        if (b.num_.is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "1/0 expression");
        return a * RationalFn(b.den_, b.num_);
    }

    RationalFn pow(int e) const {
        if (e == 0) return RationalFn(Rat(1));
        if (e < 0) {
            if (num_.is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "0^negative");
            return RationalFn(den_, num_).pow(-e);
        }
        return RationalFn(num_.pow(e), den_.pow(e));
    }

    /// Exact evaluation under a full parameter binding.
    Rat evaluate(const std::function<Rat(const std::string&)>& binding) const {
        Rat d = den_.evaluate(binding);
        if (d == Rat(0)) throw EvalError(EvalError::Kind::DivisionByZero, to_string());
        return num_.evaluate(binding) / d;
    }

    std::vector<std::string> parameters() const {
        std::vector<std::string> out;
        num_.collect_params(out);
        den_.collect_params(out);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::string to_string() const;

    auto operator<=>(const RationalFn& other) const = default;

private:
    void normalize() {
        if (den_.is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "zero denominator");
        if (num_.is_zero()) {
            den_ = Poly(Rat(1));
            return;
        }
        if (num_ == den_) {
            num_ = Poly(Rat(1));
            den_ = Poly(Rat(1));
            return;
        }
        Monomial g = gcd(num_.monomial_content(), den_.monomial_content());
        if (!g.is_one()) {
            num_ = num_.divide_monomial(g);
            den_ = den_.divide_monomial(g);
        }
        // Scale so every coefficient is an integer and their common content is 1.
        using boost::multiprecision::gcd;
        using boost::multiprecision::lcm;
        Int den_lcm = 1;
        for (const auto& [m, c] : num_.terms()) den_lcm = lcm(den_lcm, c.denominator());
        for (const auto& [m, c] : den_.terms()) den_lcm = lcm(den_lcm, c.denominator());
        Int num_gcd = 0;
        auto fold = [&](const Rat& c) {
            Int n = c.numerator() * (den_lcm / c.denominator());
            num_gcd = gcd(num_gcd, n < 0 ? Int(-n) : n);
        };
        for (const auto& [m, c] : num_.terms()) fold(c);
        for (const auto& [m, c] : den_.terms()) fold(c);
        Rat scale(den_lcm, num_gcd);
        if (scale != Rat(1)) {
            num_ = num_ * scale;
            den_ = den_ * scale;
        }
        if (den_.leading().second < Rat(0)) {
            num_ = -num_;
            den_ = -den_;
        }
    }

    Poly num_;
    Poly den_;
};

namespace detail {

inline std::string format_monomial_term(const Monomial& m, const Rat& coef, bool leading) {
    std::string out;
    Rat a = coef;
    bool negative = a < Rat(0);
    if (negative) a = -a;
    if (leading) {
        if (negative) out += '-';
    } else {
        out += negative ? '-' : '+';
    }
    bool coef_shown = false;
    if (a != Rat(1) || m.is_one()) {
        out += to_string(a);
        coef_shown = true;
    }
    bool first_var = true;
    for (const auto& [name, e] : m.exponents) {
        if (coef_shown || !first_var) out += '*';
        out += name;
        if (e != 1) {
            out += '^';
            out += std::to_string(e);
        }
        coef_shown = false;
        first_var = false;
    }
    return out;
}

inline std::string format_poly(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool leading = true;
    // Descending monomial order gives the highest-degree-ish term first.
    const auto& t = p.terms();
    for (auto it = t.rbegin(); it != t.rend(); ++it) {
        out += format_monomial_term(it->first, it->second, leading);
        leading = false;
    }
    return out;
}

inline bool poly_needs_parens(const Poly& p, bool as_denominator) {
    if (p.terms().size() > 1) return true;
    if (p.is_zero()) return false;
    const auto& [m, c] = *p.terms().begin();
    if (!as_denominator) return false;
    if (m.is_one()) return false;                  // plain integer
    if (c == Rat(1) && m.exponents.size() == 1) return false;  // bare x or x^k
    return true;
}

}  // namespace detail

inline std::string RationalFn::to_string() const {
    if (den_ == Poly(Rat(1))) return detail::format_poly(num_);
    std::string n = detail::format_poly(num_);
    if (detail::poly_needs_parens(num_, false)) n = "(" + n + ")";
    std::string d = detail::format_poly(den_);
    if (detail::poly_needs_parens(den_, true)) d = "(" + d + ")";
    return n + "/" + d;
}

/// Parameter expression tree over rational constants, parameter names and
/// {+, -, *, /, ^int, unary -}. Nodes are immutable and carry their canonical
/// fraction, so comparison and the printed form are rearrangement-stable.
class ParamExpr {
public:
    ParamExpr() : ParamExpr(Rat(0)) {}
    explicit ParamExpr(Rat constant) {
        node_ = std::make_shared<const Node>(Node{RationalFn(std::move(constant))});
    }
    explicit ParamExpr(int constant) : ParamExpr(Rat(constant)) {}
    static ParamExpr param(const std::string& name) {
        return wrap(RationalFn::variable(name));
    }

    static ParamExpr one() { return ParamExpr(Rat(1)); }
    static ParamExpr zero() { return ParamExpr(Rat(0)); }

    const RationalFn& canonical() const { return node_->canon; }

    friend ParamExpr operator+(const ParamExpr& a, const ParamExpr& b) {
        return wrap(a.canonical() + b.canonical());
    }
    friend ParamExpr operator-(const ParamExpr& a, const ParamExpr& b) {
        return wrap(a.canonical() - b.canonical());
    }
    friend ParamExpr operator-(const ParamExpr& a) { return wrap(-a.canonical()); }
    friend ParamExpr operator*(const ParamExpr& a, const ParamExpr& b) {
        return wrap(a.canonical() * b.canonical());
    }
    friend ParamExpr operator/(const ParamExpr& a, const ParamExpr& b) {
        return wrap(a.canonical() / b.canonical());
    }
    ParamExpr pow(int e) const { return wrap(canonical().pow(e)); }

    bool is_zero() const { return canonical().is_zero(); }
    bool is_one() const { return canonical().is_one(); }

    Rat evaluate(const std::function<Rat(const std::string&)>& binding) const {
        return canonical().evaluate(binding);
    }

    std::vector<std::string> parameters() const { return canonical().parameters(); }

    std::string to_string() const { return canonical().to_string(); }

    friend bool operator==(const ParamExpr& a, const ParamExpr& b) {
        return a.canonical() == b.canonical();
    }

    /// Parses an expression; returns nullopt with `error` set on failure.
    static std::optional<ParamExpr> parse(std::string_view text, std::string* error = nullptr);

private:
    struct Node {
        RationalFn canon;
    };
    static ParamExpr wrap(RationalFn rf) {
        ParamExpr e;
        e.node_ = std::make_shared<const Node>(Node{std::move(rf)});
        return e;
    }
    std::shared_ptr<const Node> node_;
};

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    std::optional<ParamExpr> run(std::string* error) {
        try {
            auto e = parse_sum();
            skip_ws();
            if (pos_ != text_.size()) throw std::invalid_argument("trailing input");
            return e;
        } catch (const std::exception& ex) {
            if (error) *error = ex.what();
            return std::nullopt;
        }
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ParamExpr parse_sum() {
        ParamExpr acc = parse_term();
        while (true) {
            if (eat('+'))
                acc = acc + parse_term();
            else if (eat('-'))
                acc = acc - parse_term();
            else
                return acc;
        }
    }

    ParamExpr parse_term() {
        ParamExpr acc = parse_factor();
        while (true) {
            if (eat('*'))
                acc = acc * parse_factor();
            else if (eat('/'))
                acc = acc / parse_factor();
            else
                return acc;
        }
    }

    ParamExpr parse_factor() {
        if (eat('-')) return -parse_factor();
        if (eat('+')) return parse_factor();
        ParamExpr base = parse_primary();
        if (eat('^')) {
            bool neg = eat('-');
            std::string digits;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                digits += text_[pos_++];
            if (digits.empty()) throw std::invalid_argument("exponent expected after '^'");
            int e = std::stoi(digits);
            return base.pow(neg ? -e : e);
        }
        return base;
    }

    ParamExpr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw std::invalid_argument("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            ParamExpr e = parse_sum();
            if (!eat(')')) throw std::invalid_argument("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            // Exponent part (not followed by an identifier character).
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                std::size_t save = pos_;
                ++pos_;
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
                if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                        ++pos_;
                } else {
                    pos_ = save;
                }
            }
            auto r = parse_rational(text_.substr(start, pos_ - start));
            if (!r) throw std::invalid_argument("bad numeric literal");
            return ParamExpr(*r);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            return ParamExpr::param(std::string(text_.substr(start, pos_ - start)));
        }
        throw std::invalid_argument(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::optional<ParamExpr> ParamExpr::parse(std::string_view text, std::string* error) {
    return detail::ExprParser(text).run(error);
}

}  // namespace bograph

#pragma once

#include "bograph/statespace.hpp"

#include <cmath>
#include <complex>

namespace bograph {

/// Monic characteristic polynomial, coefficients in descending powers:
/// coeffs[0] = 1 (s^n) ... coeffs[n] (constant).
struct CharPoly {
    std::vector<double> coeffs;
    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Faddeev-LeVerrier trace recurrence; exact up to rounding for desk-scale n.
inline CharPoly char_poly(const NumericMatrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("char_poly needs a square matrix");
    const std::size_t n = a.rows;
    CharPoly p;
    p.coeffs.assign(n + 1, 0.0);
    p.coeffs[0] = 1.0;
    if (n == 0) return p;
    // M <- A*(M + c*I), c = -tr(M')/k
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;  // M1 = I
    double c = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<double> am(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < n; ++t) acc += a.at(i, t) * m[t * n + j];
                am[i * n + j] = acc;
            }
        double trace = 0.0;
        for (std::size_t i = 0; i < n; ++i) trace += am[i * n + i];
        c = -trace / static_cast<double>(k);
        p.coeffs[k] = c;
        m = am;
        for (std::size_t i = 0; i < n; ++i) m[i * n + i] += c;
    }
    return p;
}

namespace detail {

inline std::complex<long double> horner(const std::vector<double>& coeffs,
                                        std::complex<long double> x) {
    std::complex<long double> acc(0.0L, 0.0L);
    for (double c : coeffs) acc = acc * x + static_cast<long double>(c);
    return acc;
}

/// Durand-Kerner simultaneous iteration on the monic polynomial.
inline std::vector<std::complex<double>> durand_kerner(const std::vector<double>& coeffs) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    std::vector<std::complex<long double>> roots(static_cast<std::size_t>(n));
    std::complex<long double> seed(0.4L, 0.9L);
    std::complex<long double> acc(1.0L, 0.0L);
    for (int i = 0; i < n; ++i) {
        acc *= seed;
        roots[static_cast<std::size_t>(i)] = acc;
    }
    for (int iter = 0; iter < 500; ++iter) {
        long double worst = 0.0L;
        for (int i = 0; i < n; ++i) {
            std::complex<long double> xi = roots[static_cast<std::size_t>(i)];
            std::complex<long double> denom(1.0L, 0.0L);
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= xi - roots[static_cast<std::size_t>(j)];
            std::complex<long double> delta = horner(coeffs, xi) / denom;
            roots[static_cast<std::size_t>(i)] = xi - delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-16L) break;
    }
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (auto& r : roots)
        out.emplace_back(static_cast<double>(r.real()), static_cast<double>(r.imag()));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

inline double coeff_norm(const CharPoly& p) {
    double norm = 0.0;
    for (double c : p.coeffs) norm = std::max(norm, std::abs(c));
    return norm;
}

}  // namespace detail

struct RootError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All n roots of the characteristic polynomial: closed form through n = 2,
/// simultaneous iteration above that. Every returned root satisfies
/// |p(root)| <= tol * max(1, max|coeff|).
inline std::vector<std::complex<double>> eigenvalues(const NumericMatrix& a, double tol = 1e-9) {
    CharPoly p = char_poly(a);
    const int n = p.degree();
    std::vector<std::complex<double>> roots;
    if (n == 0) return roots;
    if (n == 1) {
        roots.emplace_back(-p.coeffs[1], 0.0);
    } else if (n == 2) {
        double b = p.coeffs[1], c = p.coeffs[2];
        double disc = b * b - 4.0 * c;
        if (disc >= 0.0) {
            double root = std::sqrt(disc);
            roots.emplace_back((-b - root) / 2.0, 0.0);
            roots.emplace_back((-b + root) / 2.0, 0.0);
        } else {
            double root = std::sqrt(-disc);
            roots.emplace_back(-b / 2.0, -root / 2.0);
            roots.emplace_back(-b / 2.0, root / 2.0);
        }
    } else {
        roots = detail::durand_kerner(p.coeffs);
    }
    const double bound = tol * std::max(1.0, detail::coeff_norm(p));
    for (const auto& r : roots) {
        long double residual = std::abs(detail::horner(p.coeffs, std::complex<long double>(
                                                                     r.real(), r.imag())));
        if (static_cast<double>(residual) > bound)
            throw RootError("root refinement did not reach the residual bound");
    }
    return roots;
}

enum class Classification { Stable, MarginallyStable, Unstable };
enum class StabilitySemantics { Standard, PaperLiteral };
enum class StabilityMethod { GeneralEigen, FactoredCubic, TriangularShortcut };

inline const char* classification_name(Classification c) {
    switch (c) {
        case Classification::Stable: return "Stable";
        case Classification::MarginallyStable: return "MarginallyStable";
        case Classification::Unstable: return "Unstable";
    }
    return "?";
}

/// The literal Def.-40 predicates. They are existential and therefore not
/// mutually exclusive: a saddle matrix satisfies stable_sys and unstable_sys
/// at the same time.
struct PaperFlags {
    bool stable_sys = false;
    bool unstable_sys = false;
    bool marginally_stable_sys = false;
};

struct StabilityVerdict {
    Classification classification = Classification::Stable;
    std::vector<std::complex<double>> eigenvalues;
    StabilitySemantics semantics = StabilitySemantics::Standard;
    StabilityMethod method = StabilityMethod::GeneralEigen;
    std::optional<PaperFlags> flags;  // present under PaperLiteral semantics
};

namespace detail {

inline double spectral_band(const std::vector<std::complex<double>>& roots, double tol) {
    double scale = 0.0;
    for (const auto& r : roots) scale = std::max(scale, std::abs(r));
    return tol * (1.0 + scale);
}

inline Classification classify_roots(const std::vector<std::complex<double>>& roots,
                                     double band) {
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) max_re = std::max(max_re, r.real());
    if (max_re < -band) return Classification::Stable;
    if (max_re > band) return Classification::Unstable;
    return Classification::MarginallyStable;
}

inline StabilityVerdict verdict_from_roots(std::vector<std::complex<double>> roots,
                                           StabilitySemantics semantics, double tol,
                                           StabilityMethod method) {
    StabilityVerdict v;
    v.semantics = semantics;
    v.method = method;
    double band = spectral_band(roots, tol);
    v.classification = classify_roots(roots, band);
    if (semantics == StabilitySemantics::PaperLiteral) {
        PaperFlags flags;
        for (const auto& r : roots) {
            if (r.real() < -band) flags.stable_sys = true;
            if (r.real() > band) flags.unstable_sys = true;
            if (std::abs(r.real()) <= band) flags.marginally_stable_sys = true;
        }
        v.flags = flags;
    }
    v.eigenvalues = std::move(roots);
    return v;
}

}  // namespace detail

/// Standard semantics: Stable iff every eigenvalue is strictly left of the
/// tolerance band, Unstable iff one is strictly right of it, marginal
/// otherwise. PaperLiteral adds the three literal existence flags.
inline StabilityVerdict classify(const NumericMatrix& a,
                                 StabilitySemantics semantics = StabilitySemantics::Standard,
                                 double tol = 1e-9) {
    return detail::verdict_from_roots(eigenvalues(a, std::max(tol, 1e-9)), semantics, tol,
                                      StabilityMethod::GeneralEigen);
}

enum class CubicMode { Corrected, PaperLiteral };

/// Stability test for the factored cubic (s + r)(s^2 + b1 s + c1).
/// Corrected mode is the Routh-Hurwitz condition r > 0 and b1 > 0 and c1 > 0.
/// PaperLiteral evaluates the printed disjunction verbatim; it accepts some
/// unstable quadratic factors and exists for documentation tests.
inline bool factored_cubic_criterion(double b1, double c1, double r, CubicMode mode) {
    if (mode == CubicMode::Corrected) return r > 0.0 && b1 > 0.0 && c1 > 0.0;
    double disc = b1 * b1 - 4.0 * c1;
    if (r > 0.0) return true;
    if (b1 > 0.0 && (disc < 0.0 || disc == 0.0)) return true;
    if (disc > 0.0 && (disc < b1 || -b1 < std::sqrt(disc))) return true;
    return false;
}

struct CubicFactorization {
    double r = 0.0;
    double b1 = 0.0;
    double c1 = 0.0;
};

/// Matches char(A) of a 3x3 matrix against (s + r)(s^2 + b1 s + c1) using the
/// most negative real eigenvalue as -r, then checks the reconstruction
/// against the three coefficient-matching equations.
inline std::optional<CubicFactorization> match_cubic_factorization(const NumericMatrix& a,
                                                                   double tol = 1e-7) {
    if (a.rows != 3 || a.cols != 3)
        throw std::invalid_argument("match_cubic_factorization needs a 3x3 matrix");
    CharPoly p = char_poly(a);
    auto roots = eigenvalues(a, 1e-9);
    double band = detail::spectral_band(roots, std::max(tol, 1e-12));
    std::optional<double> real_root;
    for (const auto& root : roots) {
        if (std::abs(root.imag()) > band) continue;
        if (!real_root || root.real() < *real_root) real_root = root.real();
    }
    if (!real_root) return std::nullopt;
    CubicFactorization f;
    f.r = -*real_root;
    f.b1 = p.coeffs[1] - f.r;
    f.c1 = p.coeffs[2] - f.b1 * f.r;
    // Residual of the last matching equation: c1 * r must give the constant
    // coefficient back.
    double scale = std::max(1.0, detail::coeff_norm(p));
    if (std::abs(f.c1 * f.r - p.coeffs[3]) > tol * scale) return std::nullopt;
    return f;
}

/// Eigenvalues of a triangular or diagonal matrix are its diagonal entries;
/// nullopt when the matrix is not triangular within the tolerance.
inline std::optional<StabilityVerdict> triangular_shortcut(
    const NumericMatrix& a, double tol = 1e-9,
    StabilitySemantics semantics = StabilitySemantics::Standard) {
    if (a.rows != a.cols) return std::nullopt;
    double scale = 0.0;
    for (double v : a.data) scale = std::max(scale, std::abs(v));
    double band = tol * (1.0 + scale);
    bool upper = true, lower = true;
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) {
            if (j < i && std::abs(a.at(i, j)) > band) upper = false;
            if (i < j && std::abs(a.at(i, j)) > band) lower = false;
        }
    if (!upper && !lower) return std::nullopt;
    std::vector<std::complex<double>> roots;
    roots.reserve(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) roots.emplace_back(a.at(i, i), 0.0);
    std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return detail::verdict_from_roots(std::move(roots), semantics, tol,
                                      StabilityMethod::TriangularShortcut);
}

/// Routh array test: true iff every root of p lies strictly in the left half
/// plane, decided without root extraction. A vanishing row means roots that
/// are symmetric about the axes, which is never strictly Hurwitz; an isolated
/// first-column zero is perturbed by a small epsilon.
inline bool routh_hurwitz(const CharPoly& p) {
    std::vector<double> coeffs = p.coeffs;
    if (coeffs.empty()) return false;
    if (coeffs[0] < 0.0)
        for (double& c : coeffs) c = -c;
    const int n = static_cast<int>(coeffs.size()) - 1;
    if (n == 0) return true;
    // Necessary: all coefficients strictly positive.
    for (double c : coeffs)
        if (c <= 0.0) return false;
    std::vector<double> above, current;
    for (std::size_t i = 0; i < coeffs.size(); i += 2) above.push_back(coeffs[i]);
    for (std::size_t i = 1; i < coeffs.size(); i += 2) current.push_back(coeffs[i]);
    const double eps = 1e-12 * (1.0 + detail::coeff_norm(p));
    int sign_changes = 0;
    double prev_pivot = above[0];
    while (!current.empty()) {
        bool all_zero = true;
        for (double v : current)
            if (std::abs(v) > eps) all_zero = false;
        if (all_zero) return false;  // roots symmetric about the axes, never strictly Hurwitz
        double pivot = current[0];
        if (std::abs(pivot) <= eps) pivot = eps;  // isolated zero pivot
        if ((pivot > 0.0) != (prev_pivot > 0.0)) ++sign_changes;
        prev_pivot = pivot;
        std::vector<double> next;
        for (std::size_t i = 0; i + 1 < above.size(); ++i) {
            double hi = above[i + 1];
            double lo = i + 1 < current.size() ? current[i + 1] : 0.0;
            next.push_back((pivot * hi - above[0] * lo) / pivot);
        }
        above = current;
        above[0] = pivot;
        current = next;
    }
    return sign_changes == 0;
}

}  // namespace bograph

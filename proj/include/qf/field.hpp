#pragma once

// Field tower: Q, F_p, rational function fields k(t), quadratic extensions
// K[x]/(x^2 - a x + b), and a Laurent view of Q((t)) (resp. F_p((t)) for odd p)
// whose elements are represented in Q(t).  All arithmetic is exact and every
// value is kept in a canonical form: reduced fractions, monic denominators,
// residues in [0, p).

#include "qf/integers.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace qf {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed inputs (bad JSON, wrong dimensions, violated preconditions).
class input_error : public error {
public:
    using error::error;
};

/// Operation not offered over the given field.
class unsupported_error : public error {
public:
    using error::error;
};

/// A bounded search ran out of budget; the decision (if any) still stands.
class budget_error : public error {
public:
    using error::error;
};

enum class FieldKind { rationals, prime_field, rational_functions, quad_ext, laurent_view };

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class FieldElement;
using Poly = std::vector<FieldElement>; // c[i] is the coefficient of t^i; no trailing zeros; empty = 0

struct RatFuncRep {
    Poly num, den; // reduced, den monic and nonzero
};
struct QuadRep {
    std::vector<FieldElement> c; // exactly two coordinates over the base
};

class FieldElement {
public:
    using Rep = std::variant<Rational, long long, RatFuncRep, QuadRep>;

    FieldElement() = default;
    FieldElement(FieldPtr field, Rep rep) : field_(std::move(field)), rep_(std::move(rep)) {}

    const FieldPtr& field() const { return field_; }
    const Rep& rep() const { return rep_; }

    bool is_zero() const;
    bool is_one() const;

    FieldElement operator+(const FieldElement& o) const;
    FieldElement operator-(const FieldElement& o) const;
    FieldElement operator*(const FieldElement& o) const;
    FieldElement operator/(const FieldElement& o) const;
    FieldElement operator-() const;
    FieldElement inverse() const;
    FieldElement pow(long long e) const;

    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
    FieldElement& operator/=(const FieldElement& o) { return *this = *this / o; }

    bool operator==(const FieldElement& o) const;
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    /// Canonical UTF-8 serialisation ("p/q", "k", "(...)/(...)", "[x0,x1]").
    std::string str() const;

    const Rational& rat() const { return std::get<Rational>(rep_); }
    long long residue() const { return std::get<long long>(rep_); }
    const RatFuncRep& ratfunc() const { return std::get<RatFuncRep>(rep_); }
    const QuadRep& quad() const { return std::get<QuadRep>(rep_); }

private:
    FieldPtr field_;
    Rep rep_;
};

using FE = FieldElement;

class Field : public std::enable_shared_from_this<Field> {
public:
    FieldKind kind;
    long long p = 0;            // prime_field
    FieldPtr base;              // rational_functions / quad_ext / laurent_view
    std::string variable = "t"; // rational_functions (and the laurent view)
    // quad_ext minimal polynomial x^2 - alpha x + beta, alpha/beta over base
    std::optional<FieldElement> alpha, beta;

    static FieldPtr rationals();
    static FieldPtr prime_field(long long p);
    static FieldPtr rational_functions(FieldPtr base, std::string variable = "t");
    /// K[x]/(x^2 - alpha x + beta); checks irreducibility over the base.
    static FieldPtr quad_ext(FieldPtr base, FieldElement alpha, FieldElement beta);
    /// K(sqrt(d)), i.e. x^2 - d.  In characteristic 2 this is the inseparable shape.
    static FieldPtr quad_ext_sqrt(FieldPtr base, const FieldElement& d);
    static FieldPtr laurent_view(FieldPtr base);

    long long characteristic() const {
        switch (kind) {
        case FieldKind::rationals: return 0;
        case FieldKind::prime_field: return p;
        default: return base->characteristic();
        }
    }

    bool is_ratfunc_like() const {
        return kind == FieldKind::rational_functions || kind == FieldKind::laurent_view;
    }

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement integer(long long n) const;
    FieldElement rational(const Rational& r) const;
    /// Lift an element of the base field (identity map for rationals/prime fields).
    FieldElement embed(const FieldElement& base_elem) const;
    /// The variable t of a rational-function or Laurent field.
    FieldElement variable_element() const;
    /// The class of x in a quadratic extension (the root of the minimal polynomial).
    FieldElement generator() const;

    FieldElement parse(const std::string& s) const;

    bool operator==(const Field& o) const;
    bool operator!=(const Field& o) const { return !(*this == o); }

    nlohmann::json to_json() const;
    static FieldPtr from_json(const nlohmann::json& j);

    std::string describe() const;

private:
    struct Key {};

public:
    explicit Field(Key) {}

private:
    static std::shared_ptr<Field> make() { return std::make_shared<Field>(Key{}); }
    static FieldPtr quad_ext_unchecked(FieldPtr base, FieldElement alpha, FieldElement beta);
};

inline bool same_field(const FieldPtr& a, const FieldPtr& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_field(const FieldElement& a, const FieldElement& b) {
    if (!same_field(a.field(), b.field())) throw input_error("field mismatch");
}

// ---------------------------------------------------------------------------
// Polynomial helpers (dense, over the base field of a rational-function field)
// ---------------------------------------------------------------------------

inline void poly_trim(Poly& a) {
    while (!a.empty() && a.back().is_zero()) a.pop_back();
}

inline int poly_deg(const Poly& a) { return static_cast<int>(a.size()) - 1; } // -1 for 0

inline Poly poly_zero() { return {}; }

inline Poly poly_const(const FieldElement& c) {
    Poly a{c};
    poly_trim(a);
    return a;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r = a.size() >= b.size() ? a : b;
    const Poly& s = a.size() >= b.size() ? b : a;
    for (size_t i = 0; i < s.size(); ++i) r[i] += s[i];
    poly_trim(r);
    return r;
}

inline Poly poly_neg(const Poly& a) {
    Poly r = a;
    for (auto& c : r) c = -c;
    return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_neg(b)); }

inline Poly poly_mul(const Poly& a, const Poly& b, const FieldPtr& k) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, k->zero());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

inline Poly poly_scale(const Poly& a, const FieldElement& c) {
    Poly r = a;
    for (auto& x : r) x *= c;
    poly_trim(r);
    return r;
}

/// Division with remainder: a = q*b + r, deg r < deg b.
inline std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b, const FieldPtr& k) {
    if (b.empty()) throw input_error("polynomial division by zero");
    Poly r = a, q;
    int db = poly_deg(b);
    FieldElement lead_inv = b.back().inverse();
    while (poly_deg(r) >= db) {
        int shift = poly_deg(r) - db;
        FieldElement c = r.back() * lead_inv;
        if (static_cast<int>(q.size()) < shift + 1) q.resize(shift + 1, k->zero());
        q[shift] += c;
        for (int i = 0; i <= db; ++i) r[i + shift] -= c * b[i];
        poly_trim(r);
    }
    poly_trim(q);
    return {q, r};
}

inline Poly poly_monic(const Poly& a) {
    if (a.empty()) return a;
    return poly_scale(a, a.back().inverse());
}

inline Poly poly_gcd(Poly a, Poly b, const FieldPtr& k) {
    while (!b.empty()) {
        Poly r = poly_divmod(a, b, k).second;
        a = std::move(b);
        b = std::move(r);
    }
    return poly_monic(a);
}

inline Poly poly_derivative(const Poly& a, const FieldPtr& k) {
    if (a.size() <= 1) return {};
    Poly r(a.size() - 1, k->zero());
    for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * k->integer(static_cast<long long>(i));
    poly_trim(r);
    return r;
}

inline bool poly_eq(const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

/// t-adic valuation of a nonzero polynomial (index of first nonzero coefficient).
inline int poly_valuation(const Poly& a) {
    for (size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero()) return static_cast<int>(i);
    throw input_error("valuation of zero polynomial");
}

inline Poly poly_shift_down(const Poly& a, int k) {
    Poly r(a.begin() + k, a.end());
    return r;
}

// ---------------------------------------------------------------------------
// Field factories
// ---------------------------------------------------------------------------

inline FieldPtr Field::rationals() {
    static FieldPtr f = [] {
        auto f = make();
        f->kind = FieldKind::rationals;
        return FieldPtr(f);
    }();
    return f;
}

inline FieldPtr Field::prime_field(long long q) {
    if (q < 2 || !is_prime(Int(q))) throw input_error("prime_field: p must be prime");
    auto f = make();
    f->kind = FieldKind::prime_field;
    f->p = q;
    return f;
}

inline FieldPtr Field::rational_functions(FieldPtr base, std::string variable) {
    if (base->kind != FieldKind::rationals && base->kind != FieldKind::prime_field)
        throw unsupported_error("rational_functions: base must be Q or F_p");
    auto f = make();
    f->kind = FieldKind::rational_functions;
    f->base = std::move(base);
    f->variable = std::move(variable);
    return f;
}

inline FieldPtr Field::laurent_view(FieldPtr base) {
    if (base->kind != FieldKind::rationals &&
        !(base->kind == FieldKind::prime_field && base->p % 2 == 1))
        throw unsupported_error("laurent_view: base must be Q or F_p with p odd");
    auto f = make();
    f->kind = FieldKind::laurent_view;
    f->base = std::move(base);
    return f;
}

inline FieldPtr Field::quad_ext_unchecked(FieldPtr base, FieldElement alpha, FieldElement beta) {
    auto f = make();
    f->kind = FieldKind::quad_ext;
    f->base = std::move(base);
    f->alpha = std::move(alpha);
    f->beta = std::move(beta);
    return f;
}

inline FieldPtr Field::quad_ext_sqrt(FieldPtr base, const FieldElement& d) {
    FieldElement zero = base->zero();
    return quad_ext(std::move(base), std::move(zero), -d);
}

// ---------------------------------------------------------------------------
// Element construction
// ---------------------------------------------------------------------------

inline FieldElement Field::zero() const {
    auto self = shared_from_this();
    switch (kind) {
    case FieldKind::rationals: return {self, Rational(0)};
    case FieldKind::prime_field: return {self, static_cast<long long>(0)};
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: return {self, RatFuncRep{{}, {base->one()}}};
    case FieldKind::quad_ext: return {self, QuadRep{{base->zero(), base->zero()}}};
    }
    throw error("unreachable");
}

inline FieldElement Field::one() const { return integer(1); }

inline FieldElement Field::integer(long long n) const { return rational(Rational(n)); }

inline FieldElement Field::rational(const Rational& r) const {
    auto self = shared_from_this();
    switch (kind) {
    case FieldKind::rationals: return {self, r};
    case FieldKind::prime_field: {
        Int num = numerator(r) % p, den = denominator(r) % p;
        if (den == 0) throw input_error("rational has no image in F_p");
        long long nn = static_cast<long long>(((num % p) + p) % p);
        long long dd = static_cast<long long>(((den % p) + p) % p);
        // modular inverse by Fermat
        long long inv = 1, b = dd, e = p - 2;
        while (e) {
            if (e & 1) inv = inv * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return {self, nn * inv % p};
    }
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: {
        Poly num = poly_const(base->rational(r));
        return {self, RatFuncRep{num, {base->one()}}};
    }
    case FieldKind::quad_ext: return {self, QuadRep{{base->rational(r), base->zero()}}};
    }
    throw error("unreachable");
}

inline FieldElement Field::embed(const FieldElement& base_elem) const {
    if (kind == FieldKind::rationals || kind == FieldKind::prime_field) {
        if (!same_field(base_elem.field(), shared_from_this()))
            throw input_error("embed: element not in this field");
        return base_elem;
    }
    if (!same_field(base_elem.field(), base)) throw input_error("embed: element not in base field");
    auto self = shared_from_this();
    if (is_ratfunc_like()) return {self, RatFuncRep{poly_const(base_elem), {base->one()}}};
    return {self, QuadRep{{base_elem, base->zero()}}};
}

inline FieldElement Field::variable_element() const {
    if (!is_ratfunc_like()) throw unsupported_error("variable_element: not a function field");
    auto self = shared_from_this();
    return {self, RatFuncRep{{base->zero(), base->one()}, {base->one()}}};
}

inline FieldElement Field::generator() const {
    if (kind != FieldKind::quad_ext) throw unsupported_error("generator: not a quadratic extension");
    auto self = shared_from_this();
    return {self, QuadRep{{base->zero(), base->one()}}};
}

// ---------------------------------------------------------------------------
// Element arithmetic
// ---------------------------------------------------------------------------

namespace detail {

inline RatFuncRep rf_normalize(Poly num, Poly den, const FieldPtr& k) {
    if (den.empty()) throw input_error("division by zero in function field");
    if (num.empty()) return {{}, {k->one()}};
    Poly g = poly_gcd(num, den, k);
    if (poly_deg(g) > 0 || !g.empty()) {
        num = poly_divmod(num, g, k).first;
        den = poly_divmod(den, g, k).first;
    }
    FieldElement lead = den.back();
    if (!lead.is_one()) {
        FieldElement inv = lead.inverse();
        num = poly_scale(num, inv);
        den = poly_scale(den, inv);
    }
    return {std::move(num), std::move(den)};
}

} // namespace detail

inline bool FieldElement::is_zero() const {
    switch (field_->kind) {
    case FieldKind::rationals: return rat() == 0;
    case FieldKind::prime_field: return residue() == 0;
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: return ratfunc().num.empty();
    case FieldKind::quad_ext: return quad().c[0].is_zero() && quad().c[1].is_zero();
    }
    throw error("unreachable");
}

inline bool FieldElement::is_one() const { return *this == field_->one(); }

inline FieldElement FieldElement::operator+(const FieldElement& o) const {
    require_same_field(*this, o);
    switch (field_->kind) {
    case FieldKind::rationals: return {field_, rat() + o.rat()};
    case FieldKind::prime_field: return {field_, (residue() + o.residue()) % field_->p};
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: {
        const auto& a = ratfunc();
        const auto& b = o.ratfunc();
        const FieldPtr& k = field_->base;
        Poly num = poly_add(poly_mul(a.num, b.den, k), poly_mul(b.num, a.den, k));
        Poly den = poly_mul(a.den, b.den, k);
        return {field_, detail::rf_normalize(std::move(num), std::move(den), k)};
    }
    case FieldKind::quad_ext:
        return {field_, QuadRep{{quad().c[0] + o.quad().c[0], quad().c[1] + o.quad().c[1]}}};
    }
    throw error("unreachable");
}

inline FieldElement FieldElement::operator-() const {
    switch (field_->kind) {
    case FieldKind::rationals: return {field_, -rat()};
    case FieldKind::prime_field: return {field_, (field_->p - residue()) % field_->p};
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: return {field_, RatFuncRep{poly_neg(ratfunc().num), ratfunc().den}};
    case FieldKind::quad_ext: return {field_, QuadRep{{-quad().c[0], -quad().c[1]}}};
    }
    throw error("unreachable");
}

inline FieldElement FieldElement::operator-(const FieldElement& o) const { return *this + (-o); }

inline FieldElement FieldElement::operator*(const FieldElement& o) const {
    require_same_field(*this, o);
    switch (field_->kind) {
    case FieldKind::rationals: return {field_, rat() * o.rat()};
    case FieldKind::prime_field: {
        // p < 2^31 so the product fits in 64 bits
        return {field_, (residue() * o.residue()) % field_->p};
    }
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: {
        const auto& a = ratfunc();
        const auto& b = o.ratfunc();
        const FieldPtr& k = field_->base;
        Poly num = poly_mul(a.num, b.num, k);
        Poly den = poly_mul(a.den, b.den, k);
        return {field_, detail::rf_normalize(std::move(num), std::move(den), k)};
    }
    case FieldKind::quad_ext: {
        // (a0 + a1 th)(b0 + b1 th), th^2 = alpha th - beta
        const auto& a = quad().c;
        const auto& b = o.quad().c;
        const FieldElement& al = *field_->alpha;
        const FieldElement& be = *field_->beta;
        FieldElement c0 = a[0] * b[0] - be * (a[1] * b[1]);
        FieldElement c1 = a[0] * b[1] + a[1] * b[0] + al * (a[1] * b[1]);
        return {field_, QuadRep{{std::move(c0), std::move(c1)}}};
    }
    }
    throw error("unreachable");
}

inline FieldElement FieldElement::inverse() const {
    if (is_zero()) throw input_error("inverse of zero");
    switch (field_->kind) {
    case FieldKind::rationals: return {field_, Rational(1) / rat()};
    case FieldKind::prime_field: {
        long long inv = 1, b = residue(), e = field_->p - 2;
        while (e) {
            if (e & 1) inv = inv * b % field_->p;
            b = b * b % field_->p;
            e >>= 1;
        }
        return {field_, inv};
    }
    case FieldKind::rational_functions:
    case FieldKind::laurent_view:
        return {field_, detail::rf_normalize(ratfunc().den, ratfunc().num, field_->base)};
    case FieldKind::quad_ext: {
        // 1/x = conj(x) / N(x)
        const auto& a = quad().c;
        const FieldElement& al = *field_->alpha;
        const FieldElement& be = *field_->beta;
        FieldElement n = a[0] * a[0] + al * (a[0] * a[1]) + be * (a[1] * a[1]);
        FieldElement ninv = n.inverse(); // in base
        return {field_, QuadRep{{(a[0] + al * a[1]) * ninv, -(a[1] * ninv)}}};
    }
    }
    throw error("unreachable");
}

inline FieldElement FieldElement::operator/(const FieldElement& o) const { return *this * o.inverse(); }

inline FieldElement FieldElement::pow(long long e) const {
    if (e < 0) return inverse().pow(-e);
    FieldElement r = field_->one(), b = *this;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

inline bool FieldElement::operator==(const FieldElement& o) const {
    if (!same_field(field_, o.field_)) return false;
    switch (field_->kind) {
    case FieldKind::rationals: return rat() == o.rat();
    case FieldKind::prime_field: return residue() == o.residue();
    case FieldKind::rational_functions:
    case FieldKind::laurent_view:
        return poly_eq(ratfunc().num, o.ratfunc().num) && poly_eq(ratfunc().den, o.ratfunc().den);
    case FieldKind::quad_ext: return quad().c[0] == o.quad().c[0] && quad().c[1] == o.quad().c[1];
    }
    throw error("unreachable");
}

// ---------------------------------------------------------------------------
// Formatting and parsing
// ---------------------------------------------------------------------------

inline std::string FieldElement::str() const {
    switch (field_->kind) {
    case FieldKind::rationals: {
        std::ostringstream os;
        if (denominator(rat()) == 1)
            os << numerator(rat());
        else
            os << numerator(rat()) << "/" << denominator(rat());
        return os.str();
    }
    case FieldKind::prime_field: return std::to_string(residue());
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: {
        auto fmt = [&](const Poly& poly) {
            std::string s = "(";
            if (poly.empty()) s += "0";
            for (size_t i = 0; i < poly.size(); ++i) {
                if (i) s += ",";
                s += poly[i].str();
            }
            return s + ")";
        };
        return fmt(ratfunc().num) + "/" + fmt(ratfunc().den);
    }
    case FieldKind::quad_ext: return "[" + quad().c[0].str() + "," + quad().c[1].str() + "]";
    }
    throw error("unreachable");
}

namespace detail {

inline std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

/// Split on `sep` at bracket depth zero.
inline std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (ch == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

} // namespace detail

inline FieldElement Field::parse(const std::string& raw) const {
    std::string s = detail::strip(raw);
    if (s.empty()) throw input_error("empty element string");
    switch (kind) {
    case FieldKind::rationals: {
        try {
            return {shared_from_this(), Rational(s)};
        } catch (...) {
            throw input_error("cannot parse rational: " + s);
        }
    }
    case FieldKind::prime_field: {
        auto parts = detail::split_top(s, '/');
        try {
            Rational r = parts.size() == 2 ? make_rational(Int(parts[0]), Int(parts[1])) : Rational(Int(s));
            return rational(r);
        } catch (const input_error&) {
            throw;
        } catch (...) {
            throw input_error("cannot parse residue: " + s);
        }
    }
    case FieldKind::rational_functions:
    case FieldKind::laurent_view: {
        if (s == variable) return variable_element();
        if (s[0] != '(') return embed(base->parse(s)); // constant shorthand
        auto parts = detail::split_top(s, '/');
        auto parse_poly = [&](const std::string& ps) {
            std::string t = detail::strip(ps);
            if (t.size() < 2 || t.front() != '(' || t.back() != ')')
                throw input_error("bad polynomial literal: " + ps);
            Poly out;
            for (auto& c : detail::split_top(t.substr(1, t.size() - 2), ','))
                out.push_back(base->parse(c));
            poly_trim(out);
            return out;
        };
        Poly num = parse_poly(parts[0]);
        Poly den = parts.size() == 2 ? parse_poly(parts[1]) : poly_const(base->one());
        return {shared_from_this(), detail::rf_normalize(std::move(num), std::move(den), base)};
    }
    case FieldKind::quad_ext: {
        if (s[0] != '[') return embed(base->parse(s)); // base-field shorthand
        if (s.back() != ']') throw input_error("bad extension literal: " + s);
        auto parts = detail::split_top(s.substr(1, s.size() - 2), ',');
        if (parts.size() != 2) throw input_error("extension literal needs two coordinates");
        return {shared_from_this(), QuadRep{{base->parse(parts[0]), base->parse(parts[1])}}};
    }
    }
    throw error("unreachable");
}

// ---------------------------------------------------------------------------
// Field equality / JSON
// ---------------------------------------------------------------------------

inline bool Field::operator==(const Field& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
    case FieldKind::rationals: return true;
    case FieldKind::prime_field: return p == o.p;
    case FieldKind::rational_functions:
        return variable == o.variable && *base == *o.base;
    case FieldKind::laurent_view: return *base == *o.base;
    case FieldKind::quad_ext:
        return *base == *o.base && *alpha == *o.alpha && *beta == *o.beta;
    }
    return false;
}

inline nlohmann::json Field::to_json() const {
    using nlohmann::json;
    switch (kind) {
    case FieldKind::rationals: return json{{"kind", "Rationals"}};
    case FieldKind::prime_field: return json{{"kind", "PrimeField"}, {"params", {{"p", p}}}};
    case FieldKind::rational_functions:
        return json{{"kind", "RationalFunctions"},
                    {"params", {{"base", base->to_json()}, {"variable", variable}}}};
    case FieldKind::quad_ext:
        return json{{"kind", "QuadExt"},
                    {"params",
                     {{"base", base->to_json()}, {"alpha", alpha->str()}, {"beta", beta->str()}}}};
    case FieldKind::laurent_view:
        return json{{"kind", "LaurentView"}, {"params", {{"base", base->to_json()}}}};
    }
    throw error("unreachable");
}

inline FieldPtr Field::from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "Rationals") return rationals();
    if (kind == "PrimeField") return prime_field(j.at("params").at("p").get<long long>());
    if (kind == "RationalFunctions") {
        auto base = from_json(j.at("params").at("base"));
        std::string var = j.at("params").value("variable", "t");
        return rational_functions(base, var);
    }
    if (kind == "QuadExt") {
        auto base = from_json(j.at("params").at("base"));
        return quad_ext(base, base->parse(j.at("params").at("alpha").get<std::string>()),
                        base->parse(j.at("params").at("beta").get<std::string>()));
    }
    if (kind == "LaurentView") return laurent_view(from_json(j.at("params").at("base")));
    throw input_error("unknown field kind: " + kind);
}

inline std::string Field::describe() const {
    switch (kind) {
    case FieldKind::rationals: return "Q";
    case FieldKind::prime_field: return "F_" + std::to_string(p);
    case FieldKind::rational_functions: return base->describe() + "(" + variable + ")";
    case FieldKind::quad_ext:
        return base->describe() + "[x]/(x^2-(" + alpha->str() + ")x+(" + beta->str() + "))";
    case FieldKind::laurent_view: return base->describe() + "((t))";
    }
    throw error("unreachable");
}

// ---------------------------------------------------------------------------
// Square testing and square classes
// ---------------------------------------------------------------------------

struct SquareResult {
    bool is_square = false;
    std::optional<FieldElement> root; // may be absent over the Laurent view
};

namespace detail {

/// sqrt of a monic polynomial, or nullopt.  Works in any characteristic of the
/// supported bases (char 2 squares have only even-degree terms).
inline std::optional<Poly> poly_sqrt_monic(const Poly& m, const FieldPtr& k);

inline std::optional<FieldElement> base_sqrt(const FieldElement& x);

inline std::optional<Poly> poly_sqrt_monic(const Poly& m, const FieldPtr& k) {
    int dm = poly_deg(m);
    if (dm < 0) return Poly{};
    if (dm % 2) return std::nullopt;
    int d = dm / 2;
    if (k->characteristic() == 2) {
        Poly h(d + 1, k->zero());
        for (int i = 0; i <= dm; ++i) {
            bool nonzero = !m[i].is_zero();
            if (i % 2) {
                if (nonzero) return std::nullopt;
            } else if (nonzero) {
                auto r = base_sqrt(m[i]);
                if (!r) return std::nullopt;
                h[i / 2] = *r;
            }
        }
        poly_trim(h);
        return h;
    }
    Poly h(d + 1, k->zero());
    h[d] = k->one();
    FieldElement two_inv = k->integer(2).inverse();
    for (int j = d - 1; j >= 0; --j) {
        // coefficient of t^(d+j) in h^2 equals m[d+j]; all h_i with i > j known
        FieldElement conv = k->zero();
        for (int i = j + 1; i <= d; ++i) {
            int other = d + j - i;
            if (other < j + 1 || other > d || other > i) continue;
            FieldElement term = h[i] * h[other];
            conv += (other == i) ? term : term + term;
        }
        h[j] = (m[d + j] - conv) * two_inv; // divide by 2*h[d] = 2
    }
    // verify the lower half
    Poly sq = poly_mul(h, h, k);
    if (!poly_eq(sq, m)) return std::nullopt;
    return h;
}

} // namespace detail

SquareResult is_square(const FieldElement& x);

namespace detail {

inline std::optional<FieldElement> base_sqrt(const FieldElement& x) {
    SquareResult r = qf::is_square(x);
    if (r.is_square && r.root) return r.root;
    return std::nullopt;
}

/// Musser squarefree decomposition: product of the factors of odd multiplicity
/// of a monic polynomial (the "odd part"), monic.
inline Poly poly_odd_part(Poly P, const FieldPtr& k) {
    P = poly_monic(P);
    if (poly_deg(P) <= 0) return poly_const(k->one());
    long long ch = k->characteristic();
    Poly dP = poly_derivative(P, k);
    if (dP.empty()) {
        // P = R^ch with the Frobenius root R (prime-field coefficients are fixed)
        Poly R(poly_deg(P) / static_cast<int>(ch) + 1, k->zero());
        for (int i = 0; i <= poly_deg(P); ++i) {
            if (!P[i].is_zero()) {
                if (i % ch) throw error("inconsistent vanishing derivative");
                R[i / ch] = P[i];
            }
        }
        poly_trim(R);
        if (ch % 2 == 0) return poly_const(k->one()); // R^2: everything even
        return poly_odd_part(R, k);                   // odd ch: parity of exponents preserved
    }
    Poly c = poly_gcd(P, dP, k);
    Poly w = poly_divmod(P, c, k).first;
    Poly acc = poly_const(k->one());
    int i = 1;
    while (poly_deg(w) > 0) {
        Poly y = poly_gcd(w, c, k);
        Poly z = poly_divmod(w, y, k).first;
        if (poly_deg(z) > 0 && i % 2) acc = poly_mul(acc, z, k);
        c = poly_divmod(c, y, k).first;
        w = std::move(y);
        ++i;
    }
    if (poly_deg(c) > 0) {
        // remaining factors have multiplicity divisible by ch
        Poly extra = poly_odd_part(c, k); // recursion strips the Frobenius power
        // multiplicities ch*e: parity = parity of e for odd ch, even for ch = 2;
        // poly_odd_part(c) handles both through the dP == 0 branch above.
        acc = poly_mul(acc, extra, k);
    }
    return acc;
}

/// Laurent-view t-adic valuation and the unit value at t = 0.
inline std::pair<int, FieldElement> laurent_val_unit(const FieldElement& x) {
    const auto& rf = x.ratfunc();
    if (rf.num.empty()) throw input_error("valuation of zero");
    int vn = poly_valuation(rf.num), vd = poly_valuation(rf.den);
    FieldElement u0 = rf.num[vn] / rf.den[vd];
    return {vn - vd, u0};
}

} // namespace detail

/// Square decision with an optional exact witness.  Over the Laurent view the
/// decision is for Q((t)) (resp. F_p((t))): even t-valuation and a square unit
/// part; a witness is attached only when one exists in the Q(t) representation.
inline SquareResult is_square(const FieldElement& x) {
    const FieldPtr& F = x.field();
    if (x.is_zero()) return {true, F->zero()};
    switch (F->kind) {
    case FieldKind::rationals: {
        const Rational& r = x.rat();
        if (r < 0) return {false, std::nullopt};
        Int rn, rd;
        if (is_perfect_square(numerator(r), &rn) && is_perfect_square(denominator(r), &rd))
            return {true, FieldElement{F, Rational(rn, rd)}};
        return {false, std::nullopt};
    }
    case FieldKind::prime_field: {
        long long p = F->p;
        if (p == 2) return {true, x}; // Frobenius is the identity on F_2
        if (legendre(Int(x.residue()), Int(p)) != 1) return {false, std::nullopt};
        for (long long r = 0; r <= p / 2; ++r)
            if (r * r % p == x.residue()) return {true, FieldElement{F, r}};
        return {false, std::nullopt};
    }
    case FieldKind::rational_functions: {
        const auto& rf = x.ratfunc();
        const FieldPtr& k = F->base;
        // x = n/d = (n*d)/d^2, so x is a square iff n*d is one
        Poly P = poly_mul(rf.num, rf.den, k);
        FieldElement lead = P.back();
        auto lead_root = detail::base_sqrt(lead);
        if (!lead_root) return {false, std::nullopt};
        auto h = detail::poly_sqrt_monic(poly_monic(P), k);
        if (!h) return {false, std::nullopt};
        Poly num = poly_scale(*h, *lead_root);
        FieldElement root{F, detail::rf_normalize(std::move(num), rf.den, k)};
        return {true, root};
    }
    case FieldKind::laurent_view: {
        auto [v, u0] = detail::laurent_val_unit(x);
        if (v % 2) return {false, std::nullopt};
        SquareResult base_sq = is_square(u0);
        if (!base_sq.is_square) return {false, std::nullopt};
        // exact witness when the Q(t) representation happens to be a square
        auto as_rf = FieldElement{Field::rational_functions(F->base, F->variable),
                                  x.rep()};
        SquareResult exact = is_square(as_rf);
        if (exact.is_square && exact.root)
            return {true, FieldElement{F, exact.root->rep()}};
        return {true, std::nullopt};
    }
    case FieldKind::quad_ext: {
        const FieldPtr& k = F->base;
        const FieldElement& al = *F->alpha;
        const FieldElement& be = *F->beta;
        const FieldElement& c0 = x.quad().c[0];
        const FieldElement& c1 = x.quad().c[1];
        if (F->characteristic() == 2) {
            // y = y0 + y1 th, y^2 = (y0^2 + beta y1^2) + alpha y1^2 th
            if (al.is_zero()) {
                // inseparable: squaring lands in the base, so c1 must vanish
                if (!c1.is_zero()) return {false, std::nullopt};
                auto r0 = detail::base_sqrt(c0);
                if (!r0) return {false, std::nullopt};
                return {true, F->embed(*r0)};
            }
            auto y1sq = detail::base_sqrt(c1 / al);
            if (!y1sq) return {false, std::nullopt};
            auto y0 = detail::base_sqrt(c0 + be * (*y1sq) * (*y1sq));
            if (!y0) return {false, std::nullopt};
            return {true, FieldElement{F, QuadRep{{*y0, *y1sq}}}};
        }
        // complete the square: th' = th - alpha/2 has th'^2 = alpha^2/4 - beta
        FieldElement half = k->integer(2).inverse();
        FieldElement d = al * al * half * half - be; // th'^2
        FieldElement b0 = c0 + al * half * c1;       // x = b0 + c1 th'
        if (c1.is_zero()) {
            auto r0 = detail::base_sqrt(b0);
            if (r0) return {true, F->embed(*r0)};
            auto r1 = detail::base_sqrt(b0 / d);
            if (r1) {
                // root = r1 * th' = r1*(th - alpha/2)
                FieldElement y1 = *r1;
                return {true, FieldElement{F, QuadRep{{-(al * half * y1), y1}}}};
            }
            return {false, std::nullopt};
        }
        // y = y0 + y1 th': 2 y0 y1 = c1 and y0^2 + d y1^2... y'^2 = y0^2 + d y1^2 + 2 y0 y1 th'
        // Solve z = y1^2 from d z^2 - b0 z + c1^2/4 = 0.
        FieldElement disc = b0 * b0 - d * (c1 * c1);
        auto sq_disc = detail::base_sqrt(disc);
        if (!sq_disc) return {false, std::nullopt};
        for (int sign : {1, -1}) {
            FieldElement z =
                (b0 + (sign > 0 ? *sq_disc : -*sq_disc)) * (k->integer(2) * d).inverse();
            auto y1 = detail::base_sqrt(z);
            if (!y1 || y1->is_zero()) continue;
            FieldElement y0 = c1 * half / *y1;
            // back to the (1, th) basis
            FieldElement root0 = y0 - al * half * *y1;
            FieldElement cand0 = root0, cand1 = *y1;
            FieldElement y{F, QuadRep{{cand0, cand1}}};
            if (y * y == x) return {true, y};
        }
        return {false, std::nullopt};
    }
    }
    throw error("unreachable");
}

/// Canonical square-class representative: squarefree integer over Q, 1 or the
/// least nonresidue over F_p, squarefree-polynomial-times-unit over k(t), and
/// u * t^eps with u a base class representative over the Laurent view.
inline FieldElement square_class(const FieldElement& x) {
    const FieldPtr& F = x.field();
    if (x.is_zero()) throw input_error("square class of zero");
    switch (F->kind) {
    case FieldKind::rationals:
        return {F, Rational(squarefree_part(x.rat()))};
    case FieldKind::prime_field: {
        if (F->p == 2) return F->one();
        if (legendre(Int(x.residue()), Int(F->p)) == 1) return F->one();
        for (long long n = 2; n < F->p; ++n)
            if (legendre(Int(n), Int(F->p)) == -1) return {F, n};
        throw error("no nonresidue found");
    }
    case FieldKind::rational_functions: {
        const auto& rf = x.ratfunc();
        const FieldPtr& k = F->base;
        Poly P = poly_mul(rf.num, rf.den, k);
        FieldElement lead = P.back();
        Poly odd = detail::poly_odd_part(P, k);
        FieldElement unit_cls = square_class(lead);
        Poly out = poly_scale(odd, unit_cls);
        return {F, detail::rf_normalize(std::move(out), poly_const(k->one()), k)};
    }
    case FieldKind::laurent_view: {
        auto [v, u0] = detail::laurent_val_unit(x);
        FieldElement cls = F->embed(square_class(u0));
        if (v % 2) cls = cls * F->variable_element();
        return cls;
    }
    case FieldKind::quad_ext:
        throw unsupported_error("square_class: no canonical form in quadratic extensions");
    }
    throw error("unreachable");
}

/// Are x and y in the same square class?
inline bool same_square_class(const FieldElement& x, const FieldElement& y) {
    return is_square(x * y).is_square;
}

// ---------------------------------------------------------------------------
// Quadratic extension norm / trace / conjugation
// ---------------------------------------------------------------------------

struct QuadExtOps {
    FieldElement norm;      // in the base field
    FieldElement trace;     // in the base field
    FieldElement conjugate; // in the extension
};

inline QuadExtOps quad_ext_ops(const FieldElement& x) {
    const FieldPtr& E = x.field();
    if (E->kind != FieldKind::quad_ext) throw input_error("quad_ext_ops: not an extension element");
    const FieldElement& al = *E->alpha;
    const FieldElement& be = *E->beta;
    const FieldElement& a0 = x.quad().c[0];
    const FieldElement& a1 = x.quad().c[1];
    FieldElement n = a0 * a0 + al * (a0 * a1) + be * (a1 * a1);
    FieldElement t = a0 + a0 + al * a1;
    FieldElement conj{E, QuadRep{{a0 + al * a1, -a1}}};
    return {n, t, conj};
}

inline FieldElement quad_norm(const FieldElement& x) { return quad_ext_ops(x).norm; }
inline FieldElement quad_trace(const FieldElement& x) { return quad_ext_ops(x).trace; }
inline FieldElement quad_conj(const FieldElement& x) { return quad_ext_ops(x).conjugate; }

// ---------------------------------------------------------------------------
// Artin-Schreier solvability (characteristic 2)
// ---------------------------------------------------------------------------

/// Solve h^2 + h = c over F_2 or F_2(t); returns a solution or nullopt.
/// The coefficient map u -> u^2 + vu is F_2-linear, so over F_2(t) this is an
/// exact linear solve; no bounds are involved.
inline std::optional<FieldElement> artin_schreier_solve(const FieldElement& c) {
    const FieldPtr& F = c.field();
    if (F->characteristic() != 2) throw unsupported_error("artin_schreier_solve: needs char 2");
    if (F->kind == FieldKind::prime_field) {
        if (c.is_zero()) return F->zero();
        return std::nullopt; // h^2 + h = 1 has no root in F_2
    }
    if (F->kind != FieldKind::rational_functions || F->base->p != 2)
        throw unsupported_error("artin_schreier_solve: supported over F_2 and F_2(t)");
    const FieldPtr& k = F->base;
    const auto& rf = c.ratfunc();
    if (rf.num.empty()) return F->zero();
    // Any solution h = u/v in lowest terms has v^2 = den(c).
    auto v = detail::poly_sqrt_monic(rf.den, k);
    if (!v) return std::nullopt;
    const Poly& Fnum = rf.num;
    int dv = poly_deg(*v);
    int dF = poly_deg(Fnum);
    int D = std::max({dF, dv, 1}) + dv + 2; // safe degree bound for u
    int rows = std::max(2 * D, D + dv) + 1;
    // Solve u^2 + v*u = Fnum over F_2 coefficient vectors.
    std::vector<std::vector<uint8_t>> M(rows, std::vector<uint8_t>(D + 2, 0));
    auto bit = [&](const Poly& poly, int i) -> uint8_t {
        return (i <= poly_deg(poly) && !poly[i].is_zero()) ? 1 : 0;
    };
    for (int j = 0; j <= D; ++j) {
        if (2 * j < rows) M[2 * j][j] ^= 1;            // u_j^2 -> t^(2j)
        for (int i = 0; i <= dv; ++i)                   // v_i u_j -> t^(i+j)
            if (bit(*v, i) && i + j < rows) M[i + j][j] ^= 1;
    }
    for (int r = 0; r < rows; ++r) M[r][D + 1] = bit(Fnum, r);
    // Gaussian elimination over F_2
    int rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col <= D && rank < rows; ++col) {
        int sel = -1;
        for (int r = rank; r < rows; ++r)
            if (M[r][col]) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        std::swap(M[rank], M[sel]);
        for (int r = 0; r < rows; ++r)
            if (r != rank && M[r][col])
                for (int cc = col; cc <= D + 1; ++cc) M[r][cc] ^= M[rank][cc];
        pivot_col.push_back(col);
        ++rank;
    }
    for (int r = rank; r < rows; ++r)
        if (M[r][D + 1]) return std::nullopt; // inconsistent
    Poly u(D + 1, k->zero());
    for (int r = 0; r < rank; ++r)
        if (M[r][D + 1]) u[pivot_col[r]] = k->one();
    poly_trim(u);
    FieldElement h{F, detail::rf_normalize(std::move(u), *v, k)};
    if (h * h + h != c) throw error("artin_schreier_solve: verification failed");
    return h;
}

/// Is c trivial in K/P(K) (char 2)?
inline bool artin_schreier_trivial(const FieldElement& c) {
    return c.is_zero() || artin_schreier_solve(c).has_value();
}

// ---------------------------------------------------------------------------
// Hilbert symbol entry point (field level)
// ---------------------------------------------------------------------------

/// Hilbert symbol (a,b) at a place of Q (place 0 = infinity, else a prime).
/// Supported over the rationals only; the Laurent view is handled at the
/// Brauer-class level (see invariants.hpp).
inline int hilbert_symbol(const FieldElement& a, const FieldElement& b, const Int& place) {
    if (a.field()->kind != FieldKind::rationals)
        throw unsupported_error("hilbert_symbol: supported over Q");
    require_same_field(a, b);
    if (a.is_zero() || b.is_zero()) throw input_error("hilbert_symbol: zero argument");
    return hilbert_symbol_qq(a.rat(), b.rat(), place);
}

// ---------------------------------------------------------------------------
// Checked quadratic-extension construction
// ---------------------------------------------------------------------------

inline FieldPtr Field::quad_ext(FieldPtr base, FieldElement alpha, FieldElement beta) {
    if (!same_field(alpha.field(), base) || !same_field(beta.field(), base))
        throw input_error("quad_ext: minimal polynomial coefficients not in base");
    if (base->characteristic() == 2) {
        if (alpha.is_zero()) {
            // x^2 + beta: irreducible iff -beta = beta is not a square
            if (is_square(beta).is_square || is_square(-beta).is_square)
                throw input_error("quad_ext: x^2 - beta is reducible");
        } else {
            // x^2 - alpha x + beta irreducible iff beta/alpha^2 is not in P(K)
            if (artin_schreier_trivial(beta / (alpha * alpha)))
                throw input_error("quad_ext: Artin-Schreier polynomial is reducible");
        }
    } else {
        FieldElement disc = alpha * alpha - beta - beta - beta - beta; // alpha^2 - 4 beta
        if (is_square(disc).is_square) throw input_error("quad_ext: discriminant is a square");
    }
    return quad_ext_unchecked(std::move(base), std::move(alpha), std::move(beta));
}

} // namespace qf

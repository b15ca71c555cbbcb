#pragma once

// Exact integer helpers shared across the library: gcd/valuation utilities,
// primality (Miller-Rabin), Pollard rho factorisation, Legendre symbols and
// squarefree decomposition.  Everything is deterministic.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace qf {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

/// Rational n/d for any nonzero d (cpp_rational's two-argument constructor
/// rejects negative denominators).
inline Rational make_rational(const Int& n, const Int& d) {
    if (d == 0) throw std::invalid_argument("make_rational: zero denominator");
    return d < 0 ? Rational(-n, -d) : Rational(n, d);
}

inline Int gcd_int(Int a, Int b) {
    a = abs_int(a);
    b = abs_int(b);
    while (b != 0) {
        Int r = a % b;
        a = b;
        b = r;
    }
    return a;
}

/// Largest s with s*s <= n (n >= 0).
inline Int isqrt(const Int& n) {
    if (n < 0) throw std::invalid_argument("isqrt of negative");
    return boost::multiprecision::sqrt(n);
}

inline bool is_perfect_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    Int r = isqrt(n);
    if (r * r == n) {
        if (root) *root = r;
        return true;
    }
    return false;
}

inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    return boost::multiprecision::miller_rabin_test(n, 32);
}

namespace detail {

inline Int pollard_rho(const Int& n) {
    // n odd composite, not a prime power of interest; deterministic parameter sweep.
    for (Int c = 1; ; ++c) {
        Int x = 2, y = 2, d = 1;
        auto f = [&](const Int& v) { return (v * v + c) % n; };
        while (d == 1) {
            x = f(x);
            y = f(f(y));
            d = gcd_int(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
    }
}

inline void factor_into(Int n, std::map<Int, int>& out) {
    if (n <= 1) return;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31}) {
        while (n % p == 0) {
            out[p]++;
            n /= p;
        }
    }
    // trial division up to 10^4 before falling back to rho
    for (Int p = 37; p * p <= n && p < 10000; p += 2) {
        while (n % p == 0) {
            out[p]++;
            n /= p;
        }
    }
    if (n == 1) return;
    if (is_prime(n)) {
        out[n]++;
        return;
    }
    Int r;
    if (is_perfect_square(n, &r)) {
        std::map<Int, int> sub;
        factor_into(r, sub);
        for (auto& [p, e] : sub) out[p] += 2 * e;
        return;
    }
    Int d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

} // namespace detail

/// Prime factorisation of |n| (n != 0).
inline std::map<Int, int> factor(const Int& n) {
    if (n == 0) throw std::invalid_argument("factor(0)");
    std::map<Int, int> out;
    detail::factor_into(abs_int(n), out);
    return out;
}

/// Squarefree part of a nonzero integer, keeping the sign.
inline Int squarefree_part(const Int& n) {
    Int s = n < 0 ? -1 : 1;
    for (auto& [p, e] : factor(n))
        if (e % 2) s *= p;
    return s;
}

/// Squarefree part of a nonzero rational: a/b ~ a*b mod squares.
inline Int squarefree_part(const Rational& r) {
    return squarefree_part(Int(numerator(r) * denominator(r)));
}

/// Legendre symbol (a/p) for odd prime p, a not divisible by p.
inline int legendre(const Int& a, const Int& p) {
    Int m = a % p;
    if (m < 0) m += p;
    if (m == 0) throw std::invalid_argument("legendre: p | a");
    Int r = boost::multiprecision::powm(m, (p - 1) / 2, p);
    return r == 1 ? 1 : -1;
}

/// v_p(n) for n != 0.
inline int valuation(Int n, const Int& p) {
    if (n == 0) throw std::invalid_argument("valuation of 0");
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

/// Odd primes dividing n (n != 0), plus helpers for place enumeration.
inline std::vector<Int> odd_prime_support(const Int& n) {
    std::vector<Int> out;
    for (auto& [p, e] : factor(n))
        if (p != 2) out.push_back(p);
    return out;
}

/// Is x a square in Q_p^x?  (x nonzero rational; p = 2 or odd prime.)
inline bool is_square_qp(const Rational& x, const Int& p) {
    Int a = numerator(x) * denominator(x); // same square class
    int v = valuation(a, p);
    if (v % 2) return false;
    Int u = a;
    for (int i = 0; i < v; ++i) u /= p;
    if (p == 2) {
        Int m = u % 8;
        if (m < 0) m += 8;
        return m == 1;
    }
    return legendre(u, p) == 1;
}

/// Hilbert symbol (a,b)_v over Q.  place = 0 denotes the real place.
inline int hilbert_symbol_qq(const Rational& a, const Rational& b, const Int& place) {
    if (a == 0 || b == 0) throw std::invalid_argument("hilbert symbol of 0");
    if (place == 0) return (a < 0 && b < 0) ? -1 : 1;
    const Int p = place;
    Int an = numerator(a) * denominator(a);
    Int bn = numerator(b) * denominator(b);
    int alpha = valuation(an, p), beta = valuation(bn, p);
    Int u = an, v = bn;
    for (int i = 0; i < alpha; ++i) u /= p;
    for (int i = 0; i < beta; ++i) v /= p;
    auto mod2 = [](const Int& x) { return static_cast<int>(((x % 2) + 2) % 2); };
    if (p == 2) {
        auto eps = [&](const Int& x) { return mod2((x - 1) / 2); };
        auto omega = [&](const Int& x) { return mod2((x * x - 1) / 8); };
        int e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        return (e % 2) ? -1 : 1;
    }
    int e = (alpha * beta) * mod2((p - 1) / 2);
    int s = (e % 2) ? -1 : 1;
    if (beta % 2) s *= legendre(u, p);
    if (alpha % 2) s *= legendre(v, p);
    return s;
}

/// Places (0 = infinity, else primes) where (a,b) can possibly ramify.
inline std::vector<Int> relevant_places(const Rational& a, const Rational& b) {
    std::vector<Int> places{0, 2};
    for (const Rational* r : {&a, &b}) {
        Int n = numerator(*r) * denominator(*r);
        for (auto& p : odd_prime_support(n)) places.push_back(p);
    }
    std::sort(places.begin(), places.end());
    places.erase(std::unique(places.begin(), places.end()), places.end());
    return places;
}

} // namespace qf

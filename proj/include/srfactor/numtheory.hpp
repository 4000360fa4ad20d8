#pragma once

#include "srfactor/bigint.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace srfactor {

// The first `size` primes, in increasing order.
struct FactorBase {
    std::vector<BigInt> primes;

    std::size_t size() const { return primes.size(); }
    const BigInt& operator[](std::size_t i) const { return primes[i]; }
};

inline FactorBase first_primes(std::size_t k)
{
    if (k < 1)
        throw std::invalid_argument("first_primes: k must be >= 1");
    FactorBase base;
    base.primes.reserve(k);
    BigInt c = 2;
    while (base.primes.size() < k) {
        bool prime = true;
        for (const BigInt& p : base.primes) {
            if (p * p > c)
                break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime)
            base.primes.push_back(c);
        c += 1;
    }
    return base;
}

// sign * prod p_i^exponents[i], exponents aligned with a factor base.
struct SmoothFactorization {
    int sign = 1;
    std::vector<unsigned> exponents;
};

inline BigInt reconstruct(const SmoothFactorization& f, const FactorBase& base)
{
    BigInt m = f.sign;
    for (std::size_t i = 0; i < f.exponents.size(); ++i) {
        for (unsigned e = 0; e < f.exponents[i]; ++e)
            m *= base[i];
    }
    return m;
}

// Trial division over the base. Absent if |m| has a factor outside the base.
inline std::optional<SmoothFactorization> factor_over_base(const BigInt& m, const FactorBase& base)
{
    if (m == 0)
        throw std::invalid_argument("factor_over_base: m must be nonzero");
    SmoothFactorization f;
    f.sign = (m < 0) ? -1 : 1;
    f.exponents.assign(base.size(), 0);
    BigInt rest = abs(m);
    for (std::size_t i = 0; i < base.size() && rest > 1; ++i) {
        while (mpz_divisible_p(rest.get_mpz_t(), base[i].get_mpz_t())) {
            rest /= base[i];
            ++f.exponents[i];
        }
    }
    if (rest != 1)
        return std::nullopt;
    return f;
}

inline BigInt gcd(const BigInt& a, const BigInt& b)
{
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline bool is_probable_prime(const BigInt& n)
{
    return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

// Smallest root m with m^k = n (k >= 2), if n is a perfect power.
inline std::optional<BigInt> perfect_power_root(const BigInt& n)
{
    if (n < 4 || mpz_perfect_power_p(n.get_mpz_t()) == 0)
        return std::nullopt;
    for (unsigned long k = 2; BigInt(1) << k <= n; ++k) {
        BigInt root;
        if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0)
            return root;
    }
    return std::nullopt;
}

inline BigInt pow_mod(const BigInt& base, const BigInt& exp, const BigInt& mod)
{
    BigInt r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return r;
}

}  // namespace srfactor

#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace srfactor {

using BigInt = mpz_class;
using Rational = mpq_class;

using IntVec = std::vector<BigInt>;
using RatVec = std::vector<Rational>;

inline BigInt dot(const IntVec& a, const IntVec& b)
{
    BigInt acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

inline Rational dot(const RatVec& a, const IntVec& b)
{
    Rational acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

inline Rational dot(const RatVec& a, const RatVec& b)
{
    Rational acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

inline BigInt floor_q(const Rational& q)
{
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

inline BigInt ceil_q(const Rational& q)
{
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

// Nearest integer, ties rounded up: floor(q + 1/2).
inline BigInt round_half_up(const Rational& q)
{
    return floor_q(q + Rational(1, 2));
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline std::string to_string(const BigInt& v) { return v.get_str(); }

}  // namespace srfactor

#pragma once

#include "srfactor/lattice.hpp"
#include "srfactor/numtheory.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srfactor {

// A smooth relation pair: u = prod p_i^{e_i+}, v = prod p_i^{e_i-} over the
// main base, with s = u - v*N smooth over the relaxed base.
struct SrPair {
    BigInt u;
    BigInt v;
    SmoothFactorization u_fact;  // over the B1 base
    BigInt s;                    // u - v*N
    SmoothFactorization s_fact;  // over the B2 base
};

struct FactorResult {
    BigInt p;
    BigInt q;
};

// Exponent vector of the candidate lattice point reached from b_op by the
// measured bitstring: u(x) = b_op + sum_j x_j * flip_vector_j. Coordinates of
// a lattice point are f(i) * e_i, so the division is exact.
inline IntVec bitstring_to_candidate(const std::string& bits, const BabaiResult& babai,
                                     const ReducedBasis& red, const PrimeLattice& lattice)
{
    const std::size_t n = lattice.n;
    if (bits.size() != n)
        throw std::invalid_argument("bitstring_to_candidate: bitstring length mismatch");
    IntVec u = babai.approx_vector;
    for (std::size_t j = 0; j < n; ++j) {
        if (bits[j] != '1')
            continue;
        IntVec fv = flip_vector(babai, red, j);
        for (std::size_t z = 0; z < u.size(); ++z)
            u[z] += fv[z];
    }
    IntVec e(n);
    for (std::size_t i = 0; i < n; ++i) {
        BigInt q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), u[i].get_mpz_t(), lattice.diag[i].get_mpz_t());
        if (r != 0)
            throw std::logic_error("bitstring_to_candidate: candidate not a lattice point");
        e[i] = q;
    }
    return e;
}

inline std::pair<BigInt, BigInt> exponents_to_uv(const IntVec& e, const FactorBase& base)
{
    if (e.size() != base.size())
        throw std::invalid_argument("exponents_to_uv: size mismatch");
    BigInt u = 1, v = 1;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] > 0) {
            BigInt p;
            mpz_pow_ui(p.get_mpz_t(), base[i].get_mpz_t(), e[i].get_ui());
            u *= p;
        } else if (e[i] < 0) {
            BigInt p;
            mpz_pow_ui(p.get_mpz_t(), base[i].get_mpz_t(), BigInt(-e[i]).get_ui());
            v *= p;
        }
    }
    return {u, v};
}

// Present iff s = u - v*N is nonzero and b2-smooth. (1,1) candidates are
// vacuous and rejected.
inline std::optional<SrPair> verify_sr_pair(const BigInt& u, const BigInt& v, const BigInt& N,
                                            const FactorBase& b1_base, const FactorBase& b2_base)
{
    if (u < 1 || v < 1)
        throw std::invalid_argument("verify_sr_pair: u, v must be positive");
    if (u == 1 && v == 1)
        return std::nullopt;
    BigInt s = u - v * N;
    if (s == 0)
        return std::nullopt;
    auto s_fact = factor_over_base(s, b2_base);
    if (!s_fact)
        return std::nullopt;
    auto u_fact = factor_over_base(u, b1_base);
    if (!u_fact)
        return std::nullopt;  // u is b1-smooth for lattice-derived candidates
    SrPair pair;
    pair.u = u;
    pair.v = v;
    pair.u_fact = *u_fact;
    pair.s = s;
    pair.s_fact = *s_fact;
    return pair;
}

// Ordered set of pairs, deduplicated by (u, v).
class RelationSet {
public:
    explicit RelationSet(std::size_t threshold = 0) : threshold_(threshold) {}

    // true if the pair was new
    bool insert(const SrPair& pair)
    {
        auto key = std::make_pair(pair.u, pair.v);
        if (index_.count(key))
            return false;
        index_.emplace(key, pairs_.size());
        pairs_.push_back(pair);
        return true;
    }

    const std::vector<SrPair>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    std::size_t threshold() const { return threshold_; }
    bool reached_threshold() const { return threshold_ > 0 && pairs_.size() >= threshold_; }

private:
    std::vector<SrPair> pairs_;
    std::map<std::pair<BigInt, BigInt>, std::size_t> index_;
    std::size_t threshold_;
};

namespace detail {

// GF(2) rows packed into 64-bit words
struct BitRow {
    std::vector<std::uint64_t> words;

    explicit BitRow(std::size_t bits) : words((bits + 63) / 64, 0) {}
    void set(std::size_t i) { words[i / 64] |= (std::uint64_t(1) << (i % 64)); }
    bool get(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1; }
    void operator^=(const BitRow& o)
    {
        for (std::size_t w = 0; w < words.size(); ++w)
            words[w] ^= o.words[w];
    }
};

// Nullspace basis of the matrix whose columns are the relation vectors:
// each returned row selects a subset of pairs with even combined exponents.
inline std::vector<std::vector<std::size_t>> gf2_nullspace(const std::vector<BitRow>& columns,
                                                           std::size_t bit_len)
{
    const std::size_t m = columns.size();
    // rows = bit positions, columns = pairs; eliminate to find free columns
    std::vector<BitRow> rows(bit_len, BitRow(m));
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t b = 0; b < bit_len; ++b)
            if (columns[c].get(b))
                rows[b].set(c);

    std::vector<std::size_t> pivot_of_col(m, SIZE_MAX);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < m && rank < bit_len; ++c) {
        std::size_t sel = SIZE_MAX;
        for (std::size_t r = rank; r < bit_len; ++r) {
            if (rows[r].get(c)) {
                sel = r;
                break;
            }
        }
        if (sel == SIZE_MAX)
            continue;
        std::swap(rows[rank], rows[sel]);
        for (std::size_t r = 0; r < bit_len; ++r)
            if (r != rank && rows[r].get(c))
                rows[r] ^= rows[rank];
        pivot_of_col[c] = rank;
        ++rank;
    }
    std::vector<std::vector<std::size_t>> basis;
    for (std::size_t fc = 0; fc < m; ++fc) {
        if (pivot_of_col[fc] != SIZE_MAX)
            continue;
        std::vector<std::size_t> subset{fc};
        for (std::size_t c = 0; c < m; ++c) {
            if (pivot_of_col[c] != SIZE_MAX && rows[pivot_of_col[c]].get(fc))
                subset.push_back(c);
        }
        basis.push_back(std::move(subset));
    }
    return basis;
}

}  // namespace detail

// Congruence-of-squares extraction. Per pair the GF(2) vector is
// [u exponents over B1 | sign bit of s | s exponents over B2]; every
// nullspace basis vector is tried with gcd(X - Y mod N, N).
inline std::optional<FactorResult> try_factor(const RelationSet& rel, const BigInt& N,
                                              const FactorBase& b1_base, const FactorBase& b2_base)
{
    const auto& pairs = rel.pairs();
    if (pairs.empty())
        return std::nullopt;
    const std::size_t bit_len = b1_base.size() + 1 + b2_base.size();
    std::vector<detail::BitRow> columns;
    columns.reserve(pairs.size());
    for (const SrPair& p : pairs) {
        detail::BitRow row(bit_len);
        for (std::size_t i = 0; i < b1_base.size(); ++i)
            if (p.u_fact.exponents[i] % 2)
                row.set(i);
        if (p.s_fact.sign < 0)
            row.set(b1_base.size());
        for (std::size_t i = 0; i < b2_base.size(); ++i)
            if (p.s_fact.exponents[i] % 2)
                row.set(b1_base.size() + 1 + i);
        columns.push_back(std::move(row));
    }

    for (const auto& subset : detail::gf2_nullspace(columns, bit_len)) {
        std::vector<unsigned long> ue(b1_base.size(), 0), se(b2_base.size(), 0);
        for (std::size_t k : subset) {
            for (std::size_t i = 0; i < b1_base.size(); ++i)
                ue[i] += pairs[k].u_fact.exponents[i];
            for (std::size_t i = 0; i < b2_base.size(); ++i)
                se[i] += pairs[k].s_fact.exponents[i];
        }
        BigInt X = 1, Y = 1;
        for (std::size_t i = 0; i < b1_base.size(); ++i)
            X = X * pow_mod(b1_base[i], BigInt(ue[i] / 2), N) % N;
        for (std::size_t i = 0; i < b2_base.size(); ++i)
            Y = Y * pow_mod(b2_base[i], BigInt(se[i] / 2), N) % N;
        BigInt g = gcd(X - Y, N);  // mpz gcd is over absolute values; X == Y gives N
        if (g > 1 && g < N) {
            FactorResult res;
            res.p = g;
            res.q = N / g;
            if (res.p > res.q)
                std::swap(res.p, res.q);
            return res;
        }
    }
    return std::nullopt;
}

}  // namespace srfactor

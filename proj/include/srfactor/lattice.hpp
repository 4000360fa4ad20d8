#pragma once

#include "srfactor/bigint.hpp"
#include "srfactor/numtheory.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <optional>
#include <stdexcept>
#include <vector>

namespace srfactor {

struct Permutation {
    std::vector<unsigned> sigma;  // values 1..n, a bijection

    std::size_t size() const { return sigma.size(); }
};

inline Permutation identity_permutation(std::size_t n)
{
    Permutation p;
    p.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        p.sigma[i] = static_cast<unsigned>(i + 1);
    return p;
}

// Basis column j is f(j)*e_j + round(10^c ln p_j)*e_{n+1}, f(j) = ceil(sigma_j / 2).
// The target is (0, ..., 0, round(10^c ln N)).
struct PrimeLattice {
    std::vector<IntVec> basis;  // n vectors of dimension n+1
    IntVec target;              // dimension n+1
    std::size_t n = 0;
    Rational c;
    IntVec diag;  // f(1..n), the nonzero entries of the first n rows
};

namespace detail {

using Dec50 = boost::multiprecision::cpp_dec_float_50;

inline BigInt round_positive(const Dec50& v)
{
    Dec50 f = floor(v + Dec50("0.5"));
    if (f > Dec50("9e17"))
        throw std::overflow_error("lattice entry exceeds supported magnitude");
    return BigInt(f.convert_to<long>());
}

inline Dec50 dec_from_rational(const Rational& q)
{
    return Dec50(q.get_num().get_str()) / Dec50(q.get_den().get_str());
}

// round(10^c * ln(m)), evaluated to 50 significant digits
inline BigInt scaled_log(const BigInt& m, const Rational& c)
{
    Dec50 scale = pow(Dec50(10), dec_from_rational(c));
    Dec50 v = scale * log(Dec50(m.get_str()));
    return round_positive(v);
}

}  // namespace detail

inline PrimeLattice build_prime_lattice(const BigInt& N, const FactorBase& base, const Rational& c,
                                        const Permutation& sigma)
{
    const std::size_t n = base.size();
    if (sigma.size() != n)
        throw std::invalid_argument("build_prime_lattice: permutation size mismatch");
    PrimeLattice lat;
    lat.n = n;
    lat.c = c;
    lat.diag.resize(n);
    lat.basis.assign(n, IntVec(n + 1, 0));
    for (std::size_t j = 0; j < n; ++j) {
        lat.diag[j] = BigInt((sigma.sigma[j] + 1) / 2);
        lat.basis[j][j] = lat.diag[j];
        lat.basis[j][n] = detail::scaled_log(base[j], c);
    }
    lat.target.assign(n + 1, 0);
    lat.target[n] = detail::scaled_log(N, c);
    return lat;
}

// LLL-reduced basis with its exact Gram-Schmidt data and the unimodular
// transform: vectors[i] = sum_j transform[i][j] * original[j].
struct ReducedBasis {
    std::vector<IntVec> vectors;
    std::vector<RatVec> gram_schmidt;
    std::vector<RatVec> mu;  // lower-triangular coefficients
    RatVec gs_norms_sq;
    std::vector<IntVec> transform;
};

namespace detail {

inline void exact_gram_schmidt(const std::vector<IntVec>& vecs, std::vector<RatVec>& gs,
                               std::vector<RatVec>& mu, RatVec& norms)
{
    const std::size_t m = vecs.size();
    gs.assign(m, RatVec());
    mu.assign(m, RatVec(m, Rational(0)));
    norms.assign(m, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        RatVec v(vecs[i].size());
        for (std::size_t z = 0; z < v.size(); ++z)
            v[z] = vecs[i][z];
        for (std::size_t j = 0; j < i; ++j) {
            if (norms[j] == 0)
                throw std::invalid_argument("lll_reduce: linearly dependent basis");
            Rational m_ij = dot(gs[j], vecs[i]) / norms[j];
            mu[i][j] = m_ij;
            for (std::size_t z = 0; z < v.size(); ++z)
                v[z] -= m_ij * gs[j][z];
        }
        gs[i] = std::move(v);
        norms[i] = dot(gs[i], gs[i]);
        if (norms[i] == 0)
            throw std::invalid_argument("lll_reduce: linearly dependent basis");
    }
}

}  // namespace detail

inline ReducedBasis lll_reduce(const std::vector<IntVec>& basis, const Rational& delta)
{
    if (delta <= Rational(1, 4) || delta >= 1)
        throw std::invalid_argument("lll_reduce: delta must lie in (1/4, 1)");
    const std::size_t m = basis.size();
    if (m == 0)
        throw std::invalid_argument("lll_reduce: empty basis");

    std::vector<IntVec> y = basis;
    std::vector<IntVec> T(m, IntVec(m, 0));
    for (std::size_t i = 0; i < m; ++i)
        T[i][i] = 1;

    std::vector<RatVec> gs;
    std::vector<RatVec> mu;
    RatVec g_star;
    detail::exact_gram_schmidt(y, gs, mu, g_star);

    const Rational half(1, 2);
    auto reduce_row = [&](std::size_t k, std::size_t j) {
        BigInt r = round_half_up(mu[k][j]);
        if (r == 0)
            return;
        for (std::size_t z = 0; z < y[k].size(); ++z)
            y[k][z] -= r * y[j][z];
        for (std::size_t z = 0; z < j; ++z)
            mu[k][z] -= r * mu[j][z];
        mu[k][j] -= r;
        for (std::size_t z = 0; z < m; ++z)
            T[k][z] -= r * T[j][z];
    };

    std::size_t k = 1;
    while (k < m) {
        if (abs(mu[k][k - 1]) > half)
            reduce_row(k, k - 1);
        if (g_star[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * g_star[k - 1]) {
            for (std::size_t l = k - 1; l-- > 0;) {
                if (abs(mu[k][l]) > half)
                    reduce_row(k, l);
            }
            ++k;
        } else {
            Rational nu = mu[k][k - 1];
            Rational alpha = g_star[k] + nu * nu * g_star[k - 1];
            if (alpha == 0)
                throw std::invalid_argument("lll_reduce: linearly dependent basis");
            Rational beta = g_star[k - 1] / alpha;
            mu[k][k - 1] = nu * beta;
            g_star[k] = g_star[k] * beta;
            g_star[k - 1] = alpha;
            std::swap(y[k], y[k - 1]);
            std::swap(T[k], T[k - 1]);
            for (std::size_t z = 0; z < k - 1; ++z)
                std::swap(mu[k][z], mu[k - 1][z]);
            for (std::size_t i = k + 1; i < m; ++i) {
                Rational xi = mu[i][k];
                mu[i][k] = mu[i][k - 1] - nu * xi;
                mu[i][k - 1] = mu[k][k - 1] * mu[i][k] + xi;
            }
            k = (k > 1) ? k - 1 : 1;
        }
    }

    ReducedBasis red;
    red.vectors = std::move(y);
    red.transform = std::move(T);
    detail::exact_gram_schmidt(red.vectors, red.gram_schmidt, red.mu, red.gs_norms_sq);
    return red;
}

enum class BabaiRounding { nearest, ceil };

// Nearest-plane output. eps_j = real_coefficients[j] - coefficients[j];
// flip_signs[j] points to the second-closest plane (sign of eps, ties -1).
struct BabaiResult {
    IntVec coefficients;
    RatVec real_coefficients;
    std::vector<int> flip_signs;
    IntVec approx_vector;  // b_op = sum_j coefficients[j] * d_j
    IntVec residual;       // target - b_op
};

inline BabaiResult babai_nearest_plane(const ReducedBasis& red, const IntVec& target,
                                       BabaiRounding rounding = BabaiRounding::nearest)
{
    const std::size_t n = red.vectors.size();
    if (n == 0 || target.size() != red.vectors[0].size())
        throw std::invalid_argument("babai_nearest_plane: dimension mismatch");
    BabaiResult res;
    res.coefficients.assign(n, 0);
    res.real_coefficients.assign(n, Rational(0));
    res.flip_signs.assign(n, -1);

    RatVec b(target.size());
    for (std::size_t z = 0; z < b.size(); ++z)
        b[z] = target[z];
    for (std::size_t jj = n; jj-- > 0;) {
        Rational c = dot(b, red.gram_schmidt[jj]) / red.gs_norms_sq[jj];
        BigInt k = (rounding == BabaiRounding::nearest) ? round_half_up(c) : ceil_q(c);
        res.real_coefficients[jj] = c;
        res.coefficients[jj] = k;
        res.flip_signs[jj] = (c - k > 0) ? 1 : -1;
        for (std::size_t z = 0; z < b.size(); ++z)
            b[z] -= k * red.vectors[jj][z];
    }
    res.residual.resize(b.size());
    res.approx_vector.resize(b.size());
    for (std::size_t z = 0; z < b.size(); ++z) {
        if (!is_integer(b[z]))
            throw std::logic_error("babai_nearest_plane: non-integral residual");
        res.residual[z] = b[z].get_num();
        res.approx_vector[z] = target[z] - res.residual[z];
    }
    return res;
}

// Flip vector j: the step from b_op to the candidate with coefficient j moved
// to its second-nearest integer.
inline IntVec flip_vector(const BabaiResult& babai, const ReducedBasis& red, std::size_t j)
{
    IntVec v = red.vectors[j];
    if (babai.flip_signs[j] < 0) {
        for (auto& x : v)
            x = -x;
    }
    return v;
}

// Refinement QUBO over x in {0,1}^n choosing rounding sides.
//
// raw is the exact expansion of ||t - u(x)||^2 - ||r||^2 for
// u(x) = b_op + sum_j x_j * flip_vector_j: raw[j][j] = -2<r,fv_j> + |fv_j|^2,
// raw[i][j] = 2<fv_i,fv_j>. normalized is the circuit coefficient matrix,
// the Ising-packed form of raw divided by its maximum (signed) entry:
// packed[j][j] = -2*raw[j][j] - sum_{i != j} raw[i][j], packed[i][j] = raw[i][j].
struct QuboProblem {
    std::vector<RatVec> raw;
    std::vector<RatVec> normalized;
    Rational norm_factor;
    Rational constant;  // ||r||^2, dropped from the expansion
};

inline std::optional<QuboProblem> build_qubo(const BabaiResult& babai, const ReducedBasis& red)
{
    const std::size_t n = red.vectors.size();
    std::vector<IntVec> fv(n);
    for (std::size_t j = 0; j < n; ++j)
        fv[j] = flip_vector(babai, red, j);

    QuboProblem q;
    q.raw.assign(n, RatVec(n, Rational(0)));
    q.normalized.assign(n, RatVec(n, Rational(0)));
    q.constant = dot(babai.residual, babai.residual);
    for (std::size_t j = 0; j < n; ++j) {
        q.raw[j][j] = -2 * dot(babai.residual, fv[j]) + dot(fv[j], fv[j]);
        for (std::size_t i = 0; i < j; ++i)
            q.raw[i][j] = 2 * dot(fv[i], fv[j]);
    }

    std::vector<RatVec> packed(n, RatVec(n, Rational(0)));
    for (std::size_t j = 0; j < n; ++j) {
        Rational cross_sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i < j)
                cross_sum += q.raw[i][j];
            else if (i > j)
                cross_sum += q.raw[j][i];
        }
        packed[j][j] = -2 * q.raw[j][j] - cross_sum;
        for (std::size_t i = 0; i < j; ++i)
            packed[i][j] = q.raw[i][j];
    }

    Rational max_entry = packed[0][0];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (packed[i][j] > max_entry)
                max_entry = packed[i][j];
    if (max_entry <= 0)
        return std::nullopt;  // degenerate; caller skips this permutation
    q.norm_factor = max_entry;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            q.normalized[i][j] = packed[i][j] / max_entry;
    return q;
}

// Energy of the upper-triangular matrix at the assignment encoded by index z,
// variable 1 in the most significant bit (the bitstring convention).
inline Rational qubo_energy(const std::vector<RatVec>& upper, unsigned long z)
{
    const std::size_t n = upper.size();
    Rational e = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!((z >> (n - 1 - j)) & 1UL))
            continue;
        e += upper[j][j];
        for (std::size_t i = 0; i < j; ++i)
            if ((z >> (n - 1 - i)) & 1UL)
                e += upper[i][j];
    }
    return e;
}

}  // namespace srfactor

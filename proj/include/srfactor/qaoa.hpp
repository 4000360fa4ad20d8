#pragma once

#include "srfactor/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace srfactor {

// Single fixed QAOA layer. beta enters the circuit as Rx(2*mixer_sign*beta).
struct QaoaAngles {
    double gamma = 8.0 / 3.0;
    double beta = 0.33;
    int layers = 1;
};

// Orientation of the mixing layer relative to the phase layer. -1 reproduces
// the published sampling advantage; +1 is the literal reading of the gate
// definitions. See README.
inline constexpr int kDefaultMixerSign = -1;

enum class GateKind { Ry, Rz, Rx, ZZ, XX };

// Gate semantics:
//   R_phi(theta) = exp(-i sigma_phi theta/2), Rx = R_0, Ry = R_{pi/2}
//   Rz(theta)    = exp(+i theta |1><1|)
//   ZZ(chi)      = exp(-i chi sigma_z x sigma_z)
//   XX(chi)      = exp(-i chi sigma_x x sigma_x)
struct Gate {
    GateKind kind;
    int q1 = 0;  // 1-based
    int q2 = 0;  // second qubit for ZZ/XX, else 0
    double angle = 0.0;
};

struct CircuitIR {
    int n = 0;
    std::vector<Gate> gates;
};

inline const char* gate_name(GateKind k)
{
    switch (k) {
        case GateKind::Ry: return "Ry";
        case GateKind::Rz: return "Rz";
        case GateKind::Rx: return "Rx";
        case GateKind::ZZ: return "ZZ";
        case GateKind::XX: return "XX";
    }
    return "?";
}

// Compile a normalized coefficient matrix into the one-layer circuit:
// Ry(pi/2) on all qubits, ZZ(chi_ij = gamma/8 * q[i][j]) for i<j (zeros
// skipped), Rz(theta_i = gamma/4 * q[i][i]), Rx(2*mixer_sign*beta) on all.
inline CircuitIR qubo_to_circuit(const std::vector<RatVec>& qnorm, const QaoaAngles& angles,
                                 int mixer_sign = kDefaultMixerSign)
{
    const int n = static_cast<int>(qnorm.size());
    CircuitIR circ;
    circ.n = n;
    const double pi_2 = std::acos(0.0);
    for (int q = 1; q <= n; ++q)
        circ.gates.push_back({GateKind::Ry, q, 0, pi_2});
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            const Rational& qij = qnorm[i - 1][j - 1];
            if (qij == 0)
                continue;  // zero couplings are not implemented
            circ.gates.push_back({GateKind::ZZ, i, j, angles.gamma / 8.0 * qij.get_d()});
        }
    }
    for (int i = 1; i <= n; ++i)
        circ.gates.push_back({GateKind::Rz, i, 0, angles.gamma / 4.0 * qnorm[i - 1][i - 1].get_d()});
    for (int q = 1; q <= n; ++q)
        circ.gates.push_back({GateKind::Rx, q, 0, 2.0 * mixer_sign * angles.beta});
    return circ;
}

// Output probabilities indexed by bitstring, qubit 1 in the most significant bit.
struct Distribution {
    int n = 0;
    std::vector<double> probabilities;
};

namespace detail {

using Amp = std::complex<double>;

inline void apply_single(std::vector<Amp>& psi, int n, int q, Amp u00, Amp u01, Amp u10, Amp u11)
{
    const std::size_t mask = 1ULL << (n - q);  // qubit 1 = MSB
    for (std::size_t z = 0; z < psi.size(); ++z) {
        if (z & mask)
            continue;
        Amp a0 = psi[z];
        Amp a1 = psi[z | mask];
        psi[z] = u00 * a0 + u01 * a1;
        psi[z | mask] = u10 * a0 + u11 * a1;
    }
}

inline void apply_gate(std::vector<Amp>& psi, int n, const Gate& g)
{
    constexpr Amp I(0.0, 1.0);
    switch (g.kind) {
        case GateKind::Ry: {
            double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
            apply_single(psi, n, g.q1, c, -s, s, c);
            break;
        }
        case GateKind::Rx: {
            double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
            apply_single(psi, n, g.q1, c, -I * s, -I * s, c);
            break;
        }
        case GateKind::Rz: {
            const std::size_t mask = 1ULL << (n - g.q1);
            Amp ph = std::exp(I * g.angle);
            for (std::size_t z = 0; z < psi.size(); ++z)
                if (z & mask)
                    psi[z] *= ph;
            break;
        }
        case GateKind::ZZ: {
            const std::size_t m1 = 1ULL << (n - g.q1);
            const std::size_t m2 = 1ULL << (n - g.q2);
            Amp same = std::exp(-I * g.angle);
            Amp diff = std::exp(I * g.angle);
            for (std::size_t z = 0; z < psi.size(); ++z)
                psi[z] *= (((z & m1) != 0) == ((z & m2) != 0)) ? same : diff;
            break;
        }
        case GateKind::XX: {
            const std::size_t m1 = 1ULL << (n - g.q1);
            const std::size_t m2 = 1ULL << (n - g.q2);
            double c = std::cos(g.angle), s = std::sin(g.angle);
            for (std::size_t z = 0; z < psi.size(); ++z) {
                if ((z & m1) || (z & m2))
                    continue;
                // pairs {z, z|m1|m2} and {z|m1, z|m2}
                std::size_t z11 = z | m1 | m2;
                Amp a = psi[z], b = psi[z11];
                psi[z] = c * a - I * s * b;
                psi[z11] = -I * s * a + c * b;
                Amp e = psi[z | m1], f = psi[z | m2];
                psi[z | m1] = c * e - I * s * f;
                psi[z | m2] = -I * s * e + c * f;
            }
            break;
        }
    }
}

}  // namespace detail

inline Distribution simulate_statevector(const CircuitIR& circ)
{
    if (circ.n < 1 || circ.n > 24)
        throw std::invalid_argument("simulate_statevector: qubit count out of range (1..24)");
    std::vector<detail::Amp> psi(std::size_t(1) << circ.n, detail::Amp(0.0, 0.0));
    psi[0] = 1.0;
    for (const Gate& g : circ.gates)
        detail::apply_gate(psi, circ.n, g);
    Distribution dist;
    dist.n = circ.n;
    dist.probabilities.resize(psi.size());
    for (std::size_t z = 0; z < psi.size(); ++z)
        dist.probabilities[z] = std::norm(psi[z]);
    return dist;
}

inline std::string index_to_bitstring(std::size_t z, int n)
{
    std::string s(n, '0');
    for (int q = 1; q <= n; ++q)
        if (z & (1ULL << (n - q)))
            s[q - 1] = '1';
    return s;
}

inline std::size_t bitstring_to_index(const std::string& bits)
{
    std::size_t z = 0;
    for (char ch : bits) {
        z <<= 1;
        if (ch == '1')
            z |= 1;
        else if (ch != '0')
            throw std::invalid_argument("bitstring_to_index: invalid character");
    }
    return z;
}

namespace detail {

// 53-bit uniform double in [0,1)
inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

inline std::vector<std::string> sample(const Distribution& dist, std::size_t shots, std::uint64_t seed)
{
    if (shots < 1)
        throw std::invalid_argument("sample: shots must be >= 1");
    std::vector<double> cdf(dist.probabilities.size());
    double acc = 0.0;
    for (std::size_t z = 0; z < cdf.size(); ++z) {
        acc += dist.probabilities[z];
        cdf[z] = acc;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::string> out;
    out.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        double u = detail::uniform01(rng) * acc;
        std::size_t z = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (z >= cdf.size())
            z = cdf.size() - 1;
        out.push_back(index_to_bitstring(z, dist.n));
    }
    return out;
}

inline std::vector<std::string> sample_uniform(int n, std::size_t shots, std::uint64_t seed)
{
    if (shots < 1)
        throw std::invalid_argument("sample_uniform: shots must be >= 1");
    std::mt19937_64 rng(seed);
    const std::size_t space = std::size_t(1) << n;
    std::vector<std::string> out;
    out.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s)
        out.push_back(index_to_bitstring(rng() & (space - 1), n));
    return out;
}

// ZZ(chi) = (Ry(pi/2) x Ry(pi/2)) XX(chi) (Ry(-pi/2) x Ry(-pi/2)), applied
// right to left; all other gates pass through.
inline CircuitIR transpile_native(const CircuitIR& circ)
{
    CircuitIR out;
    out.n = circ.n;
    const double pi_2 = std::acos(0.0);
    for (const Gate& g : circ.gates) {
        if (g.kind != GateKind::ZZ) {
            out.gates.push_back(g);
            continue;
        }
        out.gates.push_back({GateKind::Ry, g.q1, 0, -pi_2});
        out.gates.push_back({GateKind::Ry, g.q2, 0, -pi_2});
        out.gates.push_back({GateKind::XX, g.q1, g.q2, g.angle});
        out.gates.push_back({GateKind::Ry, g.q1, 0, pi_2});
        out.gates.push_back({GateKind::Ry, g.q2, 0, pi_2});
    }
    return out;
}

// Interchange text: header "qubits <n>", then one gate per line,
// "<name> <q1> [<q2>] <angle>", names Ry/Rz/Rx/ZZ/XX, angles in radians
// printed with %.17g so parsing recovers the exact double.
inline std::string export_circuit_text(const CircuitIR& circ)
{
    std::ostringstream os;
    os << "qubits " << circ.n << "\n";
    char buf[64];
    for (const Gate& g : circ.gates) {
        std::snprintf(buf, sizeof buf, "%.17g", g.angle);
        os << gate_name(g.kind) << ' ' << g.q1;
        if (g.kind == GateKind::ZZ || g.kind == GateKind::XX)
            os << ' ' << g.q2;
        os << ' ' << buf << "\n";
    }
    return os.str();
}

inline CircuitIR parse_circuit_text(const std::string& text)
{
    std::istringstream is(text);
    std::string tok;
    CircuitIR circ;
    if (!(is >> tok) || tok != "qubits" || !(is >> circ.n) || circ.n < 1)
        throw std::invalid_argument("parse_circuit_text: bad header");
    while (is >> tok) {
        Gate g;
        if (tok == "Ry")
            g.kind = GateKind::Ry;
        else if (tok == "Rz")
            g.kind = GateKind::Rz;
        else if (tok == "Rx")
            g.kind = GateKind::Rx;
        else if (tok == "ZZ")
            g.kind = GateKind::ZZ;
        else if (tok == "XX")
            g.kind = GateKind::XX;
        else
            throw std::invalid_argument("parse_circuit_text: unknown gate " + tok);
        if (!(is >> g.q1))
            throw std::invalid_argument("parse_circuit_text: missing qubit");
        if (g.kind == GateKind::ZZ || g.kind == GateKind::XX) {
            if (!(is >> g.q2))
                throw std::invalid_argument("parse_circuit_text: missing second qubit");
            if (g.q2 == g.q1)
                throw std::invalid_argument("parse_circuit_text: two-qubit gate on one qubit");
        }
        if (!(is >> g.angle))
            throw std::invalid_argument("parse_circuit_text: missing angle");
        if (g.q1 < 1 || g.q1 > circ.n || g.q2 > circ.n || g.q2 < 0)
            throw std::invalid_argument("parse_circuit_text: qubit index out of range");
        circ.gates.push_back(g);
    }
    return circ;
}

}  // namespace srfactor

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "srfactor/lattice.hpp"
#include "srfactor/qaoa.hpp"

#include <complex>
#include <random>

using namespace srfactor;
using Amp = std::complex<double>;

namespace {

std::vector<RatVec> upper(std::initializer_list<std::initializer_list<Rational>> rows)
{
    std::vector<RatVec> m;
    for (auto& r : rows)
        m.emplace_back(r);
    return m;
}

// Direct amplitude-sum oracle for the compiled one-layer circuit: sums the
// tensor-product matrix elements over every intermediate basis state, never
// applying gates to a state vector.
std::vector<double> amplitude_sum_oracle(const std::vector<RatVec>& qnorm, const QaoaAngles& a,
                                         int mixer_sign)
{
    const int n = static_cast<int>(qnorm.size());
    const std::size_t dim = std::size_t(1) << n;
    std::vector<double> theta(n);
    for (int i = 0; i < n; ++i)
        theta[i] = a.gamma / 4.0 * qnorm[i][i].get_d();
    std::vector<std::vector<double>> chi(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            chi[i][j] = a.gamma / 8.0 * qnorm[i][j].get_d();

    const double beta_eff = mixer_sign * a.beta;
    const Amp I(0.0, 1.0);
    const double ry = 1.0 / std::sqrt(2.0);
    const Amp rx_diag = std::cos(beta_eff);
    const Amp rx_off = -I * std::sin(beta_eff);

    std::vector<double> probs(dim, 0.0);
    for (std::size_t z = 0; z < dim; ++z) {
        Amp amp(0.0, 0.0);
        for (std::size_t y = 0; y < dim; ++y) {
            double phase = 0.0;
            Amp factor(1.0, 0.0);
            for (int q = 1; q <= n; ++q) {
                int yq = (y >> (n - q)) & 1;
                int zq = (z >> (n - q)) & 1;
                factor *= ry;  // <y_q| Ry(pi/2) |0>
                factor *= (zq == yq) ? rx_diag : rx_off;
                if (yq)
                    phase += theta[q - 1];
            }
            for (int i = 1; i <= n; ++i)
                for (int j = i + 1; j <= n; ++j)
                    if (chi[i - 1][j - 1] != 0.0) {
                        int yi = (y >> (n - i)) & 1;
                        int yj = (y >> (n - j)) & 1;
                        phase += -chi[i - 1][j - 1] * ((yi == yj) ? 1.0 : -1.0);
                    }
            amp += factor * std::exp(I * phase);
        }
        probs[z] = std::norm(amp);
    }
    return probs;
}

// dense unitary of a circuit by multiplying expanded gate matrices
std::vector<std::vector<Amp>> dense_unitary(const CircuitIR& circ)
{
    const std::size_t dim = std::size_t(1) << circ.n;
    std::vector<std::vector<Amp>> u(dim, std::vector<Amp>(dim, Amp(0, 0)));
    for (std::size_t i = 0; i < dim; ++i)
        u[i][i] = 1.0;
    const Amp I(0.0, 1.0);
    for (const Gate& g : circ.gates) {
        std::vector<std::vector<Amp>> gm(dim, std::vector<Amp>(dim, Amp(0, 0)));
        auto bit = [&](std::size_t z, int q) { return (z >> (circ.n - q)) & 1UL; };
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                bool same_elsewhere = true;
                for (int q = 1; q <= circ.n; ++q) {
                    if (q == g.q1 || (g.q2 != 0 && q == g.q2))
                        continue;
                    if (bit(r, q) != bit(c, q))
                        same_elsewhere = false;
                }
                if (!same_elsewhere)
                    continue;
                Amp val(0, 0);
                if (g.kind == GateKind::Ry || g.kind == GateKind::Rx) {
                    auto rb = bit(r, g.q1), cb = bit(c, g.q1);
                    double co = std::cos(g.angle / 2), si = std::sin(g.angle / 2);
                    if (g.kind == GateKind::Ry)
                        val = (rb == cb) ? Amp(co, 0) : (rb ? Amp(si, 0) : Amp(-si, 0));
                    else
                        val = (rb == cb) ? Amp(co, 0) : -I * si;
                } else if (g.kind == GateKind::Rz) {
                    if (bit(r, g.q1) != bit(c, g.q1))
                        continue;
                    val = bit(r, g.q1) ? std::exp(I * g.angle) : Amp(1, 0);
                } else {
                    auto r1 = bit(r, g.q1), r2 = bit(r, g.q2);
                    auto c1 = bit(c, g.q1), c2 = bit(c, g.q2);
                    if (g.kind == GateKind::ZZ) {
                        if (r1 != c1 || r2 != c2)
                            continue;
                        val = std::exp(-I * g.angle * ((r1 == r2) ? 1.0 : -1.0));
                    } else {  // XX
                        if (r1 == c1 && r2 == c2)
                            val = std::cos(g.angle);
                        else if (r1 != c1 && r2 != c2)
                            val = -I * std::sin(g.angle);
                        else
                            continue;
                    }
                }
                gm[r][c] = val;
            }
        }
        std::vector<std::vector<Amp>> next(dim, std::vector<Amp>(dim, Amp(0, 0)));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = 0; k < dim; ++k) {
                if (gm[i][k] == Amp(0, 0))
                    continue;
                for (std::size_t j = 0; j < dim; ++j)
                    next[i][j] += gm[i][k] * u[k][j];
            }
        u = std::move(next);
    }
    return u;
}

bool equal_up_to_global_phase(const std::vector<std::vector<Amp>>& a,
                              const std::vector<std::vector<Amp>>& b, double tol)
{
    Amp phase(0, 0);
    for (std::size_t i = 0; i < a.size() && phase == Amp(0, 0); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (std::abs(b[i][j]) > 1e-8) {
                phase = a[i][j] / b[i][j];
                break;
            }
    if (std::abs(std::abs(phase) - 1.0) > tol)
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (std::abs(a[i][j] - phase * b[i][j]) > tol)
                return false;
    return true;
}

std::vector<RatVec> reference_qnorm_1591()
{
    Permutation p;
    p.sigma = {1, 3, 2, 5, 6, 4};
    PrimeLattice lat = build_prime_lattice(1591, first_primes(6), Rational(3, 2), p);
    ReducedBasis red = lll_reduce(lat.basis, Rational(3, 4));
    BabaiResult res = babai_nearest_plane(red, lat.target);
    return build_qubo(res, red)->normalized;
}

}  // namespace

TEST_CASE("compiled angles match the first reference circuit")
{
    QaoaAngles a{8.0 / 3.0, 0.33, 1};
    CircuitIR circ = qubo_to_circuit(reference_qnorm_1591(), a);
    double theta1 = 0, theta2 = 0, chi12 = 0, chi35 = 0;
    int n_zz = 0;
    for (const Gate& g : circ.gates) {
        if (g.kind == GateKind::Rz && g.q1 == 1)
            theta1 = g.angle;
        if (g.kind == GateKind::Rz && g.q1 == 2)
            theta2 = g.angle;
        if (g.kind == GateKind::ZZ) {
            ++n_zz;
            if (g.q1 == 1 && g.q2 == 2)
                chi12 = g.angle;
            if (g.q1 == 3 && g.q2 == 5)
                chi35 = g.angle;
        }
    }
    CHECK(std::abs(theta2 - 0.667) < 1e-3);
    CHECK(std::abs(theta1 - -0.619) < 1e-3);
    CHECK(std::abs(chi12 - -0.095) < 1e-3);
    CHECK(std::abs(chi35 - 0.214) < 1e-3);
    CHECK(n_zz == 14);  // one coupling of this instance is exactly zero
}

TEST_CASE("zero matrix compiles to bare mixing layers")
{
    std::vector<RatVec> q(3, RatVec(3, Rational(0)));
    CircuitIR circ = qubo_to_circuit(q, QaoaAngles{});
    for (const Gate& g : circ.gates) {
        CHECK(g.kind != GateKind::ZZ);
        if (g.kind == GateKind::Rz)
            CHECK(g.angle == 0.0);
    }
}

TEST_CASE("beta = 0 gives the uniform distribution")
{
    auto q = upper({{Rational(1), Rational(-1, 2)}, {Rational(0), Rational(-2)}});
    Distribution dist = simulate_statevector(qubo_to_circuit(q, QaoaAngles{2.1, 0.0, 1}));
    for (double p : dist.probabilities)
        CHECK(std::abs(p - 0.25) < 1e-12);
}

TEST_CASE("single-qubit closed form")
{
    for (double qv : {1.0, -0.7, 0.3}) {
        for (double beta : {0.33, 1.1}) {
            for (double gamma : {8.0 / 3.0, 2.64}) {
                std::vector<RatVec> q(1, RatVec(1, Rational(static_cast<long>(qv * 1000), 1000)));
                // mixer_sign +1: the closed form below is for a literal Rx(2*beta)
                Distribution dist =
                    simulate_statevector(qubo_to_circuit(q, QaoaAngles{gamma, beta, 1}, +1));
                double expected =
                    (1 + std::sin(2 * beta) * std::sin(gamma * q[0][0].get_d() / 4)) / 2;
                CHECK(std::abs(dist.probabilities[0] - expected) < 1e-12);
            }
        }
    }
}

TEST_CASE("statevector matches the amplitude-sum oracle on random instances")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng() % 4);
        std::vector<RatVec> q(n, RatVec(n, Rational(0)));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                q[i][j] = Rational(static_cast<long>(rng() % 4001) - 2000, 1000);
        QaoaAngles a{8.0 / 3.0, 0.33, 1};
        Distribution dist = simulate_statevector(qubo_to_circuit(q, a));
        auto oracle = amplitude_sum_oracle(q, a, kDefaultMixerSign);
        double total = 0.0;
        for (std::size_t z = 0; z < dist.probabilities.size(); ++z) {
            CHECK(std::abs(dist.probabilities[z] - oracle[z]) < 1e-10);
            total += dist.probabilities[z];
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("sampling a point mass returns a constant list")
{
    Distribution dist;
    dist.n = 3;
    dist.probabilities.assign(8, 0.0);
    dist.probabilities[5] = 1.0;
    for (const std::string& s : sample(dist, 20, 99))
        CHECK(s == "101");
}

TEST_CASE("sampling is deterministic in the seed")
{
    Distribution dist;
    dist.n = 4;
    dist.probabilities.assign(16, 1.0 / 16);
    CHECK(sample(dist, 50, 7) == sample(dist, 50, 7));
    CHECK(sample_uniform(4, 50, 7) == sample_uniform(4, 50, 7));
    CHECK(sample(dist, 50, 7) != sample(dist, 50, 8));
}

TEST_CASE("uniform sampling frequencies stay within four sigma")
{
    const int n = 3;
    const std::size_t shots = 100000;
    auto draws = sample_uniform(n, shots, 12345);
    std::vector<std::size_t> counts(1 << n, 0);
    for (const std::string& s : draws)
        ++counts[bitstring_to_index(s)];
    double p = 1.0 / (1 << n);
    double sigma = std::sqrt(shots * p * (1 - p));
    for (std::size_t z = 0; z < counts.size(); ++z)
        CHECK(std::abs(static_cast<double>(counts[z]) - shots * p) < 4 * sigma);

    Distribution dist;
    dist.n = n;
    dist.probabilities.assign(1 << n, p);
    auto draws2 = sample(dist, shots, 54321);
    std::fill(counts.begin(), counts.end(), 0);
    for (const std::string& s : draws2)
        ++counts[bitstring_to_index(s)];
    for (std::size_t z = 0; z < counts.size(); ++z)
        CHECK(std::abs(static_cast<double>(counts[z]) - shots * p) < 4 * sigma);
}

TEST_CASE("zz decomposition equals the native sandwich")
{
    CircuitIR circ;
    circ.n = 2;
    circ.gates.push_back({GateKind::ZZ, 1, 2, 0.3});
    auto direct = dense_unitary(circ);
    auto native = dense_unitary(transpile_native(circ));
    CHECK(equal_up_to_global_phase(direct, native, 1e-12));
}

TEST_CASE("transpile passes circuits without zz through unchanged")
{
    CircuitIR circ;
    circ.n = 2;
    circ.gates.push_back({GateKind::Ry, 1, 0, 0.7});
    circ.gates.push_back({GateKind::Rz, 2, 0, -0.2});
    CircuitIR out = transpile_native(circ);
    REQUIRE(out.gates.size() == circ.gates.size());
    for (std::size_t i = 0; i < out.gates.size(); ++i) {
        CHECK(out.gates[i].kind == circ.gates[i].kind);
        CHECK(out.gates[i].angle == circ.gates[i].angle);
    }
}

TEST_CASE("transpiled reference circuit keeps its distribution")
{
    CircuitIR circ = qubo_to_circuit(reference_qnorm_1591(), QaoaAngles{});
    Distribution a = simulate_statevector(circ);
    CircuitIR native = transpile_native(circ);
    for (const Gate& g : native.gates)
        CHECK(g.kind != GateKind::ZZ);
    Distribution b = simulate_statevector(native);
    for (std::size_t z = 0; z < a.probabilities.size(); ++z)
        CHECK(std::abs(a.probabilities[z] - b.probabilities[z]) < 1e-10);
}

TEST_CASE("circuit text round trip")
{
    CircuitIR empty;
    empty.n = 4;
    CHECK(export_circuit_text(empty) == "qubits 4\n");

    CircuitIR one;
    one.n = 2;
    one.gates.push_back({GateKind::Rz, 1, 0, 0.5});
    CHECK(export_circuit_text(one) == "qubits 2\nRz 1 0.5\n");

    CircuitIR circ = qubo_to_circuit(reference_qnorm_1591(), QaoaAngles{});
    std::string text = export_circuit_text(circ);
    CircuitIR parsed = parse_circuit_text(text);
    CHECK(export_circuit_text(parsed) == text);

    CHECK_THROWS_AS(parse_circuit_text("qubits 2\nZZ 1 1 0.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_circuit_text("gates 2\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_circuit_text("qubits 2\nRz 3 0.5\n"), std::invalid_argument);
}

TEST_CASE("qubit one occupies the most significant bit")
{
    // asymmetric two-qubit circuit: a phase rotation on qubit 1 only
    CircuitIR circ;
    circ.n = 2;
    const double pi_2 = std::acos(0.0);
    circ.gates.push_back({GateKind::Ry, 1, 0, pi_2});
    circ.gates.push_back({GateKind::Ry, 2, 0, pi_2});
    circ.gates.push_back({GateKind::Rz, 1, 0, 1.0});
    circ.gates.push_back({GateKind::Rx, 1, 0, 0.8});
    circ.gates.push_back({GateKind::Rx, 2, 0, 0.8});
    Distribution dist = simulate_statevector(circ);
    // qubit 2 never sees a phase, so the distribution is symmetric in the low
    // bit and asymmetric in the high bit; a flipped convention would swap them
    CHECK(std::abs(dist.probabilities[0b00] - dist.probabilities[0b01]) < 1e-12);
    CHECK(std::abs(dist.probabilities[0b10] - dist.probabilities[0b11]) < 1e-12);
    CHECK(std::abs(dist.probabilities[0b00] - dist.probabilities[0b10]) > 1e-3);
    double p0 = dist.probabilities[0b00] + dist.probabilities[0b01];
    CHECK(std::abs(p0 - (1 + std::sin(0.8) * std::sin(1.0)) / 2) < 1e-12);
}

TEST_CASE("statevector guards the qubit range")
{
    CircuitIR circ;
    circ.n = 25;
    CHECK_THROWS_AS(simulate_statevector(circ), std::invalid_argument);
}

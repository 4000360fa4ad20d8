#pragma once

#include "srfactor/lattice.hpp"
#include "srfactor/numtheory.hpp"
#include "srfactor/qaoa.hpp"
#include "srfactor/relations.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace srfactor {

enum class SamplerKind { emulator, uniform };

inline const char* sampler_name(SamplerKind s)
{
    return s == SamplerKind::emulator ? "emulator" : "uniform";
}

inline SamplerKind sampler_from_name(const std::string& s)
{
    if (s == "emulator")
        return SamplerKind::emulator;
    if (s == "uniform")
        return SamplerKind::uniform;
    throw std::invalid_argument("unknown sampler: " + s);
}

struct RunConfig {
    BigInt N;
    std::size_t n = 6;   // qubit count = B1
    std::size_t b2 = 11; // relaxed base size
    Rational c = Rational(3, 2);
    Rational delta = Rational(3, 4);
    std::size_t shots_per_circuit = 5;
    QaoaAngles angles;
    int mixer_sign = kDefaultMixerSign;
    BabaiRounding rounding = BabaiRounding::nearest;
    SamplerKind sampler = SamplerKind::emulator;
    std::uint64_t seed = 1;
    std::size_t max_circuits = 200;
    bool stop_on_success = true;
};

struct RunStep {
    std::size_t step = 0;     // 1-based shot counter
    Permutation permutation;
    std::size_t circuit = 0;  // 1-based circuit counter
    std::string bitstring;
    std::optional<std::pair<BigInt, BigInt>> sr_pair;  // set only when a new pair was added
    std::size_t n_pairs = 0;
    bool factored = false;
};

struct RunRecord {
    std::vector<RunStep> steps;
    std::optional<FactorResult> result;
};

struct CollectionCurve {
    std::string sampler;
    std::vector<double> mean_pairs;  // indexed by shot (entry s = after s+1 shots)
    std::size_t trials = 0;
    double mean_shots_to_threshold = 0.0;
    double stderr_shots_to_threshold = 0.0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x)
{
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// independent stream seed for (seed, purpose, index)
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index)
{
    std::uint64_t x = seed ^ (purpose * 0x9e3779b97f4a7c15ULL);
    splitmix64(x);
    x ^= index * 0xd1342543de82ef95ULL;
    return splitmix64(x);
}

inline Permutation random_permutation(std::size_t n, std::mt19937_64& rng)
{
    Permutation p = identity_permutation(n);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);  // n is tiny; modulo bias negligible
        std::swap(p.sigma[i - 1], p.sigma[j]);
    }
    return p;
}

struct SolvedInstance {
    PrimeLattice lattice;
    ReducedBasis reduced;
    BabaiResult babai;
    std::optional<QuboProblem> qubo;
};

inline SolvedInstance solve_instance(const RunConfig& cfg, const FactorBase& b1,
                                     const Permutation& sigma)
{
    SolvedInstance inst;
    inst.lattice = build_prime_lattice(cfg.N, b1, cfg.c, sigma);
    inst.reduced = lll_reduce(inst.lattice.basis, cfg.delta);
    inst.babai = babai_nearest_plane(inst.reduced, inst.lattice.target, cfg.rounding);
    bool zero_residual = true;
    for (const BigInt& x : inst.babai.residual)
        if (x != 0)
            zero_residual = false;
    inst.qubo = zero_residual ? std::nullopt : build_qubo(inst.babai, inst.reduced);
    return inst;
}

}  // namespace detail

// Trivial splits the lattice loop never sees: even N and perfect powers.
inline std::optional<FactorResult> trivial_split(const BigInt& N)
{
    if (N % 2 == 0 && N > 2)
        return FactorResult{2, N / 2};
    if (auto root = perfect_power_root(N))
        return FactorResult{*root, N / *root};
    return std::nullopt;
}

inline void validate(const RunConfig& cfg)
{
    if (cfg.n < 2)
        throw std::invalid_argument("config: n must be >= 2");
    if (cfg.b2 < cfg.n)
        throw std::invalid_argument("config: b2 must be >= n");
    if (cfg.delta <= Rational(1, 4) || cfg.delta >= 1)
        throw std::invalid_argument("config: delta must lie in (1/4, 1)");
    if (cfg.shots_per_circuit < 1)
        throw std::invalid_argument("config: shots_per_circuit must be >= 1");
}

inline std::pair<std::optional<FactorResult>, RunRecord> factor(const RunConfig& cfg)
{
    validate(cfg);
    RunRecord record;
    if (cfg.N < 15 && !trivial_split(cfg.N))
        throw std::invalid_argument("factor: N must be >= 15 or trivially splittable");
    if (auto t = trivial_split(cfg.N)) {
        record.result = t;
        return {t, record};
    }
    if (is_probable_prime(cfg.N))
        throw std::invalid_argument("factor: N is prime");

    const FactorBase b1 = first_primes(cfg.n);
    const FactorBase b2 = first_primes(cfg.b2);
    RelationSet rel(cfg.b2 + 1);
    std::mt19937_64 perm_rng(detail::derive_seed(cfg.seed, 1, 0));

    std::optional<FactorResult> found;
    std::size_t step_counter = 0;

    auto process_bitstring = [&](const detail::SolvedInstance& inst, const Permutation& sigma,
                                 std::size_t circuit_idx, const std::string& bits) {
        RunStep step;
        step.step = ++step_counter;
        step.permutation = sigma;
        step.circuit = circuit_idx;
        step.bitstring = bits;
        IntVec e = bitstring_to_candidate(bits, inst.babai, inst.reduced, inst.lattice);
        auto [u, v] = exponents_to_uv(e, b1);
        if (auto pair = verify_sr_pair(u, v, cfg.N, b1, b2)) {
            if (rel.insert(*pair)) {
                step.sr_pair = std::make_pair(pair->u, pair->v);
                if (!found)
                    found = try_factor(rel, cfg.N, b1, b2);
            }
        }
        step.n_pairs = rel.size();
        step.factored = found.has_value();
        record.steps.push_back(std::move(step));
    };

    for (std::size_t circuit = 1; circuit <= cfg.max_circuits; ++circuit) {
        if (found && cfg.stop_on_success)
            break;
        if (rel.reached_threshold()) {
            // the threshold guarantees a solvable system with high probability;
            // keep collecting only if extraction failed so far
            if (!found)
                found = try_factor(rel, cfg.N, b1, b2);
            if (found)
                break;
        }
        Permutation sigma = detail::random_permutation(cfg.n, perm_rng);
        detail::SolvedInstance inst = detail::solve_instance(cfg, b1, sigma);
        if (!inst.qubo) {
            // degenerate instance: record the Babai vector itself and move on
            process_bitstring(inst, sigma, circuit, std::string(cfg.n, '0'));
            continue;
        }
        std::vector<std::string> shots;
        const std::uint64_t shot_seed = detail::derive_seed(cfg.seed, 2, circuit);
        if (cfg.sampler == SamplerKind::emulator) {
            CircuitIR circ = qubo_to_circuit(inst.qubo->normalized, cfg.angles, cfg.mixer_sign);
            shots = sample(simulate_statevector(circ), cfg.shots_per_circuit, shot_seed);
        } else {
            shots = sample_uniform(static_cast<int>(cfg.n), cfg.shots_per_circuit, shot_seed);
        }
        for (const std::string& bits : shots) {
            process_bitstring(inst, sigma, circuit, bits);
            if (found && cfg.stop_on_success)
                break;
        }
    }
    if (!found && rel.size() > 0)
        found = try_factor(rel, cfg.N, b1, b2);
    record.result = found;
    return {found, record};
}

// ---- run record serialization (line-delimited JSON) ----

inline nlohmann::json step_to_json(const RunStep& s)
{
    nlohmann::json j;
    j["step"] = s.step;
    j["permutation"] = s.permutation.sigma;
    j["circuit"] = s.circuit;
    j["bitstring"] = s.bitstring;
    if (s.sr_pair)
        j["sr_pair"] = {s.sr_pair->first.get_str(), s.sr_pair->second.get_str()};
    else
        j["sr_pair"] = nullptr;
    j["n_pairs"] = s.n_pairs;
    j["factored"] = s.factored;
    return j;
}

inline std::string record_to_jsonl(const RunRecord& record, const RunConfig* cfg = nullptr)
{
    std::ostringstream os;
    if (cfg) {
        nlohmann::json h;
        h["config"] = {{"N", cfg->N.get_str()},
                       {"n", cfg->n},
                       {"b2", cfg->b2},
                       {"c", cfg->c.get_str()},
                       {"delta", cfg->delta.get_str()},
                       {"shots", cfg->shots_per_circuit},
                       {"gamma", cfg->angles.gamma},
                       {"beta", cfg->angles.beta},
                       {"mixer_sign", cfg->mixer_sign},
                       {"sampler", sampler_name(cfg->sampler)},
                       {"seed", cfg->seed}};
        os << h.dump() << "\n";
    }
    for (const RunStep& s : record.steps)
        os << step_to_json(s).dump() << "\n";
    return os.str();
}

// Replay input: one JSON object per line with at least
// {permutation, circuit, bitstring}; config headers and extra fields ignored.
struct TraceStep {
    Permutation permutation;
    std::size_t circuit = 0;
    std::string bitstring;
};

inline std::vector<TraceStep> parse_trace(std::istream& in)
{
    std::vector<TraceStep> trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos)
            continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("config"))
            continue;
        if (!j.contains("permutation") || !j.contains("circuit") || !j.contains("bitstring"))
            throw std::invalid_argument("parse_trace: step missing required field");
        TraceStep s;
        for (const auto& v : j["permutation"])
            s.permutation.sigma.push_back(v.get<unsigned>());
        s.circuit = j["circuit"].get<std::size_t>();
        s.bitstring = j["bitstring"].get<std::string>();
        trace.push_back(std::move(s));
    }
    return trace;
}

// Re-derive sr-pairs and factoring flags from recorded measurements.
inline RunRecord replay(const std::vector<TraceStep>& trace, const RunConfig& cfg)
{
    validate(cfg);
    RunRecord record;
    const FactorBase b1 = first_primes(cfg.n);
    const FactorBase b2 = first_primes(cfg.b2);
    RelationSet rel(cfg.b2 + 1);
    std::optional<FactorResult> found;

    std::optional<std::size_t> cur_circuit;
    Permutation cur_perm;
    std::optional<detail::SolvedInstance> inst;
    std::size_t step_counter = 0;
    for (const TraceStep& t : trace) {
        if (t.permutation.size() != cfg.n)
            throw std::invalid_argument("replay: permutation size mismatch");
        if (!cur_circuit || *cur_circuit != t.circuit || cur_perm.sigma != t.permutation.sigma) {
            cur_circuit = t.circuit;
            cur_perm = t.permutation;
            inst = detail::solve_instance(cfg, b1, t.permutation);
        }
        RunStep step;
        step.step = ++step_counter;
        step.permutation = t.permutation;
        step.circuit = t.circuit;
        step.bitstring = t.bitstring;
        IntVec e = bitstring_to_candidate(t.bitstring, inst->babai, inst->reduced, inst->lattice);
        auto [u, v] = exponents_to_uv(e, b1);
        if (auto pair = verify_sr_pair(u, v, cfg.N, b1, b2)) {
            if (rel.insert(*pair)) {
                step.sr_pair = std::make_pair(pair->u, pair->v);
                if (!found)
                    found = try_factor(rel, cfg.N, b1, b2);
            }
        }
        step.n_pairs = rel.size();
        step.factored = found.has_value();
        record.steps.push_back(std::move(step));
    }
    record.result = found;
    return record;
}

// Collection-rate benchmark: per sampler, per trial, run the collection loop
// (no early stop) until b2+1 unique pairs or the shot budget is exhausted.
inline std::vector<CollectionCurve> benchmark_collection_rate(const RunConfig& base_cfg,
                                                              const std::vector<SamplerKind>& samplers,
                                                              std::size_t trials)
{
    if (trials < 1)
        throw std::invalid_argument("benchmark_collection_rate: trials must be >= 1");
    const std::size_t threshold = base_cfg.b2 + 1;
    const std::size_t max_shots = base_cfg.max_circuits * base_cfg.shots_per_circuit;
    std::vector<CollectionCurve> curves;
    for (SamplerKind sampler : samplers) {
        CollectionCurve curve;
        curve.sampler = sampler_name(sampler);
        curve.trials = trials;
        curve.mean_pairs.assign(max_shots, 0.0);
        std::vector<double> shots_needed;
        shots_needed.reserve(trials);
        for (std::size_t trial = 0; trial < trials; ++trial) {
            RunConfig cfg = base_cfg;
            cfg.sampler = sampler;
            cfg.stop_on_success = false;
            cfg.seed = detail::derive_seed(base_cfg.seed, 100 + static_cast<std::uint64_t>(sampler),
                                           trial);
            auto [res, record] = factor(cfg);
            std::size_t reached_at = max_shots;
            std::size_t last = 0;
            for (std::size_t s = 0; s < max_shots; ++s) {
                if (s < record.steps.size())
                    last = record.steps[s].n_pairs;
                curve.mean_pairs[s] += static_cast<double>(std::min(last, threshold));
                if (last >= threshold && s < reached_at)
                    reached_at = s + 1;
            }
            shots_needed.push_back(static_cast<double>(reached_at));
        }
        double mean = 0.0;
        for (double s : shots_needed)
            mean += s;
        mean /= trials;
        double var = 0.0;
        for (double s : shots_needed)
            var += (s - mean) * (s - mean);
        var = trials > 1 ? var / (trials - 1) : 0.0;
        curve.mean_shots_to_threshold = mean;
        curve.stderr_shots_to_threshold = std::sqrt(var / trials);
        for (double& v : curve.mean_pairs)
            v /= trials;
        curves.push_back(std::move(curve));
    }
    return curves;
}

inline std::string curves_to_csv(const std::vector<CollectionCurve>& curves)
{
    std::ostringstream os;
    os << "sampler,shot_index,mean_pairs,trials\n";
    for (const CollectionCurve& c : curves) {
        for (std::size_t s = 0; s < c.mean_pairs.size(); ++s) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", c.mean_pairs[s]);
            os << c.sampler << ',' << (s + 1) << ',' << buf << ',' << c.trials << "\n";
        }
    }
    return os.str();
}

// QUBO instances harvested from the collection loop, for angle training.
inline std::vector<QuboProblem> generate_training_set(const BigInt& N, std::size_t n,
                                                      const Rational& c, const Rational& delta,
                                                      std::size_t count, std::uint64_t seed)
{
    const FactorBase b1 = first_primes(n);
    std::mt19937_64 rng(detail::derive_seed(seed, 3, 0));
    std::vector<QuboProblem> set;
    std::size_t guard = 0;
    RunConfig cfg;
    cfg.N = N;
    cfg.n = n;
    cfg.c = c;
    cfg.delta = delta;
    while (set.size() < count) {
        if (++guard > 100 * count + 100)
            throw std::runtime_error("generate_training_set: too many degenerate instances");
        Permutation sigma = detail::random_permutation(n, rng);
        detail::SolvedInstance inst = detail::solve_instance(cfg, b1, sigma);
        if (inst.qubo)
            set.push_back(*inst.qubo);
    }
    return set;
}

}  // namespace srfactor

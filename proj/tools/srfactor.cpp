// Command-line front end: factoring runs, collection-rate benchmarks, angle
// training, circuit export, and trace replay.

#include "srfactor/srfactor.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

using namespace srfactor;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNotFactored = 3;

// base 10 forced: the gmp string constructor auto-detects octal on "075"
BigInt parse_int(const std::string& s)
{
    return BigInt(s, 10);
}

Rational parse_rational(const std::string& text)
{
    std::string s = text;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational q(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
        q.canonicalize();
        return q;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        return Rational(parse_int(s));
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i)
        den *= 10;
    Rational q(parse_int(digits), den);
    q.canonicalize();
    return q;
}

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("SRFACTOR_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 1;
}

struct CommonOpts {
    std::string N = "1591";
    std::size_t n = 6;
    std::size_t b2 = 11;
    std::string c = "1.5";
    std::string delta = "0.75";
    std::size_t shots = 5;
    double gamma = 8.0 / 3.0;
    double beta = 0.33;
    int mixer_sign = kDefaultMixerSign;
    std::string sampler = "emulator";
    std::uint64_t seed = default_seed();
    std::size_t max_circuits = 200;
};

void add_common(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--N", o.N, "integer to factor")->capture_default_str();
    cmd->add_option("--n", o.n, "qubit count = main factor base size")->capture_default_str();
    cmd->add_option("--b2", o.b2, "relaxed factor base size")->capture_default_str();
    cmd->add_option("--c", o.c, "lattice rounding parameter (rational)")->capture_default_str();
    cmd->add_option("--delta", o.delta, "LLL reduction parameter (rational)")->capture_default_str();
    cmd->add_option("--shots", o.shots, "shots per circuit")->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "problem angle")->capture_default_str();
    cmd->add_option("--beta", o.beta, "mixing angle")->capture_default_str();
    cmd->add_option("--mixer-sign", o.mixer_sign, "mixing layer orientation (+1 or -1)")
        ->check(CLI::IsMember({-1, 1}))
        ->capture_default_str();
    cmd->add_option("--sampler", o.sampler, "bitstring source")
        ->check(CLI::IsMember({"emulator", "uniform"}))
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "seed for all stochastic behavior (env SRFACTOR_SEED)")
        ->capture_default_str();
    cmd->add_option("--max-circuits", o.max_circuits, "circuit budget")->capture_default_str();
}

RunConfig to_config(const CommonOpts& o)
{
    RunConfig cfg;
    cfg.N = parse_int(o.N);
    cfg.n = o.n;
    cfg.b2 = o.b2;
    cfg.c = parse_rational(o.c);
    cfg.delta = parse_rational(o.delta);
    cfg.shots_per_circuit = o.shots;
    cfg.angles = QaoaAngles{o.gamma, o.beta, 1};
    cfg.mixer_sign = o.mixer_sign;
    cfg.sampler = sampler_from_name(o.sampler);
    cfg.seed = o.seed;
    cfg.max_circuits = o.max_circuits;
    return cfg;
}

int cmd_factor(const CommonOpts& o, const std::string& record_path)
{
    RunConfig cfg = to_config(o);
    auto [result, record] = factor(cfg);
    if (!record_path.empty()) {
        std::ofstream out(record_path);
        out << record_to_jsonl(record, &cfg);
    }
    if (!result) {
        std::cout << cfg.N.get_str() << ": not factored within " << cfg.max_circuits
                  << " circuits (" << record.steps.size() << " shots, "
                  << (record.steps.empty() ? 0 : record.steps.back().n_pairs)
                  << " sr-pairs)\n";
        return kExitNotFactored;
    }
    std::cout << cfg.N.get_str() << " = " << result->p.get_str() << " × "
              << result->q.get_str() << "\n";
    if (!record.steps.empty())
        std::cout << "shots: " << record.steps.size()
                  << ", unique sr-pairs: " << record.steps.back().n_pairs << "\n";
    return 0;
}

int cmd_bench(const CommonOpts& o, const std::string& samplers_csv, std::size_t trials,
              const std::string& out_path)
{
    RunConfig cfg = to_config(o);
    std::vector<SamplerKind> samplers;
    std::stringstream ss(samplers_csv);
    std::string item;
    while (std::getline(ss, item, ','))
        samplers.push_back(sampler_from_name(item));
    auto curves = benchmark_collection_rate(cfg, samplers, trials);
    std::string csv = curves_to_csv(curves);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << csv;
    }
    for (const CollectionCurve& c : curves)
        std::cout << c.sampler << ": mean shots to " << (cfg.b2 + 1)
                  << " pairs = " << c.mean_shots_to_threshold << " (stderr "
                  << c.stderr_shots_to_threshold << ", " << c.trials << " trials)\n";
    if (out_path.empty())
        std::cout << csv;
    return 0;
}

int cmd_train(const std::string& train_N, std::size_t train_size, const CommonOpts& o,
              std::size_t iterations, std::size_t restarts)
{
    auto set = generate_training_set(parse_int(train_N), o.n, parse_rational(o.c),
                                     parse_rational(o.delta), train_size, o.seed);
    TrainConfig cfg;
    cfg.iterations = iterations;
    cfg.restarts = restarts;
    cfg.seed = o.seed;
    cfg.mixer_sign = o.mixer_sign;
    TrainResult res = train_fixed_angles(set, cfg);
    std::cout << "trained angles: gamma = " << res.angles.gamma << ", beta = " << res.angles.beta
              << "\n";
    std::cout << "min P_q/P_c over " << set.size() << " instances: " << res.min_ratio
              << " (start " << res.start_ratio << ")\n";
    return 0;
}

int cmd_export(const CommonOpts& o, const std::string& record_path, const std::string& out_dir)
{
    std::ifstream in(record_path);
    if (!in.good())
        throw std::runtime_error("cannot open record: " + record_path);
    auto trace = parse_trace(in);
    RunConfig cfg = to_config(o);
    FactorBase b1 = first_primes(cfg.n);
    std::filesystem::create_directories(out_dir);
    std::map<std::size_t, Permutation> circuits;
    for (const TraceStep& t : trace)
        circuits.emplace(t.circuit, t.permutation);
    std::size_t written = 0;
    for (const auto& [index, sigma] : circuits) {
        PrimeLattice lat = build_prime_lattice(cfg.N, b1, cfg.c, sigma);
        ReducedBasis red = lll_reduce(lat.basis, cfg.delta);
        BabaiResult res = babai_nearest_plane(red, lat.target, cfg.rounding);
        auto qubo = build_qubo(res, red);
        if (!qubo)
            continue;
        CircuitIR circ = qubo_to_circuit(qubo->normalized, cfg.angles, cfg.mixer_sign);
        std::ofstream out(out_dir + "/circuit_" + std::to_string(index) + ".txt");
        out << export_circuit_text(circ);
        ++written;
    }
    std::cout << "wrote " << written << " circuits to " << out_dir << "\n";
    return 0;
}

int cmd_replay(const CommonOpts& o, const std::string& trace_path, const std::string& record_path)
{
    std::ifstream in(trace_path);
    if (!in.good())
        throw std::runtime_error("cannot open trace: " + trace_path);
    auto trace = parse_trace(in);
    RunConfig cfg = to_config(o);
    RunRecord rec = replay(trace, cfg);
    if (!record_path.empty()) {
        std::ofstream out(record_path);
        out << record_to_jsonl(rec, &cfg);
    }
    std::size_t pairs = rec.steps.empty() ? 0 : rec.steps.back().n_pairs;
    std::cout << "replayed " << rec.steps.size() << " steps, " << pairs << " unique sr-pairs\n";
    if (rec.result) {
        std::size_t at = 0;
        for (const RunStep& s : rec.steps)
            if (s.factored) {
                at = s.step;
                break;
            }
        std::cout << "factored at step " << at << ": " << cfg.N.get_str() << " = "
                  << rec.result->p.get_str() << " × " << rec.result->q.get_str() << "\n";
        return 0;
    }
    std::cout << "no factorization from this trace\n";
    return kExitNotFactored;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"integer factoring via lattice reduction and fixed-angle QAOA sampling"};
    app.require_subcommand(1);

    CommonOpts opt;

    auto* factor_cmd = app.add_subcommand("factor", "run the factoring loop");
    add_common(factor_cmd, opt);
    std::string record_path;
    factor_cmd->add_option("--record", record_path, "write the run record (JSON lines)");

    auto* bench_cmd = app.add_subcommand("bench", "sr-pair collection-rate benchmark");
    add_common(bench_cmd, opt);
    std::string samplers_csv = "emulator,uniform";
    std::size_t trials = 30;
    std::string bench_out;
    bench_cmd->add_option("--samplers", samplers_csv, "comma-separated samplers")
        ->capture_default_str();
    bench_cmd->add_option("--trials", trials, "trials per sampler")->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "CSV output path");

    auto* train_cmd = app.add_subcommand("train", "train fixed angles on harvested instances");
    add_common(train_cmd, opt);
    std::string train_N = "1591";
    std::size_t train_size = 10;
    std::size_t iterations = 300, restarts = 5;
    train_cmd->add_option("--train-N", train_N, "integer whose instances form the training set")
        ->capture_default_str();
    train_cmd->add_option("--train-size", train_size, "training set size")->capture_default_str();
    train_cmd->add_option("--iterations", iterations, "mutations per restart")
        ->capture_default_str();
    train_cmd->add_option("--restarts", restarts, "restarts")->capture_default_str();

    auto* export_cmd = app.add_subcommand("export-circuits", "write circuits of a record");
    add_common(export_cmd, opt);
    std::string export_record, out_dir = "circuits";
    export_cmd->add_option("--record", export_record, "run record to read")->required();
    export_cmd->add_option("--out-dir", out_dir, "output directory")->capture_default_str();

    auto* replay_cmd = app.add_subcommand("replay", "re-derive sr-pairs from a trace");
    add_common(replay_cmd, opt);
    std::string trace_path, replay_record;
    replay_cmd->add_option("--trace", trace_path, "trace file (JSON lines)")->required();
    replay_cmd->add_option("--record", replay_record, "write the replayed record");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (factor_cmd->parsed())
            return cmd_factor(opt, record_path);
        if (bench_cmd->parsed())
            return cmd_bench(opt, samplers_csv, trials, bench_out);
        if (train_cmd->parsed())
            return cmd_train(train_N, train_size, opt, iterations, restarts);
        if (export_cmd->parsed())
            return cmd_export(opt, export_record, out_dir);
        if (replay_cmd->parsed())
            return cmd_replay(opt, trace_path, replay_record);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}

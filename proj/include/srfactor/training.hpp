#pragma once

#include "srfactor/lattice.hpp"
#include "srfactor/qaoa.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace srfactor {

// P_q: circuit probability mass on the raw-QUBO optimal bitstrings.
// P_c: fraction of the 2^n bitstrings that are optimal (uniform baseline).
struct TrainingMetric {
    double p_q = 0.0;
    double p_c = 0.0;
    double ratio = 0.0;
};

struct TrainConfig {
    std::size_t iterations = 300;  // mutations per restart
    std::size_t restarts = 5;
    double sigma0 = 0.1;               // initial mutation scale, radians
    std::size_t shrink_after = 20;     // consecutive rejections before halving sigma
    std::uint64_t seed = 1;
    int mixer_sign = kDefaultMixerSign;
};

struct TrainResult {
    QaoaAngles angles;
    double min_ratio = 0.0;    // over the training set, at the trained angles
    double start_ratio = 0.0;  // at the first restart's starting point
};

namespace detail {

// Optimal assignments of the refinement QUBO, as distribution indices.
inline std::vector<std::size_t> qubo_argmin(const std::vector<RatVec>& raw)
{
    const std::size_t n = raw.size();
    std::vector<std::size_t> best;
    Rational best_e;
    for (std::size_t z = 0; z < (std::size_t(1) << n); ++z) {
        Rational e = qubo_energy(raw, z);
        if (best.empty() || e < best_e) {
            best_e = e;
            best.assign(1, z);
        } else if (e == best_e) {
            best.push_back(z);
        }
    }
    return best;
}

}  // namespace detail

inline TrainingMetric evaluate_metric(const QuboProblem& q, const std::vector<std::size_t>& optima,
                                      const QaoaAngles& angles, int mixer_sign = kDefaultMixerSign)
{
    Distribution dist = simulate_statevector(qubo_to_circuit(q.normalized, angles, mixer_sign));
    TrainingMetric m;
    for (std::size_t z : optima)
        m.p_q += dist.probabilities[z];
    m.p_c = double(optima.size()) / double(dist.probabilities.size());
    m.ratio = m.p_q / m.p_c;
    return m;
}

// Maximize min over the training set of P_q/P_c with a (1+1) evolution
// strategy: gaussian mutations on (gamma, beta), accepted on improvement,
// sigma halved after `shrink_after` consecutive rejections, restarted
// `restarts` times from fresh random points.
inline TrainResult train_fixed_angles(const std::vector<QuboProblem>& training_set,
                                      const TrainConfig& cfg = {})
{
    if (training_set.empty())
        throw std::invalid_argument("train_fixed_angles: empty training set");

    std::vector<std::vector<std::size_t>> optima;
    optima.reserve(training_set.size());
    for (const QuboProblem& q : training_set)
        optima.push_back(detail::qubo_argmin(q.raw));

    const double two_pi = 4.0 * std::acos(0.0);
    auto wrap = [two_pi](double a) {
        a = std::fmod(a, two_pi);
        return a < 0 ? a + two_pi : a;
    };
    auto min_ratio = [&](const QaoaAngles& a) {
        double worst = 0.0;
        bool first = true;
        for (std::size_t i = 0; i < training_set.size(); ++i) {
            double r = evaluate_metric(training_set[i], optima[i], a, cfg.mixer_sign).ratio;
            if (first || r < worst) {
                worst = r;
                first = false;
            }
        }
        return worst;
    };

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    TrainResult result;
    bool have_start = false;
    for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
        QaoaAngles cur{wrap(detail::uniform01(rng) * two_pi), wrap(detail::uniform01(rng) * two_pi), 1};
        double cur_val = min_ratio(cur);
        if (!have_start) {
            result.start_ratio = cur_val;
            have_start = true;
        }
        double sigma = cfg.sigma0;
        std::size_t rejected = 0;
        for (std::size_t it = 0; it < cfg.iterations; ++it) {
            QaoaAngles cand{wrap(cur.gamma + sigma * gauss(rng)), wrap(cur.beta + sigma * gauss(rng)), 1};
            double val = min_ratio(cand);
            if (val > cur_val) {
                cur = cand;
                cur_val = val;
                rejected = 0;
            } else if (++rejected >= cfg.shrink_after) {
                sigma /= 2;
                rejected = 0;
            }
        }
        if (restart == 0 || cur_val > result.min_ratio) {
            result.angles = cur;
            result.min_ratio = cur_val;
        }
    }
    return result;
}

}  // namespace srfactor

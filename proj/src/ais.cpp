#include "manetsim/ais.hpp"

#include <algorithm>
#include <cmath>

#include "manetsim/error.hpp"

namespace manetsim {

namespace {
const double kUnitCubeDiagonal = std::sqrt(3.0);

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

Detector random_detector(RngStream& rng) {
    Detector d;
    for (auto& c : d.center) {
        c = rng.uniform_double();
    }
    return d;
}
} // namespace

double affinity(const FeatureVec& a, const FeatureVec& b) {
    double sq = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return 1.0 - std::sqrt(sq) / kUnitCubeDiagonal;
}

DetectorSet train_detectors(const std::vector<FeatureVec>& self_patterns, const DetectorParams& params,
                            RngStream& rng) {
    if (self_patterns.empty()) {
        throw Error("train_detectors: self pattern set is empty");
    }
    if (params.worst_n >= params.population) {
        throw Error("train_detectors: worst_n must be smaller than the population");
    }
    if (params.population == 0) {
        throw Error("train_detectors: population must be positive");
    }

    DetectorSet set;
    set.params = params;
    set.population.reserve(params.population);
    for (std::size_t i = 0; i < params.population; ++i) {
        set.population.push_back(random_detector(rng));
    }
    set.memory.assign(self_patterns.size(), Detector{});
    std::vector<bool> memory_valid(self_patterns.size(), false);

    std::vector<Detector> pool;
    for (std::size_t gen = 0; gen < params.generations; ++gen) {
        for (std::size_t pi = 0; pi < self_patterns.size(); ++pi) {
            const FeatureVec& pattern = self_patterns[pi];
            pool = set.population;
            for (auto& d : pool) {
                d.affinity_score = affinity(d.center, pattern);
            }
            std::stable_sort(pool.begin(), pool.end(),
                             [](const Detector& a, const Detector& b) {
                                 return a.affinity_score > b.affinity_score;
                             });

            const std::size_t n_select = std::min(params.top_subset, pool.size());
            std::vector<Detector> clones;
            for (std::size_t i = 0; i < n_select; ++i) {
                const Detector& parent = pool[i];
                const auto n_clones = static_cast<std::size_t>(
                    std::ceil(params.clone_factor * std::max(0.0, parent.affinity_score) * 10.0));
                const double noise = params.mutation_scale * (1.0 - parent.affinity_score);
                for (std::size_t c = 0; c < n_clones; ++c) {
                    Detector clone = parent;
                    for (auto& coord : clone.center) {
                        coord = clamp01(coord + rng.gaussian(0.0, noise));
                    }
                    clone.affinity_score = affinity(clone.center, pattern);
                    clones.push_back(clone);
                }
            }
            pool.insert(pool.end(), clones.begin(), clones.end());
            std::stable_sort(pool.begin(), pool.end(),
                             [](const Detector& a, const Detector& b) {
                                 return a.affinity_score > b.affinity_score;
                             });
            pool.resize(params.population);

            // best antibody for this pattern goes to (or stays in) memory
            if (!memory_valid[pi] || pool.front().affinity_score > set.memory[pi].affinity_score) {
                set.memory[pi] = pool.front();
                set.memory[pi].is_memory = true;
                memory_valid[pi] = true;
            }

            for (std::size_t i = 0; i < params.worst_n; ++i) {
                pool[pool.size() - 1 - i] = random_detector(rng);
            }
            set.population = pool;
        }
    }
    return set;
}

Classification classify_pattern(const DetectorSet& detectors, const FeatureVec& pattern) {
    if (detectors.memory.empty()) {
        throw Error("classify_pattern: memory set is empty");
    }
    Classification result;
    for (const auto& d : detectors.memory) {
        result.best_affinity = std::max(result.best_affinity, affinity(d.center, pattern));
    }
    result.matched_self = result.best_affinity >= detectors.params.match_threshold;
    return result;
}

} // namespace manetsim

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "manetsim/rng.hpp"

namespace manetsim {

/// Route observation mapped into the unit cube:
/// (hop-count ratio, RREP-iteration rate, probe-failure rate).
using FeatureVec = std::array<double, 3>;

struct Detector {
    FeatureVec center{0, 0, 0};
    double affinity_score = 0; // affinity to the pattern that promoted it
    bool is_memory = false;
};

struct DetectorParams {
    std::size_t population = 50;
    std::size_t top_subset = 10;   // antibodies cloned per pattern
    double clone_factor = 5.0;     // beta; clones per antibody = ceil(beta * affinity * 10)
    double mutation_scale = 0.2;   // sigma; effective noise = sigma * (1 - affinity)
    std::size_t worst_n = 5;       // replaced by fresh random antibodies each step
    std::size_t generations = 20;
    double match_threshold = 0.8;  // tau; best memory affinity >= tau means self
};

struct DetectorSet {
    std::vector<Detector> population;
    std::vector<Detector> memory; // one best-so-far detector per training pattern
    DetectorParams params;
};

/// Similarity in [0,1]: 1 - euclidean distance normalized by the unit-cube
/// diagonal. Identical vectors score 1, opposite corners score 0.
double affinity(const FeatureVec& a, const FeatureVec& b);

/// Clonal selection. Starts from a random antibody population and, for G
/// generations, per pattern: clones the highest-affinity subset (clone count
/// proportional to affinity), mutates clones with gaussian noise scaled by
/// (1 - affinity), keeps the best `population` antibodies, refreshes the
/// `worst_n` weakest with random ones, and promotes the best antibody seen
/// for each pattern into the memory set.
DetectorSet train_detectors(const std::vector<FeatureVec>& self_patterns, const DetectorParams& params,
                            RngStream& rng);

struct Classification {
    bool matched_self = false;
    double best_affinity = 0;
};

/// Match a pattern against the memory set. Throws when memory is empty.
Classification classify_pattern(const DetectorSet& detectors, const FeatureVec& pattern);

} // namespace manetsim

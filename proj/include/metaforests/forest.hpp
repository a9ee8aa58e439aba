#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "metaforests/tree.hpp"

namespace metaforests {

struct ForestConfig {
    int n_trees = 50;
    TreeConfig tree;  // tree.seed is ignored; per-tree seeds derive from master_seed
    double bootstrap_ratio = 1.0;
    bool bootstrap_with_replacement = true;
    // when false every tree shares one derived seed (the ablation switch);
    // the forest collapses to copies of a single tree
    bool seed_diversity = true;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct Forest {
    std::vector<DecisionTree> trees;
    std::vector<std::size_t> used_features;  // union over trees, sorted
    ForestConfig config;
    int class_count = 0;
    std::size_t n_features = 0;
};

/// Fits n_trees trees, each on its own bootstrap draw. Tree t uses seed
/// mix64(master_seed, t) and bootstrap seed mix64(master_seed, t, 1), so the
/// result is independent of training order and thread count.
Forest fit_forest(std::span<const Sample> samples, const FeaturePool& feature_pool,
                  const ForestConfig& config, int class_count);

/// Arithmetic mean of the per-tree leaf distributions. Per-class addends are
/// summed in sorted order, which makes the result exactly invariant under
/// tree reordering.
std::vector<double> predict_proba(const Forest& forest, std::span<const double> x);

/// Argmax of predict_proba; ties break toward the lowest class index.
int predict(const Forest& forest, std::span<const double> x);

int argmax_lowest(std::span<const double> values);

}  // namespace metaforests

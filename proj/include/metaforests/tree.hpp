#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "metaforests/dataset.hpp"
#include "metaforests/rng.hpp"

namespace metaforests {

using FeaturePool = std::vector<std::size_t>;  // sorted, unique feature indices

struct TreeConfig {
    int max_depth = 5;
    int min_samples_split = 2;
    // number of candidate features per split ("mtry");
    // empty means ceil(sqrt(pool size))
    std::optional<int> features_per_split;
    std::uint64_t seed = 0;

    void validate() const;
    int resolve_mtry(std::size_t pool_size) const;
};

struct SplitChoice {
    std::size_t feature_index = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

struct TreeNode {
    // split nodes carry feature/threshold/children; leaves carry the class
    // histogram of training samples that reached them
    bool is_leaf = true;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<std::int64_t> counts;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // preorder, nodes[0] is the root
    int depth = 0;
    std::size_t n_features = 0;
    int class_count = 0;
    std::vector<std::size_t> used_features;  // sorted, unique
    FeaturePool feature_pool;
    std::uint64_t seed = 0;

    std::size_t leaf_count() const;
    std::int64_t training_sample_count() const;
};

/// Gini impurity 1 - sum_c p_c^2 of a class histogram.
double gini_impurity(const std::vector<std::int64_t>& label_counts);

/// Draws `mtry` features from the pool without replacement and returns the
/// (feature, midpoint threshold) with the largest weighted Gini decrease.
/// Ties break toward the lower feature index, then the lower threshold.
/// Returns nullopt when no candidate has a positive decrease.
std::optional<SplitChoice> best_split(std::span<const Sample> samples,
                                      const FeaturePool& feature_pool, const TreeConfig& config,
                                      RngStream& rng, int class_count);

/// Greedy recursive CART construction; recursion stops at max_depth,
/// min_samples_split, or when no split improves impurity.
DecisionTree fit_tree(std::span<const Sample> samples, const FeaturePool& feature_pool,
                      const TreeConfig& config, int class_count);

/// Routes x to a leaf and returns its histogram normalized to sum 1.
std::vector<double> predict_tree(const DecisionTree& tree, std::span<const double> x);

bool operator==(const TreeNode& a, const TreeNode& b);
bool operator==(const DecisionTree& a, const DecisionTree& b);

}  // namespace metaforests

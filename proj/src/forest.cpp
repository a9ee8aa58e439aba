#include "metaforests/forest.hpp"

#include <algorithm>
#include <set>

#include "metaforests/errors.hpp"
#include "metaforests/threading.hpp"

namespace metaforests {

void ForestConfig::validate() const {
    if (n_trees < 1) throw InvalidConfig("n_trees must be >= 1");
    if (!(bootstrap_ratio > 0.0 && bootstrap_ratio <= 1.0))
        throw InvalidConfig("bootstrap_ratio must be in (0, 1]");
    tree.validate();
}

Forest fit_forest(std::span<const Sample> samples, const FeaturePool& feature_pool,
                  const ForestConfig& config, int class_count) {
    config.validate();
    if (samples.empty()) throw EmptySet("fit_forest needs at least one sample");

    DomainDataset pool_data;
    pool_data.domain_name = "training";
    pool_data.samples.assign(samples.begin(), samples.end());

    Forest forest;
    forest.config = config;
    forest.class_count = class_count;
    forest.n_features = samples[0].features.size();
    forest.trees.resize(static_cast<std::size_t>(config.n_trees));

    parallel_for(static_cast<std::size_t>(config.n_trees), [&](std::size_t t) {
        const std::uint64_t slot = config.seed_diversity ? static_cast<std::uint64_t>(t) : 0;
        TreeConfig tree_config = config.tree;
        tree_config.seed = mix64(config.master_seed, slot);
        const DomainDataset bootstrap =
            subsample(pool_data, config.bootstrap_ratio, config.bootstrap_with_replacement,
                      mix64(config.master_seed, slot, 1));
        forest.trees[t] = fit_tree(bootstrap.samples, feature_pool, tree_config, class_count);
    });

    std::set<std::size_t> used;
    for (const DecisionTree& tree : forest.trees)
        used.insert(tree.used_features.begin(), tree.used_features.end());
    forest.used_features.assign(used.begin(), used.end());
    return forest;
}

std::vector<double> predict_proba(const Forest& forest, std::span<const double> x) {
    const std::size_t n_classes = static_cast<std::size_t>(forest.class_count);
    std::vector<std::vector<double>> per_tree;
    per_tree.reserve(forest.trees.size());
    for (const DecisionTree& tree : forest.trees) per_tree.push_back(predict_tree(tree, x));

    std::vector<double> dist(n_classes, 0.0);
    std::vector<double> column(forest.trees.size());
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t t = 0; t < per_tree.size(); ++t) column[t] = per_tree[t][c];
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double v : column) sum += v;
        dist[c] = sum / static_cast<double>(forest.trees.size());
    }
    return dist;
}

int argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<int>(best);
}

int predict(const Forest& forest, std::span<const double> x) {
    const std::vector<double> dist = predict_proba(forest, x);
    return argmax_lowest(dist);
}

}  // namespace metaforests

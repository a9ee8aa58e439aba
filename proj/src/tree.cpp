#include "metaforests/tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "metaforests/errors.hpp"

namespace metaforests {

void TreeConfig::validate() const {
    if (max_depth < 1) throw InvalidConfig("max_depth must be >= 1");
    if (min_samples_split < 2) throw InvalidConfig("min_samples_split must be >= 2");
    if (features_per_split && *features_per_split < 1)
        throw InvalidConfig("features_per_split must be >= 1");
}

int TreeConfig::resolve_mtry(std::size_t pool_size) const {
    if (!features_per_split)
        return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(pool_size))));
    if (*features_per_split > static_cast<int>(pool_size)) {
        std::ostringstream msg;
        msg << "features_per_split (" << *features_per_split << ") exceeds feature pool size ("
            << pool_size << ")";
        throw InvalidConfig(msg.str());
    }
    return *features_per_split;
}

double gini_impurity(const std::vector<std::int64_t>& label_counts) {
    std::int64_t total = 0;
    for (std::int64_t c : label_counts) total += c;
    if (total <= 0) throw EmptyHistogram("gini_impurity of an empty histogram");
    double sum_sq = 0.0;
    for (std::int64_t c : label_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

namespace {

void check_pool(const FeaturePool& pool) {
    if (pool.empty()) throw EmptyFeaturePool("feature pool is empty");
    if (!std::is_sorted(pool.begin(), pool.end()) ||
        std::adjacent_find(pool.begin(), pool.end()) != pool.end())
        throw InvalidConfig("feature pool must be sorted and unique");
}

// Weighted Gini decrease of a candidate partition. Keeping this expression
// in one place pins the floating-point evaluation order that the exhaustive
// split tests rely on.
double weighted_decrease(double parent_gini, std::int64_t n_left, std::int64_t n_right,
                         const std::vector<std::int64_t>& left_counts,
                         const std::vector<std::int64_t>& right_counts) {
    const double n = static_cast<double>(n_left + n_right);
    const double wl = static_cast<double>(n_left) / n;
    const double wr = static_cast<double>(n_right) / n;
    return parent_gini - wl * gini_impurity(left_counts) - wr * gini_impurity(right_counts);
}

struct TreeBuilder {
    std::span<const Sample> samples;
    const TreeConfig& config;
    int class_count;
    RngStream rng;
    std::vector<TreeNode> nodes;
    std::set<std::size_t> used;
    int max_depth_seen = 0;

    std::vector<std::int64_t> histogram(const std::vector<std::size_t>& idx) const {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(class_count), 0);
        for (std::size_t i : idx) ++counts[static_cast<std::size_t>(samples[i].label)];
        return counts;
    }

    std::int32_t build(std::vector<std::size_t>& idx, const FeaturePool& pool, int depth) {
        max_depth_seen = std::max(max_depth_seen, depth);
        const std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();

        std::optional<SplitChoice> split;
        if (depth < config.max_depth &&
            static_cast<int>(idx.size()) >= config.min_samples_split) {
            std::vector<Sample> node_samples;  // best_split sees only this node's rows
            node_samples.reserve(idx.size());
            for (std::size_t i : idx) node_samples.push_back(samples[i]);
            split = best_split(node_samples, pool, config, rng, class_count);
        }

        if (!split) {
            nodes[static_cast<std::size_t>(node_id)].counts = histogram(idx);
            return node_id;
        }

        used.insert(split->feature_index);
        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (samples[i].features[split->feature_index] < split->threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        const std::int32_t left = build(left_idx, pool, depth + 1);
        const std::int32_t right = build(right_idx, pool, depth + 1);

        TreeNode& node = nodes[static_cast<std::size_t>(node_id)];
        node.is_leaf = false;
        node.feature = split->feature_index;
        node.threshold = split->threshold;
        node.impurity_decrease = split->impurity_decrease;
        node.left = left;
        node.right = right;
        return node_id;
    }
};

}  // namespace

std::optional<SplitChoice> best_split(std::span<const Sample> samples,
                                      const FeaturePool& feature_pool, const TreeConfig& config,
                                      RngStream& rng, int class_count) {
    check_pool(feature_pool);
    if (static_cast<int>(samples.size()) < config.min_samples_split) return std::nullopt;

    const int mtry = config.resolve_mtry(feature_pool.size());

    // draw mtry features without replacement, then sort so that the
    // lower-index tie-break is independent of draw order
    FeaturePool candidates = feature_pool;
    for (int i = 0; i < mtry; ++i) {
        const std::size_t pick =
            static_cast<std::size_t>(i) + rng.next_index(candidates.size() - static_cast<std::size_t>(i));
        std::swap(candidates[static_cast<std::size_t>(i)], candidates[pick]);
    }
    candidates.resize(static_cast<std::size_t>(mtry));
    std::sort(candidates.begin(), candidates.end());

    std::vector<std::int64_t> parent_counts(static_cast<std::size_t>(class_count), 0);
    for (const Sample& s : samples) ++parent_counts[static_cast<std::size_t>(s.label)];
    const double parent_gini = gini_impurity(parent_counts);

    std::optional<SplitChoice> best;
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t feature : candidates) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return samples[a].features[feature] < samples[b].features[feature];
        });

        std::vector<std::int64_t> left_counts(static_cast<std::size_t>(class_count), 0);
        std::vector<std::int64_t> right_counts = parent_counts;
        std::int64_t n_left = 0;
        const std::int64_t n_total = static_cast<std::int64_t>(samples.size());

        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            const int label = samples[order[pos]].label;
            ++left_counts[static_cast<std::size_t>(label)];
            --right_counts[static_cast<std::size_t>(label)];
            ++n_left;

            const double a = samples[order[pos]].features[feature];
            const double b = samples[order[pos + 1]].features[feature];
            if (!(a < b)) continue;
            const double threshold = (a + b) / 2.0;
            if (!(threshold > a)) continue;  // midpoint of adjacent doubles can round onto a

            const double decrease =
                weighted_decrease(parent_gini, n_left, n_total - n_left, left_counts, right_counts);
            if (decrease > 0.0 && (!best || decrease > best->impurity_decrease))
                best = SplitChoice{feature, threshold, decrease};
        }
    }
    return best;
}

DecisionTree fit_tree(std::span<const Sample> samples, const FeaturePool& feature_pool,
                      const TreeConfig& config, int class_count) {
    config.validate();
    check_pool(feature_pool);
    if (samples.empty()) throw EmptySet("fit_tree needs at least one sample");
    if (class_count < 2) throw InvalidConfig("class_count must be >= 2");
    config.resolve_mtry(feature_pool.size());  // enforces mtry <= pool size up front

    TreeBuilder builder{samples, config, class_count, RngStream(config.seed), {}, {}, 0};
    std::vector<std::size_t> idx(samples.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    builder.build(idx, feature_pool, 0);

    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    tree.depth = builder.max_depth_seen;
    tree.n_features = samples[0].features.size();
    tree.class_count = class_count;
    tree.used_features.assign(builder.used.begin(), builder.used.end());
    tree.feature_pool = feature_pool;
    tree.seed = config.seed;
    return tree;
}

std::vector<double> predict_tree(const DecisionTree& tree, std::span<const double> x) {
    if (x.size() != tree.n_features) {
        std::ostringstream msg;
        msg << "input has " << x.size() << " features, tree expects " << tree.n_features;
        throw DimensionMismatch(msg.str());
    }
    const TreeNode* node = &tree.nodes[0];
    while (!node->is_leaf)
        node = &tree.nodes[static_cast<std::size_t>(x[node->feature] < node->threshold
                                                        ? node->left
                                                        : node->right)];

    std::int64_t total = 0;
    for (std::int64_t c : node->counts) total += c;
    std::vector<double> dist(node->counts.size());
    for (std::size_t c = 0; c < dist.size(); ++c)
        dist[c] = static_cast<double>(node->counts[c]) / static_cast<double>(total);
    return dist;
}

std::size_t DecisionTree::leaf_count() const {
    std::size_t n = 0;
    for (const TreeNode& node : nodes) n += node.is_leaf ? 1 : 0;
    return n;
}

std::int64_t DecisionTree::training_sample_count() const {
    std::int64_t total = 0;
    for (const TreeNode& node : nodes)
        if (node.is_leaf)
            for (std::int64_t c : node.counts) total += c;
    return total;
}

bool operator==(const TreeNode& a, const TreeNode& b) {
    return a.is_leaf == b.is_leaf && a.feature == b.feature && a.threshold == b.threshold &&
           a.impurity_decrease == b.impurity_decrease && a.left == b.left && a.right == b.right &&
           a.counts == b.counts;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
    return a.nodes == b.nodes && a.depth == b.depth && a.n_features == b.n_features &&
           a.class_count == b.class_count && a.used_features == b.used_features &&
           a.feature_pool == b.feature_pool && a.seed == b.seed;
}

}  // namespace metaforests

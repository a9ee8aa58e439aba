#include "json_codec.hpp"

#include <utility>

namespace metaforests::codec {

json node_to_json(const TreeNode& n) {
    json j;
    j["leaf"] = n.is_leaf;
    if (n.is_leaf) {
        j["counts"] = n.counts;
    } else {
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["decrease"] = n.impurity_decrease;
        j["left"] = n.left;
        j["right"] = n.right;
    }
    return j;
}

TreeNode node_from_json(const json& j) {
    TreeNode n;
    n.is_leaf = j.at("leaf").get<bool>();
    if (n.is_leaf) {
        n.counts = j.at("counts").get<std::vector<std::int64_t>>();
    } else {
        n.feature = j.at("feature").get<std::size_t>();
        n.threshold = j.at("threshold").get<double>();
        n.impurity_decrease = j.at("decrease").get<double>();
        n.left = j.at("left").get<std::int32_t>();
        n.right = j.at("right").get<std::int32_t>();
    }
    return n;
}

json tree_to_json(const DecisionTree& t) {
    json j;
    j["depth"] = t.depth;
    j["n_features"] = t.n_features;
    j["class_count"] = t.class_count;
    j["seed"] = t.seed;
    j["feature_pool"] = t.feature_pool;
    j["used_features"] = t.used_features;
    json nodes = json::array();
    for (const TreeNode& n : t.nodes) nodes.push_back(node_to_json(n));
    j["nodes"] = std::move(nodes);
    return j;
}

DecisionTree tree_from_json(const json& j) {
    DecisionTree t;
    t.depth = j.at("depth").get<int>();
    t.n_features = j.at("n_features").get<std::size_t>();
    t.class_count = j.at("class_count").get<int>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.feature_pool = j.at("feature_pool").get<FeaturePool>();
    t.used_features = j.at("used_features").get<std::vector<std::size_t>>();
    for (const json& n : j.at("nodes")) t.nodes.push_back(node_from_json(n));
    return t;
}

json tree_config_to_json(const TreeConfig& c) {
    json j;
    j["max_depth"] = c.max_depth;
    j["min_samples_split"] = c.min_samples_split;
    j["features_per_split"] = c.features_per_split ? json(*c.features_per_split) : json(nullptr);
    j["seed"] = c.seed;
    return j;
}

TreeConfig tree_config_from_json(const json& j) {
    TreeConfig c;
    c.max_depth = j.at("max_depth").get<int>();
    c.min_samples_split = j.at("min_samples_split").get<int>();
    if (!j.at("features_per_split").is_null())
        c.features_per_split = j.at("features_per_split").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json forest_config_to_json(const ForestConfig& c) {
    json j;
    j["n_trees"] = c.n_trees;
    j["tree"] = tree_config_to_json(c.tree);
    j["bootstrap_ratio"] = c.bootstrap_ratio;
    j["bootstrap_with_replacement"] = c.bootstrap_with_replacement;
    j["seed_diversity"] = c.seed_diversity;
    j["master_seed"] = c.master_seed;
    return j;
}

ForestConfig forest_config_from_json(const json& j) {
    ForestConfig c;
    c.n_trees = j.at("n_trees").get<int>();
    c.tree = tree_config_from_json(j.at("tree"));
    c.bootstrap_ratio = j.at("bootstrap_ratio").get<double>();
    c.bootstrap_with_replacement = j.at("bootstrap_with_replacement").get<bool>();
    c.seed_diversity = j.at("seed_diversity").get<bool>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    return c;
}

json kernel_config_to_json(const KernelConfig& c) {
    json j;
    j["bandwidth"] = c.bandwidth ? json(*c.bandwidth) : json(nullptr);
    j["max_points_per_side"] = c.max_points_per_side;
    j["seed"] = c.seed;
    return j;
}

KernelConfig kernel_config_from_json(const json& j) {
    KernelConfig c;
    if (!j.at("bandwidth").is_null()) c.bandwidth = j.at("bandwidth").get<double>();
    c.max_points_per_side = j.at("max_points_per_side").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json meta_config_to_json(const MetaForestsConfig& c) {
    json j;
    j["iterations"] = c.iterations ? json(*c.iterations) : json(nullptr);
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["meta_sample_ratio"] = c.meta_sample_ratio;
    j["forest"] = forest_config_to_json(c.forest);
    j["kernel"] = kernel_config_to_json(c.kernel);
    j["feature_mask_min_pool"] =
        c.feature_mask_min_pool ? json(*c.feature_mask_min_pool) : json(nullptr);
    j["master_seed"] = c.master_seed;
    return j;
}

MetaForestsConfig meta_config_from_json(const json& j) {
    MetaForestsConfig c;
    if (!j.at("iterations").is_null()) c.iterations = j.at("iterations").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.meta_sample_ratio = j.at("meta_sample_ratio").get<double>();
    c.forest = forest_config_from_json(j.at("forest"));
    c.kernel = kernel_config_from_json(j.at("kernel"));
    if (!j.at("feature_mask_min_pool").is_null())
        c.feature_mask_min_pool = j.at("feature_mask_min_pool").get<int>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    return c;
}

json forest_to_json(const Forest& f) {
    json j;
    j["config"] = forest_config_to_json(f.config);
    j["class_count"] = f.class_count;
    j["n_features"] = f.n_features;
    j["used_features"] = f.used_features;
    json trees = json::array();
    for (const DecisionTree& t : f.trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
    return j;
}

Forest forest_from_json(const json& j) {
    Forest f;
    f.config = forest_config_from_json(j.at("config"));
    f.class_count = j.at("class_count").get<int>();
    f.n_features = j.at("n_features").get<std::size_t>();
    f.used_features = j.at("used_features").get<std::vector<std::size_t>>();
    for (const json& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
    return f;
}

json record_to_json(const MetaTaskRecord& r) {
    json j;
    j["iteration"] = r.iteration;
    j["meta_test_domain"] = r.meta_test_domain;
    j["meta_train_domain"] = r.meta_train_domain;
    j["accuracy"] = r.accuracy;
    j["mmd"] = r.mmd_value;
    j["w_mmd"] = r.w_mmd;
    j["w_accuracy"] = r.w_accuracy;
    j["weight_pre_norm"] = r.weight_pre_norm;
    j["weight_post_norm"] = r.weight_post_norm;
    j["pool_size"] = r.pool_size;
    j["mask_reset_after_update"] = r.mask_reset_after_update;
    j["used_features"] = r.used_features;
    return j;
}

MetaTaskRecord record_from_json(const json& j) {
    MetaTaskRecord r;
    r.iteration = j.at("iteration").get<int>();
    r.meta_test_domain = j.at("meta_test_domain").get<std::string>();
    r.meta_train_domain = j.at("meta_train_domain").get<std::string>();
    r.accuracy = j.at("accuracy").get<double>();
    r.mmd_value = j.at("mmd").get<double>();
    r.w_mmd = j.at("w_mmd").get<double>();
    r.w_accuracy = j.at("w_accuracy").get<double>();
    r.weight_pre_norm = j.at("weight_pre_norm").get<double>();
    r.weight_post_norm = j.at("weight_post_norm").get<double>();
    r.pool_size = j.at("pool_size").get<std::size_t>();
    r.mask_reset_after_update = j.at("mask_reset_after_update").get<bool>();
    r.used_features = j.at("used_features").get<std::vector<std::size_t>>();
    return r;
}

json schema_to_json(const DatasetSchema& s) {
    json j;
    j["feature_names"] = s.feature_names;
    j["class_count"] = s.class_count;
    j["label_names"] = s.label_names;
    j["domain_names"] = s.domain_names;
    return j;
}

DatasetSchema schema_from_json(const json& j) {
    DatasetSchema s;
    s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    s.class_count = j.at("class_count").get<int>();
    s.label_names = j.at("label_names").get<std::vector<std::string>>();
    s.domain_names = j.at("domain_names").get<std::vector<std::string>>();
    return s;
}

}  // namespace metaforests::codec

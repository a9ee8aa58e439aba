#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "metaforests/dataset.hpp"
#include "metaforests/errors.hpp"
#include "metaforests/forest.hpp"
#include "metaforests/rng.hpp"
#include "metaforests/threading.hpp"

namespace mf = metaforests;

namespace {

std::vector<mf::Sample> gaussian_blobs(std::uint64_t seed, int n, std::size_t dim,
                                       int class_count) {
    mf::RngStream rng(seed);
    std::vector<mf::Sample> out;
    for (int i = 0; i < n; ++i) {
        const int label = static_cast<int>(rng.next_index(static_cast<std::size_t>(class_count)));
        mf::Sample s;
        s.label = label;
        for (std::size_t f = 0; f < dim; ++f)
            s.features.push_back(2.5 * label + rng.next_gaussian());
        out.push_back(std::move(s));
    }
    return out;
}

mf::FeaturePool full_pool(std::size_t dim) {
    mf::FeaturePool pool(dim);
    for (std::size_t i = 0; i < dim; ++i) pool[i] = i;
    return pool;
}

// A single-leaf tree that always votes for `label` with certainty.
mf::DecisionTree constant_tree(int label, int class_count, std::size_t n_features) {
    mf::DecisionTree tree;
    mf::TreeNode leaf;
    leaf.is_leaf = true;
    leaf.counts.assign(static_cast<std::size_t>(class_count), 0);
    leaf.counts[static_cast<std::size_t>(label)] = 5;
    tree.nodes = {leaf};
    tree.n_features = n_features;
    tree.class_count = class_count;
    return tree;
}

}  // namespace

TEST_CASE("forest config validation") {
    mf::ForestConfig config;
    CHECK_NOTHROW(config.validate());
    mf::ForestConfig no_trees;
    no_trees.n_trees = 0;
    CHECK_THROWS_AS(no_trees.validate(), mf::InvalidConfig);
    mf::ForestConfig bad_ratio;
    bad_ratio.bootstrap_ratio = 0.0;
    CHECK_THROWS_AS(bad_ratio.validate(), mf::InvalidConfig);
    bad_ratio.bootstrap_ratio = 1.5;
    CHECK_THROWS_AS(bad_ratio.validate(), mf::InvalidConfig);
    mf::ForestConfig bad_tree;
    bad_tree.tree.max_depth = 0;
    CHECK_THROWS_AS(bad_tree.validate(), mf::InvalidConfig);

    std::vector<mf::Sample> empty;
    CHECK_THROWS_AS(mf::fit_forest(empty, full_pool(2), config, 2), mf::EmptySet);
}

TEST_CASE("a one-tree forest reduces to a tree on a bootstrap draw") {
    auto samples = gaussian_blobs(3, 40, 2, 2);
    mf::ForestConfig config;
    config.n_trees = 1;
    config.master_seed = 17;
    auto forest = mf::fit_forest(samples, full_pool(2), config, 2);
    REQUIRE(forest.trees.size() == 1);

    // Reproduce by hand: tree seed mix64(m, 0), bootstrap seed mix64(m, 0, 1).
    mf::DomainDataset pool_data{"training", samples};
    auto bootstrap = mf::subsample(pool_data, config.bootstrap_ratio,
                                   config.bootstrap_with_replacement, mf::mix64(17, 0, 1));
    mf::TreeConfig tree_config = config.tree;
    tree_config.seed = mf::mix64(17, 0);
    auto expected = mf::fit_tree(bootstrap.samples, full_pool(2), tree_config, 2);
    CHECK(forest.trees[0] == expected);

    // Prediction equals the tree's prediction.
    const std::vector<double> x{0.3, -0.2};
    CHECK(mf::predict_proba(forest, x) == mf::predict_tree(expected, x));
}

TEST_CASE("fit_forest is deterministic and thread-count invariant") {
    auto samples = gaussian_blobs(5, 120, 3, 3);
    mf::ForestConfig config;
    config.n_trees = 12;
    config.master_seed = 9;

    mf::set_max_threads(1);
    auto serial = mf::fit_forest(samples, full_pool(3), config, 3);
    mf::set_max_threads(8);
    auto threaded = mf::fit_forest(samples, full_pool(3), config, 3);
    mf::set_max_threads(0);

    REQUIRE(serial.trees.size() == threaded.trees.size());
    for (std::size_t t = 0; t < serial.trees.size(); ++t)
        CHECK(serial.trees[t] == threaded.trees[t]);
}

TEST_CASE("bootstrap_ratio controls per-tree training mass") {
    auto samples = gaussian_blobs(8, 100, 2, 2);
    mf::ForestConfig config;
    config.n_trees = 6;
    config.bootstrap_ratio = 0.2;
    config.bootstrap_with_replacement = false;
    auto forest = mf::fit_forest(samples, full_pool(2), config, 2);
    for (const auto& tree : forest.trees) CHECK(tree.training_sample_count() == 20);
}

TEST_CASE("seed diversity gives distinct trees; the ablation collapses them") {
    auto samples = gaussian_blobs(21, 150, 4, 3);
    mf::ForestConfig config;
    config.n_trees = 8;
    config.master_seed = 33;
    config.tree.features_per_split = 1;  // strong per-seed variation

    auto diverse = mf::fit_forest(samples, full_pool(4), config, 3);
    std::set<std::uint64_t> seeds;
    for (const auto& tree : diverse.trees) seeds.insert(tree.seed);
    CHECK(seeds.size() == 8);
    bool any_structural_difference = false;
    for (std::size_t t = 1; t < diverse.trees.size(); ++t)
        any_structural_difference =
            any_structural_difference || !(diverse.trees[t] == diverse.trees[0]);
    CHECK(any_structural_difference);

    config.seed_diversity = false;
    auto collapsed = mf::fit_forest(samples, full_pool(4), config, 3);
    for (const auto& tree : collapsed.trees) CHECK(tree == collapsed.trees[0]);
    // With identical trees the ensemble vote equals the single-tree vote.
    const std::vector<double> x{1.0, 1.0, 1.0, 1.0};
    CHECK(mf::predict_proba(collapsed, x) == mf::predict_tree(collapsed.trees[0], x));
}

TEST_CASE("predict_proba averages hard votes") {
    mf::Forest forest;
    forest.class_count = 2;
    forest.n_features = 1;
    forest.trees = {constant_tree(0, 2, 1), constant_tree(0, 2, 1), constant_tree(1, 2, 1)};

    const std::vector<double> x{0.0};
    auto dist = mf::predict_proba(forest, x);
    CHECK(dist[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(dist[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mf::predict(forest, x) == 0);

    // Two opposing certain votes average to an exact tie; the lower class wins.
    mf::Forest tie;
    tie.class_count = 2;
    tie.n_features = 1;
    tie.trees = {constant_tree(0, 2, 1), constant_tree(1, 2, 1)};
    auto tie_dist = mf::predict_proba(tie, x);
    CHECK(tie_dist == std::vector<double>{0.5, 0.5});
    CHECK(mf::predict(tie, x) == 0);
}

TEST_CASE("argmax_lowest breaks ties toward the lowest index") {
    const std::vector<double> flat{0.25, 0.25, 0.25, 0.25};
    CHECK(mf::argmax_lowest(flat) == 0);
    const std::vector<double> later{0.1, 0.4, 0.4, 0.1};
    CHECK(mf::argmax_lowest(later) == 1);
    const std::vector<double> single{1.0};
    CHECK(mf::argmax_lowest(single) == 0);
}

TEST_CASE("predict_proba is exactly invariant under tree reordering") {
    auto samples = gaussian_blobs(77, 90, 3, 3);
    mf::ForestConfig config;
    config.n_trees = 15;
    config.master_seed = 4;
    auto forest = mf::fit_forest(samples, full_pool(3), config, 3);

    mf::Forest reversed = forest;
    std::reverse(reversed.trees.begin(), reversed.trees.end());
    mf::Forest rotated = forest;
    std::rotate(rotated.trees.begin(), rotated.trees.begin() + 7, rotated.trees.end());

    mf::RngStream rng(1);
    for (int i = 0; i < 25; ++i) {
        const std::vector<double> x{rng.next_gaussian(), rng.next_gaussian(),
                                    rng.next_gaussian()};
        const auto base = mf::predict_proba(forest, x);
        CHECK(base == mf::predict_proba(reversed, x));   // bit-exact
        CHECK(base == mf::predict_proba(rotated, x));    // bit-exact
    }
}

TEST_CASE("predicted distributions lie on the probability simplex") {
    auto samples = gaussian_blobs(13, 200, 4, 3);
    mf::ForestConfig config;
    config.n_trees = 20;
    config.master_seed = 2;
    auto forest = mf::fit_forest(samples, full_pool(4), config, 3);

    mf::RngStream rng(6);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x;
        for (int f = 0; f < 4; ++f) x.push_back(3.0 * rng.next_gaussian());
        auto dist = mf::predict_proba(forest, x);
        double sum = 0.0;
        for (double v : dist) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("a full-draw unlimited-depth forest memorizes its training set") {
    // Four distinct points; every tree sees all of them (ratio 1, no
    // replacement), so each tree memorizes the labels exactly.
    std::vector<mf::Sample> samples = {
        {{0.0}, 0}, {{1.0}, 1}, {{2.0}, 0}, {{3.0}, 1}};
    mf::ForestConfig config;
    config.n_trees = 5;
    config.bootstrap_ratio = 1.0;
    config.bootstrap_with_replacement = false;
    config.tree.max_depth = 16;
    config.tree.features_per_split = 1;
    config.master_seed = 10;
    auto forest = mf::fit_forest(samples, full_pool(1), config, 2);
    for (const auto& s : samples) {
        CHECK(mf::predict(forest, s.features) == s.label);
        auto dist = mf::predict_proba(forest, s.features);
        CHECK(dist[static_cast<std::size_t>(s.label)] == 1.0);
    }
}

TEST_CASE("forests learn separable gaussian blobs") {
    auto train = gaussian_blobs(31, 300, 3, 3);
    auto test = gaussian_blobs(32, 200, 3, 3);
    mf::ForestConfig config;
    config.n_trees = 30;
    config.tree.max_depth = 6;
    config.master_seed = 1;
    auto forest = mf::fit_forest(train, full_pool(3), config, 3);
    int correct = 0;
    for (const auto& s : test)
        if (mf::predict(forest, s.features) == s.label) ++correct;
    // Blob centers are 2.5 sigma apart per dimension; a forest should be
    // nearly perfect and must beat chance by a wide margin.
    CHECK(static_cast<double>(correct) / static_cast<double>(test.size()) > 0.85);
}

TEST_CASE("used_features is the sorted union over trees") {
    auto samples = gaussian_blobs(41, 120, 5, 2);
    mf::ForestConfig config;
    config.n_trees = 10;
    config.tree.features_per_split = 2;
    config.master_seed = 3;
    mf::FeaturePool pool = {0, 1, 3, 4};
    auto forest = mf::fit_forest(samples, pool, config, 2);

    std::set<std::size_t> expected;
    for (const auto& tree : forest.trees)
        expected.insert(tree.used_features.begin(), tree.used_features.end());
    CHECK(forest.used_features == std::vector<std::size_t>(expected.begin(), expected.end()));
    for (std::size_t f : forest.used_features)
        CHECK(std::binary_search(pool.begin(), pool.end(), f));
}

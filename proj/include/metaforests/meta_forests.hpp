#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "metaforests/dataset.hpp"
#include "metaforests/errors.hpp"
#include "metaforests/forest.hpp"
#include "metaforests/mmd.hpp"
#include "metaforests/rng.hpp"

namespace metaforests {

/// Per-domain forests inside the meta loop default to the 20% bootstrap of
/// the reference setup; everything else follows ForestConfig's defaults.
inline ForestConfig default_meta_forest_config() {
    ForestConfig config;
    config.bootstrap_ratio = 0.2;
    return config;
}

struct MetaForestsConfig {
    std::optional<int> iterations;  // N; empty means 10 * (number of source domains)
    double alpha = -1.0;            // < 0, scales the MMD penalty
    double beta = 1.0;              // > 0, scales the accuracy reward
    double meta_sample_ratio = 0.3;  // fraction of each domain drawn per meta-task
    ForestConfig forest = default_meta_forest_config();  // master_seed derived per fit
    KernelConfig kernel;
    std::optional<int> feature_mask_min_pool;  // empty means ceil(sqrt(feature count))
    std::uint64_t master_seed = 0;

    void validate() const;
    int resolve_iterations(std::size_t source_domain_count) const;
    int resolve_min_pool(std::size_t feature_count) const;
};

/// State carried across meta-task iterations: the per-(iteration, domain)
/// weights as of the latest normalization, every observed mmd value, and the
/// per-domain sets of features excluded from the next fit.
struct MetaState {
    std::map<std::pair<int, std::string>, double> weights;
    std::vector<double> mmd_history;
    std::map<std::string, std::set<std::size_t>> feature_masks;
};

struct ForestProvenance {
    int iteration = 0;  // 0 for the pooled baseline
    std::string meta_train_domain;
    std::string meta_test_domain;
};

struct EnsembleEntry {
    Forest forest;
    double weight = 0.0;
    ForestProvenance provenance;
};

struct WeightedEnsemble {
    std::string algorithm;  // "meta_forests" or "baseline_rf"
    DatasetSchema schema;
    std::vector<EnsembleEntry> entries;

    std::size_t total_trees() const;
    double weight_entropy() const;  // -sum w ln w, in nats
};

/// One row of the meta-task log; a record exists for every
/// (iteration, meta-train domain) pair.
struct MetaTaskRecord {
    int iteration = 0;
    std::string meta_test_domain;
    std::string meta_train_domain;
    double accuracy = 0.0;
    double mmd_value = 0.0;
    double w_mmd = 0.0;
    double w_accuracy = 0.0;
    double weight_pre_norm = 0.0;
    double weight_post_norm = 0.0;
    std::size_t pool_size = 0;
    bool mask_reset_after_update = false;  // mask was cleared right after this fit
    std::vector<std::size_t> used_features;
};

using MetaTaskLog = std::vector<MetaTaskRecord>;

/// Picks the meta-test domain uniformly from the sources; the remaining
/// domains become the meta-train set, in schema order.
std::pair<std::vector<std::string>, std::string> select_meta_split(
    const MultiDomainDataset& sources, RngStream& rng);

/// e^accuracy - e^(1/C): zero at the random-guess level, negative below it.
double compute_w_accuracy(double accuracy, int class_count);

/// current_mmd minus the running mean of all previously observed mmd values
/// (0 while the history is empty); current_mmd is then appended.
double compute_w_mmd(double current_mmd, MetaState& state);

/// prev * exp(alpha * w_mmd) * exp(beta * w_accuracy); strictly positive.
double update_weight(double prev, double w_mmd, double w_accuracy, double alpha, double beta);

/// Divides every weight by the total so the outputs sum to 1.
template <typename Map>
Map normalize_weights(const Map& weights) {
    if (weights.empty()) throw EmptyWeights("cannot normalize an empty weight map");
    double total = 0.0;
    for (const auto& [key, w] : weights) {
        if (!(w > 0.0)) throw NonPositiveWeight("weights must be strictly positive");
        total += w;
    }
    Map out = weights;
    for (auto& [key, w] : out) w /= total;
    return out;
}

/// Runs the meta-learning loop over the source domains and returns the
/// weighted ensemble of N x (M-2) forests together with the full task log.
std::pair<WeightedEnsemble, MetaTaskLog> run_meta_learning(const MultiDomainDataset& sources,
                                                           const MetaForestsConfig& config);

/// Pools every source domain into one training set and fits a single
/// unweighted forest, wrapped as a one-entry ensemble.
WeightedEnsemble train_baseline_rf(const MultiDomainDataset& sources, const ForestConfig& config);

/// Weighted average of the per-forest class distributions; the label is the
/// argmax with ties broken toward the lowest class index.
std::pair<int, std::vector<double>> predict_ensemble(const WeightedEnsemble& ensemble,
                                                     std::span<const double> x);

}  // namespace metaforests

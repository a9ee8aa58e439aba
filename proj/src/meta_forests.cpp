#include "metaforests/meta_forests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metaforests/threading.hpp"

namespace metaforests {

namespace {

// tags for per-(iteration, domain) seed derivations
constexpr std::uint64_t kSplitTag = 0x11;
constexpr std::uint64_t kTestDrawTag = 0x22;
constexpr std::uint64_t kTrainDrawTag = 0x33;
constexpr std::uint64_t kForestTag = 0x44;
constexpr std::uint64_t kMmdTag = 0x55;

}  // namespace

void MetaForestsConfig::validate() const {
    if (iterations && *iterations < 1) throw InvalidConfig("iterations must be >= 1");
    if (!(alpha < 0.0)) throw InvalidConfig("alpha must be < 0");
    if (!(beta > 0.0)) throw InvalidConfig("beta must be > 0");
    if (!(meta_sample_ratio > 0.0 && meta_sample_ratio <= 1.0))
        throw InvalidConfig("meta_sample_ratio must be in (0, 1]");
    if (feature_mask_min_pool && *feature_mask_min_pool < 1)
        throw InvalidConfig("feature_mask_min_pool must be >= 1");
    forest.validate();
    kernel.validate();
}

int MetaForestsConfig::resolve_iterations(std::size_t source_domain_count) const {
    if (iterations) return *iterations;
    return 10 * static_cast<int>(source_domain_count);
}

int MetaForestsConfig::resolve_min_pool(std::size_t feature_count) const {
    const int resolved =
        feature_mask_min_pool
            ? *feature_mask_min_pool
            : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(feature_count))));
    if (resolved > static_cast<int>(feature_count))
        throw InvalidConfig("feature_mask_min_pool exceeds the number of features");
    return resolved;
}

std::pair<std::vector<std::string>, std::string> select_meta_split(
    const MultiDomainDataset& sources, RngStream& rng) {
    const std::vector<std::string>& names = sources.schema().domain_names;
    if (names.size() < 2)
        throw TooFewDomains("meta split needs at least 2 source domains, got " +
                            std::to_string(names.size()));
    const std::size_t pick = rng.next_index(names.size());
    std::vector<std::string> meta_train;
    meta_train.reserve(names.size() - 1);
    for (std::size_t i = 0; i < names.size(); ++i)
        if (i != pick) meta_train.push_back(names[i]);
    return {std::move(meta_train), names[pick]};
}

double compute_w_accuracy(double accuracy, int class_count) {
    return std::exp(accuracy) - std::exp(1.0 / static_cast<double>(class_count));
}

double compute_w_mmd(double current_mmd, MetaState& state) {
    double w = 0.0;
    if (!state.mmd_history.empty()) {
        double sum = 0.0;
        for (double v : state.mmd_history) sum += v;
        w = current_mmd - sum / static_cast<double>(state.mmd_history.size());
    }
    state.mmd_history.push_back(current_mmd);
    return w;
}

double update_weight(double prev, double w_mmd, double w_accuracy, double alpha, double beta) {
    if (!(prev > 0.0)) throw NonPositiveWeight("previous weight must be strictly positive");
    return prev * std::exp(alpha * w_mmd) * std::exp(beta * w_accuracy);
}

std::size_t WeightedEnsemble::total_trees() const {
    std::size_t n = 0;
    for (const EnsembleEntry& e : entries) n += e.forest.trees.size();
    return n;
}

double WeightedEnsemble::weight_entropy() const {
    double h = 0.0;
    for (const EnsembleEntry& e : entries)
        if (e.weight > 0.0) h -= e.weight * std::log(e.weight);
    return h;
}

namespace {

FeaturePool pool_minus_mask(std::size_t n_features, const std::set<std::size_t>& mask) {
    FeaturePool pool;
    pool.reserve(n_features - mask.size());
    for (std::size_t f = 0; f < n_features; ++f)
        if (mask.count(f) == 0) pool.push_back(f);
    return pool;
}

struct FitOutcome {
    Forest forest;
    double accuracy = 0.0;
    double mmd_value = 0.0;
};

}  // namespace

std::pair<WeightedEnsemble, MetaTaskLog> run_meta_learning(const MultiDomainDataset& sources,
                                                           const MetaForestsConfig& config) {
    config.validate();
    const std::size_t n_sources = sources.domain_count();
    if (n_sources < 2)
        throw TooFewDomains("meta-forests needs at least 2 source domains (3 dataset domains), got " +
                            std::to_string(n_sources));

    const DatasetSchema& schema = sources.schema();
    const std::size_t n_features = schema.feature_dim();
    const int class_count = schema.class_count;
    const int n_iterations = config.resolve_iterations(n_sources);
    const std::size_t min_pool = static_cast<std::size_t>(config.resolve_min_pool(n_features));
    const double initial_weight = 1.0 / static_cast<double>(n_sources - 1);

    MetaState state;
    RngStream split_rng(mix64(config.master_seed, kSplitTag));
    std::vector<EnsembleEntry> entries;
    std::map<std::string, std::size_t> latest_entry;  // domain -> newest entry index
    MetaTaskLog log;

    for (int iteration = 1; iteration <= n_iterations; ++iteration) {
        const std::uint64_t iter_seed = mix64(config.master_seed, static_cast<std::uint64_t>(iteration));
        auto [meta_train, meta_test] = select_meta_split(sources, split_rng);

        const DomainDataset test_draw =
            subsample(sources.domain(meta_test), config.meta_sample_ratio, false,
                      mix64(iter_seed, kTestDrawTag));
        const PointSet test_points = feature_matrix(test_draw);

        // resolve each domain's feature pool before the parallel fits; the
        // mask is only extended afterwards, in domain order
        std::vector<FeaturePool> pools(meta_train.size());
        for (std::size_t j = 0; j < meta_train.size(); ++j)
            pools[j] = pool_minus_mask(n_features, state.feature_masks[meta_train[j]]);

        std::vector<FitOutcome> outcomes(meta_train.size());
        parallel_for(meta_train.size(), [&](std::size_t j) {
            const std::string& domain_name = meta_train[j];
            const std::uint64_t domain_seed = mix64(iter_seed, fnv1a(domain_name));

            const DomainDataset train_draw =
                subsample(sources.domain(domain_name), config.meta_sample_ratio, false,
                          mix64(domain_seed, kTrainDrawTag));

            ForestConfig forest_config = config.forest;
            forest_config.master_seed = mix64(domain_seed, kForestTag);
            if (forest_config.tree.features_per_split &&
                *forest_config.tree.features_per_split > static_cast<int>(pools[j].size()))
                forest_config.tree.features_per_split = static_cast<int>(pools[j].size());

            FitOutcome& out = outcomes[j];
            out.forest = fit_forest(train_draw.samples, pools[j], forest_config, class_count);

            std::size_t hits = 0;
            for (const Sample& s : test_draw.samples)
                if (predict(out.forest, s.features) == s.label) ++hits;
            out.accuracy = static_cast<double>(hits) / static_cast<double>(test_draw.samples.size());

            const PointSet train_points = feature_matrix(train_draw);
            const FeatureStats stats = compute_feature_stats(train_points);
            KernelConfig kernel_config = config.kernel;
            kernel_config.seed = mix64(domain_seed, kMmdTag);
            out.mmd_value =
                mmd(standardize(train_points, stats), standardize(test_points, stats), kernel_config)
                    .mmd;
        });

        // weight updates are sequential: the mmd history and masks are
        // state carried in domain order within the iteration
        for (std::size_t j = 0; j < meta_train.size(); ++j) {
            const std::string& domain_name = meta_train[j];
            FitOutcome& out = outcomes[j];

            const double w_mmd = compute_w_mmd(out.mmd_value, state);
            const double w_accuracy = compute_w_accuracy(out.accuracy, class_count);
            const auto last = latest_entry.find(domain_name);
            const double prev =
                last == latest_entry.end() ? initial_weight : entries[last->second].weight;
            const double weight = update_weight(prev, w_mmd, w_accuracy, config.alpha, config.beta);

            MetaTaskRecord record;
            record.iteration = iteration;
            record.meta_test_domain = meta_test;
            record.meta_train_domain = domain_name;
            record.accuracy = out.accuracy;
            record.mmd_value = out.mmd_value;
            record.w_mmd = w_mmd;
            record.w_accuracy = w_accuracy;
            record.weight_pre_norm = weight;
            record.pool_size = pools[j].size();
            record.used_features = out.forest.used_features;

            auto& mask = state.feature_masks[domain_name];
            mask.insert(out.forest.used_features.begin(), out.forest.used_features.end());
            if (n_features - mask.size() < min_pool) {
                mask.clear();
                record.mask_reset_after_update = true;
            }

            latest_entry[domain_name] = entries.size();
            entries.push_back(EnsembleEntry{std::move(out.forest), weight,
                                            ForestProvenance{iteration, domain_name, meta_test}});
            log.push_back(std::move(record));
        }

        double total = 0.0;
        for (const EnsembleEntry& e : entries) total += e.weight;
        state.weights.clear();
        for (std::size_t k = 0; k < entries.size(); ++k) {
            entries[k].weight /= total;
            state.weights[{entries[k].provenance.iteration, entries[k].provenance.meta_train_domain}] =
                entries[k].weight;
        }
        for (MetaTaskRecord& record : log)
            if (record.iteration == iteration)
                record.weight_post_norm =
                    state.weights.at({record.iteration, record.meta_train_domain});
    }

    WeightedEnsemble ensemble;
    ensemble.algorithm = "meta_forests";
    ensemble.schema = schema;
    ensemble.entries = std::move(entries);
    return {std::move(ensemble), std::move(log)};
}

WeightedEnsemble train_baseline_rf(const MultiDomainDataset& sources, const ForestConfig& config) {
    std::vector<Sample> pooled;
    pooled.reserve(sources.total_size());
    for (const auto& name : sources.schema().domain_names) {
        const DomainDataset& d = sources.domain(name);
        pooled.insert(pooled.end(), d.samples.begin(), d.samples.end());
    }

    FeaturePool pool(sources.schema().feature_dim());
    std::iota(pool.begin(), pool.end(), std::size_t{0});

    WeightedEnsemble ensemble;
    ensemble.algorithm = "baseline_rf";
    ensemble.schema = sources.schema();
    ensemble.entries.push_back(
        EnsembleEntry{fit_forest(pooled, pool, config, sources.schema().class_count), 1.0,
                      ForestProvenance{0, "(pooled)", "(none)"}});
    return ensemble;
}

std::pair<int, std::vector<double>> predict_ensemble(const WeightedEnsemble& ensemble,
                                                     std::span<const double> x) {
    if (x.size() != ensemble.schema.feature_dim())
        throw DimensionMismatch("input has " + std::to_string(x.size()) +
                                " features, model expects " +
                                std::to_string(ensemble.schema.feature_dim()));

    std::vector<double> dist(static_cast<std::size_t>(ensemble.schema.class_count), 0.0);
    for (const EnsembleEntry& entry : ensemble.entries) {
        const std::vector<double> p = predict_proba(entry.forest, x);
        for (std::size_t c = 0; c < dist.size(); ++c) dist[c] += entry.weight * p[c];
    }
    return {argmax_lowest(dist), std::move(dist)};
}

}  // namespace metaforests

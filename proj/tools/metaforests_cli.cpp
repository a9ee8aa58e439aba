#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "metaforests/csv.hpp"
#include "metaforests/evaluation.hpp"
#include "metaforests/model_io.hpp"
#include "metaforests/synthetic.hpp"
#include "metaforests/threading.hpp"

namespace mf = metaforests;

namespace {

// Knobs shared by `train` and `lodo`. Options the user did not pass (on the
// command line or through --config) keep each algorithm's own default, which
// matters where the two defaults differ (bootstrap_ratio: 1.0 for a
// standalone baseline_rf forest, 0.2 for the forests inside meta_forests).
struct ModelOptions {
    int trees = 50;
    int max_depth = 5;
    int min_samples_split = 2;
    int mtry = 0;  // 0 = ceil(sqrt(pool size))
    double bootstrap_ratio = 0.0;
    bool with_replacement = true;
    bool seed_diversity = true;
    int iterations = 0;  // 0 = 10 x source-domain count
    double alpha = -1.0;
    double beta = 1.0;
    double meta_ratio = 0.3;
    double bandwidth = 0.0;  // 0 = median heuristic
    int mmd_cap = 512;
    int min_pool = 0;  // 0 = ceil(sqrt(feature count))
    std::uint64_t seed = 0;
};

void add_model_options(CLI::App& cmd, ModelOptions& o, bool include_seed = true) {
    cmd.add_option("--trees", o.trees, "trees per forest")->capture_default_str();
    cmd.add_option("--max-depth", o.max_depth, "maximum tree depth")->capture_default_str();
    cmd.add_option("--min-samples-split", o.min_samples_split,
                   "smallest node a split may divide")
        ->capture_default_str();
    cmd.add_option("--mtry", o.mtry, "candidate features per split (0 = ceil(sqrt(pool)))")
        ->capture_default_str();
    cmd.add_option("--bootstrap-ratio", o.bootstrap_ratio,
                   "per-tree sample fraction (default: 1.0 for baseline_rf, 0.2 inside "
                   "meta_forests)");
    cmd.add_flag("--with-replacement,!--no-replacement", o.with_replacement,
                 "draw bootstrap samples with replacement (default: on)");
    cmd.add_flag("--seed-diversity,!--no-seed-diversity", o.seed_diversity,
                 "give every tree its own derived seed (default: on)");
    cmd.add_option("--iterations", o.iterations,
                   "meta-learning iterations N (0 = 10 x source-domain count)")
        ->capture_default_str();
    cmd.add_option("--alpha", o.alpha, "MMD penalty coefficient, must be < 0")
        ->capture_default_str();
    cmd.add_option("--beta", o.beta, "accuracy reward coefficient, must be > 0")
        ->capture_default_str();
    cmd.add_option("--meta-ratio", o.meta_ratio, "fraction of a domain drawn per meta task")
        ->capture_default_str();
    cmd.add_option("--bandwidth", o.bandwidth, "RBF kernel bandwidth (0 = median heuristic)")
        ->capture_default_str();
    cmd.add_option("--mmd-cap", o.mmd_cap, "largest per-side point count used for MMD")
        ->capture_default_str();
    cmd.add_option("--min-pool", o.min_pool,
                   "smallest feature pool before a domain's mask resets (0 = ceil(sqrt(d)))")
        ->capture_default_str();
    if (include_seed) cmd.add_option("--seed", o.seed, "master seed")->capture_default_str();
}

mf::ForestConfig make_forest_config(const CLI::App& cmd, const ModelOptions& o) {
    mf::ForestConfig c;
    c.n_trees = o.trees;
    c.tree.max_depth = o.max_depth;
    c.tree.min_samples_split = o.min_samples_split;
    if (o.mtry > 0) c.tree.features_per_split = o.mtry;
    if (cmd.count("--bootstrap-ratio") > 0) c.bootstrap_ratio = o.bootstrap_ratio;
    c.bootstrap_with_replacement = o.with_replacement;
    c.seed_diversity = o.seed_diversity;
    c.master_seed = o.seed;
    return c;
}

mf::MetaForestsConfig make_meta_config(const CLI::App& cmd, const ModelOptions& o) {
    mf::MetaForestsConfig c;
    if (o.iterations > 0) c.iterations = o.iterations;
    c.alpha = o.alpha;
    c.beta = o.beta;
    c.meta_sample_ratio = o.meta_ratio;
    c.forest.n_trees = o.trees;
    c.forest.tree.max_depth = o.max_depth;
    c.forest.tree.min_samples_split = o.min_samples_split;
    if (o.mtry > 0) c.forest.tree.features_per_split = o.mtry;
    if (cmd.count("--bootstrap-ratio") > 0) c.forest.bootstrap_ratio = o.bootstrap_ratio;
    c.forest.bootstrap_with_replacement = o.with_replacement;
    c.forest.seed_diversity = o.seed_diversity;
    if (o.bandwidth != 0.0) c.kernel.bandwidth = o.bandwidth;
    c.kernel.max_points_per_side = static_cast<std::size_t>(o.mmd_cap);
    if (o.min_pool > 0) c.feature_mask_min_pool = o.min_pool;
    c.master_seed = o.seed;
    return c;
}

struct CsvColumns {
    std::string label = "label";
    std::string domain = "domain";
};

void add_csv_options(CLI::App& cmd, CsvColumns& c) {
    cmd.add_option("--label-col", c.label, "name of the label column")->capture_default_str();
    cmd.add_option("--domain-col", c.domain, "name of the domain column")->capture_default_str();
}

int cmd_synth(const mf::SyntheticSpec& spec, const std::string& out, const CsvColumns& cols) {
    spec.validate();
    const mf::MultiDomainDataset data = mf::generate_synthetic(spec);
    mf::save_csv(data, out, cols.label, cols.domain);
    std::printf("synthetic dataset: %d domains x %d samples, %d classes, %d features -> %s\n",
                spec.domain_count, spec.samples_per_domain, spec.class_count, spec.feature_dim,
                out.c_str());
    return 0;
}

int cmd_train(const CLI::App& cmd, const ModelOptions& options, const std::string& data_path,
              const std::string& target, const std::string& algo_name, const std::string& out,
              bool no_log, const CsvColumns& cols) {
    const mf::Algorithm algo = mf::parse_algorithm(algo_name);
    const mf::MultiDomainDataset data = mf::load_csv(data_path, cols.label, cols.domain);
    const mf::MultiDomainDataset sources = mf::split_source_target(data, target).first;

    mf::ModelFile model;
    if (algo == mf::Algorithm::meta_forests) {
        const mf::MetaForestsConfig config = make_meta_config(cmd, options);
        auto [ensemble, log] = mf::run_meta_learning(sources, config);
        model.ensemble = std::move(ensemble);
        model.meta_config = config;
        if (!no_log) model.log = std::move(log);
    } else {
        const mf::ForestConfig config = make_forest_config(cmd, options);
        model.ensemble = mf::train_baseline_rf(sources, config);
        model.baseline_config = config;
    }
    mf::save_model(model, out);

    std::printf("trained %s: %zu forests, %zu trees, weight entropy %.4f nats -> %s\n",
                model.ensemble.algorithm.c_str(), model.ensemble.entries.size(),
                model.ensemble.total_trees(), model.ensemble.weight_entropy(), out.c_str());
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& domain, const std::string& out, const CsvColumns& cols) {
    const mf::ModelFile model = mf::load_model(model_path);
    const mf::MultiDomainDataset data = mf::load_csv(data_path, cols.label, cols.domain);
    if (!data.has_domain(domain))
        throw mf::UnknownDomain("domain '" + domain + "' not present in " + data_path);

    const mf::DatasetSchema& model_schema = model.ensemble.schema;
    if (data.schema().feature_dim() != model_schema.feature_dim())
        throw mf::DimensionMismatch("data has " + std::to_string(data.schema().feature_dim()) +
                                    " features, model expects " +
                                    std::to_string(model_schema.feature_dim()));
    if (data.schema().feature_names != model_schema.feature_names)
        std::fprintf(stderr, "warning: feature names differ from the model's schema\n");

    // map the data file's label indices onto the model's label order
    std::vector<int> label_map(data.schema().label_names.size(), -1);
    for (std::size_t i = 0; i < label_map.size(); ++i) {
        const std::string& name = data.schema().label_names[i];
        for (std::size_t j = 0; j < model_schema.label_names.size(); ++j)
            if (model_schema.label_names[j] == name) label_map[i] = static_cast<int>(j);
        if (label_map[i] < 0)
            throw mf::InvalidSchema("label '" + name + "' is not known to the model");
    }

    const mf::DomainDataset& eval_domain = data.domain(domain);
    std::vector<int> predictions;
    std::vector<int> truth;
    predictions.reserve(eval_domain.samples.size());
    truth.reserve(eval_domain.samples.size());
    std::vector<std::int64_t> n_true(static_cast<std::size_t>(model_schema.class_count), 0);
    std::vector<std::int64_t> n_pred(static_cast<std::size_t>(model_schema.class_count), 0);
    for (const mf::Sample& s : eval_domain.samples) {
        const int mapped = label_map[static_cast<std::size_t>(s.label)];
        const int predicted = mf::predict_ensemble(model.ensemble, s.features).first;
        predictions.push_back(predicted);
        truth.push_back(mapped);
        ++n_true[static_cast<std::size_t>(mapped)];
        ++n_pred[static_cast<std::size_t>(predicted)];
    }
    const double acc = mf::accuracy(predictions, truth);

    for (const std::string& source : model_schema.domain_names)
        if (source == domain)
            std::fprintf(stderr, "warning: '%s' was a source domain during training\n",
                         domain.c_str());

    std::printf("domain %s: %zu samples\n", domain.c_str(), eval_domain.samples.size());
    std::printf("accuracy %.4f\n", acc);
    for (int c = 0; c < model_schema.class_count; ++c)
        std::printf("class %s: true %lld, predicted %lld\n",
                    model_schema.label_names[static_cast<std::size_t>(c)].c_str(),
                    static_cast<long long>(n_true[static_cast<std::size_t>(c)]),
                    static_cast<long long>(n_pred[static_cast<std::size_t>(c)]));

    if (!out.empty()) {
        nlohmann::ordered_json j;
        j["kind"] = "eval_metrics";
        j["model"] = model_path;
        j["domain"] = domain;
        j["n_samples"] = eval_domain.samples.size();
        j["accuracy"] = acc;
        nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
        for (int c = 0; c < model_schema.class_count; ++c)
            per_class[model_schema.label_names[static_cast<std::size_t>(c)]] = {
                {"true", n_true[static_cast<std::size_t>(c)]},
                {"predicted", n_pred[static_cast<std::size_t>(c)]}};
        j["per_class"] = std::move(per_class);
        std::ofstream f(out);
        if (!f) throw mf::IoError("cannot open " + out + " for writing");
        f << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_lodo(const CLI::App& cmd, const ModelOptions& options,
             const std::vector<std::string>& algo_names, const std::string& data_path,
             int repeats, std::uint64_t seed, int baseline_trees, const std::string& out_json,
             const std::string& out_csv, const CsvColumns& cols) {
    const mf::MultiDomainDataset data = mf::load_csv(data_path, cols.label, cols.domain);

    bool meta_present = false;
    for (const std::string& name : algo_names)
        if (mf::parse_algorithm(name) == mf::Algorithm::meta_forests) meta_present = true;

    std::vector<mf::RunConfig> runs;
    for (const std::string& name : algo_names) {
        mf::RunConfig run;
        run.algorithm = mf::parse_algorithm(name);
        run.repeats = repeats;
        run.base_seed = seed;
        if (run.algorithm == mf::Algorithm::meta_forests) {
            run.meta = make_meta_config(cmd, options);
        } else {
            run.forest = make_forest_config(cmd, options);
            if (baseline_trees > 0) {
                run.forest.n_trees = baseline_trees;
            } else if (meta_present && data.domain_count() >= 3) {
                // match the meta-forests total tree budget per fold
                const mf::MetaForestsConfig meta = make_meta_config(cmd, options);
                const std::size_t sources = data.domain_count() - 1;
                run.forest.n_trees = meta.resolve_iterations(sources) *
                                     static_cast<int>(sources - 1) * meta.forest.n_trees;
            }
        }
        runs.push_back(std::move(run));
    }

    const mf::EvalReport report = mf::compare(data, runs);
    mf::emit_report(report, mf::ReportFormat::structured, out_json);
    mf::emit_report(report, mf::ReportFormat::tabular, out_csv);

    for (const mf::RunSummary& s : report.overall)
        std::printf("%s: overall mean accuracy %.1f%%\n", s.run.c_str(),
                    100.0 * s.mean_accuracy);
    std::printf("wrote %s and %s\n", out_json.c_str(), out_csv.c_str());
    return 0;
}

int cmd_inspect(const std::string& model_path, const std::string& sort_key, bool show_log) {
    const mf::ModelFile model = mf::load_model(model_path);
    const mf::WeightedEnsemble& ensemble = model.ensemble;

    std::vector<std::size_t> order(ensemble.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (sort_key == "weight")
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ensemble.entries[a].weight > ensemble.entries[b].weight;
        });

    std::printf("algorithm %s, %zu forests, %zu trees\n", ensemble.algorithm.c_str(),
                ensemble.entries.size(), ensemble.total_trees());
    std::printf("%-5s %-5s %-16s %-16s %-12s %s\n", "idx", "iter", "meta_train", "meta_test",
                "weight", "trees");
    double weight_sum = 0.0;
    for (std::size_t i : order) {
        const mf::EnsembleEntry& e = ensemble.entries[i];
        weight_sum += e.weight;
        std::printf("%-5zu %-5d %-16s %-16s %-12.6f %zu\n", i, e.provenance.iteration,
                    e.provenance.meta_train_domain.c_str(),
                    e.provenance.meta_test_domain.c_str(), e.weight, e.forest.trees.size());
    }
    std::printf("weights sum to %.6f\n", weight_sum);

    if (model.log && show_log) {
        std::printf("meta-task log (%zu records):\n", model.log->size());
        for (const mf::MetaTaskRecord& r : *model.log)
            std::printf(
                "iter %d test %s train %s: acc %.4f mmd %.4f w_mmd %+.4f w_acc %+.4f "
                "weight %.6f -> %.6f pool %zu%s\n",
                r.iteration, r.meta_test_domain.c_str(), r.meta_train_domain.c_str(), r.accuracy,
                r.mmd_value, r.w_mmd, r.w_accuracy, r.weight_pre_norm, r.weight_post_norm,
                r.pool_size, r.mask_reset_after_update ? " (mask reset)" : "");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meta-forests: domain generalization with weighted random forests"};
    app.set_config("--config", "", "read options from an INI file ([section] per subcommand)");
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "cap on worker threads (0 = METAFORESTS_THREADS env, then hardware)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic multi-domain CSV");
    mf::SyntheticSpec spec;
    std::string synth_out;
    synth->add_option("--domains", spec.domain_count, "number of domains (>= 3)")
        ->capture_default_str();
    synth->add_option("--classes", spec.class_count, "number of classes (>= 2)")
        ->capture_default_str();
    synth->add_option("--dim", spec.feature_dim, "feature dimension (>= 2)")
        ->capture_default_str();
    synth->add_option("--per-domain", spec.samples_per_domain, "samples per domain")
        ->capture_default_str();
    synth->add_option("--shift", spec.shift_magnitude, "domain shift magnitude (>= 0)")
        ->capture_default_str();
    synth->add_option("--noise", spec.noise_scale, "within-class noise scale (> 0)")
        ->capture_default_str();
    synth->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
    synth->add_option("--out", synth_out, "output CSV path")->required();
    CsvColumns synth_cols;
    add_csv_options(*synth, synth_cols);

    // train
    auto* train = app.add_subcommand("train", "train on every domain except the target");
    std::string train_data, train_target, train_algo = "meta_forests", train_out;
    bool train_no_log = false;
    ModelOptions train_options;
    train->add_option("--data", train_data, "input CSV path")->required();
    train->add_option("--target", train_target, "held-out target domain")->required();
    train->add_option("--algo", train_algo, "baseline_rf or meta_forests")
        ->capture_default_str();
    train->add_option("--out", train_out, "output model path")->required();
    train->add_flag("--no-log", train_no_log, "do not embed the meta-task log in the model");
    CsvColumns train_cols;
    add_csv_options(*train, train_cols);
    add_model_options(*train, train_options);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a saved model on one domain");
    std::string eval_model, eval_data, eval_domain, eval_out;
    eval->add_option("--model", eval_model, "model path")->required();
    eval->add_option("--data", eval_data, "input CSV path")->required();
    eval->add_option("--domain", eval_domain, "domain to evaluate on")->required();
    eval->add_option("--out", eval_out, "optional metrics JSON path");
    CsvColumns eval_cols;
    add_csv_options(*eval, eval_cols);

    // lodo
    auto* lodo = app.add_subcommand("lodo", "leave-one-domain-out benchmark");
    std::string lodo_data, lodo_json = "report.json", lodo_csv = "report.csv";
    std::vector<std::string> lodo_algos{"baseline_rf", "meta_forests"};
    int lodo_repeats = 1;
    std::uint64_t lodo_seed = 0;
    int lodo_baseline_trees = 0;
    ModelOptions lodo_options;
    lodo->add_option("--data", lodo_data, "input CSV path")->required();
    lodo->add_option("--algos", lodo_algos, "comma-separated algorithms to compare")
        ->delimiter(',')
        ->capture_default_str();
    lodo->add_option("--repeats", lodo_repeats, "repeats per target domain")
        ->capture_default_str();
    lodo->add_option("--seed", lodo_seed, "base seed for fold derivation")
        ->capture_default_str();
    lodo->add_option("--baseline-trees", lodo_baseline_trees,
                     "baseline_rf tree count (0 = match the meta_forests tree budget)")
        ->capture_default_str();
    lodo->add_option("--out-json", lodo_json, "structured report path")->capture_default_str();
    lodo->add_option("--out-csv", lodo_csv, "tabular report path")->capture_default_str();
    CsvColumns lodo_cols;
    add_csv_options(*lodo, lodo_cols);
    add_model_options(*lodo, lodo_options, /*include_seed=*/false);

    // inspect
    auto* inspect = app.add_subcommand("inspect", "print a saved model's provenance table");
    std::string inspect_model, inspect_sort = "iteration";
    bool inspect_no_log = false;
    inspect->add_option("--model", inspect_model, "model path")->required();
    inspect->add_option("--sort", inspect_sort, "row order: iteration or weight")
        ->check(CLI::IsMember({"iteration", "weight"}))
        ->capture_default_str();
    inspect->add_flag("--no-log", inspect_no_log, "skip the embedded meta-task log");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    mf::set_max_threads(threads);

    try {
        if (synth->parsed()) return cmd_synth(spec, synth_out, synth_cols);
        if (train->parsed())
            return cmd_train(*train, train_options, train_data, train_target, train_algo,
                             train_out, train_no_log, train_cols);
        if (eval->parsed())
            return cmd_eval(eval_model, eval_data, eval_domain, eval_out, eval_cols);
        if (lodo->parsed())
            return cmd_lodo(*lodo, lodo_options, lodo_algos, lodo_data, lodo_repeats, lodo_seed,
                            lodo_baseline_trees, lodo_json, lodo_csv, lodo_cols);
        if (inspect->parsed()) return cmd_inspect(inspect_model, inspect_sort, !inspect_no_log);
    } catch (const mf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const mf::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const mf::ModelError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

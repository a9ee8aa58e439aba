#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "metaforests/dataset.hpp"
#include "metaforests/meta_forests.hpp"

namespace metaforests {

enum class Algorithm { baseline_rf, meta_forests };

const std::string& algorithm_name(Algorithm a);
/// Throws InvalidConfig listing the valid names when `name` matches neither.
Algorithm parse_algorithm(const std::string& name);

/// One benchmark entrant: an algorithm, its config, and the repeat protocol.
/// `forest` configures baseline_rf runs; `meta` configures meta_forests runs
/// (only the field matching `algorithm` is consulted). Each fold overrides
/// the config's master_seed with a seed derived from base_seed.
struct RunConfig {
    Algorithm algorithm = Algorithm::meta_forests;
    std::string label;  // report row label; empty means the algorithm name
    ForestConfig forest;
    MetaForestsConfig meta;
    int repeats = 1;
    std::uint64_t base_seed = 0;

    void validate() const;
    std::string resolved_label() const;
};

/// Accuracy of one (run, target domain, repeat) fold.
struct RunResult {
    int run_index = 0;
    std::string run;  // label of the RunConfig
    std::string target_domain;
    int repeat = 0;  // 0-based
    std::uint64_t seed = 0;
    double accuracy = 0.0;
};

struct DomainSummary {
    int run_index = 0;
    std::string run;
    std::string target_domain;
    int repeats = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // sample std (n-1); 0 when repeats == 1
};

struct RunSummary {
    int run_index = 0;
    std::string run;
    double mean_accuracy = 0.0;  // mean of the per-domain means
};

/// Config snapshot of one entrant as recorded in the report.
struct RunDescriptor {
    int run_index = 0;
    std::string label;
    std::string algorithm;
    int repeats = 0;
    std::uint64_t base_seed = 0;
    std::string config_json;  // compact serialized algorithm config
};

struct EvalReport {
    std::vector<RunDescriptor> runs;
    std::vector<RunResult> results;
    std::vector<DomainSummary> domain_summaries;
    std::vector<RunSummary> overall;
};

bool operator==(const RunResult& a, const RunResult& b);
bool operator==(const DomainSummary& a, const DomainSummary& b);
bool operator==(const RunSummary& a, const RunSummary& b);
bool operator==(const RunDescriptor& a, const RunDescriptor& b);
bool operator==(const EvalReport& a, const EvalReport& b);

/// Fraction of positions where the lists agree.
double accuracy(std::span<const int> predictions, std::span<const int> truth);

/// Seed of one (target domain, repeat) fold. Independent of the algorithm,
/// so entrants in a comparison see identical folds.
std::uint64_t fold_seed(std::uint64_t base_seed, const std::string& target_domain, int repeat);

/// Trains one entrant on the given sources with the fold seed substituted
/// for the config's master_seed.
WeightedEnsemble train_run(const MultiDomainDataset& sources, const RunConfig& run,
                           std::uint64_t seed);

/// Holds out each domain in turn, `repeats` times, training on the rest.
EvalReport leave_one_domain_out(const MultiDomainDataset& data, const RunConfig& run);

/// leave_one_domain_out for several entrants over the same folds, merged
/// into one report.
EvalReport compare(const MultiDomainDataset& data, const std::vector<RunConfig>& runs);

/// Recomputes domain_summaries and overall from `results`.
void aggregate(EvalReport& report);

enum class ReportFormat { structured, tabular };

/// structured: versioned JSON, lossless, reloadable via load_report.
/// tabular: CSV with one row per run x domain; percentages with 1 decimal.
void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path);

EvalReport load_report(const std::filesystem::path& path);

}  // namespace metaforests

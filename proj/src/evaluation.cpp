#include "metaforests/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <utility>

#include "json_codec.hpp"
#include "metaforests/rng.hpp"
#include "metaforests/threading.hpp"

namespace metaforests {

namespace {
using codec::json;

constexpr int kReportFormatVersion = 1;
}  // namespace

const std::string& algorithm_name(Algorithm a) {
    static const std::string kBaseline = "baseline_rf";
    static const std::string kMeta = "meta_forests";
    return a == Algorithm::baseline_rf ? kBaseline : kMeta;
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "baseline_rf") return Algorithm::baseline_rf;
    if (name == "meta_forests") return Algorithm::meta_forests;
    throw InvalidConfig("unknown algorithm '" + name +
                        "' (valid names: baseline_rf, meta_forests)");
}

void RunConfig::validate() const {
    if (repeats < 1) throw InvalidConfig("repeats must be >= 1");
    if (algorithm == Algorithm::baseline_rf)
        forest.validate();
    else
        meta.validate();
}

std::string RunConfig::resolved_label() const {
    return label.empty() ? algorithm_name(algorithm) : label;
}

bool operator==(const RunResult& a, const RunResult& b) {
    return a.run_index == b.run_index && a.run == b.run && a.target_domain == b.target_domain &&
           a.repeat == b.repeat && a.seed == b.seed && a.accuracy == b.accuracy;
}

bool operator==(const DomainSummary& a, const DomainSummary& b) {
    return a.run_index == b.run_index && a.run == b.run && a.target_domain == b.target_domain &&
           a.repeats == b.repeats && a.mean_accuracy == b.mean_accuracy &&
           a.std_accuracy == b.std_accuracy;
}

bool operator==(const RunSummary& a, const RunSummary& b) {
    return a.run_index == b.run_index && a.run == b.run && a.mean_accuracy == b.mean_accuracy;
}

bool operator==(const RunDescriptor& a, const RunDescriptor& b) {
    return a.run_index == b.run_index && a.label == b.label && a.algorithm == b.algorithm &&
           a.repeats == b.repeats && a.base_seed == b.base_seed && a.config_json == b.config_json;
}

bool operator==(const EvalReport& a, const EvalReport& b) {
    return a.runs == b.runs && a.results == b.results &&
           a.domain_summaries == b.domain_summaries && a.overall == b.overall;
}

double accuracy(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size())
        throw LengthMismatch("prediction list has " + std::to_string(predictions.size()) +
                             " entries, truth list has " + std::to_string(truth.size()));
    if (predictions.empty()) throw EmptySet("accuracy of empty lists is undefined");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == truth[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

std::uint64_t fold_seed(std::uint64_t base_seed, const std::string& target_domain, int repeat) {
    return mix64(base_seed, fnv1a(target_domain), static_cast<std::uint64_t>(repeat));
}

WeightedEnsemble train_run(const MultiDomainDataset& sources, const RunConfig& run,
                           std::uint64_t seed) {
    if (run.algorithm == Algorithm::baseline_rf) {
        ForestConfig config = run.forest;
        config.master_seed = seed;
        return train_baseline_rf(sources, config);
    }
    MetaForestsConfig config = run.meta;
    config.master_seed = seed;
    return run_meta_learning(sources, config).first;
}

namespace {

RunDescriptor describe_run(int run_index, const RunConfig& run) {
    RunDescriptor d;
    d.run_index = run_index;
    d.label = run.resolved_label();
    d.algorithm = algorithm_name(run.algorithm);
    d.repeats = run.repeats;
    d.base_seed = run.base_seed;
    d.config_json = run.algorithm == Algorithm::baseline_rf
                        ? codec::forest_config_to_json(run.forest).dump()
                        : codec::meta_config_to_json(run.meta).dump();
    return d;
}

void run_folds(const MultiDomainDataset& data, const RunConfig& run, int run_index,
               EvalReport& report) {
    run.validate();
    const std::size_t min_domains = run.algorithm == Algorithm::meta_forests ? 3 : 2;
    if (data.domain_count() < min_domains)
        throw TooFewDomains(algorithm_name(run.algorithm) + " needs at least " +
                            std::to_string(min_domains) + " domains, got " +
                            std::to_string(data.domain_count()));

    const std::vector<std::string>& domains = data.schema().domain_names;
    const int repeats = run.repeats;
    const std::string label = run.resolved_label();

    std::vector<RunResult> results(domains.size() * static_cast<std::size_t>(repeats));
    parallel_for(results.size(), [&](std::size_t slot) {
        const std::string& target = domains[slot / static_cast<std::size_t>(repeats)];
        const int repeat = static_cast<int>(slot % static_cast<std::size_t>(repeats));
        const std::uint64_t seed = fold_seed(run.base_seed, target, repeat);

        auto [sources, held_out] = split_source_target(data, target);
        const WeightedEnsemble ensemble = train_run(sources, run, seed);

        std::vector<int> predictions;
        std::vector<int> truth;
        predictions.reserve(held_out.samples.size());
        truth.reserve(held_out.samples.size());
        for (const Sample& s : held_out.samples) {
            predictions.push_back(predict_ensemble(ensemble, s.features).first);
            truth.push_back(s.label);
        }

        RunResult& r = results[slot];
        r.run_index = run_index;
        r.run = label;
        r.target_domain = target;
        r.repeat = repeat;
        r.seed = seed;
        r.accuracy = accuracy(predictions, truth);
    });

    report.runs.push_back(describe_run(run_index, run));
    report.results.insert(report.results.end(), std::make_move_iterator(results.begin()),
                          std::make_move_iterator(results.end()));
}

}  // namespace

void aggregate(EvalReport& report) {
    report.domain_summaries.clear();
    report.overall.clear();

    // group results by (run_index, domain) preserving first-appearance order
    std::vector<std::pair<int, std::string>> keys;
    std::map<std::pair<int, std::string>, std::vector<double>> groups;
    std::map<std::pair<int, std::string>, std::string> labels;
    for (const RunResult& r : report.results) {
        const std::pair<int, std::string> key{r.run_index, r.target_domain};
        if (groups.find(key) == groups.end()) keys.push_back(key);
        groups[key].push_back(r.accuracy);
        labels[key] = r.run;
    }

    std::vector<int> run_order;
    std::map<int, std::pair<std::string, std::vector<double>>> per_run;  // label, domain means
    for (const auto& key : keys) {
        const std::vector<double>& acc = groups[key];
        DomainSummary s;
        s.run_index = key.first;
        s.run = labels[key];
        s.target_domain = key.second;
        s.repeats = static_cast<int>(acc.size());
        double sum = 0.0;
        for (double a : acc) sum += a;
        s.mean_accuracy = sum / static_cast<double>(acc.size());
        if (acc.size() > 1) {
            double ss = 0.0;
            for (double a : acc) ss += (a - s.mean_accuracy) * (a - s.mean_accuracy);
            s.std_accuracy = std::sqrt(ss / static_cast<double>(acc.size() - 1));
        }
        report.domain_summaries.push_back(s);

        if (per_run.find(key.first) == per_run.end()) run_order.push_back(key.first);
        per_run[key.first].first = s.run;
        per_run[key.first].second.push_back(s.mean_accuracy);
    }

    for (int run_index : run_order) {
        const auto& [label, means] = per_run[run_index];
        RunSummary s;
        s.run_index = run_index;
        s.run = label;
        double sum = 0.0;
        for (double m : means) sum += m;
        s.mean_accuracy = sum / static_cast<double>(means.size());
        report.overall.push_back(s);
    }
}

EvalReport leave_one_domain_out(const MultiDomainDataset& data, const RunConfig& run) {
    EvalReport report;
    run_folds(data, run, 0, report);
    aggregate(report);
    return report;
}

EvalReport compare(const MultiDomainDataset& data, const std::vector<RunConfig>& runs) {
    if (runs.empty()) throw InvalidConfig("compare needs at least one run");
    EvalReport report;
    for (std::size_t i = 0; i < runs.size(); ++i)
        run_folds(data, runs[i], static_cast<int>(i), report);
    aggregate(report);
    return report;
}

namespace {

std::string pct1(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * fraction);
    return buf;
}

void emit_structured(const EvalReport& report, const std::filesystem::path& path) {
    json j;
    j["format_version"] = kReportFormatVersion;
    j["kind"] = "eval_report";

    json runs = json::array();
    for (const RunDescriptor& d : report.runs) {
        json r;
        r["run_index"] = d.run_index;
        r["label"] = d.label;
        r["algorithm"] = d.algorithm;
        r["repeats"] = d.repeats;
        r["base_seed"] = d.base_seed;
        r["config"] = json::parse(d.config_json);
        runs.push_back(std::move(r));
    }
    j["runs"] = std::move(runs);

    json results = json::array();
    for (const RunResult& r : report.results) {
        json e;
        e["run_index"] = r.run_index;
        e["run"] = r.run;
        e["target_domain"] = r.target_domain;
        e["repeat"] = r.repeat;
        e["seed"] = r.seed;
        e["accuracy"] = r.accuracy;
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);

    json domains = json::array();
    for (const DomainSummary& s : report.domain_summaries) {
        json e;
        e["run_index"] = s.run_index;
        e["run"] = s.run;
        e["target_domain"] = s.target_domain;
        e["repeats"] = s.repeats;
        e["mean_accuracy"] = s.mean_accuracy;
        e["std_accuracy"] = s.std_accuracy;
        domains.push_back(std::move(e));
    }
    j["domain_summaries"] = std::move(domains);

    json overall = json::array();
    for (const RunSummary& s : report.overall) {
        json e;
        e["run_index"] = s.run_index;
        e["run"] = s.run;
        e["mean_accuracy"] = s.mean_accuracy;
        overall.push_back(std::move(e));
    }
    j["overall"] = std::move(overall);

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

void emit_tabular(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "run,algorithm,target_domain,repeats,mean_accuracy_pct,std_accuracy_pct\n";
    std::map<int, std::string> algo_by_index;
    for (const RunDescriptor& d : report.runs) algo_by_index[d.run_index] = d.algorithm;
    for (const DomainSummary& s : report.domain_summaries)
        out << s.run << ',' << algo_by_index[s.run_index] << ',' << s.target_domain << ','
            << s.repeats << ',' << pct1(s.mean_accuracy) << ',' << pct1(s.std_accuracy) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void emit_report(const EvalReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
    if (format == ReportFormat::structured)
        emit_structured(report, path);
    else
        emit_tabular(report, path);
}

EvalReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw CorruptFile(path.string() + " is not a well-formed report");

    try {
        const json& version = j.at("format_version");
        if (!version.is_number_integer() || version.get<int>() != kReportFormatVersion)
            throw VersionMismatch(path.string() + ": unsupported report format_version " +
                                  version.dump());
        EvalReport report;
        for (const json& r : j.at("runs")) {
            RunDescriptor d;
            d.run_index = r.at("run_index").get<int>();
            d.label = r.at("label").get<std::string>();
            d.algorithm = r.at("algorithm").get<std::string>();
            d.repeats = r.at("repeats").get<int>();
            d.base_seed = r.at("base_seed").get<std::uint64_t>();
            d.config_json = r.at("config").dump();
            report.runs.push_back(std::move(d));
        }
        for (const json& r : j.at("results")) {
            RunResult e;
            e.run_index = r.at("run_index").get<int>();
            e.run = r.at("run").get<std::string>();
            e.target_domain = r.at("target_domain").get<std::string>();
            e.repeat = r.at("repeat").get<int>();
            e.seed = r.at("seed").get<std::uint64_t>();
            e.accuracy = r.at("accuracy").get<double>();
            report.results.push_back(std::move(e));
        }
        for (const json& s : j.at("domain_summaries")) {
            DomainSummary e;
            e.run_index = s.at("run_index").get<int>();
            e.run = s.at("run").get<std::string>();
            e.target_domain = s.at("target_domain").get<std::string>();
            e.repeats = s.at("repeats").get<int>();
            e.mean_accuracy = s.at("mean_accuracy").get<double>();
            e.std_accuracy = s.at("std_accuracy").get<double>();
            report.domain_summaries.push_back(std::move(e));
        }
        for (const json& s : j.at("overall")) {
            RunSummary e;
            e.run_index = s.at("run_index").get<int>();
            e.run = s.at("run").get<std::string>();
            e.mean_accuracy = s.at("mean_accuracy").get<double>();
            report.overall.push_back(std::move(e));
        }
        return report;
    } catch (const json::exception& e) {
        throw CorruptFile(path.string() + ": " + e.what());
    }
}

}  // namespace metaforests

#include "metaforests/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "metaforests/errors.hpp"
#include "metaforests/rng.hpp"

namespace metaforests {

void DatasetSchema::validate() const {
    if (feature_names.empty()) throw InvalidSchema("schema has no feature columns");
    std::set<std::string> unique_features(feature_names.begin(), feature_names.end());
    if (unique_features.size() != feature_names.size())
        throw InvalidSchema("schema has duplicate feature names");
    if (class_count < 2) throw InvalidSchema("schema needs at least 2 classes");
    if (!label_names.empty() && static_cast<int>(label_names.size()) != class_count)
        throw InvalidSchema("label_names size does not match class_count");
    if (domain_names.empty()) throw InvalidSchema("schema has no domains");
    std::set<std::string> unique_domains(domain_names.begin(), domain_names.end());
    if (unique_domains.size() != domain_names.size())
        throw InvalidSchema("schema has duplicate domain names");
}

MultiDomainDataset::MultiDomainDataset(DatasetSchema schema,
                                       std::map<std::string, DomainDataset> domains)
    : schema_(std::move(schema)), domains_(std::move(domains)) {
    schema_.validate();
    for (const auto& name : schema_.domain_names) {
        auto it = domains_.find(name);
        if (it == domains_.end())
            throw InvalidSchema("domain '" + name + "' listed in schema but absent");
        const DomainDataset& d = it->second;
        if (d.samples.empty()) throw EmptyDomain("domain '" + name + "' has no samples");
        for (const Sample& s : d.samples) {
            if (s.features.size() != schema_.feature_dim())
                throw InvalidSchema("sample in domain '" + name + "' has wrong feature count");
            if (s.label < 0 || s.label >= schema_.class_count)
                throw InvalidSchema("sample in domain '" + name + "' has out-of-range label");
            for (double v : s.features)
                if (!std::isfinite(v))
                    throw InvalidSchema("non-finite feature value in domain '" + name + "'");
        }
    }
    if (domains_.size() != schema_.domain_names.size())
        throw InvalidSchema("dataset contains domains not listed in schema");
}

const DomainDataset& MultiDomainDataset::domain(const std::string& name) const {
    auto it = domains_.find(name);
    if (it == domains_.end()) throw UnknownDomain("unknown domain '" + name + "'");
    return it->second;
}

std::size_t MultiDomainDataset::total_size() const {
    std::size_t n = 0;
    for (const auto& [_, d] : domains_) n += d.samples.size();
    return n;
}

std::pair<MultiDomainDataset, DomainDataset> split_source_target(const MultiDomainDataset& data,
                                                                 const std::string& target) {
    if (!data.has_domain(target)) throw UnknownDomain("unknown domain '" + target + "'");
    if (data.domain_count() < 2)
        throw TooFewDomains("need at least 2 domains to split off a target");

    DatasetSchema schema = data.schema();
    schema.domain_names.clear();
    for (const auto& name : data.schema().domain_names)
        if (name != target) schema.domain_names.push_back(name);

    std::map<std::string, DomainDataset> sources;
    for (const auto& [name, d] : data.domains())
        if (name != target) sources.emplace(name, d);

    return {MultiDomainDataset(std::move(schema), std::move(sources)), data.domain(target)};
}

DomainDataset subsample(const DomainDataset& domain, double ratio, bool with_replacement,
                        std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        std::ostringstream msg;
        msg << "subsample ratio must be in (0, 1], got " << ratio;
        throw InvalidRatio(msg.str());
    }
    if (domain.samples.empty()) throw EmptyDomain("cannot subsample an empty domain");

    const std::size_t n = domain.samples.size();
    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n))));

    RngStream rng(seed);
    DomainDataset out;
    out.domain_name = domain.domain_name;
    out.samples.reserve(k);
    if (with_replacement) {
        for (std::size_t i = 0; i < k; ++i) out.samples.push_back(domain.samples[rng.next_index(n)]);
    } else {
        // partial Fisher-Yates: first k slots hold a uniform k-subset
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < k; ++i)
            std::swap(idx[i], idx[i + rng.next_index(n - i)]);
        for (std::size_t i = 0; i < k; ++i) out.samples.push_back(domain.samples[idx[i]]);
    }
    return out;
}

bool operator==(const Sample& a, const Sample& b) {
    return a.label == b.label && a.features == b.features;
}

bool operator==(const DomainDataset& a, const DomainDataset& b) {
    return a.domain_name == b.domain_name && a.samples == b.samples;
}

bool operator==(const DatasetSchema& a, const DatasetSchema& b) {
    return a.feature_names == b.feature_names && a.class_count == b.class_count &&
           a.label_names == b.label_names && a.domain_names == b.domain_names;
}

bool operator==(const MultiDomainDataset& a, const MultiDomainDataset& b) {
    return a.schema() == b.schema() && a.domains() == b.domains();
}

}  // namespace metaforests

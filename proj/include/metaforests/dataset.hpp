#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace metaforests {

/// Column layout shared by every domain of a dataset: feature names, the
/// number of classes, the label names backing the class indices, and the
/// domain names. Validated on construction.
struct DatasetSchema {
    std::vector<std::string> feature_names;
    int class_count = 0;
    std::vector<std::string> label_names;  // size == class_count, sorted
    std::vector<std::string> domain_names;

    std::size_t feature_dim() const { return feature_names.size(); }
    void validate() const;
};

/// One labeled feature vector. Label is a class index in [0, class_count).
struct Sample {
    std::vector<double> features;
    int label = 0;
};

/// All samples belonging to one named domain.
struct DomainDataset {
    std::string domain_name;
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
};

/// A labeled dataset partitioned into named domains.
class MultiDomainDataset {
public:
    MultiDomainDataset() = default;
    MultiDomainDataset(DatasetSchema schema, std::map<std::string, DomainDataset> domains);

    const DatasetSchema& schema() const { return schema_; }
    const std::map<std::string, DomainDataset>& domains() const { return domains_; }
    const DomainDataset& domain(const std::string& name) const;
    bool has_domain(const std::string& name) const { return domains_.count(name) != 0; }
    std::size_t domain_count() const { return domains_.size(); }
    std::size_t total_size() const;

private:
    DatasetSchema schema_;
    std::map<std::string, DomainDataset> domains_;
};

/// Removes `target` from the dataset and returns (remaining sources, target).
std::pair<MultiDomainDataset, DomainDataset> split_source_target(
    const MultiDomainDataset& data, const std::string& target);

/// Draws max(1, round(ratio * n)) samples from a domain. Without replacement
/// the drawn indices are distinct. Deterministic for a fixed seed.
DomainDataset subsample(const DomainDataset& domain, double ratio, bool with_replacement,
                        std::uint64_t seed);

bool operator==(const Sample& a, const Sample& b);
bool operator==(const DomainDataset& a, const DomainDataset& b);
bool operator==(const DatasetSchema& a, const DatasetSchema& b);
bool operator==(const MultiDomainDataset& a, const MultiDomainDataset& b);

}  // namespace metaforests

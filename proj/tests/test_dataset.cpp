#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "metaforests/dataset.hpp"
#include "metaforests/errors.hpp"

namespace mf = metaforests;

namespace {

mf::DatasetSchema make_schema(std::size_t n_features, int n_classes,
                              std::vector<std::string> domain_names) {
    mf::DatasetSchema schema;
    for (std::size_t f = 0; f < n_features; ++f) {
        schema.feature_names.push_back("f" + std::to_string(f));
    }
    schema.class_count = n_classes;
    schema.domain_names = std::move(domain_names);
    return schema;
}

mf::DomainDataset make_domain(const std::string& name, std::size_t n, std::size_t dim,
                              int n_classes) {
    mf::DomainDataset d;
    d.domain_name = name;
    for (std::size_t i = 0; i < n; ++i) {
        mf::Sample s;
        for (std::size_t f = 0; f < dim; ++f) {
            s.features.push_back(static_cast<double>(i * dim + f));
        }
        s.label = static_cast<int>(i % static_cast<std::size_t>(n_classes));
        d.samples.push_back(std::move(s));
    }
    return d;
}

mf::MultiDomainDataset make_dataset(std::vector<std::string> names, std::size_t per_domain,
                                    std::size_t dim = 2, int n_classes = 2) {
    auto schema = make_schema(dim, n_classes, names);
    std::map<std::string, mf::DomainDataset> domains;
    for (const auto& name : names) {
        domains[name] = make_domain(name, per_domain, dim, n_classes);
    }
    return mf::MultiDomainDataset(std::move(schema), std::move(domains));
}

std::vector<mf::Sample> sorted_samples(const mf::DomainDataset& d) {
    auto out = d.samples;
    std::sort(out.begin(), out.end(), [](const mf::Sample& a, const mf::Sample& b) {
        return std::tie(a.features, a.label) < std::tie(b.features, b.label);
    });
    return out;
}

}  // namespace

TEST_CASE("schema validation rejects malformed layouts") {
    auto good = make_schema(3, 2, {"A", "B"});
    CHECK_NOTHROW(good.validate());

    auto no_features = good;
    no_features.feature_names.clear();
    CHECK_THROWS_AS(no_features.validate(), mf::InvalidSchema);

    auto dup_features = good;
    dup_features.feature_names = {"x", "x", "y"};
    CHECK_THROWS_AS(dup_features.validate(), mf::InvalidSchema);

    auto one_class = good;
    one_class.class_count = 1;
    CHECK_THROWS_AS(one_class.validate(), mf::InvalidSchema);

    auto no_domains = good;
    no_domains.domain_names.clear();
    CHECK_THROWS_AS(no_domains.validate(), mf::InvalidSchema);

    auto dup_domains = good;
    dup_domains.domain_names = {"A", "A"};
    CHECK_THROWS_AS(dup_domains.validate(), mf::InvalidSchema);

    auto bad_labels = good;
    bad_labels.label_names = {"only_one"};  // must be empty or class_count long
    CHECK_THROWS_AS(bad_labels.validate(), mf::InvalidSchema);

    auto named_labels = good;
    named_labels.label_names = {"neg", "pos"};
    CHECK_NOTHROW(named_labels.validate());
}

TEST_CASE("dataset construction validates every sample") {
    auto schema = make_schema(2, 2, {"A"});

    std::map<std::string, mf::DomainDataset> missing;
    CHECK_THROWS_AS(mf::MultiDomainDataset(schema, missing), mf::InvalidSchema);

    std::map<std::string, mf::DomainDataset> empty_domain;
    empty_domain["A"] = mf::DomainDataset{"A", {}};
    CHECK_THROWS_AS(mf::MultiDomainDataset(schema, empty_domain), mf::EmptyDomain);

    std::map<std::string, mf::DomainDataset> wrong_dim;
    wrong_dim["A"] = mf::DomainDataset{"A", {mf::Sample{{1.0}, 0}}};
    CHECK_THROWS_AS(mf::MultiDomainDataset(schema, wrong_dim), mf::InvalidSchema);

    std::map<std::string, mf::DomainDataset> bad_label;
    bad_label["A"] = mf::DomainDataset{"A", {mf::Sample{{1.0, 2.0}, 2}}};
    CHECK_THROWS_AS(mf::MultiDomainDataset(schema, bad_label), mf::InvalidSchema);

    std::map<std::string, mf::DomainDataset> non_finite;
    non_finite["A"] = mf::DomainDataset{
        "A", {mf::Sample{{1.0, std::numeric_limits<double>::quiet_NaN()}, 0}}};
    CHECK_THROWS_AS(mf::MultiDomainDataset(schema, non_finite), mf::InvalidSchema);

    std::map<std::string, mf::DomainDataset> extra;
    extra["A"] = make_domain("A", 2, 2, 2);
    extra["B"] = make_domain("B", 2, 2, 2);
    CHECK_THROWS_AS(mf::MultiDomainDataset(schema, extra), mf::InvalidSchema);

    auto data = make_dataset({"A", "B"}, 3);
    CHECK(data.domain_count() == 2);
    CHECK(data.total_size() == 6);
    CHECK(data.has_domain("A"));
    CHECK_FALSE(data.has_domain("Z"));
    CHECK_THROWS_AS((void)data.domain("Z"), mf::UnknownDomain);
}

TEST_CASE("split_source_target removes exactly the target domain") {
    auto data = make_dataset({"P1", "P2", "P3", "P4", "P5"}, 4);
    auto [sources, target] = mf::split_source_target(data, "P2");

    CHECK(target.domain_name == "P2");
    CHECK(target.size() == 4);
    CHECK(sources.domain_count() == 4);
    CHECK_FALSE(sources.has_domain("P2"));
    // Schema order of the remaining domains is preserved.
    CHECK(sources.schema().domain_names ==
          std::vector<std::string>{"P1", "P3", "P4", "P5"});
    CHECK(sources.total_size() + target.size() == data.total_size());
    // Target samples are exactly the original ones (no leakage, no loss).
    CHECK(target.samples == data.domain("P2").samples);

    auto two = make_dataset({"A", "B"}, 3);
    auto [one_source, b] = mf::split_source_target(two, "B");
    CHECK(one_source.domain_count() == 1);
    CHECK(b.size() == 3);

    CHECK_THROWS_AS(mf::split_source_target(data, "nope"), mf::UnknownDomain);
}

TEST_CASE("subsample draws the documented count") {
    auto domain = make_domain("A", 100, 2, 2);
    CHECK(mf::subsample(domain, 0.2, false, 1).size() == 20);
    CHECK(mf::subsample(domain, 0.3, false, 1).size() == 30);
    CHECK(mf::subsample(domain, 1.0, false, 1).size() == 100);
    // round to nearest with a floor of one sample
    auto tiny = make_domain("A", 10, 2, 2);
    CHECK(mf::subsample(tiny, 0.04, false, 1).size() == 1);   // round(0.4) -> 0 -> floor 1
    CHECK(mf::subsample(tiny, 0.26, false, 1).size() == 3);   // round(2.6) -> 3
}

TEST_CASE("subsample without replacement draws distinct rows from the source") {
    auto domain = make_domain("A", 50, 2, 2);
    auto draw = mf::subsample(domain, 0.5, false, 7);
    REQUIRE(draw.size() == 25);

    // Feature vectors in make_domain are unique, so distinctness is checkable.
    auto rows = sorted_samples(draw);
    CHECK(std::adjacent_find(rows.begin(), rows.end()) == rows.end());
    // Every drawn row exists in the source.
    auto source_rows = sorted_samples(domain);
    for (const auto& s : rows) {
        CHECK(std::binary_search(source_rows.begin(), source_rows.end(), s,
                                 [](const mf::Sample& a, const mf::Sample& b) {
                                     return std::tie(a.features, a.label) <
                                            std::tie(b.features, b.label);
                                 }));
    }
    // ratio 1.0 without replacement returns the same multiset.
    auto all = mf::subsample(domain, 1.0, false, 11);
    CHECK(sorted_samples(all) == sorted_samples(domain));
}

TEST_CASE("subsample with replacement can repeat rows but stays in the source") {
    auto domain = make_domain("A", 5, 1, 2);
    auto draw = mf::subsample(domain, 1.0, true, 3);
    REQUIRE(draw.size() == 5);
    auto source_rows = sorted_samples(domain);
    for (const auto& s : draw.samples) {
        CHECK(std::binary_search(source_rows.begin(), source_rows.end(), s,
                                 [](const mf::Sample& a, const mf::Sample& b) {
                                     return std::tie(a.features, a.label) <
                                            std::tie(b.features, b.label);
                                 }));
    }
}

TEST_CASE("subsample is deterministic in the seed") {
    auto domain = make_domain("A", 40, 3, 2);
    auto a = mf::subsample(domain, 0.3, false, 42);
    auto b = mf::subsample(domain, 0.3, false, 42);
    auto c = mf::subsample(domain, 0.3, false, 43);
    CHECK(a == b);
    CHECK(a.samples != c.samples);  // overwhelmingly likely for distinct seeds

    auto d = mf::subsample(domain, 0.3, true, 42);
    auto e = mf::subsample(domain, 0.3, true, 42);
    CHECK(d == e);
}

TEST_CASE("subsample rejects ratios outside (0, 1]") {
    auto domain = make_domain("A", 10, 2, 2);
    CHECK_THROWS_AS(mf::subsample(domain, 0.0, false, 1), mf::InvalidRatio);
    CHECK_THROWS_AS(mf::subsample(domain, -0.1, false, 1), mf::InvalidRatio);
    CHECK_THROWS_AS(mf::subsample(domain, 1.2, false, 1), mf::InvalidRatio);
    mf::DomainDataset empty{"A", {}};
    CHECK_THROWS_AS(mf::subsample(empty, 0.5, false, 1), mf::EmptyDomain);
}

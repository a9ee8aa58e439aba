#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "metaforests/dataset.hpp"

namespace metaforests {

using PointSet = std::vector<std::vector<double>>;

struct KernelConfig {
    // only the RBF kernel is supported
    std::optional<double> bandwidth;       // empty: median heuristic on the pooled pair
    std::size_t max_points_per_side = 512;  // larger sides are subsampled deterministically
    std::uint64_t seed = 0;

    void validate() const;
};

struct MmdEstimate {
    double mmd_squared = 0.0;  // biased V-statistic, clamped at 0
    double mmd = 0.0;          // sqrt(mmd_squared)
    double bandwidth_used = 0.0;
    std::size_t n_x = 0;  // sizes actually used, after any subsampling
    std::size_t n_y = 0;
};

/// exp(-|x - y|^2 / (2 sigma^2))
double rbf_kernel(std::span<const double> x, std::span<const double> y, double bandwidth);

/// Median of the pairwise Euclidean distances over the pooled set, zeros
/// excluded; 1 when every distance is zero.
double median_heuristic_bandwidth(const PointSet& x, const PointSet& y);

/// Biased V-statistic estimate mean(Kxx) + mean(Kyy) - 2 mean(Kxy),
/// diagonals included. Exactly symmetric in its arguments: subsampling seeds
/// are derived from each side's content and the cross sum is accumulated in
/// a canonical order.
MmdEstimate mmd(const PointSet& x, const PointSet& y, const KernelConfig& config);

/// Per-feature mean and standard deviation, used to z-score both sides of an
/// MMD comparison with one side's statistics.
struct FeatureStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // floored at 1 where the feature is constant
};

FeatureStats compute_feature_stats(const PointSet& points);
PointSet standardize(const PointSet& points, const FeatureStats& stats);

PointSet feature_matrix(const DomainDataset& domain);

}  // namespace metaforests

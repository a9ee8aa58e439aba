#include "metaforests/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "metaforests/errors.hpp"
#include "metaforests/rng.hpp"

namespace metaforests {

namespace {

void check_dims(const PointSet& points, std::size_t dim, const char* side) {
    for (const auto& p : points)
        if (p.size() != dim) {
            std::ostringstream msg;
            msg << side << " contains points of mixed dimension (" << p.size() << " vs " << dim
                << ")";
            throw DimensionMismatch(msg.str());
        }
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum;
}

// hash of the raw double bits; used to derive side-specific subsample seeds
// that do not depend on argument order
std::uint64_t content_hash(const PointSet& points) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const auto& p : points)
        for (double v : p) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof(bits));
            for (int shift = 0; shift < 64; shift += 8) {
                h ^= (bits >> shift) & 0xFF;
                h *= 0x100000001B3ULL;
            }
        }
    return h;
}

PointSet cap_side(const PointSet& points, std::size_t cap, std::uint64_t seed) {
    if (points.size() <= cap) return points;
    RngStream rng(seed);
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < cap; ++i) std::swap(idx[i], idx[i + rng.next_index(idx.size() - i)]);
    PointSet out;
    out.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) out.push_back(points[idx[i]]);
    return out;
}

bool lexicographic_less(const PointSet& a, const PointSet& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Mean over all ordered pairs, diagonal included. The same traversal serves
// the self terms (a == b) and the cross term; for the cross term the outer
// side is fixed by a canonical ordering so that swapping the arguments
// cannot change the summation order. Together with the canonical sort in
// mmd() this makes mmd(X, Y) == mmd(Y, X) and mmd(X, X) == 0 hold exactly.
double kernel_mean(const PointSet& a, const PointSet& b, double bandwidth) {
    const PointSet* outer = &a;
    const PointSet* inner = &b;
    if (lexicographic_less(b, a)) std::swap(outer, inner);
    double sum = 0.0;
    for (const auto& p : *outer) {
        double row = 0.0;
        for (const auto& q : *inner) row += rbf_kernel(p, q, bandwidth);
        sum += row;
    }
    return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

void KernelConfig::validate() const {
    if (bandwidth && !(*bandwidth > 0.0))
        throw NonPositiveBandwidth("kernel bandwidth must be > 0");
    if (max_points_per_side < 1) throw InvalidConfig("max_points_per_side must be >= 1");
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double bandwidth) {
    if (x.size() != y.size()) {
        std::ostringstream msg;
        msg << "rbf_kernel dimension mismatch: " << x.size() << " vs " << y.size();
        throw DimensionMismatch(msg.str());
    }
    if (!(bandwidth > 0.0)) throw NonPositiveBandwidth("kernel bandwidth must be > 0");
    return std::exp(-squared_distance(x, y) / (2.0 * bandwidth * bandwidth));
}

double median_heuristic_bandwidth(const PointSet& x, const PointSet& y) {
    PointSet pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    if (pooled.size() < 2)
        throw EmptySet("median heuristic needs at least 2 pooled points");
    if (!pooled.empty()) check_dims(pooled, pooled[0].size(), "pooled set");

    std::vector<double> distances;
    distances.reserve(pooled.size() * (pooled.size() - 1) / 2);
    for (std::size_t i = 0; i < pooled.size(); ++i)
        for (std::size_t j = i + 1; j < pooled.size(); ++j) {
            const double d = std::sqrt(squared_distance(pooled[i], pooled[j]));
            if (d > 0.0) distances.push_back(d);
        }
    if (distances.empty()) return 1.0;

    std::sort(distances.begin(), distances.end());
    const std::size_t n = distances.size();
    if (n % 2 == 1) return distances[n / 2];
    return (distances[n / 2 - 1] + distances[n / 2]) / 2.0;
}

MmdEstimate mmd(const PointSet& x, const PointSet& y, const KernelConfig& config) {
    config.validate();
    if (x.empty() || y.empty()) throw EmptySet("mmd requires non-empty sample sets");
    const std::size_t dim = x[0].size();
    check_dims(x, dim, "X");
    check_dims(y, dim, "Y");

    // canonical order: estimates do not depend on how either side was listed
    PointSet x_sorted = x;
    PointSet y_sorted = y;
    std::sort(x_sorted.begin(), x_sorted.end());
    std::sort(y_sorted.begin(), y_sorted.end());

    PointSet x_used = cap_side(x_sorted, config.max_points_per_side,
                               mix64(config.seed, content_hash(x_sorted)));
    PointSet y_used = cap_side(y_sorted, config.max_points_per_side,
                               mix64(config.seed, content_hash(y_sorted)));
    std::sort(x_used.begin(), x_used.end());
    std::sort(y_used.begin(), y_used.end());

    const double bandwidth =
        config.bandwidth ? *config.bandwidth : median_heuristic_bandwidth(x_used, y_used);
    if (!(bandwidth > 0.0)) throw NonPositiveBandwidth("resolved bandwidth must be > 0");

    const double mean_xx = kernel_mean(x_used, x_used, bandwidth);
    const double mean_yy = kernel_mean(y_used, y_used, bandwidth);
    const double mean_xy = kernel_mean(x_used, y_used, bandwidth);

    MmdEstimate estimate;
    estimate.mmd_squared = std::max(0.0, mean_xx + mean_yy - 2.0 * mean_xy);
    estimate.mmd = std::sqrt(estimate.mmd_squared);
    estimate.bandwidth_used = bandwidth;
    estimate.n_x = x_used.size();
    estimate.n_y = y_used.size();
    return estimate;
}

FeatureStats compute_feature_stats(const PointSet& points) {
    if (points.empty()) throw EmptySet("cannot compute feature stats of an empty set");
    const std::size_t dim = points[0].size();
    check_dims(points, dim, "stats input");

    FeatureStats stats;
    stats.mean.assign(dim, 0.0);
    stats.stddev.assign(dim, 0.0);
    for (const auto& p : points)
        for (std::size_t f = 0; f < dim; ++f) stats.mean[f] += p[f];
    for (std::size_t f = 0; f < dim; ++f) stats.mean[f] /= static_cast<double>(points.size());
    for (const auto& p : points)
        for (std::size_t f = 0; f < dim; ++f) {
            const double d = p[f] - stats.mean[f];
            stats.stddev[f] += d * d;
        }
    for (std::size_t f = 0; f < dim; ++f) {
        stats.stddev[f] = std::sqrt(stats.stddev[f] / static_cast<double>(points.size()));
        if (!(stats.stddev[f] > 0.0)) stats.stddev[f] = 1.0;
    }
    return stats;
}

PointSet standardize(const PointSet& points, const FeatureStats& stats) {
    PointSet out = points;
    for (auto& p : out) {
        if (p.size() != stats.mean.size())
            throw DimensionMismatch("standardize: point dimension does not match stats");
        for (std::size_t f = 0; f < p.size(); ++f) p[f] = (p[f] - stats.mean[f]) / stats.stddev[f];
    }
    return out;
}

PointSet feature_matrix(const DomainDataset& domain) {
    PointSet out;
    out.reserve(domain.samples.size());
    for (const Sample& s : domain.samples) out.push_back(s.features);
    return out;
}

}  // namespace metaforests

#include "metaforests/synthetic.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "metaforests/errors.hpp"
#include "metaforests/rng.hpp"

namespace metaforests {

namespace {

// Internal geometry of the benchmark. The feature space is split into a
// stable block (the first ceil(kStableFraction * dim) features) and a
// volatile block (the rest). Class means are informative in both blocks, but
// the per-domain perturbation — translation and Givens rotations — touches
// only the volatile block, so the stable features are the ones that transfer
// across domains. kVolatileMeanScale > kStableMeanScale makes the volatile
// features the in-domain favourites, which is what gives domain-robust
// models room to beat pooled training at the default shift 2.0 / noise 1.0.
constexpr double kStableFraction = 0.3;
constexpr double kStableMeanScale = 0.8;
constexpr double kVolatileMeanScale = 1.8;
constexpr double kRotationPerShift = 0.3;

struct GivensRotation {
    std::size_t i, j;
    double cos_theta, sin_theta;
};

void apply_rotations(const std::vector<GivensRotation>& rotations, std::vector<double>& v) {
    for (const auto& g : rotations) {
        const double vi = v[g.i], vj = v[g.j];
        v[g.i] = g.cos_theta * vi - g.sin_theta * vj;
        v[g.j] = g.sin_theta * vi + g.cos_theta * vj;
    }
}

std::string padded_name(char prefix, int index, int count) {
    int width = 1;
    for (int v = count - 1; v >= 10; v /= 10) ++width;
    std::ostringstream out;
    out << prefix;
    std::string digits = std::to_string(index);
    out << std::string(static_cast<std::size_t>(width) - digits.size(), '0') << digits;
    return out.str();
}

}  // namespace

void SyntheticSpec::validate() const {
    std::ostringstream msg;
    if (domain_count < 3)
        msg << "domain_count must be >= 3 (got " << domain_count << "); ";
    if (class_count < 2) msg << "class_count must be >= 2 (got " << class_count << "); ";
    if (feature_dim < 2) msg << "feature_dim must be >= 2 (got " << feature_dim << "); ";
    if (samples_per_domain < 1)
        msg << "samples_per_domain must be >= 1 (got " << samples_per_domain << "); ";
    if (!(shift_magnitude >= 0.0))
        msg << "shift_magnitude must be >= 0 (got " << shift_magnitude << "); ";
    if (!(noise_scale > 0.0)) msg << "noise_scale must be > 0 (got " << noise_scale << "); ";
    const std::string text = msg.str();
    if (!text.empty()) throw InvalidSpec("invalid synthetic spec: " + text);
}

MultiDomainDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t dim = static_cast<std::size_t>(spec.feature_dim);
    // validate() guarantees dim >= 2, so both blocks are non-empty.
    const std::size_t stable = std::min(
        dim - 1, static_cast<std::size_t>(std::ceil(kStableFraction * static_cast<double>(dim))));
    const std::size_t volatile_count = dim - stable;

    RngStream base_rng(mix64(spec.seed, 1));
    std::vector<std::vector<double>> class_means(static_cast<std::size_t>(spec.class_count));
    for (auto& mean : class_means) {
        mean.resize(dim);
        for (std::size_t f = 0; f < dim; ++f) {
            const double scale = f < stable ? kStableMeanScale : kVolatileMeanScale;
            mean[f] = scale * base_rng.next_gaussian();
        }
    }

    DatasetSchema schema;
    for (std::size_t f = 0; f < dim; ++f)
        schema.feature_names.push_back(padded_name('f', static_cast<int>(f), spec.feature_dim));
    schema.class_count = spec.class_count;
    for (int c = 0; c < spec.class_count; ++c)
        schema.label_names.push_back(padded_name('c', c, spec.class_count));

    std::map<std::string, DomainDataset> domains;
    for (int d = 0; d < spec.domain_count; ++d) {
        const std::string name = padded_name('d', d, spec.domain_count);
        schema.domain_names.push_back(name);

        RngStream domain_rng(mix64(spec.seed, 2, static_cast<std::uint64_t>(d)));

        // translation of norm shift_magnitude in a random direction within
        // the volatile block (one gaussian per dimension is always drawn so
        // the stream layout does not depend on the block sizes)
        std::vector<double> translation(dim);
        double norm_sq = 0.0;
        for (std::size_t f = 0; f < dim; ++f) {
            const double g = domain_rng.next_gaussian();
            translation[f] = f < stable ? 0.0 : g;
            norm_sq += translation[f] * translation[f];
        }
        const double norm = std::sqrt(norm_sq);
        for (double& v : translation)
            v = norm > 1e-300 ? spec.shift_magnitude * v / norm : 0.0;

        // random rotation as a product of Givens rotations confined to the
        // volatile block, with angles that scale with shift_magnitude
        std::vector<GivensRotation> rotations;
        if (volatile_count >= 2) {
            rotations.reserve(volatile_count);
            for (std::size_t k = 0; k < volatile_count; ++k) {
                const std::size_t i = stable + domain_rng.next_index(volatile_count);
                std::size_t j = stable + domain_rng.next_index(volatile_count - 1);
                if (j >= i) ++j;
                const double theta =
                    (2.0 * domain_rng.next_unit() - 1.0) * kRotationPerShift *
                    spec.shift_magnitude;
                rotations.push_back({i, j, std::cos(theta), std::sin(theta)});
            }
        }

        std::vector<std::vector<double>> domain_means = class_means;
        for (auto& mean : domain_means) {
            apply_rotations(rotations, mean);
            for (std::size_t f = 0; f < dim; ++f) mean[f] += translation[f];
        }

        RngStream sample_rng(mix64(spec.seed, 3, static_cast<std::uint64_t>(d)));
        DomainDataset domain;
        domain.domain_name = name;
        domain.samples.reserve(static_cast<std::size_t>(spec.samples_per_domain));
        for (int s = 0; s < spec.samples_per_domain; ++s) {
            const int label = s % spec.class_count;  // keeps classes balanced
            Sample sample;
            sample.label = label;
            sample.features.resize(dim);
            const auto& mean = domain_means[static_cast<std::size_t>(label)];
            for (std::size_t f = 0; f < dim; ++f)
                sample.features[f] = mean[f] + spec.noise_scale * sample_rng.next_gaussian();
            domain.samples.push_back(std::move(sample));
        }
        domains.emplace(name, std::move(domain));
    }

    return MultiDomainDataset(std::move(schema), std::move(domains));
}

}  // namespace metaforests

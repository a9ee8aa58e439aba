#pragma once

#include <filesystem>
#include <optional>

#include "metaforests/meta_forests.hpp"

namespace metaforests {

inline constexpr int kModelFormatVersion = 1;

/// Everything persisted for a trained model: the ensemble itself, the
/// training config snapshot (exactly one of the two, matching
/// ensemble.algorithm), and the meta-task log when one was produced.
struct ModelFile {
    WeightedEnsemble ensemble;
    std::optional<MetaForestsConfig> meta_config;
    std::optional<ForestConfig> baseline_config;
    std::optional<MetaTaskLog> log;
};

/// Writes the model as a versioned JSON document. Doubles are emitted with
/// shortest round-trip representations, so load(save(m)) is bit-exact.
void save_model(const ModelFile& model, const std::filesystem::path& path);

/// Throws IoError when the file cannot be read, VersionMismatch when
/// format_version differs from kModelFormatVersion, and CorruptFile when the
/// document does not parse or lacks required fields.
ModelFile load_model(const std::filesystem::path& path);

}  // namespace metaforests

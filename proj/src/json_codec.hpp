#pragma once

// Internal JSON encode/decode helpers shared by the model and report
// writers. Not part of the public headers.

#include <json.hpp>

#include "metaforests/meta_forests.hpp"

namespace metaforests::codec {

using json = nlohmann::ordered_json;

json node_to_json(const TreeNode& n);
TreeNode node_from_json(const json& j);

json tree_to_json(const DecisionTree& t);
DecisionTree tree_from_json(const json& j);

json tree_config_to_json(const TreeConfig& c);
TreeConfig tree_config_from_json(const json& j);

json forest_config_to_json(const ForestConfig& c);
ForestConfig forest_config_from_json(const json& j);

json kernel_config_to_json(const KernelConfig& c);
KernelConfig kernel_config_from_json(const json& j);

json meta_config_to_json(const MetaForestsConfig& c);
MetaForestsConfig meta_config_from_json(const json& j);

json forest_to_json(const Forest& f);
Forest forest_from_json(const json& j);

json record_to_json(const MetaTaskRecord& r);
MetaTaskRecord record_from_json(const json& j);

json schema_to_json(const DatasetSchema& s);
DatasetSchema schema_from_json(const json& j);

}  // namespace metaforests::codec

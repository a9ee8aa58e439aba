#include "metaforests/model_io.hpp"

#include <fstream>
#include <utility>

#include "json_codec.hpp"

namespace metaforests {

namespace {
using codec::json;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["algorithm"] = model.ensemble.algorithm;
    j["schema"] = codec::schema_to_json(model.ensemble.schema);
    if (model.meta_config)
        j["config"] = codec::meta_config_to_json(*model.meta_config);
    else if (model.baseline_config)
        j["config"] = codec::forest_config_to_json(*model.baseline_config);
    else
        j["config"] = json(nullptr);

    json entries = json::array();
    for (const EnsembleEntry& e : model.ensemble.entries) {
        json entry;
        entry["weight"] = e.weight;
        entry["provenance"] = {{"iteration", e.provenance.iteration},
                               {"meta_train_domain", e.provenance.meta_train_domain},
                               {"meta_test_domain", e.provenance.meta_test_domain}};
        entry["forest"] = codec::forest_to_json(e.forest);
        entries.push_back(std::move(entry));
    }
    j["entries"] = std::move(entries);

    if (model.log) {
        json log = json::array();
        for (const MetaTaskRecord& r : *model.log) log.push_back(codec::record_to_json(r));
        j["log"] = std::move(log);
    }

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");

    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw CorruptFile(path.string() + " is not a well-formed model file");

    try {
        const json& version = j.at("format_version");
        if (!version.is_number_integer())
            throw CorruptFile(path.string() + ": format_version must be an integer");
        if (version.get<int>() != kModelFormatVersion)
            throw VersionMismatch(path.string() + ": format_version " + version.dump() +
                                  " is not supported (expected " +
                                  std::to_string(kModelFormatVersion) + ")");

        ModelFile model;
        model.ensemble.algorithm = j.at("algorithm").get<std::string>();
        if (model.ensemble.algorithm != "meta_forests" &&
            model.ensemble.algorithm != "baseline_rf")
            throw CorruptFile(path.string() + ": unknown algorithm '" +
                              model.ensemble.algorithm + "'");
        model.ensemble.schema = codec::schema_from_json(j.at("schema"));
        model.ensemble.schema.validate();

        if (!j.at("config").is_null()) {
            if (model.ensemble.algorithm == "meta_forests")
                model.meta_config = codec::meta_config_from_json(j.at("config"));
            else
                model.baseline_config = codec::forest_config_from_json(j.at("config"));
        }

        for (const json& entry : j.at("entries")) {
            EnsembleEntry e;
            e.weight = entry.at("weight").get<double>();
            const json& p = entry.at("provenance");
            e.provenance.iteration = p.at("iteration").get<int>();
            e.provenance.meta_train_domain = p.at("meta_train_domain").get<std::string>();
            e.provenance.meta_test_domain = p.at("meta_test_domain").get<std::string>();
            e.forest = codec::forest_from_json(entry.at("forest"));
            model.ensemble.entries.push_back(std::move(e));
        }
        if (model.ensemble.entries.empty())
            throw CorruptFile(path.string() + ": model has no ensemble entries");

        if (j.contains("log")) {
            MetaTaskLog log;
            for (const json& r : j.at("log")) log.push_back(codec::record_from_json(r));
            model.log = std::move(log);
        }
        return model;
    } catch (const json::exception& e) {
        throw CorruptFile(path.string() + ": " + e.what());
    }
}

}  // namespace metaforests

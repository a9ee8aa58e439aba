#include "metaforests/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "metaforests/errors.hpp"

namespace metaforests {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_feature(const std::string& text, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-numeric feature at row " << row << ", column '" << column << "': '" << text
            << "'";
        throw NonNumericFeature(msg.str());
    }
    return value;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

MultiDomainDataset load_csv(const std::string& path, const std::string& label_column,
                            const std::string& domain_column) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(file, line)) throw CsvFormatError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = split_fields(line);
    {
        std::set<std::string> seen;
        for (const auto& name : header)
            if (!seen.insert(name).second)
                throw DuplicateHeader("duplicate header column '" + name + "'");
    }

    std::size_t label_idx = header.size(), domain_idx = header.size();
    std::vector<std::size_t> feature_idx;
    std::vector<std::string> feature_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) {
            label_idx = i;
        } else if (header[i] == domain_column) {
            domain_idx = i;
        } else {
            feature_idx.push_back(i);
            feature_names.push_back(header[i]);
        }
    }
    if (label_idx == header.size()) throw MissingColumn("missing label column '" + label_column + "'");
    if (domain_idx == header.size())
        throw MissingColumn("missing domain column '" + domain_column + "'");
    if (feature_names.empty()) throw CsvFormatError("'" + path + "' has no feature columns");

    struct RawRow {
        std::vector<double> features;
        std::string label;
        std::string domain;
    };
    std::vector<RawRow> rows;
    std::size_t row_number = 1;  // header is row 1
    while (std::getline(file, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << "row " << row_number << " has " << fields.size() << " fields, expected "
                << header.size();
            throw CsvFormatError(msg.str());
        }
        RawRow row;
        row.features.reserve(feature_idx.size());
        for (std::size_t i = 0; i < feature_idx.size(); ++i)
            row.features.push_back(parse_feature(fields[feature_idx[i]], row_number, feature_names[i]));
        row.label = fields[label_idx];
        row.domain = fields[domain_idx];
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw EmptyDomain("'" + path + "' has a header but no data rows");

    std::set<std::string> label_set;
    for (const auto& row : rows) label_set.insert(row.label);
    std::vector<std::string> label_names(label_set.begin(), label_set.end());
    std::map<std::string, int> label_index;
    for (std::size_t i = 0; i < label_names.size(); ++i)
        label_index[label_names[i]] = static_cast<int>(i);

    // domains in order of first appearance
    std::vector<std::string> domain_names;
    std::map<std::string, DomainDataset> domains;
    for (const auto& row : rows) {
        auto [it, inserted] = domains.try_emplace(row.domain);
        if (inserted) {
            it->second.domain_name = row.domain;
            domain_names.push_back(row.domain);
        }
        it->second.samples.push_back(Sample{row.features, label_index.at(row.label)});
    }

    DatasetSchema schema;
    schema.feature_names = std::move(feature_names);
    schema.class_count = static_cast<int>(label_names.size());
    schema.label_names = std::move(label_names);
    schema.domain_names = std::move(domain_names);
    return MultiDomainDataset(std::move(schema), std::move(domains));
}

void save_csv(const MultiDomainDataset& data, const std::string& path,
              const std::string& label_column, const std::string& domain_column) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "' for writing");

    const DatasetSchema& schema = data.schema();
    for (const auto& name : schema.feature_names) file << name << ',';
    file << label_column << ',' << domain_column << '\n';

    for (const auto& domain_name : schema.domain_names) {
        const DomainDataset& d = data.domain(domain_name);
        for (const Sample& s : d.samples) {
            for (double v : s.features) file << format_double(v) << ',';
            if (!schema.label_names.empty()) {
                file << schema.label_names[static_cast<std::size_t>(s.label)];
            } else {
                file << s.label;
            }
            file << ',' << domain_name << '\n';
        }
    }
    if (!file) throw IoError("failed writing '" + path + "'");
}

}  // namespace metaforests

#pragma once

#include <string>

#include "metaforests/dataset.hpp"

namespace metaforests {

// CSV interface: UTF-8, comma-separated, header row first. One column holds
// the class label, one the domain name; every other column must parse as a
// finite real. Class indices are assigned by lexicographic order of the
// distinct label strings.

MultiDomainDataset load_csv(const std::string& path, const std::string& label_column = "label",
                            const std::string& domain_column = "domain");

void save_csv(const MultiDomainDataset& data, const std::string& path,
              const std::string& label_column = "label",
              const std::string& domain_column = "domain");

}  // namespace metaforests

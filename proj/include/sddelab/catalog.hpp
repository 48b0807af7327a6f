#pragma once

#include "sddelab/core.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sddelab {

/// Parameter schema of one catalog entry.
struct CatalogEntry {
    std::string name;
    std::string formula;
    std::map<std::string, double> defaults;
};

/// Every model the catalog can build, including the `-det` twins with g = 0.
const std::vector<CatalogEntry>& catalog_entries();

/// Names accepted by make_model.
std::vector<std::string> catalog_names();

/// The catalog instantiated at default parameters.
std::vector<ModelSpec> catalog();

class UnknownModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Builds a catalog model by name. Parameters missing from `params` take
/// their defaults; unknown parameter names or out-of-range values throw
/// std::invalid_argument. Unknown model names throw UnknownModel, whose
/// message lists the valid names.
ModelSpec make_model(std::string_view name, const std::map<std::string, double>& params = {});

/// Defaults of the named entry (throws UnknownModel).
const CatalogEntry& catalog_entry(std::string_view name);

} // namespace sddelab

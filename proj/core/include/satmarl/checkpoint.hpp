#pragma once

// Parameter checkpoint file: a versioned header (network spec + shape
// table) followed by the flat little-endian float64 parameter array.
// Layout is documented in docs/file_formats.md.

#include <string>

#include "satmarl/nn.hpp"

namespace satmarl {

void save_params(const std::string& path, const ParamVector& params);
ParamVector load_params(const std::string& path);  // throws ConfigError on bad files

}  // namespace satmarl

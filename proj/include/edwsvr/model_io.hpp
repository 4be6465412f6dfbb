#pragma once

#include <string>

#include "edwsvr/pipeline.hpp"

namespace edwsvr {

// Line-oriented text format, version tag "edwsvr-model v1". Doubles are
// written in shortest round-trip form, so save followed by load reproduces
// the model bit-exactly. Unknown versions and malformed files raise
// std::runtime_error naming the offending line.
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace edwsvr

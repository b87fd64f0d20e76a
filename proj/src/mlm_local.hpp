#pragma once

#include <filesystem>

#include "reqterm/mlm_gateway.hpp"

namespace reqterm::mlm {

// Loads the local transformer backend from a model directory containing
// config.json, vocab.txt and weights.bin. Defined in mlm_transformer.cpp.
BackendHandle load_local_backend(const std::filesystem::path& dir);

}  // namespace reqterm::mlm

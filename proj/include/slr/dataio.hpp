#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slr/nn.hpp"
#include "slr/skeleton.hpp"

namespace slr {

/// Lowercase hexadecimal float literal ("0x1.8p+1"); round-trips bit-exactly
/// through parse_hex_double.
std::string hex_double(double value);

/// Parses a full hex-float token (optional sign, 0x prefix). Returns false on
/// anything else, including trailing garbage and non-finite results.
bool parse_hex_double(std::string_view token, double& out);

/// Writes manifest.tsv plus one g_<class>_<signer>_<rep>.csv per sequence.
void write_dataset(const std::vector<GestureSequence>& dataset,
                   const std::filesystem::path& directory);

/// Loads a dataset written by write_dataset; read(write(d)) == d bitwise.
std::vector<GestureSequence> read_dataset(const std::filesystem::path& directory);

/// SLRMODEL 1 text format; tensors in for_each_tensor order as hex floats.
void write_model(const ModelParams& model, const std::filesystem::path& path);

ModelParams read_model(const std::filesystem::path& path);

}  // namespace slr

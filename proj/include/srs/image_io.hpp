#pragma once

#include <filesystem>
#include <span>

#include "srs/types.hpp"

namespace srs {

enum class PgmFormat { Ascii, Binary };  // P2, P5

/// 16-bit PGM; values clamped to [0, max(values)] and mapped linearly onto
/// [0, 65535]. An all-nonpositive image is written as zeros.
void write_pgm(const ImageGrid& image, const std::filesystem::path& path,
               PgmFormat format = PgmFormat::Binary);

/// Reads back a 16-bit PGM written by write_pgm (raw 0..maxval samples).
ImageGrid read_pgm_raw(const std::filesystem::path& path);

/// n lines of n comma-separated labels.
void write_labels_csv(const LabelMap& labels, int n, const std::filesystem::path& path);

}  // namespace srs

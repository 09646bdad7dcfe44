#pragma once

#include <filesystem>

#include "varigen/image.hpp"

namespace varigen::data {

/// Reads an 8- or 16-bit PNG (gray, gray+alpha, palette, RGB or RGBA) into an
/// ImageTensor with values in [0,1]. Alpha is dropped; palette images expand
/// to RGB. Throws DecodeFailure on malformed files.
ImageTensor read_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG (1 or 3 channels). Values are clamped to [0,1] and
/// rounded; write-then-read round-trips 8-bit data exactly.
void write_image(const std::filesystem::path& path, const ImageTensor& image);

}  // namespace varigen::data

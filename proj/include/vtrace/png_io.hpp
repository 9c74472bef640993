#pragma once

#include <string>

#include "vtrace/core.hpp"

namespace vtrace {

// Reads a PNG into an 8-bit RGB frame. Grayscale, palette, 16-bit, and
// alpha inputs are expanded or stripped to RGB. Throws an io error on
// missing or malformed files.
Frame read_png(const std::string& path, int index = 0);

// Writes the frame as an 8-bit RGB PNG.
void write_png(const std::string& path, const Frame& frame);

}  // namespace vtrace

#pragma once

#include "gpm/core.hpp"

#include <string>
#include <vector>

namespace gpm {

// Single-channel 32-bit float TIFF, uncompressed, little-endian. The pixel
// pitch round-trips through an ImageDescription tag ("pixel_m=<value>");
// X/YResolution are also written for viewers. The reader handles single- or
// multi-strip uncompressed float32 files.

void write_tiff_f32(const std::string& path, const RealImage& image);

/// pixel_m_override > 0 wins over file metadata; with neither available the
/// read fails.
RealImage read_tiff_f32(const std::string& path, double pixel_m_override = 0.0);

// Headerless little-endian float32, row-major; dims/pitch supplied by caller.
void write_raw_f32(const std::string& path, const RealImage& image);
RealImage read_raw_f32(const std::string& path, int width, int height, double pixel_m);

/// Dispatch on extension: .tif/.tiff vs .raw (anything else is an error).
void write_image(const std::string& path, const RealImage& image);
RealImage read_image(const std::string& path, int raw_width, int raw_height, double pixel_m);

// Comma-separated values, one header row, numeric cells rendered with
// round-trip precision.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

bool has_suffix(const std::string& s, const std::string& suffix);

}  // namespace gpm

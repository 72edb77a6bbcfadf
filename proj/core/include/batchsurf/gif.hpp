#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "batchsurf/image.hpp"

namespace batchsurf {

/// Encodes 8-bit grayscale frames as an animated GIF89a with a 256-entry
/// gray palette. All frames must share one size. delay_cs is the
/// per-frame delay in hundredths of a second.
std::vector<std::uint8_t> encode_gif(const std::vector<GrayImage>& frames, int delay_cs = 8);

void save_gif(const std::vector<GrayImage>& frames, const std::filesystem::path& path,
              int delay_cs = 8);

}  // namespace batchsurf

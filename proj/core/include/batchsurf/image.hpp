#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace batchsurf {

/// 8-bit grayscale raster, row 0 at the top.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // size width*height, row-major

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

GrayImage make_image(int width, int height, std::uint8_t fill = 0);

/// Binary PGM (P5) encoding of the image.
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

void save_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace batchsurf

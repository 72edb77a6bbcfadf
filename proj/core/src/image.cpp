#include "batchsurf/image.hpp"

#include <string>

#include "io_util.hpp"

namespace batchsurf {

GrayImage make_image(int width, int height, std::uint8_t fill) {
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<std::size_t>(width) * height, fill);
    return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
    std::string header = "P5\n" + std::to_string(image.width) + " " +
                         std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.pixels.begin(), image.pixels.end());
    return out;
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
    detail::write_file(path, encode_pgm(image));
}

}  // namespace batchsurf

#pragma once

#include "sceneloop/util/error.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sceneloop::scene {

// Row-major RGB8 raster.
class Image {
public:
    Image() = default;
    Image(int width, int height, std::array<std::uint8_t, 3> fill = {0, 0, 0});
    Image(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return width_ == 0 || height_ == 0; }

    std::span<const std::uint8_t> bytes() const { return pixels_; }
    std::span<std::uint8_t> bytes() { return pixels_; }

    std::uint8_t at(int x, int y, int channel) const { return pixels_[(static_cast<size_t>(y) * width_ + x) * 3 + channel]; }
    void set(int x, int y, std::array<std::uint8_t, 3> rgb);

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

class ImageError : public Error {
public:
    using Error::Error;
};

// 8-bit RGB PNG, no alpha, fixed compression settings (byte-stable output).
std::vector<std::uint8_t> encode_png(const Image& image);
// Accepts any 8/16-bit PNG; alpha is dropped, palettes and grey are expanded.
Image decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

} // namespace sceneloop::scene

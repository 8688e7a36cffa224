#include "sceneloop/scene/image.hpp"

#include <fmt/format.h>
#include <fstream>
#include <iterator>
#include <png.h>

namespace sceneloop::scene {

Image::Image(int width, int height, std::array<std::uint8_t, 3> fill) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw ImageError("image dimensions must be positive");
    pixels_.resize(static_cast<size_t>(width) * height * 3);
    for (size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = fill[0];
        pixels_[i + 1] = fill[1];
        pixels_[i + 2] = fill[2];
    }
}

Image::Image(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width <= 0 || height <= 0) throw ImageError("image dimensions must be positive");
    if (pixels_.size() != static_cast<size_t>(width) * height * 3) throw ImageError("pixel buffer size mismatch");
}

void Image::set(int x, int y, std::array<std::uint8_t, 3> rgb) {
    const size_t i = (static_cast<size_t>(y) * width_ + x) * 3;
    pixels_[i] = rgb[0];
    pixels_[i + 1] = rgb[1];
    pixels_[i + 2] = rgb[2];
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    if (image.empty()) throw ImageError("cannot encode an empty image");
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(image.width());
    desc.height = static_cast<png_uint_32>(image.height());
    desc.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    const auto pixels = image.bytes();
    if (!png_image_write_to_memory(&desc, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
        throw ImageError(fmt::format("png: {}", desc.message));
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&desc, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
        throw ImageError(fmt::format("png: {}", desc.message));
    }
    out.resize(size);
    return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw ImageError("not a PNG stream");
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size())) {
        throw ImageError(fmt::format("png: {}", desc.message));
    }
    desc.format = PNG_FORMAT_RGB;
    if (desc.width == 0 || desc.height == 0) {
        png_image_free(&desc);
        throw ImageError("png: zero-sized image");
    }
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(desc));
    if (!png_image_finish_read(&desc, nullptr, pixels.data(), 0, nullptr)) {
        png_image_free(&desc);
        throw ImageError(fmt::format("png: {}", desc.message));
    }
    return Image(static_cast<int>(desc.width), static_cast<int>(desc.height), std::move(pixels));
}

void write_png(const std::filesystem::path& path, const Image& image) {
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageError(fmt::format("cannot open {} for writing", path.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ImageError(fmt::format("failed writing {}", path.string()));
}

Image read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageError(fmt::format("cannot open {}", path.string()));
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

} // namespace sceneloop::scene

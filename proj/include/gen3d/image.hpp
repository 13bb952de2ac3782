#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gen3d {

/// Row-major float image, row 0 at the top, channels interleaved.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

    bool empty() const { return data.empty(); }
    std::size_t index(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * channels; }
    float& at(int x, int y, int c) { return data[index(x, y) + c]; }
    float at(int x, int y, int c) const { return data[index(x, y) + c]; }
    std::span<float> pixel(int x, int y) { return {data.data() + index(x, y), static_cast<std::size_t>(channels)}; }
    std::span<const float> pixel(int x, int y) const {
        return {data.data() + index(x, y), static_cast<std::size_t>(channels)};
    }
};

/// 8-bit PNG (1–4 channels) or 16-bit PNG (`bit_depth` 16) from interleaved samples.
struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> samples;
};

std::vector<std::uint8_t> encode_png(const PngImage& image);
PngImage decode_png(std::span<const std::uint8_t> bytes);

/// Quantizes `channels` of a float image (values clamped to [0,1]) to an 8-bit PNG.
/// Extra output channels beyond the source (e.g. alpha) are filled with 255.
std::vector<std::uint8_t> encode_png8(const Image& image, int out_channels);
/// Decodes an 8-bit or 16-bit PNG into floats in [0,1].
Image decode_png_float(std::span<const std::uint8_t> bytes);

/// Single-channel 16-bit grayscale PNG of a [0,1] buffer.
std::vector<std::uint8_t> encode_png16_gray(std::span<const float> values, int width, int height);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace gen3d

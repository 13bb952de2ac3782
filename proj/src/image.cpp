#include "gen3d/image.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gen3d/error.hpp"

namespace gen3d {

namespace {

int color_type_for(int channels) {
    switch (channels) {
        case 1: return PNG_COLOR_TYPE_GRAY;
        case 2: return PNG_COLOR_TYPE_GRAY_ALPHA;
        case 3: return PNG_COLOR_TYPE_RGB;
        case 4: return PNG_COLOR_TYPE_RGB_ALPHA;
        default: throw InputError("PNG: unsupported channel count " + std::to_string(channels));
    }
}

struct ReadCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t offset = 0;
};

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

void png_read_from_span(png_structp png, png_bytep data, png_size_t length) {
    auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cursor->offset + length > cursor->bytes.size()) {
        png_error(png, "truncated PNG stream");
    }
    std::memcpy(data, cursor->bytes.data() + cursor->offset, length);
    cursor->offset += length;
}

[[noreturn]] void png_error_throw(png_structp, png_const_charp message) { throw InputError(std::string("PNG: ") + message); }

void png_warning_ignore(png_structp, png_const_charp) {}

std::uint16_t quantize(float v, int max_value) {
    const float c = std::clamp(std::isfinite(v) ? v : 0.0f, 0.0f, 1.0f);
    return static_cast<std::uint16_t>(std::lround(c * static_cast<float>(max_value)));
}

constexpr std::string_view kBase64Alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::vector<std::uint8_t> encode_png(const PngImage& image) {
    if (image.width <= 0 || image.height <= 0) {
        throw InputError("PNG: empty image");
    }
    if (image.bit_depth != 8 && image.bit_depth != 16) {
        throw InputError("PNG: bit depth must be 8 or 16");
    }
    const int color_type = color_type_for(image.channels);
    const std::size_t row_samples = static_cast<std::size_t>(image.width) * image.channels;
    if (image.samples.size() != row_samples * image.height) {
        throw InputError("PNG: sample count does not match dimensions");
    }

    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
    png_infop info = png_create_info_struct(png);
    try {
        png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
        png_set_compression_level(png, 6);
        png_set_filter(png, 0, PNG_FILTER_NONE | PNG_FILTER_SUB | PNG_FILTER_UP);
        png_set_IHDR(png, info, image.width, image.height, image.bit_depth, color_type, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        const std::size_t bytes_per_sample = image.bit_depth == 16 ? 2 : 1;
        std::vector<std::uint8_t> row(row_samples * bytes_per_sample);
        for (int y = 0; y < image.height; ++y) {
            const std::uint16_t* src = image.samples.data() + row_samples * y;
            for (std::size_t i = 0; i < row_samples; ++i) {
                if (bytes_per_sample == 2) {
                    row[2 * i] = static_cast<std::uint8_t>(src[i] >> 8);  // PNG is big-endian
                    row[2 * i + 1] = static_cast<std::uint8_t>(src[i] & 0xff);
                } else {
                    row[i] = static_cast<std::uint8_t>(src[i]);
                }
            }
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
    return out;
}

PngImage decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw InputError("PNG: missing signature");
    }
    ReadCursor cursor{bytes, 0};
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
    png_infop info = png_create_info_struct(png);
    PngImage image;
    try {
        png_set_read_fn(png, &cursor, png_read_from_span);
        png_read_info(png, info);
        const int color_type = png_get_color_type(png, info);
        int bit_depth = png_get_bit_depth(png, info);
        if (color_type == PNG_COLOR_TYPE_PALETTE) {
            png_set_palette_to_rgb(png);
        }
        if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
            png_set_expand_gray_1_2_4_to_8(png);
        }
        if (png_get_valid(png, info, PNG_INFO_tRNS)) {
            png_set_tRNS_to_alpha(png);
        }
        if (bit_depth < 8) {
            bit_depth = 8;
        }
        png_read_update_info(png, info);
        image.width = static_cast<int>(png_get_image_width(png, info));
        image.height = static_cast<int>(png_get_image_height(png, info));
        image.channels = png_get_channels(png, info);
        image.bit_depth = png_get_bit_depth(png, info);

        const std::size_t row_bytes = png_get_rowbytes(png, info);
        std::vector<std::uint8_t> row(row_bytes);
        const std::size_t row_samples = static_cast<std::size_t>(image.width) * image.channels;
        image.samples.resize(row_samples * image.height);
        for (int y = 0; y < image.height; ++y) {
            png_read_row(png, row.data(), nullptr);
            std::uint16_t* dst = image.samples.data() + row_samples * y;
            for (std::size_t i = 0; i < row_samples; ++i) {
                dst[i] = image.bit_depth == 16 ? static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1])
                                               : row[i];
            }
        }
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

std::vector<std::uint8_t> encode_png8(const Image& image, int out_channels) {
    PngImage png;
    png.width = image.width;
    png.height = image.height;
    png.channels = out_channels;
    png.bit_depth = 8;
    png.samples.resize(static_cast<std::size_t>(image.width) * image.height * out_channels);
    std::size_t k = 0;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < out_channels; ++c) {
                png.samples[k++] = c < image.channels ? quantize(image.at(x, y, c), 255) : 255;
            }
        }
    }
    return encode_png(png);
}

Image decode_png_float(std::span<const std::uint8_t> bytes) {
    const PngImage png = decode_png(bytes);
    Image image(png.width, png.height, png.channels);
    const float scale = png.bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
    for (std::size_t i = 0; i < png.samples.size(); ++i) {
        image.data[i] = static_cast<float>(png.samples[i]) * scale;
    }
    return image;
}

std::vector<std::uint8_t> encode_png16_gray(std::span<const float> values, int width, int height) {
    PngImage png;
    png.width = width;
    png.height = height;
    png.channels = 1;
    png.bit_depth = 16;
    png.samples.reserve(values.size());
    for (float v : values) {
        png.samples.push_back(quantize(v, 65535));
    }
    return encode_png(png);
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += kBase64Alphabet[(n >> 6) & 63];
        out += kBase64Alphabet[n & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t n = bytes[i] << 16;
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += kBase64Alphabet[(n >> 18) & 63];
        out += kBase64Alphabet[(n >> 12) & 63];
        out += kBase64Alphabet[(n >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::array<int, 256> lookup{};
    lookup.fill(-1);
    for (std::size_t i = 0; i < kBase64Alphabet.size(); ++i) {
        lookup[static_cast<unsigned char>(kBase64Alphabet[i])] = static_cast<int>(i);
    }
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t buffer = 0;
    int bits = 0;
    for (char ch : text) {
        if (ch == '=') {
            break;
        }
        if (ch == '\n' || ch == '\r' || ch == ' ') {
            continue;
        }
        const int v = lookup[static_cast<unsigned char>(ch)];
        if (v < 0) {
            throw InputError("base64: invalid character");
        }
        buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((buffer >> bits) & 0xff));
        }
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open file: " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write file: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view text) {
    return fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace gen3d

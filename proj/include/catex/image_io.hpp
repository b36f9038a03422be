#pragma once

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include "catex/errors.hpp"
#include "catex/image.hpp"

namespace catex::io {

namespace detail {

// Rec. 601 luma weights, applied after normalizing each channel to [0,1].
inline double luminance(double r, double g, double b) {
    return std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0);
}

// PNM header tokens are separated by whitespace; '#' starts a comment
// running to end of line.
inline int next_pnm_token(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF)
        throw FormatError("truncated PNM header: " + path);
    std::string tok;
    while (c != EOF && !std::isspace(static_cast<unsigned char>(c)) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    try {
        std::size_t pos = 0;
        int value = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return value;
    } catch (const std::exception&) {
        throw FormatError("bad PNM header token '" + tok + "': " + path);
    }
}

inline GrayImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open image: " + path);

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P')
        throw FormatError("not a PNM file: " + path);
    const char kind = magic[1];
    const bool color = (kind == '3' || kind == '6');
    const bool ascii = (kind == '2' || kind == '3');
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
        throw FormatError("unsupported PNM variant P" + std::string(1, kind) + ": " + path);

    const int width = next_pnm_token(in, path);
    const int height = next_pnm_token(in, path);
    const int maxval = next_pnm_token(in, path);
    if (width < 1 || height < 1)
        throw ValidationError("zero-dimension image: " + path);
    if (maxval < 1 || maxval > 65535)
        throw FormatError("PNM maxval out of range: " + path);

    const std::size_t channels = color ? 3 : 1;
    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    std::vector<int> raw(count);

    if (ascii) {
        for (std::size_t i = 0; i < count; ++i)
            raw[i] = next_pnm_token(in, path);
    } else {
        // The token reader consumed the single whitespace byte after maxval,
        // so the stream now sits at the first payload byte.
        const int bytes_per = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(count * bytes_per);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size())
            throw FormatError("truncated PNM payload: " + path);
        for (std::size_t i = 0; i < count; ++i) {
            raw[i] = bytes_per == 2 ? (buf[2 * i] << 8) | buf[2 * i + 1] // big-endian per spec
                                    : buf[i];
        }
    }

    std::vector<double> pixels(static_cast<std::size_t>(width) * height);
    const double scale = 1.0 / maxval;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (color) {
            const int r = raw[3 * i], g = raw[3 * i + 1], b = raw[3 * i + 2];
            if (r > maxval || g > maxval || b > maxval)
                throw FormatError("PNM sample exceeds maxval: " + path);
            pixels[i] = luminance(r * scale, g * scale, b * scale);
        } else {
            if (raw[i] > maxval)
                throw FormatError("PNM sample exceeds maxval: " + path);
            pixels[i] = raw[i] * scale;
        }
    }
    return GrayImage(width, height, std::move(pixels));
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* file = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

inline GrayImage load_png(const std::string& path) {
    PngReadCloser ctx;
    ctx.file = std::fopen(path.c_str(), "rb");
    if (!ctx.file)
        throw IoError("cannot open image: " + path);

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png)
        throw IoError("libpng initialization failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info)
        throw IoError("libpng initialization failed");

    if (setjmp(png_jmpbuf(ctx.png)))
        throw FormatError("corrupt PNG: " + path);

    png_init_io(ctx.png, ctx.file);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 width = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 height = png_get_image_height(ctx.png, ctx.info);
    if (width == 0 || height == 0)
        throw ValidationError("zero-dimension image: " + path);

    // Normalize every variant to 8- or 16-bit gray or RGB without alpha.
    png_set_palette_to_rgb(ctx.png);
    if (png_get_color_type(ctx.png, ctx.info) == PNG_COLOR_TYPE_GRAY &&
        png_get_bit_depth(ctx.png, ctx.info) < 8)
        png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(ctx.png);
    png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const int depth = png_get_bit_depth(ctx.png, ctx.info);
    const int color_type = png_get_color_type(ctx.png, ctx.info);
    const bool color = color_type == PNG_COLOR_TYPE_RGB;
    if (!color && color_type != PNG_COLOR_TYPE_GRAY)
        throw FormatError("unsupported PNG color type: " + path);
    const int channels = color ? 3 : 1;
    const int bytes_per = depth == 16 ? 2 : 1;
    const double maxval = depth == 16 ? 65535.0 : 255.0;

    std::vector<unsigned char> rowbuf(static_cast<std::size_t>(width) * channels * bytes_per);
    std::vector<double> pixels(static_cast<std::size_t>(width) * height);
    for (png_uint_32 y = 0; y < height; ++y) {
        png_read_row(ctx.png, rowbuf.data(), nullptr);
        for (png_uint_32 x = 0; x < width; ++x) {
            auto sample = [&](int c) {
                const std::size_t base = (static_cast<std::size_t>(x) * channels + c) * bytes_per;
                int v = rowbuf[base];
                if (bytes_per == 2) v = (v << 8) | rowbuf[base + 1];
                return v / maxval;
            };
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            pixels[i] = color ? luminance(sample(0), sample(1), sample(2)) : sample(0);
        }
    }
    png_read_end(ctx.png, nullptr);
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

} // namespace detail

/// Decodes a raster image into a normalized GrayImage. Accepts PGM/PPM
/// (P2/P3/P5/P6, maxval up to 65535) and PNG. Multi-channel inputs are
/// reduced with 0.299 R + 0.587 G + 0.114 B; integer samples are divided
/// by the format's maximum value.
inline GrayImage load_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe)
        throw IoError("cannot open image: " + path.string());
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();

    if (magic[0] == 'P' && magic[1] >= '1' && magic[1] <= '6')
        return detail::load_pnm(path.string());
    if (magic[0] == 0x89 && magic[1] == 'P')
        return detail::load_png(path.string());
    throw FormatError("unsupported image format: " + path.string());
}

/// Writes an 8-bit binary PGM, rounding each value to the nearest level.
inline void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write image: " + path.string());
    out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
    std::vector<unsigned char> buf(image.size());
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = static_cast<unsigned char>(std::lround(image.data()[i] * 255.0));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw IoError("cannot write image: " + path.string());
}

} // namespace catex::io

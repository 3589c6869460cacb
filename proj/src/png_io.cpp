#include "aqua/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

namespace aqua {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

void read_rows(const std::string& path, int transforms, PngReader& ctx,
               std::vector<std::vector<png_byte>>& rows, png_uint_32& width, png_uint_32& height,
               int& bit_depth, int& channels) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw PngError("cannot open PNG: " + path);
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) throw PngError("libpng init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw PngError("failed to decode PNG: " + path);

    png_init_io(ctx.png, fp.get());
    png_read_info(ctx.png, ctx.info);
    png_set_expand(ctx.png);
    if (transforms & PNG_TRANSFORM_STRIP_ALPHA) png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    width = png_get_image_width(ctx.png, ctx.info);
    height = png_get_image_height(ctx.png, ctx.info);
    bit_depth = png_get_bit_depth(ctx.png, ctx.info);
    channels = png_get_channels(ctx.png, ctx.info);

    rows.assign(height, std::vector<png_byte>(png_get_rowbytes(ctx.png, ctx.info)));
    std::vector<png_bytep> row_ptrs(height);
    for (png_uint_32 y = 0; y < height; ++y) row_ptrs[y] = rows[y].data();
    png_read_image(ctx.png, row_ptrs.data());
    png_read_end(ctx.png, nullptr);
}

double sample_at(const std::vector<png_byte>& row, int bit_depth, int channels, png_uint_32 x,
                 int c) {
    if (c >= channels) c = channels - 1; // gray: replicate
    if (bit_depth == 16) {
        const std::size_t off = (static_cast<std::size_t>(x) * channels + c) * 2;
        const unsigned v = (unsigned(row[off]) << 8) | row[off + 1]; // network byte order
        return static_cast<double>(v) / 65535.0;
    }
    return static_cast<double>(row[static_cast<std::size_t>(x) * channels + c]) / 255.0;
}

void write_rows(const std::string& path, png_uint_32 width, png_uint_32 height, int bit_depth,
                int color_type, const std::vector<std::vector<png_byte>>& rows) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw PngError("cannot open PNG for writing: " + path);
    PngWriter ctx;
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.png || !ctx.info) throw PngError("libpng init failed");
    if (setjmp(png_jmpbuf(ctx.png))) throw PngError("failed to encode PNG: " + path);

    png_init_io(ctx.png, fp.get());
    png_set_compression_level(ctx.png, 6);
    png_set_IHDR(ctx.png, ctx.info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    std::vector<png_bytep> row_ptrs(height);
    for (png_uint_32 y = 0; y < height; ++y)
        row_ptrs[y] = const_cast<png_bytep>(rows[y].data());
    png_write_image(ctx.png, row_ptrs.data());
    png_write_end(ctx.png, nullptr);
}

png_byte quantize8(double v) {
    return static_cast<png_byte>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

} // namespace

RgbImage read_image_png(const std::string& path) {
    PngReader ctx;
    std::vector<std::vector<png_byte>> rows;
    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, channels = 0;
    read_rows(path, PNG_TRANSFORM_STRIP_ALPHA, ctx, rows, width, height, bit_depth, channels);

    RgbImage img(height, width);
    for (png_uint_32 y = 0; y < height; ++y) {
        for (png_uint_32 x = 0; x < width; ++x) {
            img.r(y, x) = sample_at(rows[y], bit_depth, channels, x, 0);
            img.g(y, x) = sample_at(rows[y], bit_depth, channels, x, 1);
            img.b(y, x) = sample_at(rows[y], bit_depth, channels, x, 2);
        }
    }
    return img;
}

void write_image_png(const std::string& path, const RgbImage& img) {
    const auto height = static_cast<png_uint_32>(img.rows());
    const auto width = static_cast<png_uint_32>(img.cols());
    std::vector<std::vector<png_byte>> rows(height, std::vector<png_byte>(width * 3));
    for (png_uint_32 y = 0; y < height; ++y) {
        for (png_uint_32 x = 0; x < width; ++x) {
            rows[y][x * 3 + 0] = quantize8(img.r(y, x));
            rows[y][x * 3 + 1] = quantize8(img.g(y, x));
            rows[y][x * 3 + 2] = quantize8(img.b(y, x));
        }
    }
    write_rows(path, width, height, 8, PNG_COLOR_TYPE_RGB, rows);
}

Plane read_gray16_png(const std::string& path) {
    PngReader ctx;
    std::vector<std::vector<png_byte>> rows;
    png_uint_32 width = 0, height = 0;
    int bit_depth = 0, channels = 0;
    read_rows(path, PNG_TRANSFORM_STRIP_ALPHA, ctx, rows, width, height, bit_depth, channels);

    Plane plane(height, width);
    for (png_uint_32 y = 0; y < height; ++y)
        for (png_uint_32 x = 0; x < width; ++x)
            plane(y, x) = sample_at(rows[y], bit_depth, channels, x, 0);
    return plane;
}

void write_gray16_png(const std::string& path, const Plane& plane) {
    const auto height = static_cast<png_uint_32>(plane.rows());
    const auto width = static_cast<png_uint_32>(plane.cols());
    std::vector<std::vector<png_byte>> rows(height, std::vector<png_byte>(width * 2));
    for (png_uint_32 y = 0; y < height; ++y) {
        for (png_uint_32 x = 0; x < width; ++x) {
            const auto v = static_cast<unsigned>(
                std::lround(std::clamp(plane(y, x), 0.0, 1.0) * 65535.0));
            rows[y][x * 2 + 0] = static_cast<png_byte>(v >> 8);
            rows[y][x * 2 + 1] = static_cast<png_byte>(v & 0xff);
        }
    }
    write_rows(path, width, height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

} // namespace aqua

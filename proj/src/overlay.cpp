#include "scribkit/overlay.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace scribkit {

const std::array<Rgb, 12>& overlay_palette() {
    static const std::array<Rgb, 12> palette = {{
        {245, 245, 245}, // background scribbles
        {230, 25, 75},   // red
        {60, 180, 75},   // green
        {0, 130, 200},   // blue
        {255, 225, 25},  // yellow
        {245, 130, 48},  // orange
        {145, 30, 180},  // purple
        {70, 240, 240},  // cyan
        {240, 50, 230},  // magenta
        {210, 245, 60},  // lime
        {250, 190, 212}, // pink
        {0, 128, 128},   // teal
    }};
    return palette;
}

Rgb palette_color(uint32_t class_id) {
    return overlay_palette()[class_id % 12];
}

RgbImage render_overlay(const LabelSlice& dense, const LabelSlice& scribbles,
                        uint32_t scribble_ignore) {
    if (dense.extents != scribbles.extents)
        throw std::invalid_argument("overlay: slice grids differ");

    constexpr Rgb gray{128, 128, 128};
    constexpr double alpha = 0.35;

    RgbImage img;
    img.width = dense.extents[0];
    img.height = dense.extents[1];
    img.pixels.resize(static_cast<size_t>(img.width) * img.height * 3);

    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            Rgb color = gray;
            const uint32_t d = dense.at(x, y);
            if (d != 0) {
                const Rgb fill = palette_color(d);
                for (int k = 0; k < 3; ++k)
                    color[static_cast<size_t>(k)] = static_cast<uint8_t>(
                        gray[static_cast<size_t>(k)] * (1.0 - alpha) +
                        fill[static_cast<size_t>(k)] * alpha + 0.5);
            }
            const uint32_t s = scribbles.at(x, y);
            if (s != scribble_ignore) color = palette_color(s);
            const size_t i = (static_cast<size_t>(y) * img.width + x) * 3;
            img.pixels[i] = color[0];
            img.pixels[i + 1] = color[1];
            img.pixels[i + 2] = color[2];
        }
    }
    return img;
}

void write_png(const RgbImage& img, const std::string& path) {
    std::unique_ptr<FILE, decltype(&std::fclose)> fp(std::fopen(path.c_str(), "wb"),
                                                     &std::fclose);
    if (!fp) throw std::runtime_error("png: cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png: init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png: init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png: write failed for " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() +
                                                 static_cast<size_t>(y) * img.width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace scribkit

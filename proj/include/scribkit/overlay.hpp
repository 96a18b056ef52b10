#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scribkit/volume.hpp"

namespace scribkit {

using Rgb = std::array<uint8_t, 3>;

/// Fixed 12-color palette; class c maps to entry c % 12. Entry 0 (the
/// background class) is near-white so it stays distinct from the gray canvas.
const std::array<Rgb, 12>& overlay_palette();

Rgb palette_color(uint32_t class_id);

/// Row-major RGB image, row 0 at the top.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels; // 3 bytes per pixel

    Rgb at(int x, int y) const {
        const size_t i = (static_cast<size_t>(y) * width + x) * 3;
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
};

/// Dense labels as translucent fills over a gray canvas, scribble pixels in
/// saturated palette colors, scribble-ignore transparent.
RgbImage render_overlay(const LabelSlice& dense, const LabelSlice& scribbles,
                        uint32_t scribble_ignore);

void write_png(const RgbImage& img, const std::string& path);

} // namespace scribkit

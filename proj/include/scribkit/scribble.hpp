#pragma once

#include <string_view>
#include <vector>

#include "scribkit/config.hpp"
#include "scribkit/geometry.hpp"
#include "scribkit/rng.hpp"
#include "scribkit/volume.hpp"

namespace scribkit {

/// Scribble type tags used for RNG stream derivation.
enum class ScribbleKind : int { interior = 0, border = 1 };

/// Curve-shaped annotation strictly inside the class region: a rasterized
/// clamped NURBS through randomly chosen interior points. Degenerate inputs
/// (empty mask, all blobs below min_component_pixels) yield an empty set.
Mask2D interior_scribble(const Mask2D& class_mask, const ScribbleConfig& cfg, ScribbleRng rng);

/// Annotation hugging the class border: a random arc of the traced boundary,
/// pushed inward by smoothly interpolated random offsets. Degenerate inputs
/// yield an empty set.
Mask2D border_scribble(const Mask2D& class_mask, const ScribbleConfig& cfg, ScribbleRng rng);

/// Generates both scribble types for every requested class present on the
/// slice; pixels claimed by no scribble get ignore_label. Classes absent
/// from the slice are skipped.
LabelSlice generate_slice(const LabelSlice& slice, const std::vector<uint32_t>& classes,
                          const ScribbleConfig& cfg, uint64_t master_seed,
                          std::string_view volume_id, uint32_t ignore_label);

/// Runs generate_slice along cfg.slice_axis over the whole volume.
/// Deterministic given (v, cfg, volume_id); grid metadata is copied from v.
LabelVolume generate_volume(const LabelVolume& v, const ScribbleConfig& cfg,
                            std::string_view volume_id = "");

} // namespace scribkit

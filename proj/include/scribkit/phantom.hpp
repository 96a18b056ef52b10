#pragma once

#include <array>
#include <string>
#include <vector>

#include "scribkit/rng.hpp"
#include "scribkit/volume.hpp"

namespace scribkit {

/// Synthetic label-volume description: geometric shapes painted in order,
/// later shapes overwriting earlier ones. Class ids must be contiguous
/// from 1 (0 is background).
struct PhantomSpec {
    enum class ShapeType { sphere, box, ellipsoid };

    struct Shape {
        ShapeType type = ShapeType::sphere;
        uint32_t class_id = 1;
        std::array<double, 3> center{0, 0, 0};
        std::array<double, 3> radii{1, 1, 1}; // box: half-widths
    };

    std::array<int, 3> grid{48, 48, 48};
    std::array<float, 3> spacing{1.0f, 1.0f, 1.0f};
    std::vector<Shape> shapes;

    void validate() const;

    /// A three-class spec (sphere, box, ellipsoid) that fits a 48^3 grid.
    static PhantomSpec builtin_default();
};

PhantomSpec load_phantom_spec(const std::string& path);
PhantomSpec parse_phantom_spec(const std::string& json_text);
std::string serialize_phantom_spec(const PhantomSpec& spec);

/// Voxelizes the spec (a voxel belongs to a shape when its center does).
/// Throws when a shape produces an empty class, naming the class.
LabelVolume synthesize_phantom(const PhantomSpec& spec);

/// Randomized variant: jitters shape centers by up to +-2 voxels and radii
/// by up to +-1% before voxelizing.
LabelVolume synthesize_phantom_jittered(const PhantomSpec& spec, ScribbleRng& rng);

} // namespace scribkit

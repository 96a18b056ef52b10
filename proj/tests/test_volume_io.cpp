#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "scribkit/nifti.hpp"
#include "scribkit/rng.hpp"
#include "scribkit/volume.hpp"

using namespace scribkit;
namespace fs = std::filesystem;

#ifndef SCRIBKIT_FIXTURE_DIR
#error "SCRIBKIT_FIXTURE_DIR must be defined by the build"
#endif

namespace {

const fs::path kFixtures = SCRIBKIT_FIXTURE_DIR;

fs::path temp_file(const std::string& name) {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "scribkit_io_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir / name;
}

LabelVolume random_volume(ScribbleRng& rng, uint32_t max_label) {
    const std::array<int, 3> dims = {2 + static_cast<int>(rng.bounded(7)),
                                     2 + static_cast<int>(rng.bounded(7)),
                                     2 + static_cast<int>(rng.bounded(7))};
    const std::array<float, 3> spacing = {static_cast<float>(rng.uniform(0.3, 4.0)),
                                          static_cast<float>(rng.uniform(0.3, 4.0)),
                                          static_cast<float>(rng.uniform(0.3, 4.0))};
    LabelVolume v = LabelVolume::create(dims, spacing, 0, default_ignore_label(max_label + 1));
    for (auto& l : v.data) l = static_cast<uint32_t>(rng.bounded(max_label + 1));
    v.orient.qoffset = {static_cast<float>(rng.uniform(-50, 50)),
                        static_cast<float>(rng.uniform(-50, 50)),
                        static_cast<float>(rng.uniform(-50, 50))};
    for (int i = 0; i < 3; ++i) v.orient.srow[i][3] = v.orient.qoffset[i];
    return v;
}

// expected fixture content, mirrors make_fixtures.py
uint32_t fixture_label(int x, int y, int z) {
    return static_cast<uint32_t>((x + 2 * y + 3 * z) % 5);
}

void check_fixture_volume(const LabelVolume& v) {
    REQUIRE(v.dims == std::array<int, 3>{6, 5, 4});
    CHECK(v.spacing[0] == doctest::Approx(1.5));
    CHECK(v.spacing[1] == doctest::Approx(2.0));
    CHECK(v.spacing[2] == doctest::Approx(2.5));
    for (int z = 0; z < 4; ++z)
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 6; ++x) CHECK(v.at(x, y, z) == fixture_label(x, y, z));
}

} // namespace

TEST_SUITE_BEGIN("volume_io");

TEST_CASE("write emits the fixed header constants") {
    LabelVolume v = LabelVolume::create({4, 4, 4}, {1, 1, 1});
    for (size_t i = 0; i < v.data.size(); ++i) v.data[i] = static_cast<uint32_t>(i % 4);
    const fs::path path = temp_file("constants.nii");
    write_nifti(v, path.string());

    std::ifstream f(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(f)), {});
    REQUIRE(bytes.size() == 348 + 4 + 64);

    int32_t sizeof_hdr;
    std::memcpy(&sizeof_hdr, bytes.data(), 4);
    CHECK(sizeof_hdr == 348);
    CHECK(std::memcmp(bytes.data() + 344, "n+1\0", 4) == 0);
    int16_t datatype;
    std::memcpy(&datatype, bytes.data() + 70, 2);
    CHECK(datatype == 2); // max label 3 and ignore 255 fit 8 bits

    const LabelVolume back = read_nifti(path.string());
    CHECK(back.dims == v.dims);
    CHECK(back.data == v.data);
}

TEST_CASE("write-read round trip is the identity") {
    ScribbleRng rng(7);
    for (int t = 0; t < 20; ++t) {
        const uint32_t max_label = t % 3 == 0 ? 3u : (t % 3 == 1 ? 300u : 70000u);
        const LabelVolume v = random_volume(rng, max_label);
        const fs::path path =
            temp_file("roundtrip_" + std::to_string(t) + (t % 2 ? ".nii.gz" : ".nii"));
        write_nifti(v, path.string());
        const LabelVolume back = read_nifti(path.string());

        CHECK(back.dims == v.dims);
        CHECK(back.data == v.data);
        CHECK(back.spacing == v.spacing);
        const Affine a = v.affine(), b = back.affine();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(a[i][j] == b[i][j]);
        CHECK(back.orient == v.orient);
        CHECK(back.ignore_label == v.ignore_label);
    }
}

TEST_CASE("labels above 65535 are stored 32-bit, not truncated") {
    LabelVolume v = LabelVolume::create({3, 3, 3}, {1, 1, 1}, 0, 0xFFFFFFFFu);
    v.data[13] = 70000;
    const fs::path path = temp_file("wide.nii");
    write_nifti(v, path.string());
    const LabelVolume back = read_nifti(path.string());
    CHECK(back.data[13] == 70000);

    std::ifstream f(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(f)), {});
    int16_t datatype;
    std::memcpy(&datatype, bytes.data() + 70, 2);
    CHECK(datatype == 768); // uint32
}

TEST_CASE("gzip output starts with the gzip magic and decodes") {
    LabelVolume v = LabelVolume::create({4, 3, 2}, {1, 1, 1}, 1);
    const fs::path path = temp_file("zipped.nii.gz");
    write_nifti(v, path.string());
    std::ifstream f(path, std::ios::binary);
    unsigned char magic[2];
    f.read(reinterpret_cast<char*>(magic), 2);
    CHECK(magic[0] == 0x1f);
    CHECK(magic[1] == 0x8b);
    CHECK(read_nifti(path.string()).data == v.data);
}

TEST_CASE("fixtures from an independent writer decode identically") {
    check_fixture_volume(read_nifti((kFixtures / "ref_uint8.nii").string()));
    check_fixture_volume(read_nifti((kFixtures / "ref_uint8.nii.gz").string()));
    // byte-swapped (big-endian) variant
    check_fixture_volume(read_nifti((kFixtures / "ref_int16_be.nii").string()));
    // float storage with near-integer values and a 368-byte vox_offset
    check_fixture_volume(read_nifti((kFixtures / "ref_float32.nii").string()));
    // 64-bit integer storage
    check_fixture_volume(read_nifti((kFixtures / "ref_int64.nii").string()));
}

TEST_CASE("2D files read as single-slice volumes") {
    const LabelVolume v = read_nifti((kFixtures / "ref_2d.nii").string());
    REQUIRE(v.dims == std::array<int, 3>{6, 5, 1});
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 6; ++x) CHECK(v.at(x, y, 0) == fixture_label(x, y, 0));
}

TEST_CASE("scl_slope rescaling is applied on read") {
    const LabelVolume v = read_nifti((kFixtures / "ref_uint16_scaled.nii").string());
    REQUIRE(v.dims == std::array<int, 3>{6, 5, 4});
    for (int z = 0; z < 4; ++z)
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 6; ++x) CHECK(v.at(x, y, z) == 2 * fixture_label(x, y, z));
}

TEST_CASE("error paths: magic, truncation, probability maps, missing file") {
    CHECK_THROWS_WITH_AS(read_nifti((kFixtures / "bad_magic.nii").string()),
                         doctest::Contains("bad magic"), NiftiError);
    CHECK_THROWS_WITH_AS(read_nifti((kFixtures / "truncated.nii").string()),
                         doctest::Contains("truncated"), NiftiError);
    CHECK_THROWS_WITH_AS(read_nifti((kFixtures / "ref_float32_prob.nii").string()),
                         doctest::Contains("not near an integer"), NiftiError);
    CHECK_THROWS_WITH_AS(read_nifti((kFixtures / "ref_negative.nii").string()),
                         doctest::Contains("negative label"), NiftiError);
    CHECK_THROWS_AS(read_nifti("/nonexistent/nothing.nii"), NiftiError);
    CHECK_THROWS_AS(write_nifti(LabelVolume::create({2, 2, 2}, {1, 1, 1}),
                                "/nonexistent/dir/out.nii"),
                    NiftiError);
}

TEST_CASE("ignore-label inference") {
    LabelVolume v = LabelVolume::create({3, 3, 3}, {1, 1, 1}, 0, 255);
    v.data[0] = 2;
    v.data[1] = 255; // scribble-style payload containing the sentinel
    const fs::path path = temp_file("sentinel.nii");
    write_nifti(v, path.string());
    CHECK(read_nifti(path.string()).ignore_label == 255);
    CHECK(read_nifti(path.string(), 7u).ignore_label == 7);

    LabelVolume dense = LabelVolume::create({3, 3, 3}, {1, 1, 1}, 0, 255);
    dense.data[5] = 4; // plain labels 0..4
    write_nifti(dense, temp_file("dense.nii").string());
    CHECK(read_nifti(temp_file("dense.nii").string()).ignore_label == 255);
}

TEST_CASE("slice_extract returns the fixed plane; insert is its inverse") {
    ScribbleRng rng(9);
    LabelVolume v = LabelVolume::create({4, 4, 4}, {1, 1, 1});
    for (auto& l : v.data) l = static_cast<uint32_t>(rng.bounded(5));

    const LabelSlice s = slice_extract(v, 2, 0);
    REQUIRE(s.extents == std::array<int, 2>{4, 4});
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) CHECK(s.at(x, y) == v.at(x, y, 0));

    for (int axis = 0; axis < 3; ++axis) {
        LabelVolume w = v;
        LabelSlice plane = slice_extract(v, axis, 1);
        for (auto& l : plane.data) l = 9;
        slice_insert(w, plane);
        const LabelSlice back = slice_extract(w, axis, 1);
        CHECK(back.data == plane.data);
        // all other voxels untouched
        std::array<int, 3> p{};
        for (p[0] = 0; p[0] < 4; ++p[0])
            for (p[1] = 0; p[1] < 4; ++p[1])
                for (p[2] = 0; p[2] < 4; ++p[2])
                    if (p[axis] != 1)
                        CHECK(w.at(p[0], p[1], p[2]) == v.at(p[0], p[1], p[2]));
    }
}

TEST_CASE("slices along any axis concatenate back to the volume") {
    ScribbleRng rng(10);
    LabelVolume v = LabelVolume::create({5, 3, 4}, {1, 1, 1});
    for (auto& l : v.data) l = static_cast<uint32_t>(rng.bounded(7));
    for (int axis = 0; axis < 3; ++axis) {
        LabelVolume rebuilt = LabelVolume::create(v.dims, v.spacing, 99);
        for (int i = 0; i < v.dims[axis]; ++i) slice_insert(rebuilt, slice_extract(v, axis, i));
        CHECK(rebuilt.data == v.data);
    }
}

TEST_CASE("slice_extract rejects out-of-range indices") {
    const LabelVolume v = LabelVolume::create({4, 4, 4}, {1, 1, 1});
    CHECK_THROWS_AS(slice_extract(v, 2, 4), std::out_of_range);
    CHECK_THROWS_AS(slice_extract(v, 3, 0), std::invalid_argument);
}

TEST_SUITE_END();

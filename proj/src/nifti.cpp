#include "scribkit/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace scribkit {

namespace {

// On-disk NIfTI-1 header. Natural alignment gives exactly 348 bytes.
struct Nifti1Header {
    int32_t sizeof_hdr;
    char data_type[10];
    char db_name[18];
    int32_t extents;
    int16_t session_error;
    char regular;
    char dim_info;
    int16_t dim[8];
    float intent_p1;
    float intent_p2;
    float intent_p3;
    int16_t intent_code;
    int16_t datatype;
    int16_t bitpix;
    int16_t slice_start;
    float pixdim[8];
    float vox_offset;
    float scl_slope;
    float scl_inter;
    int16_t slice_end;
    char slice_code;
    char xyzt_units;
    float cal_max;
    float cal_min;
    float slice_duration;
    float toffset;
    int32_t glmax;
    int32_t glmin;
    char descrip[80];
    char aux_file[24];
    int16_t qform_code;
    int16_t sform_code;
    float quatern_b;
    float quatern_c;
    float quatern_d;
    float qoffset_x;
    float qoffset_y;
    float qoffset_z;
    float srow_x[4];
    float srow_y[4];
    float srow_z[4];
    char intent_name[16];
    char magic[4];
};
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");
static_assert(std::endian::native == std::endian::little,
              "codec assumes a little-endian host");

constexpr int16_t DT_UINT8 = 2;
constexpr int16_t DT_INT16 = 4;
constexpr int16_t DT_INT32 = 8;
constexpr int16_t DT_FLOAT32 = 16;
constexpr int16_t DT_FLOAT64 = 64;
constexpr int16_t DT_INT8 = 256;
constexpr int16_t DT_UINT16 = 512;
constexpr int16_t DT_UINT32 = 768;
constexpr int16_t DT_INT64 = 1024;
constexpr int16_t DT_UINT64 = 1280;

constexpr int16_t NIFTI_INTENT_LABEL = 1002;
constexpr char NIFTI_UNITS_MM = 2;

template <typename T>
void swap_bytes(T& v) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    std::reverse(p, p + sizeof(T));
}

void swap_header(Nifti1Header& h) {
    swap_bytes(h.sizeof_hdr);
    swap_bytes(h.extents);
    swap_bytes(h.session_error);
    for (auto& d : h.dim) swap_bytes(d);
    swap_bytes(h.intent_p1);
    swap_bytes(h.intent_p2);
    swap_bytes(h.intent_p3);
    swap_bytes(h.intent_code);
    swap_bytes(h.datatype);
    swap_bytes(h.bitpix);
    swap_bytes(h.slice_start);
    for (auto& p : h.pixdim) swap_bytes(p);
    swap_bytes(h.vox_offset);
    swap_bytes(h.scl_slope);
    swap_bytes(h.scl_inter);
    swap_bytes(h.slice_end);
    swap_bytes(h.cal_max);
    swap_bytes(h.cal_min);
    swap_bytes(h.slice_duration);
    swap_bytes(h.toffset);
    swap_bytes(h.glmax);
    swap_bytes(h.glmin);
    swap_bytes(h.qform_code);
    swap_bytes(h.sform_code);
    swap_bytes(h.quatern_b);
    swap_bytes(h.quatern_c);
    swap_bytes(h.quatern_d);
    swap_bytes(h.qoffset_x);
    swap_bytes(h.qoffset_y);
    swap_bytes(h.qoffset_z);
    for (auto& v : h.srow_x) swap_bytes(v);
    for (auto& v : h.srow_y) swap_bytes(v);
    for (auto& v : h.srow_z) swap_bytes(v);
}

struct GzCloser {
    void operator()(gzFile f) const {
        if (f) gzclose(f);
    }
};
using GzPtr = std::unique_ptr<gzFile_s, GzCloser>;

void read_exact(gzFile f, void* dst, size_t n, const std::string& path, const char* what) {
    size_t got = 0;
    auto* p = static_cast<unsigned char*>(dst);
    while (got < n) {
        const unsigned chunk =
            static_cast<unsigned>(std::min<size_t>(n - got, 1u << 28));
        const int r = gzread(f, p + got, chunk);
        if (r <= 0) throw NiftiError(path + ": truncated " + what);
        got += static_cast<size_t>(r);
    }
}

template <typename T>
uint32_t to_label(T raw, bool swapped, double slope, double inter, const std::string& path) {
    if (swapped) swap_bytes(raw);
    double v = static_cast<double>(raw);
    if (slope != 0.0 && (slope != 1.0 || inter != 0.0)) v = v * slope + inter;
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) throw NiftiError(path + ": non-finite value in label volume");
        const double r = std::nearbyint(v);
        if (std::abs(v - r) > 1e-3)
            throw NiftiError(path +
                             ": float value not near an integer (probability map "
                             "passed where labels expected?)");
        v = r;
    } else {
        if (v != std::nearbyint(v)) {
            // integer storage rescaled to a fraction
            const double r = std::nearbyint(v);
            if (std::abs(v - r) > 1e-3)
                throw NiftiError(path + ": scaled value not near an integer");
            v = r;
        }
    }
    if (v < 0.0) throw NiftiError(path + ": negative label");
    if (v > 4294967295.0) throw NiftiError(path + ": label exceeds 32-bit range");
    return static_cast<uint32_t>(v);
}

template <typename T>
void decode_payload(gzFile f, LabelVolume& vol, bool swapped, double slope, double inter,
                    const std::string& path) {
    const int64_t n = vol.voxel_count();
    std::vector<T> raw(static_cast<size_t>(n));
    read_exact(f, raw.data(), raw.size() * sizeof(T), path, "payload");
    vol.data.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i)
        vol.data[static_cast<size_t>(i)] = to_label(raw[static_cast<size_t>(i)], swapped, slope, inter, path);
}

} // namespace

LabelVolume read_nifti(const std::string& path, std::optional<uint32_t> ignore_label) {
    GzPtr f(gzopen(path.c_str(), "rb"));
    if (!f) throw NiftiError(path + ": cannot open file");
    gzbuffer(f.get(), 1 << 17);

    Nifti1Header h{};
    read_exact(f.get(), &h, sizeof(h), path, "header");

    bool swapped = false;
    if (h.sizeof_hdr != 348) {
        auto s = h.sizeof_hdr;
        swap_bytes(s);
        if (s != 348) throw NiftiError(path + ": not a NIfTI-1 file (sizeof_hdr != 348)");
        swapped = true;
        swap_header(h);
    }
    if (std::memcmp(h.magic, "n+1\0", 4) != 0)
        throw NiftiError(path + ": bad magic (expected single-file NIfTI-1 \"n+1\")");

    if (h.dim[0] < 1 || h.dim[0] > 7)
        throw NiftiError(path + ": invalid dimension count");
    for (int i = 4; i <= h.dim[0]; ++i)
        if (h.dim[i] > 1)
            throw NiftiError(path + ": volumes with a 4th dimension are not supported");

    LabelVolume vol;
    for (int i = 0; i < 3; ++i) {
        const int16_t d = i < h.dim[0] ? h.dim[i + 1] : 1;
        if (d < 1) throw NiftiError(path + ": non-positive extent");
        vol.dims[i] = d;
        const float p = h.pixdim[i + 1];
        vol.spacing[i] = p > 0.0f ? p : 1.0f;
    }
    vol.orient.qform_code = h.qform_code;
    vol.orient.sform_code = h.sform_code;
    vol.orient.qfac = h.pixdim[0] < 0.0f ? -1.0f : 1.0f;
    vol.orient.quatern = {h.quatern_b, h.quatern_c, h.quatern_d};
    vol.orient.qoffset = {h.qoffset_x, h.qoffset_y, h.qoffset_z};
    for (int j = 0; j < 4; ++j) {
        vol.orient.srow[0][j] = h.srow_x[j];
        vol.orient.srow[1][j] = h.srow_y[j];
        vol.orient.srow[2][j] = h.srow_z[j];
    }

    int64_t offset = static_cast<int64_t>(h.vox_offset);
    if (offset < 348) throw NiftiError(path + ": vox_offset below header size");
    for (int64_t skip = offset - 348; skip > 0;) {
        char buf[4096];
        const int chunk = static_cast<int>(std::min<int64_t>(skip, sizeof(buf)));
        if (gzread(f.get(), buf, chunk) != chunk)
            throw NiftiError(path + ": truncated extension block");
        skip -= chunk;
    }

    const double slope = h.scl_slope;
    const double inter = h.scl_inter;
    switch (h.datatype) {
        case DT_UINT8: decode_payload<uint8_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_INT8: decode_payload<int8_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_INT16: decode_payload<int16_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_UINT16: decode_payload<uint16_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_INT32: decode_payload<int32_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_UINT32: decode_payload<uint32_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_INT64: decode_payload<int64_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_UINT64: decode_payload<uint64_t>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_FLOAT32: decode_payload<float>(f.get(), vol, swapped, slope, inter, path); break;
        case DT_FLOAT64: decode_payload<double>(f.get(), vol, swapped, slope, inter, path); break;
        default:
            throw NiftiError(path + ": unsupported datatype " + std::to_string(h.datatype));
    }

    if (ignore_label) {
        vol.ignore_label = *ignore_label;
    } else {
        const uint32_t max_label =
            vol.data.empty() ? 0 : *std::max_element(vol.data.begin(), vol.data.end());
        if (max_label == 255u || max_label == 65535u || max_label == 0xFFFFFFFFu)
            vol.ignore_label = max_label;
        else
            vol.ignore_label = default_ignore_label(max_label + 1);
    }
    return vol;
}

namespace {

template <typename T>
std::vector<T> narrow_payload(const LabelVolume& v) {
    std::vector<T> out(v.data.size());
    for (size_t i = 0; i < v.data.size(); ++i) out[i] = static_cast<T>(v.data[i]);
    return out;
}

void fill_header(const LabelVolume& v, int16_t datatype, int16_t bitpix, Nifti1Header& h) {
    std::memset(&h, 0, sizeof(h));
    h.sizeof_hdr = 348;
    h.regular = 'r';
    h.dim[0] = 3;
    h.dim[1] = static_cast<int16_t>(v.dims[0]);
    h.dim[2] = static_cast<int16_t>(v.dims[1]);
    h.dim[3] = static_cast<int16_t>(v.dims[2]);
    for (int i = 4; i < 8; ++i) h.dim[i] = 1;
    h.intent_code = NIFTI_INTENT_LABEL;
    h.datatype = datatype;
    h.bitpix = bitpix;
    h.pixdim[0] = v.orient.qfac;
    for (int i = 0; i < 3; ++i) h.pixdim[i + 1] = v.spacing[i];
    h.vox_offset = 352.0f;
    h.scl_slope = 1.0f;
    h.scl_inter = 0.0f;
    h.xyzt_units = NIFTI_UNITS_MM;
    std::strncpy(h.descrip, "integer label volume", sizeof(h.descrip) - 1);
    h.qform_code = v.orient.qform_code;
    h.sform_code = v.orient.sform_code;
    h.quatern_b = v.orient.quatern[0];
    h.quatern_c = v.orient.quatern[1];
    h.quatern_d = v.orient.quatern[2];
    h.qoffset_x = v.orient.qoffset[0];
    h.qoffset_y = v.orient.qoffset[1];
    h.qoffset_z = v.orient.qoffset[2];
    for (int j = 0; j < 4; ++j) {
        h.srow_x[j] = v.orient.srow[0][j];
        h.srow_y[j] = v.orient.srow[1][j];
        h.srow_z[j] = v.orient.srow[2][j];
    }
    std::memcpy(h.magic, "n+1\0", 4);
}

} // namespace

void write_nifti(const LabelVolume& v, const std::string& path) {
    if (v.voxel_count() <= 0 || v.data.size() != static_cast<size_t>(v.voxel_count()))
        throw NiftiError(path + ": volume data does not match extents");
    for (int i = 0; i < 3; ++i)
        if (v.dims[i] > 32767) throw NiftiError(path + ": extent exceeds NIfTI-1 dim field");

    uint32_t max_value = v.ignore_label;
    for (uint32_t l : v.data) max_value = std::max(max_value, l);

    int16_t datatype;
    int16_t bitpix;
    std::vector<uint8_t> p8;
    std::vector<uint16_t> p16;
    std::vector<uint32_t> p32;
    const void* payload;
    size_t payload_bytes;
    if (max_value <= 0xFFu) {
        datatype = DT_UINT8;
        bitpix = 8;
        p8 = narrow_payload<uint8_t>(v);
        payload = p8.data();
        payload_bytes = p8.size();
    } else if (max_value <= 0xFFFFu) {
        datatype = DT_UINT16;
        bitpix = 16;
        p16 = narrow_payload<uint16_t>(v);
        payload = p16.data();
        payload_bytes = p16.size() * 2;
    } else {
        datatype = DT_UINT32;
        bitpix = 32;
        p32 = v.data;
        payload = p32.data();
        payload_bytes = p32.size() * 4;
    }

    Nifti1Header h;
    fill_header(v, datatype, bitpix, h);
    const char pad[4] = {0, 0, 0, 0}; // no extensions

    if (path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
        GzPtr f(gzopen(path.c_str(), "wb"));
        if (!f) throw NiftiError(path + ": cannot open file for writing");
        auto put = [&](const void* data, size_t n) {
            if (gzwrite(f.get(), data, static_cast<unsigned>(n)) != static_cast<int>(n))
                throw NiftiError(path + ": write failed");
        };
        put(&h, sizeof(h));
        put(pad, 4);
        put(payload, payload_bytes);
        if (gzclose(f.release()) != Z_OK) throw NiftiError(path + ": write failed on close");
    } else {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw NiftiError(path + ": cannot open file for writing");
        f.write(reinterpret_cast<const char*>(&h), sizeof(h));
        f.write(pad, 4);
        f.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
        if (!f) throw NiftiError(path + ": write failed");
    }
}

} // namespace scribkit

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "scribkit/volume.hpp"

namespace scribkit {

struct NiftiError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reads a single-file NIfTI-1 label volume (".nii" or ".nii.gz"; gzip is
/// detected from the stream, not the suffix). Byte-swapped files are
/// normalized. Float-stored values must be within 1e-3 of an integer.
///
/// ignore_label: when not given, it is inferred — the maximum present label
/// if that is one of the reserved sentinels (255, 65535, 2^32-1), otherwise
/// the default for the observed class count.
LabelVolume read_nifti(const std::string& path,
                       std::optional<uint32_t> ignore_label = std::nullopt);

/// Writes a standards-conformant single-file NIfTI-1 volume; gzip when the
/// path ends in ".gz". Labels are stored in the smallest unsigned width that
/// fits max(label, ignore_label). read_nifti inverts this exactly.
void write_nifti(const LabelVolume& v, const std::string& path);

} // namespace scribkit

#!/usr/bin/env python3
"""Builds the NIfTI-1 test fixtures by assembling header bytes directly with
struct.pack. Deliberately independent of the library under test; rerun to
regenerate the checked-in files."""

import gzip
import struct
import sys
from pathlib import Path

OUT = Path(__file__).parent


def header(dim, pixdim, datatype, bitpix, vox_offset=352.0, scl=(1.0, 0.0),
           srow=None, endian="<"):
    dim8 = [len(dim)] + list(dim) + [1] * (7 - len(dim))
    pixdim8 = [1.0] + list(pixdim) + [0.0] * (7 - len(pixdim))
    if srow is None:
        srow = [[pixdim[0], 0, 0, 0], [0, pixdim[1], 0, 0], [0, 0, pixdim[2], 0]]
    h = b""
    h += struct.pack(endian + "i", 348)                 # sizeof_hdr
    h += b"\0" * 10                                     # data_type
    h += b"\0" * 18                                     # db_name
    h += struct.pack(endian + "i", 0)                   # extents
    h += struct.pack(endian + "h", 0)                   # session_error
    h += b"r"                                           # regular
    h += b"\0"                                          # dim_info
    h += struct.pack(endian + "8h", *dim8)              # dim
    h += struct.pack(endian + "3f", 0, 0, 0)            # intent_p1..3
    h += struct.pack(endian + "h", 0)                   # intent_code
    h += struct.pack(endian + "h", datatype)            # datatype
    h += struct.pack(endian + "h", bitpix)              # bitpix
    h += struct.pack(endian + "h", 0)                   # slice_start
    h += struct.pack(endian + "8f", *pixdim8)           # pixdim
    h += struct.pack(endian + "f", vox_offset)          # vox_offset
    h += struct.pack(endian + "2f", *scl)               # scl_slope, scl_inter
    h += struct.pack(endian + "h", 0)                   # slice_end
    h += b"\0"                                          # slice_code
    h += struct.pack(endian + "b", 2)                   # xyzt_units (mm)
    h += struct.pack(endian + "4f", 0, 0, 0, 0)         # cal_max..toffset
    h += struct.pack(endian + "2i", 0, 0)               # glmax, glmin
    h += b"reference fixture".ljust(80, b"\0")          # descrip
    h += b"\0" * 24                                     # aux_file
    h += struct.pack(endian + "2h", 0, 1)               # qform_code, sform_code
    h += struct.pack(endian + "6f", 0, 0, 0, 0, 0, 0)   # quatern, qoffset
    for row in srow:
        h += struct.pack(endian + "4f", *row)
    h += b"\0" * 16                                     # intent_name
    h += b"n+1\0"                                       # magic
    assert len(h) == 348, len(h)
    return h


def label(x, y, z):
    return (x + 2 * y + 3 * z) % 5


def main():
    dim = (6, 5, 4)
    values = [label(x, y, z) for z in range(dim[2]) for y in range(dim[1])
              for x in range(dim[0])]

    # uint8, little-endian, plain and gzipped
    payload = struct.pack("<%dB" % len(values), *values)
    data = header(dim, (1.5, 2.0, 2.5), 2, 8) + b"\0" * 4 + payload
    (OUT / "ref_uint8.nii").write_bytes(data)
    with gzip.GzipFile(OUT / "ref_uint8.nii.gz", "wb", mtime=0) as f:
        f.write(data)

    # int16, big-endian with swapped header (tests byte-swap detection)
    payload = struct.pack(">%dh" % len(values), *values)
    data = header(dim, (1.5, 2.0, 2.5), 4, 16, endian=">") + b"\0" * 4 + payload
    (OUT / "ref_int16_be.nii").write_bytes(data)

    # float32 near-integer labels, stored after vox_offset 368 (16 pad bytes)
    payload = struct.pack("<%df" % len(values), *(v + 2e-4 for v in values))
    data = header(dim, (1.5, 2.0, 2.5), 16, 32, vox_offset=368.0) + b"\0" * 20 + payload
    (OUT / "ref_float32.nii").write_bytes(data)

    # float32 probability map: must be rejected
    payload = struct.pack("<%df" % len(values), *(v / 5.0 + 0.1 for v in values))
    data = header(dim, (1.5, 2.0, 2.5), 16, 32) + b"\0" * 4 + payload
    (OUT / "ref_float32_prob.nii").write_bytes(data)

    # int64 storage
    payload = struct.pack("<%dq" % len(values), *values)
    data = header(dim, (1.5, 2.0, 2.5), 1024, 64) + b"\0" * 4 + payload
    (OUT / "ref_int64.nii").write_bytes(data)

    # a 2D image (dim[0] = 2)
    plane = [label(x, y, 0) for y in range(dim[1]) for x in range(dim[0])]
    payload = struct.pack("<%dB" % len(plane), *plane)
    data = header(dim[:2], (1.5, 2.0, 1.0), 2, 8) + b"\0" * 4 + payload
    (OUT / "ref_2d.nii").write_bytes(data)

    # uint16 halves rescaled by scl_slope = 2
    payload = struct.pack("<%dH" % len(values), *values)
    data = header(dim, (1.5, 2.0, 2.5), 512, 16, scl=(2.0, 0.0)) + b"\0" * 4 + payload
    (OUT / "ref_uint16_scaled.nii").write_bytes(data)

    # int16 payload containing a negative value: not a label volume
    negatives = list(values)
    negatives[7] = -3
    payload = struct.pack("<%dh" % len(negatives), *negatives)
    data = header(dim, (1.5, 2.0, 2.5), 4, 16) + b"\0" * 4 + payload
    (OUT / "ref_negative.nii").write_bytes(data)

    # bad magic
    good = bytearray(header(dim, (1.5, 2.0, 2.5), 2, 8) + b"\0" * 4 +
                     struct.pack("<%dB" % len(values), *values))
    good[344:348] = b"abcd"
    (OUT / "bad_magic.nii").write_bytes(bytes(good))

    # truncated payload
    data = header(dim, (1.5, 2.0, 2.5), 2, 8) + b"\0" * 4 + payload[:10]
    (OUT / "truncated.nii").write_bytes(data)

    print("fixtures written to", OUT)
    return 0


if __name__ == "__main__":
    sys.exit(main())

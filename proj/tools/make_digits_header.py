#!/usr/bin/env python3
"""Regenerates include/gss/streams/digits8x8_data.hpp from scikit-learn's copy
of the UCI optical-recognition 8x8 handwritten digits (1797 images, 0..16)."""
import sys
from sklearn.datasets import load_digits

d = load_digits()
out = sys.argv[1] if len(sys.argv) > 1 else "include/gss/streams/digits8x8_data.hpp"
with open(out, "w") as f:
    f.write("#pragma once\n\n#include <array>\n#include <cstdint>\n\n")
    f.write("// Generated by tools/make_digits_header.py. Do not edit.\n")
    f.write("// UCI optical-recognition 8x8 digits: label followed by 64 intensities in 0..16.\n\n")
    f.write("namespace gss::streams::detail {\n\n")
    f.write(f"inline constexpr std::size_t kDigitsCount = {len(d.target)};\n")
    f.write("inline constexpr std::size_t kDigitsRow = 65;\n\n")
    f.write("inline constexpr std::array<std::uint8_t, kDigitsCount * kDigitsRow> kDigits = {\n")
    for x, y in zip(d.data.astype(int), d.target):
        f.write("    " + ",".join(str(v) for v in [int(y)] + list(x)) + ",\n")
    f.write("};\n\n}  // namespace gss::streams::detail\n")

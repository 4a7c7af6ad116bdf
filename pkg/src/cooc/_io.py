"""Low-level binary file helpers used by every on-disk format.

All formats are little-endian with an 8-byte magic string up front.
"""

import struct

from .errors import FormatError


def read_exact(f, n, path, what):
    """Read exactly n bytes or raise a FormatError at the current offset."""
    start = f.tell()
    data = f.read(n)
    if len(data) != n:
        raise FormatError(path, start, f"truncated {what}: wanted {n} bytes, got {len(data)}")
    return data


def expect_magic(f, magic, path):
    start = f.tell()
    data = f.read(len(magic))
    if data != magic:
        raise FormatError(path, start, f"bad magic {data!r}, expected {magic!r}")


def read_struct(f, fmt, path, what):
    size = struct.calcsize(fmt)
    return struct.unpack(fmt, read_exact(f, size, path, what))

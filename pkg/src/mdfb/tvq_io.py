"""Binary formats for sample matrices and description bitstreams.

Sample matrix (``TVQM``), 16-byte header then data::

    magic  b"TVQM"
    u32    rows      (vector dimension)
    u32    cols      (number of vectors)
    u32    reserved  (0)
    f64[rows * cols] little-endian, column-major (one vector after another)

Bitstream (``TVQB``), 16-byte header then one block per axis::

    magic  b"TVQB"
    u32    n_axes
    u32    n_vectors
    u32    reserved  (0)
    per axis: ceil(n_vectors / 8) bytes, bit l of the axis is
              byte l // 8, bit l % 8 (least significant first)

All integers are little-endian.
"""

import struct

import numpy as np

from .errors import ParameterError

_HEADER = struct.Struct("<4sIII")
MATRIX_MAGIC = b"TVQM"
BITS_MAGIC = b"TVQB"


def write_matrix(path, matrix):
    """Write an ``(rows, cols)`` float matrix."""
    m = np.asarray(matrix, dtype="<f8")
    if m.ndim != 2:
        raise ParameterError(f"expected a 2-D matrix, got shape {m.shape}")
    rows, cols = m.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MATRIX_MAGIC, rows, cols, 0))
        fh.write(np.asfortranarray(m).tobytes(order="F"))


def read_matrix(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ParameterError(f"{path}: truncated header")
    magic, rows, cols, _ = _HEADER.unpack_from(blob)
    if magic != MATRIX_MAGIC:
        raise ParameterError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 8 * rows * cols
    if len(blob) != expected:
        raise ParameterError(f"{path}: expected {expected} bytes, found {len(blob)}")
    data = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    return data.reshape((rows, cols), order="F").astype(float)


def write_bits(path, bits):
    """Write a boolean ``(n_axes, n_vectors)`` array of quantizer outputs."""
    b = np.asarray(bits, dtype=bool)
    if b.ndim != 2:
        raise ParameterError(f"expected a 2-D bit array, got shape {b.shape}")
    n_axes, n_vec = b.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BITS_MAGIC, n_axes, n_vec, 0))
        for row in b:
            fh.write(np.packbits(row, bitorder="little").tobytes())


def read_bits(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ParameterError(f"{path}: truncated header")
    magic, n_axes, n_vec, _ = _HEADER.unpack_from(blob)
    if magic != BITS_MAGIC:
        raise ParameterError(f"{path}: bad magic {magic!r}")
    per_axis = (n_vec + 7) // 8
    if len(blob) != _HEADER.size + n_axes * per_axis:
        raise ParameterError(f"{path}: size does not match header")
    raw = np.frombuffer(blob, dtype=np.uint8, offset=_HEADER.size).reshape(n_axes, per_axis)
    return np.unpackbits(raw, axis=1, count=n_vec, bitorder="little").astype(bool)

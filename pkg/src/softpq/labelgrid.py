"""Non-overlapping instance label images: the universal input type.

A label grid is an H x W array of instance ids with 0 as background. Every
pixel carries exactly one id, so masks cannot overlap by construction. Two
interchange formats are supported:

* binary PGM (P5): ASCII header ``P5\\n<width> <height>\\n<maxval>\\n`` with
  ``#`` comment lines allowed inside the header; one byte per sample for
  maxval <= 255, two bytes (big-endian) for 256..65535; row-major raster.
* ASCII matrix: one row per line, space-separated non-negative decimal
  integers, all rows the same length, trailing newline optional.

Ids up to 2**32 - 1 are accepted in memory; PGM output is limited to 65535
(the format's ceiling) and refuses larger ids explicitly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LabelGrid",
    "LabelStats",
    "LabelFormatError",
    "ShapeMismatchError",
    "read_label_image",
    "write_label_image",
    "relabel_sequential",
    "stats",
]

_MAX_ID = 2**32 - 1
_PGM_MAX = 65535
_WS = b" \t\r\n\x0b\x0c"


class LabelFormatError(ValueError):
    """Malformed label-image input (bad header, out-of-range sample, truncation)."""


class ShapeMismatchError(ValueError):
    """Two grids that must be aligned have different dimensions."""


@dataclass(frozen=True)
class LabelGrid:
    """Immutable 2D grid of instance ids (uint32, 0 = background)."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.labels)
        if arr.ndim != 2:
            raise ValueError(f"label grid must be 2D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"label grid must be at least 1x1, got {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"label grid must hold integers, got dtype {arr.dtype}")
        if arr.size and int(arr.min()) < 0:
            raise ValueError("label ids must be non-negative")
        if arr.size and int(arr.max()) > _MAX_ID:
            raise ValueError("label ids must fit in 32 bits")
        # zero-copy for uint32 C-contiguous input; the read-only flag goes on
        # a private view so the caller's own array is left untouched
        arr = np.ascontiguousarray(arr, dtype=np.uint32).view()
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    @property
    def height(self) -> int:
        return int(self.labels.shape[0])

    @property
    def width(self) -> int:
        return int(self.labels.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelGrid):
            return NotImplemented
        return self.labels.shape == other.labels.shape and bool(
            np.array_equal(self.labels, other.labels)
        )

    def __hash__(self) -> int:
        return hash((self.labels.shape, self.labels.tobytes()))


@dataclass(frozen=True)
class LabelStats:
    """Instance inventory of a grid: count, per-id pixel areas, sorted id list."""

    instance_count: int
    areas: dict[int, int] = field(default_factory=dict)
    id_list: tuple[int, ...] = ()


def require_same_shape(a: LabelGrid, b: LabelGrid) -> None:
    if a.labels.shape != b.labels.shape:
        raise ShapeMismatchError(
            f"grids have different dimensions: {a.height}x{a.width} vs {b.height}x{b.width}"
        )


# ---------------------------------------------------------------------------
# PGM (P5) codec


def _skip_ws_and_comments(data: bytes, pos: int) -> int:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c == ord("#"):
            nl = data.find(b"\n", pos)
            pos = n if nl < 0 else nl + 1
        elif c in _WS:
            pos += 1
        else:
            break
    return pos


def _read_token(data: bytes, pos: int, what: str) -> tuple[bytes, int, int]:
    pos = _skip_ws_and_comments(data, pos)
    if pos >= len(data):
        raise LabelFormatError(f"truncated header: {what} missing at byte offset {pos}")
    start = pos
    while pos < len(data) and data[pos] not in _WS and data[pos : pos + 1] != b"#":
        pos += 1
    return data[start:pos], start, pos


def _read_header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    tok, start, pos = _read_token(data, pos, what)
    if not tok.isdigit():
        raise LabelFormatError(
            f"malformed header: {what} {tok!r} at byte offset {start} is not a decimal integer"
        )
    return int(tok), pos

def _decode_pgm(data: bytes) -> np.ndarray:
    magic, start, pos = _read_token(data, 0, "magic number")
    if magic != b"P5":
        raise LabelFormatError(
            f"malformed header: expected magic 'P5' at byte offset {start}, got {magic!r}"
        )
    width, pos = _read_header_int(data, pos, "width")
    height, pos = _read_header_int(data, pos, "height")
    maxval, maxval_end = _read_header_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise LabelFormatError(f"malformed header: width {width} x height {height} invalid")
    if not 1 <= maxval <= _PGM_MAX:
        raise LabelFormatError(
            f"malformed header: maxval {maxval} outside 1..{_PGM_MAX} "
            f"(token ends at byte offset {maxval_end})"
        )
    if maxval_end >= len(data) or data[maxval_end] not in _WS:
        raise LabelFormatError(
            f"malformed header: expected single whitespace after maxval at byte offset {maxval_end}"
        )
    raster_start = maxval_end + 1
    bytes_per_sample = 1 if maxval <= 255 else 2
    need = width * height * bytes_per_sample
    raster = data[raster_start : raster_start + need]
    if len(raster) < need:
        raise LabelFormatError(
            f"truncated data: expected {need} raster bytes at byte offset {raster_start}, "
            f"got {len(raster)}"
        )
    dtype = np.dtype(">u2") if bytes_per_sample == 2 else np.dtype("u1")
    arr = np.frombuffer(raster, dtype=dtype).astype(np.uint32).reshape(height, width)
    if arr.size and int(arr.max()) > maxval:
        bad = int(np.argmax(arr.ravel() > maxval))
        raise LabelFormatError(
            f"sample out of range: value {int(arr.ravel()[bad])} > maxval {maxval} "
            f"at sample {bad} (byte offset {raster_start + bad * bytes_per_sample})"
        )
    return arr


def _encode_pgm(arr: np.ndarray) -> bytes:
    top = int(arr.max()) if arr.size else 0
    if top > _PGM_MAX:
        raise LabelFormatError(
            f"PGM cannot hold id {top}: the format caps samples at {_PGM_MAX}"
        )
    maxval = max(1, top)
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    return header + arr.astype(dtype).tobytes()


# ---------------------------------------------------------------------------
# ASCII matrix codec


def _decode_ascii(data: bytes) -> np.ndarray:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise LabelFormatError(
            f"malformed input: non-ASCII byte at byte offset {exc.start}"
        ) from exc
    rows: list[list[int]] = []
    width = -1
    offset = 0
    for line in text.splitlines(keepends=True):
        stripped = line.strip()
        content = line.rstrip("\r\n")
        if not stripped:
            if rows and offset + len(line) < len(text):
                raise LabelFormatError(
                    f"malformed input: blank row at byte offset {offset}"
                )
            offset += len(line)
            continue
        row: list[int] = []
        col = 0
        for tok in content.split():
            col = content.index(tok, col)
            if not tok.isdigit():
                raise LabelFormatError(
                    f"malformed sample {tok!r} at byte offset {offset + col}"
                )
            val = int(tok)
            if val > _MAX_ID:
                raise LabelFormatError(
                    f"sample out of range: {val} > {_MAX_ID} at byte offset {offset + col}"
                )
            row.append(val)
            col += len(tok)
        if width < 0:
            width = len(row)
        elif len(row) != width:
            raise LabelFormatError(
                f"malformed input: row {len(rows)} has {len(row)} samples, expected "
                f"{width} (row starts at byte offset {offset})"
            )
        rows.append(row)
        offset += len(line)
    if not rows:
        raise LabelFormatError("malformed input: no rows found")
    return np.array(rows, dtype=np.uint32)


def _encode_ascii(arr: np.ndarray) -> bytes:
    lines = [" ".join(str(int(v)) for v in row) for row in arr]
    return ("\n".join(lines) + "\n").encode("ascii")


# ---------------------------------------------------------------------------
# Public IO


_FORMAT_ALIASES = {
    "pgm": "pgm",
    "pgm-binary": "pgm",
    "p5": "pgm",
    "ascii": "ascii",
    "ascii-matrix": "ascii",
    "txt": "ascii",
}


def _canon_format(fmt: str) -> str:
    key = fmt.strip().lower()
    if key not in _FORMAT_ALIASES:
        raise ValueError(f"unknown label-image format {fmt!r}; use 'pgm' or 'ascii'")
    return _FORMAT_ALIASES[key]


def read_label_image(source: bytes | io.IOBase, format: str = "pgm") -> LabelGrid:
    """Decode a label grid from bytes or a binary stream.

    Raises LabelFormatError naming the byte offset for malformed headers,
    out-of-range samples, or truncated data.
    """
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    data = bytes(data)
    fmt = _canon_format(format)
    arr = _decode_pgm(data) if fmt == "pgm" else _decode_ascii(data)
    return LabelGrid(arr)


def write_label_image(grid: LabelGrid, format: str = "pgm") -> bytes:
    """Encode a label grid to PGM (ids <= 65535) or ASCII-matrix bytes."""
    fmt = _canon_format(format)
    if fmt == "pgm":
        return _encode_pgm(grid.labels)
    return _encode_ascii(grid.labels)


def sniff_format(data: bytes) -> str:
    """Guess the on-disk format: 'pgm' when the P5 magic leads, else 'ascii'."""
    return "pgm" if data[:2] == b"P5" else "ascii"


# ---------------------------------------------------------------------------
# Operations


def relabel_sequential(grid: LabelGrid) -> LabelGrid:
    """Remap nonzero ids to 1..K in row-major first-occurrence order.

    Pixels share a label afterwards iff they shared one before; background
    stays 0; an already-sequential grid comes back identical.
    """
    flat = grid.labels.ravel()
    ids, first = np.unique(flat, return_index=True)
    nonzero = ids != 0
    ids_nz = ids[nonzero]
    first_nz = first[nonzero]
    if ids_nz.size == 0:
        return grid
    new_for_sorted = np.zeros(ids.size, dtype=np.uint32)
    order = np.argsort(first_nz, kind="stable")
    ranks = np.empty_like(order)
    ranks[order] = np.arange(1, ids_nz.size + 1)
    new_for_sorted[nonzero] = ranks
    remapped = new_for_sorted[np.searchsorted(ids, flat)]
    return LabelGrid(remapped.reshape(grid.labels.shape))


def stats(grid: LabelGrid) -> LabelStats:
    """Count instances and exact per-id pixel areas (background excluded)."""
    flat = grid.labels.ravel()
    ids, counts = np.unique(flat, return_counts=True)
    keep = ids != 0
    ids = ids[keep]
    counts = counts[keep]
    return LabelStats(
        instance_count=int(ids.size),
        areas={int(i): int(c) for i, c in zip(ids, counts)},
        id_list=tuple(int(i) for i in ids),
    )

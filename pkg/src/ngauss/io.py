"""CSV matrices and binary PGM (P5) images."""
import csv

import numpy as np

from .errors import ParseError

__all__ = ["read_csv", "write_csv", "read_pgm", "write_pgm"]


def write_csv(path, matrix, header=None):
    """Write a matrix with a header row; floats use shortest round-trip repr."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if header is None:
        header = [f"x{i + 1}" for i in range(matrix.shape[1])]
    if len(header) != matrix.shape[1]:
        raise ValueError("header length does not match column count")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in matrix:
            w.writerow([repr(float(v)) for v in row])


def read_csv(path):
    """Read a numeric CSV with a mandatory header row.

    Returns
    -------
    matrix : ndarray
    header : list of str
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file, header row required")
    header = rows[0]
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        vals = []
        for col, cell in enumerate(row):
            try:
                vals.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"{path}: line {lineno}, column {col + 1} ({header[col]!r}): "
                    f"non-numeric value {cell!r}") from None
        body.append(vals)
    if not body:
        raise ParseError(f"{path}: no data rows")
    return np.array(body, dtype=float), header


def _pgm_tokens(buf, count):
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(buf) and (buf[pos:pos + 1].isspace() or buf[pos:pos + 1] == b"#"):
            if buf[pos:pos + 1] == b"#":
                while pos < len(buf) and buf[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ParseError(f"truncated PGM header at byte {pos}")
        tokens.append((buf[start:pos], start))
    return tokens, pos


def read_pgm(path):
    """Read a binary P5 PGM into an ``h x w`` float array scaled to [0, 1]."""
    with open(path, "rb") as fh:
        buf = fh.read()
    try:
        tokens, pos = _pgm_tokens(buf, 4)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
    magic, _ = tokens[0]
    if magic != b"P5":
        raise ParseError(f"{path}: byte 0: expected magic 'P5', got {magic!r}")
    vals = []
    for tok, off in tokens[1:]:
        try:
            vals.append(int(tok))
        except ValueError:
            raise ParseError(f"{path}: byte {off}: invalid header field {tok!r}") from None
    width, height, maxval = vals
    if width <= 0 or height <= 0 or not 0 < maxval < 256:
        raise ParseError(f"{path}: unsupported header w={width} h={height} maxval={maxval}")
    # Exactly one whitespace byte separates the header from the raster.
    pos += 1
    need = width * height
    raster = buf[pos:pos + need]
    if len(raster) != need:
        raise ParseError(
            f"{path}: byte {pos}: expected {need} raster bytes, got {len(raster)}")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return img.astype(float) / maxval


def write_pgm(path, image):
    """Write an ``h x w`` array in [0, 1] as an 8-bit P5 PGM."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("write_pgm expects a 2-D array")
    data = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())

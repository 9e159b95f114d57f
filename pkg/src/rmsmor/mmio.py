"""Reader and writer for the Matrix Market exchange format."""

from __future__ import annotations

import logging
import os

import numpy as np
import scipy.sparse as sps

logger = logging.getLogger(__name__)

_FIELDS = ("real", "double", "integer", "complex", "pattern")
_SYMMETRIES = ("general", "symmetric", "hermitian", "skew-symmetric")


class MatrixMarketError(ValueError):
    pass


def _data_lines(fh):
    for lineno, line in enumerate(fh, start=2):
        s = line.strip()
        if s and not s.startswith("%"):
            yield lineno, s


def load_matrix(path) -> sps.csr_matrix:
    """Read a Matrix Market file into a CSR matrix.

    Supports the ``coordinate`` and ``array`` formats with ``real``,
    ``integer``, ``complex`` and ``pattern`` fields and ``general``,
    ``symmetric``, ``hermitian`` and ``skew-symmetric`` storage.  Symmetric
    storage is mirrored; duplicate coordinate entries are summed with a
    warning.  Real and pattern data give a real matrix.
    """
    with open(path) as fh:
        header = fh.readline().strip().split()
        if len(header) != 5 or header[0] != "%%MatrixMarket" or header[1].lower() != "matrix":
            raise MatrixMarketError(f"{path}: malformed header {' '.join(header)!r}")
        fmt, fld, sym = (h.lower() for h in header[2:])
        if fmt not in ("coordinate", "array"):
            raise MatrixMarketError(f"{path}: unsupported format {fmt!r}")
        if fld not in _FIELDS:
            raise MatrixMarketError(f"{path}: unsupported field {fld!r}")
        if sym not in _SYMMETRIES:
            raise MatrixMarketError(f"{path}: unsupported symmetry {sym!r}")
        if fld == "pattern" and fmt == "array":
            raise MatrixMarketError(f"{path}: pattern field requires coordinate format")
        lines = _data_lines(fh)
        try:
            lineno, size = next(lines)
        except StopIteration:
            raise MatrixMarketError(f"{path}: missing size line") from None
        try:
            dims = [int(t) for t in size.split()]
        except ValueError:
            raise MatrixMarketError(f"{path}:{lineno}: malformed size line {size!r}") from None
        if len(dims) != (3 if fmt == "coordinate" else 2) or min(dims) < 0:
            raise MatrixMarketError(f"{path}:{lineno}: malformed size line {size!r}")
        m, n = dims[:2]
        if sym != "general" and m != n:
            raise MatrixMarketError(f"{path}: {sym} matrix must be square")
        is_complex = fld == "complex"
        nval = {"pattern": 0, "complex": 2}.get(fld, 1)
        if fmt == "coordinate":
            rows, cols, vals = _read_coordinate(path, lines, m, n, dims[2], nval)
        else:
            rows, cols, vals = _read_array(path, lines, m, n, nval, sym)
    dtype = complex if is_complex else float
    vals = np.asarray(vals, dtype=dtype)
    rows, cols = np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)
    if fmt == "coordinate":
        keys = rows * max(n, 1) + cols
        if np.unique(keys).size != keys.size:
            logger.warning("%s: duplicate entries summed", path)
    if sym != "general":
        off = rows != cols
        mirror = {"symmetric": vals[off], "hermitian": np.conj(vals[off]), "skew-symmetric": -vals[off]}[sym]
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, mirror]),
        )
    M = sps.coo_matrix((vals, (rows, cols)), shape=(m, n), dtype=dtype).tocsr()
    M.sum_duplicates()
    return M


def _parse_values(path, lineno, toks, nval):
    try:
        if nval == 0:
            return 1.0
        if nval == 1:
            return float(toks[0])
        return complex(float(toks[0]), float(toks[1]))
    except (ValueError, IndexError):
        raise MatrixMarketError(f"{path}:{lineno}: malformed value {' '.join(toks)!r}") from None


def _read_coordinate(path, lines, m, n, nnz, nval):
    rows, cols, vals = [], [], []
    for lineno, s in lines:
        toks = s.split()
        if len(toks) != 2 + nval:
            raise MatrixMarketError(f"{path}:{lineno}: expected {2 + nval} fields, got {s!r}")
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            raise MatrixMarketError(f"{path}:{lineno}: malformed index in {s!r}") from None
        if not (1 <= i <= m and 1 <= j <= n):
            raise MatrixMarketError(f"{path}:{lineno}: index ({i}, {j}) out of bounds for {m}x{n}")
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(_parse_values(path, lineno, toks[2:], nval))
    if len(vals) != nnz:
        raise MatrixMarketError(f"{path}: header announces {nnz} entries, found {len(vals)}")
    return rows, cols, vals


def _read_array(path, lines, m, n, nval, sym):
    if sym == "general":
        idx = [(i, j) for j in range(n) for i in range(m)]
    else:
        lo = 1 if sym == "skew-symmetric" else 0
        idx = [(i, j) for j in range(n) for i in range(j + lo, m)]
    rows, cols, vals = [], [], []
    count = 0
    for lineno, s in lines:
        toks = s.split()
        if len(toks) != nval:
            raise MatrixMarketError(f"{path}:{lineno}: expected {nval} fields, got {s!r}")
        if count >= len(idx):
            raise MatrixMarketError(f"{path}:{lineno}: more values than the {m}x{n} array holds")
        i, j = idx[count]
        rows.append(i)
        cols.append(j)
        vals.append(_parse_values(path, lineno, toks, nval))
        count += 1
    if count != len(idx):
        raise MatrixMarketError(f"{path}: expected {len(idx)} values, found {count}")
    return rows, cols, vals


def save_matrix(path, M, comment: str | None = None) -> None:
    """Write ``M`` (dense, sparse or a vector) as a general coordinate file.

    Values are printed with 17 significant digits, which reproduces every
    double exactly on reading.  Entries are written in row-major order.
    """
    if not sps.issparse(M):
        M = np.asarray(M)
        if M.ndim == 1:
            M = M[:, None]
    C = sps.coo_matrix(M)
    C.sum_duplicates()
    C.eliminate_zeros()
    order = np.lexsort((C.col, C.row))
    rows, cols, data = C.row[order], C.col[order], C.data[order]
    is_complex = np.iscomplexobj(data) and np.any(data.imag != 0)
    fld = "complex" if is_complex else "real"
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {fld} general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{C.shape[0]} {C.shape[1]} {data.size}\n")
        if is_complex:
            for i, j, v in zip(rows, cols, data):
                fh.write(f"{i + 1} {j + 1} {v.real:.16e} {v.imag:.16e}\n")
        else:
            for i, j, v in zip(rows, cols, np.real(data)):
                fh.write(f"{i + 1} {j + 1} {v:.16e}\n")
    os.replace(tmp, path)


def load_vector(path) -> np.ndarray:
    """Read a Matrix Market file holding a single row or column as a 1-D array."""
    M = load_matrix(path)
    if min(M.shape) != 1:
        raise MatrixMarketError(f"{path}: expected a vector, got shape {M.shape}")
    return M.toarray().reshape(-1)

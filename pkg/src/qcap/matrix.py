"""Exact linear algebra over F_q.

Matrices are immutable wrappers around ``int64`` numpy arrays whose entries
are field element indices.  Elimination always picks the lowest available
row and column index as pivot, so every basis computed here is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, MismatchError, ParseError
from .galois import FieldSpec


class MatrixFq:
    """A rows x cols matrix over a finite field."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        arr = np.array(data, dtype=np.int64)
        if arr.ndim != 2:
            raise MismatchError(f"matrix data must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise MismatchError(f"entries outside {field}")
        arr.setflags(write=False)
        self.field = field
        self.data = arr

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "MatrixFq":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "MatrixFq":
        return cls(field, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatrixFq)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"MatrixFq({self.field}, {self.data.tolist()})"

    def select_columns(self, cols) -> "MatrixFq":
        cols = list(cols)
        for c in cols:
            if not 0 <= c < self.cols:
                raise IndexError(f"column {c} out of range for {self.cols} columns")
        return MatrixFq(self.field, self.data[:, cols].reshape(self.rows, len(cols)))

    def select_rows(self, rows) -> "MatrixFq":
        rows = list(rows)
        return MatrixFq(self.field, self.data[rows, :].reshape(len(rows), self.cols))

    @property
    def T(self) -> "MatrixFq":
        return MatrixFq(self.field, self.data.T)

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        _same_field(self, other)
        if self.cols != other.rows:
            raise MismatchError(f"cannot multiply {self.shape} by {other.shape}")
        return MatrixFq(self.field, matmul(self.field, self.data, other.data))

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": self.data.ravel().tolist()}

    @classmethod
    def from_json(cls, field: FieldSpec, d: dict) -> "MatrixFq":
        try:
            r, c, data = int(d["rows"]), int(d["cols"]), list(d["data"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed matrix: {exc}") from exc
        if len(data) != r * c:
            raise ParseError(f"matrix data has {len(data)} entries, expected {r * c}")
        return cls(field, np.array(data, dtype=np.int64).reshape(r, c))


def _same_field(*ms: MatrixFq) -> None:
    if any(m.field != ms[0].field for m in ms):
        raise MismatchError("matrices over different fields")


def matmul(field: FieldSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product of index arrays over ``field``."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if field.is_prime_field:
        if x.shape[-1] * (field.p - 1) ** 2 < (1 << 62):
            return (x @ y) % field.p
    out = np.zeros(x.shape[:-1] + y.shape[1:], dtype=np.int64)
    for t in range(x.shape[-1]):
        out = field.add(out, field.mul(x[..., t : t + 1], y[t : t + 1, :]))
    return np.asarray(out, dtype=np.int64)


def column_stack(*ms: MatrixFq) -> MatrixFq:
    if not ms:
        raise MismatchError("column_stack needs at least one matrix")
    _same_field(*ms)
    if len({m.rows for m in ms}) > 1:
        raise MismatchError("row counts differ")
    return MatrixFq(ms[0].field, np.hstack([m.data for m in ms]))


def row_stack(*ms: MatrixFq) -> MatrixFq:
    if not ms:
        raise MismatchError("row_stack needs at least one matrix")
    _same_field(*ms)
    if len({m.cols for m in ms}) > 1:
        raise MismatchError("column counts differ")
    return MatrixFq(ms[0].field, np.vstack([m.data for m in ms]))


def rref(m: MatrixFq) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    f = m.field
    a = m.data.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = f.mul(a[r], f.inv(int(a[r, c])))
        col = a[:, c].copy()
        col[r] = 0
        if np.any(col):
            a = f.sub(a, f.mul(col[:, None], a[r][None, :]))
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: MatrixFq) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m)[1])


def nullspace(m: MatrixFq) -> MatrixFq:
    """Basis of {x : m x = 0}, returned as the columns of a matrix."""
    f = m.field
    red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = np.zeros((m.cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = f.neg(int(red[i, fc]))
    return MatrixFq(f, basis)


def solve(m: MatrixFq, v: MatrixFq) -> MatrixFq | None:
    """One solution X of m X = v (v may have several columns), or None."""
    if m.rows != v.rows:
        raise MismatchError(f"cannot solve {m.shape} against {v.shape}")
    f = m.field
    red, pivots = rref(column_stack(m, v))
    if any(p >= m.cols for p in pivots):
        return None
    x = np.zeros((m.cols, v.cols), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = red[i, m.cols :]
    return MatrixFq(f, x)


def in_span(v: MatrixFq, m: MatrixFq) -> bool:
    """True iff every column of v lies in the column span of m."""
    if v.rows != m.rows:
        raise MismatchError(f"vector length {v.rows} does not match {m.rows} rows")
    if m.cols == 0:
        return not np.any(v.data)
    return rank(column_stack(m, v)) == rank(m)


def inverse(m: MatrixFq) -> MatrixFq:
    if m.rows != m.cols:
        raise MismatchError("only square matrices are invertible")
    red, pivots = rref(column_stack(m, MatrixFq.identity(m.field, m.rows)))
    if pivots[: m.rows] != list(range(m.rows)):
        raise ZeroDivisionError("singular matrix")
    return MatrixFq(m.field, red[:, m.rows :])


def greedy_independent(
    base: MatrixFq, candidates: MatrixFq
) -> tuple[MatrixFq, list[int]]:
    """Scan candidate columns left to right, keeping those that raise the rank."""
    kept: list[int] = []
    current = base
    r = rank(current)
    for j in range(candidates.cols):
        trial = column_stack(current, candidates.select_columns([j]))
        tr = rank(trial)
        if tr > r:
            kept.append(j)
            current, r = trial, tr
    return candidates.select_columns(kept), kept


@dataclass(frozen=True)
class SubspaceDecomposition:
    """Bases splitting F_q^{k+delta} around one decoding set.

    ``basis_D1`` spans the intersection of the decoding-side and erased-side
    column spaces; ``(I;0) | D1 | D2`` spans the decoding side and
    ``D1 | D3`` spans the erased side.
    """

    k: int
    delta: int
    basis_D1: MatrixFq
    basis_D2: MatrixFq
    basis_D3: MatrixFq

    @property
    def delta1(self) -> int:
        return self.basis_D1.cols

    @property
    def delta2(self) -> int:
        return self.basis_D2.cols

    @property
    def delta3(self) -> int:
        return self.basis_D3.cols

    def message_block(self) -> MatrixFq:
        f = self.basis_D1.field
        eye = np.zeros((self.k + self.delta, self.k), dtype=np.int64)
        eye[: self.k, : self.k] = np.eye(self.k, dtype=np.int64)
        return MatrixFq(f, eye)

    def full_basis(self) -> MatrixFq:
        return column_stack(self.message_block(), self.basis_D1, self.basis_D2, self.basis_D3)

    def noise_change_of_basis(self) -> MatrixFq:
        """The delta x delta bottom block of (D1, D2, D3); invertible when valid."""
        return column_stack(self.basis_D1, self.basis_D2, self.basis_D3).select_rows(
            range(self.k, self.k + self.delta)
        )


def _split(stacked: MatrixFq, d_cols, k: int):
    d_cols = sorted(set(d_cols))
    rest = [c for c in range(stacked.cols) if c not in set(d_cols)]
    noise = range(k, stacked.rows)
    md, mc = stacked.select_columns(d_cols), stacked.select_columns(rest)
    return md, mc, md.select_rows(noise), mc.select_rows(noise)


def decoder_decomposition(stacked: MatrixFq, d_cols, k: int, delta: int) -> SubspaceDecomposition:
    """Split (A;B) around the columns ``d_cols`` of one decoding set.

    Raises DecompositionError when the decoding or the security rank
    condition fails for these columns.
    """
    if stacked.rows != k + delta:
        raise MismatchError(f"stacked matrix has {stacked.rows} rows, expected {k + delta}")
    f = stacked.field
    md, mc, bd, bc = _split(stacked, d_cols, k)
    if rank(md) - rank(bd) != k:
        raise DecompositionError("decoding rank condition fails for this set")
    if rank(mc) != rank(bc):
        raise DecompositionError("security rank condition fails for this set")
    n = k + delta
    empty = MatrixFq.zeros(f, n, 0)

    # Intersection basis: (x, y) in null([md | -mc]) gives md x = mc y.
    if md.cols and mc.cols:
        neg_mc = MatrixFq(f, f.neg(mc.data))
        ns = nullspace(column_stack(md, neg_mc))
        spanning = md @ ns.select_rows(range(md.cols))
        d1, _ = greedy_independent(empty, spanning)
    else:
        d1 = empty
    eye = SubspaceDecomposition(k, delta, empty, empty, empty).message_block()
    d2, _ = greedy_independent(column_stack(eye, d1), md)
    d3, _ = greedy_independent(d1, mc)
    dec = SubspaceDecomposition(k, delta, d1, d2, d3)
    problems = check_decomposition(dec, stacked, d_cols)
    if problems:
        raise DecompositionError("; ".join(problems))
    return dec


def check_decomposition(dec: SubspaceDecomposition, stacked: MatrixFq, d_cols) -> list[str]:
    """Recompute every basis invariant by rank; return the violated ones."""
    k, delta = dec.k, dec.delta
    md, mc, _, _ = _split(stacked, d_cols, k)
    eye = dec.message_block()
    out = []
    if dec.delta1 + dec.delta2 + dec.delta3 != delta:
        out.append("delta1 + delta2 + delta3 != delta")
    inter_dim = rank(md) + rank(mc) - rank(column_stack(md, mc))
    if dec.delta1 and (
        rank(dec.basis_D1) != dec.delta1
        or not in_span(dec.basis_D1, md)
        or not in_span(dec.basis_D1, mc)
    ):
        out.append("D1 is not an independent subset of both spans")
    if dec.delta1 != inter_dim:
        out.append("D1 does not span the intersection")
    side_d = column_stack(eye, dec.basis_D1, dec.basis_D2)
    if rank(side_d) != side_d.cols or rank(column_stack(side_d, md)) != side_d.cols or rank(md) != side_d.cols:
        out.append("(I;0), D1, D2 is not a basis of the decoding-side span")
    side_c = column_stack(dec.basis_D1, dec.basis_D3)
    if rank(side_c) != side_c.cols or rank(column_stack(side_c, mc)) != side_c.cols or rank(mc) != side_c.cols:
        out.append("D1, D3 is not a basis of the erased-side span")
    full = dec.full_basis()
    if full.cols != k + delta or rank(full) != k + delta:
        out.append("the four blocks are not a basis of F_q^(k+delta)")
    bottom = dec.noise_change_of_basis()
    if bottom.cols != delta or rank(bottom) != delta:
        out.append("bottom delta rows are not invertible")
    return out

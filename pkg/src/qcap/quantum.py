"""Exact checks of the CSS translation using coset states.

The quantum codeword for a basis message ``a`` is the uniform superposition
over the affine coset ``{aA + bB : b}``.  Every amplitude is the same, so a
state is fully described by its support and all checks below reduce to set
and counting arguments over integers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .codes import (
    SecureCode,
    _all_inputs,
    _edge_columns,
    _row_keys,
    rank_preconditions,
    verify_decoding,
    verify_security,
)
from .errors import DecompositionError, LimitExceeded
from .graph import StorageGraph
from .matrix import MatrixFq, column_stack, decoder_decomposition, inverse, matmul, rank, rref, solve

DEFAULT_SUPPORT_LIMIT = 4096
DEFAULT_DENSITY_LIMIT = 4096


@dataclass(frozen=True)
class CosetState:
    """q^(-delta/2) * sum_b |aA + bB>."""

    field: object
    n: int
    offset: np.ndarray
    generators: MatrixFq
    message: tuple[int, ...]

    def support(self) -> np.ndarray:
        """All q^delta strings of the coset, one per row, ordered by b."""
        f = self.field
        b = _all_inputs(f.q, self.generators.rows)
        spread = matmul(f, b, self.generators.data) if self.generators.rows else np.zeros((1, self.n), np.int64)
        return np.asarray(f.add(spread, self.offset[None, :]), dtype=np.int64).reshape(-1, self.n)


def css_encode_basis(code: SecureCode, a) -> CosetState:
    a = np.asarray(a, dtype=np.int64).reshape(-1)
    if a.size != code.k:
        raise ValueError(f"message has length {a.size}, code expects {code.k}")
    offset = matmul(code.field, a[None, :], code.A.data)[0] if code.k else np.zeros(code.n, np.int64)
    return CosetState(code.field, code.n, offset, code.B, tuple(int(x) for x in a))


def _messages(code: SecureCode) -> np.ndarray:
    return _all_inputs(code.q, code.k)


def _check_limit(code: SecureCode, limit: int) -> None:
    if code.q**code.delta > limit:
        raise LimitExceeded(f"coset support q^delta = {code.q ** code.delta} exceeds limit {limit}")
    if code.q**code.k > limit:
        raise LimitExceeded(f"message count q^k = {code.q ** code.k} exceeds limit {limit}")


@dataclass(frozen=True)
class RecoveryCertificate:
    edge: frozenset[int]
    factorization_ok: bool
    residual_support: dict
    security_ok: bool
    support_size: int
    relabeling_bijective: bool

    def to_json(self) -> dict:
        return {
            "edge": sorted(self.edge),
            "recovery": self.factorization_ok,
            "security": self.security_ok,
            "support_size": self.support_size,
            "residual_support": self.residual_support,
            "relabeling_bijective": self.relabeling_bijective,
        }


def decoder_relabeling(code: SecureCode, d_cols: list[int]) -> tuple[MatrixFq, int]:
    """Invertible map G on F_q^{|D|} (row vectors, x -> xG) built from the decomposition.

    With P = (I;0 | D1 | D2) and P T = (A_D;B_D), a codeword restricted to D
    is u T with u = (a, b'_1, b'_2).  Picking pivot columns of T gives
    u = x_piv T_piv^{-1}; the other coordinates are replaced by their
    deviation from u T_rest, which vanishes on codewords.  Returns G and r.
    """
    stacked = code.stacked
    dec = decoder_decomposition(stacked, d_cols, code.k, code.delta)
    P = column_stack(dec.message_block(), dec.basis_D1, dec.basis_D2)
    md = stacked.select_columns(d_cols)
    T = solve(P, md)
    if T is None:  # pragma: no cover - excluded by the decomposition checks
        raise DecompositionError("decoding-side basis does not span the decoding columns")
    _, piv = rref(T)
    r, w = P.cols, len(d_cols)
    rest = [c for c in range(w) if c not in piv]
    f = code.field
    t_piv_inv = inverse(T.select_columns(piv))
    G = np.zeros((w, w), dtype=np.int64)
    # columns 0..r-1: u = x_piv T_piv^{-1}
    G[np.ix_(piv, range(r))] = t_piv_inv.data
    # columns r..: x_rest - u T_rest
    if rest:
        corr = matmul(f, t_piv_inv.data, T.select_columns(rest).data)
        G[np.ix_(piv, range(r, w))] = f.neg(corr)
        for j, c in enumerate(rest):
            G[c, r + j] = 1
    return MatrixFq(f, G), r


def verify_quantum_recovery(code: SecureCode, g: StorageGraph, e, limit: int = DEFAULT_SUPPORT_LIMIT,
                            density_limit: int = DEFAULT_DENSITY_LIMIT) -> RecoveryCertificate:
    """Apply the decoder relabeling to every basis coset and check factorization.

    Success means: for every a, each relabeled support string starts with a,
    and the remaining part (together with the erased registers) is the same
    set T for every a.  Raises DecompositionError when the classical rank
    conditions fail for e or when rank(A;B) < k + delta.
    """
    _check_limit(code, limit)
    pre = rank_preconditions(code)
    if not pre["ok"]:
        raise DecompositionError(
            f"rank(A) = {pre['rank_A']}, rank(A;B) = {pre['rank_AB']}; need {code.k} and {code.k + code.delta}"
        )
    if not (verify_decoding(code, g, e)[0] and verify_security(code, g, e)[0]):
        raise DecompositionError(f"classical conditions fail for decoding set {sorted(e)}")
    d_cols, c_cols = _edge_columns(code, g, e)
    G, _ = decoder_relabeling(code, d_cols)
    f, k, w = code.field, code.k, len(d_cols)
    bijective = rank(G) == w
    if bijective and f.q**w <= limit * 16:
        images = matmul(f, _all_inputs(f.q, w), G.data)
        bijective = np.unique(_row_keys(images, f.q)).size == f.q**w

    reference = None
    ok = bijective
    size = 0
    for a in _messages(code):
        sup = css_encode_basis(code, a).support()
        size = int(np.unique(_row_keys(sup, f.q)).size)
        ok &= size == f.q**code.delta
        relabeled = matmul(f, sup[:, d_cols], G.data)
        ok &= bool(np.all(relabeled[:, :k] == a[None, :]))
        residual = np.hstack([relabeled[:, k:], sup[:, c_cols]])
        residual = np.unique(residual, axis=0) if residual.shape[1] else residual[:1]
        if reference is None:
            reference = residual
        else:
            ok &= residual.shape == reference.shape and bool(np.array_equal(residual, reference))
    digest = hashlib.sha256(np.ascontiguousarray(reference).tobytes()).hexdigest()[:16]
    try:
        sec = verify_quantum_security(code, g, e, limit, density_limit)
    except LimitExceeded:
        sec = ok  # a product |a>|T> leaves the erased registers message-independent
    return RecoveryCertificate(
        frozenset(e), bool(ok), {"size": int(reference.shape[0]), "digest": digest},
        bool(sec), size, bool(bijective),
    )


def _reduced_counts(code: SecureCode, sup_a: np.ndarray, sup_b: np.ndarray, d_cols, c_cols) -> np.ndarray:
    """Integer entries of Tr_D |psi_a><psi_b| (times q^delta), as sorted (row, col, count)."""
    q = code.q
    kd_a, kd_b = _row_keys(sup_a[:, d_cols], q), _row_keys(sup_b[:, d_cols], q)
    kc_a, kc_b = _row_keys(sup_a[:, c_cols], q), _row_keys(sup_b[:, c_cols], q)
    order_b = np.argsort(kd_b, kind="stable")
    sorted_b = kd_b[order_b]
    lo = np.searchsorted(sorted_b, kd_a, side="left")
    hi = np.searchsorted(sorted_b, kd_a, side="right")
    reps = hi - lo
    if reps.sum() == 0:
        return np.zeros((0, 3), dtype=np.int64)
    rows = np.repeat(kc_a, reps)
    idx = np.concatenate([order_b[l:h] for l, h in zip(lo, hi) if h > l])
    cols = kc_b[idx]
    pairs = np.stack([rows, cols], axis=1)
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    return np.hstack([uniq, counts[:, None]])


def verify_quantum_security(code: SecureCode, g: StorageGraph, e, limit: int = DEFAULT_SUPPORT_LIMIT,
                            density_limit: int = DEFAULT_DENSITY_LIMIT) -> bool:
    """Reduced density operator on the erased registers is the same for every basis message.

    Entries are compared as exact integer counts
    rho_a[y, y'] * q^delta = #{(b, b') : Y_Dc = y, y' and Y_D agrees}.
    """
    _check_limit(code, limit)
    d_cols, c_cols = _edge_columns(code, g, e)
    if code.q ** len(c_cols) > density_limit:
        raise LimitExceeded(f"erased registers span q^{len(c_cols)} basis states, limit {density_limit}")
    reference = None
    for a in _messages(code):
        sup = css_encode_basis(code, a).support()
        rho = _reduced_counts(code, sup, sup, d_cols, c_cols)
        if reference is None:
            reference = rho
        elif rho.shape != reference.shape or not np.array_equal(rho, reference):
            return False
    return True


def erasure_correctable(code: SecureCode, g: StorageGraph, e, limit: int = DEFAULT_SUPPORT_LIMIT) -> bool:
    """Knill-Laflamme test for erasing D^c, computed from coset supports alone.

    Tr_D |psi_a><psi_a'| must vanish for a != a' and be independent of a
    on the diagonal.  Uses no rank computation, so it serves as an
    independent reference for the classical verifiers.
    """
    _check_limit(code, limit)
    d_cols, c_cols = _edge_columns(code, g, e)
    msgs = _messages(code)
    sups = [css_encode_basis(code, a).support() for a in msgs]
    # off-diagonal blocks vanish iff no D-string is shared by two messages
    keys = [np.unique(_row_keys(s[:, d_cols], code.q)) for s in sups]
    allk = np.concatenate(keys)
    if np.unique(allk).size != allk.size:
        return False
    reference = _reduced_counts(code, sups[0], sups[0], d_cols, c_cols)
    for s in sups[1:]:
        rho = _reduced_counts(code, s, s, d_cols, c_cols)
        if rho.shape != reference.shape or not np.array_equal(rho, reference):
            return False
    return True

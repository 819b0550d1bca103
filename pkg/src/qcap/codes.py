"""Classical secure-storage codes Y = aA + bB.

A code stores the secret ``a`` (length k) mixed with uniform noise ``b``
(length delta).  Column block i of ``A`` and ``B`` is what storage node i
holds.  The rank verifiers decide decodability and secrecy per decoding set;
:func:`entropy_oracle` decides the same two properties by brute force so the
two can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import LimitExceeded, MismatchError, ParameterError, ParseError, RetriesExhausted
from .galois import FieldSpec, make_field
from .graph import StorageGraph, intersection_graph, intersection_labels, is_feasible
from .matrix import MatrixFq, matmul, rank, row_stack

DEFAULT_ORACLE_LIMIT = 1 << 20


@dataclass(frozen=True)
class SecureCode:
    field: FieldSpec
    k: int
    delta: int
    kappa: int
    node_widths: tuple[int, ...]
    A: MatrixFq
    B: MatrixFq

    def __post_init__(self):
        object.__setattr__(self, "node_widths", tuple(int(w) for w in self.node_widths))
        if self.A.field != self.field or self.B.field != self.field:
            raise MismatchError("A and B must live in the code's field")
        if self.A.rows != self.k or self.B.rows != self.delta:
            raise MismatchError(
                f"A is {self.A.shape} and B is {self.B.shape}; expected {self.k} and {self.delta} rows"
            )
        if self.A.cols != self.B.cols or sum(self.node_widths) != self.A.cols:
            raise MismatchError("node widths must sum to the column count of A and B")
        if any(w < 0 for w in self.node_widths) or self.kappa < 1:
            raise MismatchError("widths must be non-negative and kappa positive")

    @property
    def n(self) -> int:
        return self.A.cols

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def stacked(self) -> MatrixFq:
        return row_stack(self.A, self.B)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.kappa)

    @property
    def column_owner(self) -> tuple[int, ...]:
        """Node position owning each column."""
        return tuple(i for i, w in enumerate(self.node_widths) for _ in range(w))

    def node_slices(self) -> list[range]:
        out, start = [], 0
        for w in self.node_widths:
            out.append(range(start, start + w))
            start += w
        return out

    def columns_of_positions(self, positions) -> list[int]:
        sl = self.node_slices()
        return [c for p in sorted(set(positions)) for c in sl[p]]

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "k": self.k,
            "delta": self.delta,
            "kappa": self.kappa,
            "node_widths": list(self.node_widths),
            "A": self.A.to_json(),
            "B": self.B.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "SecureCode":
        try:
            f = FieldSpec.from_json(d["field"])
            return cls(
                f,
                int(d["k"]),
                int(d["delta"]),
                int(d["kappa"]),
                tuple(int(w) for w in d["node_widths"]),
                MatrixFq.from_json(f, d["A"]),
                MatrixFq.from_json(f, d["B"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, MismatchError):
                raise
            raise ParseError(f"malformed code description: {exc}") from exc

    def over_field(self, other: FieldSpec) -> "SecureCode":
        """Reinterpret the same index matrices over another field (negative tests)."""
        return SecureCode(
            other, self.k, self.delta, self.kappa, self.node_widths,
            MatrixFq(other, self.A.data), MatrixFq(other, self.B.data),
        )


def rank_preconditions(code: SecureCode) -> dict:
    """rank(A) = k and rank(A;B) = k + delta, reported rather than enforced."""
    ra, rab = rank(code.A), rank(code.stacked)
    return {"rank_A": ra, "rank_AB": rab, "ok": ra == code.k and rab == code.k + code.delta}


def _edge_columns(code: SecureCode, g: StorageGraph, e) -> tuple[list[int], list[int]]:
    if len(code.node_widths) != g.N:
        raise MismatchError(f"code has {len(code.node_widths)} node blocks, graph has {g.N} nodes")
    e = frozenset(e)
    if not e <= set(g.ids):
        raise MismatchError(f"decoding set {sorted(e)} has nodes outside the graph")
    pos = [g.position(i) for i in e]
    d = code.columns_of_positions(pos)
    ds = set(d)
    return d, [c for c in range(code.n) if c not in ds]


@dataclass(frozen=True)
class EdgeCheck:
    edge: frozenset[int]
    decode_ok: bool
    security_ok: bool
    rank_MD: int
    rank_BD: int
    rank_MDc: int
    rank_BDc: int

    @property
    def ok(self) -> bool:
        return self.decode_ok and self.security_ok

    def to_json(self) -> dict:
        return {
            "edge": sorted(self.edge),
            "decode_ok": self.decode_ok,
            "security_ok": self.security_ok,
            "ranks": {
                "MD": self.rank_MD, "BD": self.rank_BD,
                "MDc": self.rank_MDc, "BDc": self.rank_BDc,
            },
        }


def verify_decoding(code: SecureCode, g: StorageGraph, e) -> tuple[bool, int, int]:
    """(ok, rank(A_D;B_D), rank(B_D)); ok iff the difference equals k."""
    d, _ = _edge_columns(code, g, e)
    md = code.stacked.select_columns(d)
    r_m, r_b = rank(md), rank(code.B.select_columns(d))
    return r_m - r_b == code.k, r_m, r_b


def verify_security(code: SecureCode, g: StorageGraph, e) -> tuple[bool, int, int]:
    """(ok, rank(A_Dc;B_Dc), rank(B_Dc)); vacuous when nothing is erased."""
    _, c = _edge_columns(code, g, e)
    r_m = rank(code.stacked.select_columns(c))
    r_b = rank(code.B.select_columns(c))
    return r_m == r_b, r_m, r_b


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[EdgeCheck, ...]
    rate: Fraction
    preconditions: dict
    fits: bool

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[EdgeCheck]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "rate": _frac(self.rate),
            "preconditions": self.preconditions,
            "fits_graph": self.fits,
            "checks": [c.to_json() for c in self.checks],
        }


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fits_graph(code: SecureCode, g: StorageGraph) -> bool:
    return all(w <= code.kappa * lam for w, lam in zip(code.node_widths, g.lambdas))


def verify_code(code: SecureCode, g: StorageGraph) -> VerificationReport:
    checks = []
    for e in g.decoding_sets:
        dok, rmd, rbd = verify_decoding(code, g, e)
        sok, rmc, rbc = verify_security(code, g, e)
        checks.append(EdgeCheck(e, dok, sok, rmd, rbd, rmc, rbc))
    return VerificationReport(tuple(checks), code.rate, rank_preconditions(code), fits_graph(code, g))


# brute-force oracle ---------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    """Exact answers to H(a | Y_D) = 0 and I(a ; Y_Dc) = 0.

    Counterexamples are plain lists of field indices: for decoding, two
    inputs ``(a, b)`` with equal ``Y_D`` but different ``a``; for security,
    an observed ``Y_Dc`` value under which ``a`` is not uniform.
    """

    edge: frozenset[int]
    decoding_ok: bool
    security_ok: bool
    decoding_counterexample: tuple | None = None
    security_counterexample: dict | None = None
    assignments: int = 0

    def to_json(self) -> dict:
        return {
            "edge": sorted(self.edge),
            "decoding_ok": self.decoding_ok,
            "security_ok": self.security_ok,
            "decoding_counterexample": (
                [list(x) for x in self.decoding_counterexample] if self.decoding_counterexample else None
            ),
            "security_counterexample": self.security_counterexample,
            "assignments": self.assignments,
        }


def _all_inputs(q: int, length: int) -> np.ndarray:
    idx = np.arange(q**length, dtype=np.int64)
    place = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // place[None, :]) % q


def _row_keys(rows: np.ndarray, q: int) -> np.ndarray:
    """Integer group id per row, equal ids exactly for equal rows."""
    width = rows.shape[1]
    if width == 0:
        return np.zeros(rows.shape[0], dtype=np.int64)
    if width * math.log2(q) < 62:
        place = q ** np.arange(width - 1, -1, -1, dtype=np.int64)
        return rows @ place
    _, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.reshape(-1).astype(np.int64)


class _Enumeration:
    """All q^(k+delta) inputs and the resulting share vectors."""

    def __init__(self, code: SecureCode, limit: int):
        total = code.q ** (code.k + code.delta)
        if total > limit:
            raise LimitExceeded(f"oracle needs {total} assignments, limit is {limit}")
        self.code = code
        self.x = _all_inputs(code.q, code.k + code.delta)
        self.y = matmul(code.field, self.x, code.stacked.data)
        self.a_key = _row_keys(self.x[:, : code.k], code.q)


def entropy_oracle(code: SecureCode, g: StorageGraph, e, limit: int = DEFAULT_ORACLE_LIMIT,
                   _enum: _Enumeration | None = None) -> OracleResult:
    """Exhaustive decoding and secrecy check for one decoding set."""
    d, c = _edge_columns(code, g, e)
    en = _enum if _enum is not None else _Enumeration(code, limit)
    q, k = code.q, code.k
    a = en.a_key

    # decoding: within each Y_D group the secret must be constant
    kd = _row_keys(en.y[:, d], q)
    order = np.lexsort((a, kd))
    kd_s, a_s = kd[order], a[order]
    clash = np.nonzero((kd_s[1:] == kd_s[:-1]) & (a_s[1:] != a_s[:-1]))[0]
    dec_ok = clash.size == 0
    dec_ce = None
    if not dec_ok:
        i, j = order[clash[0]], order[clash[0] + 1]
        dec_ce = (tuple(int(v) for v in en.x[i]), tuple(int(v) for v in en.x[j]))

    # secrecy: every secret value equally often within each Y_Dc group
    kc = _row_keys(en.y[:, c], q)
    groups, g_inv, g_count = np.unique(kc, return_inverse=True, return_counts=True)
    g_inv = g_inv.reshape(-1)
    na = q**k
    joint = np.zeros((groups.size, na), dtype=np.int64)
    np.add.at(joint, (g_inv, a), 1)
    uniform = joint * na == g_count[:, None]
    sec_ok = bool(uniform.all())
    sec_ce = None
    if not sec_ok:
        gi = int(np.nonzero(~uniform.all(axis=1))[0][0])
        row = int(np.nonzero(g_inv == gi)[0][0])
        sec_ce = {
            "y": [int(v) for v in en.y[row, c]],
            "secret_counts": [int(v) for v in joint[gi]],
            "example_input": [int(v) for v in en.x[row]],
        }
    return OracleResult(frozenset(e), dec_ok, sec_ok, dec_ce, sec_ce, int(en.x.shape[0]))


def oracle_all(code: SecureCode, g: StorageGraph, limit: int = DEFAULT_ORACLE_LIMIT) -> list[OracleResult]:
    en = _Enumeration(code, limit)
    return [entropy_oracle(code, g, e, limit, _enum=en) for e in g.decoding_sets]


# constructors ----------------------------------------------------------------


def _code(field: FieldSpec, k: int, widths, columns: list[list[int]], kappa: int = 1) -> SecureCode:
    """Assemble a code from per-column coefficient vectors over (a, b)."""
    M = np.array(columns, dtype=np.int64).T.reshape(-1, len(columns))
    return SecureCode(field, k, M.shape[0] - k, kappa, tuple(widths),
                      MatrixFq(field, M[:k]), MatrixFq(field, M[k:]))


def _vandermonde_column(field: FieldSpec, alpha: int, height: int) -> list[int]:
    return [int(field.power(alpha, height - 1 - i)) for i in range(height)]


def construct_mds_uniform(N: int, K: int, field: FieldSpec) -> SecureCode:
    """Vandermonde code for M_{N,K}: k = 2K-N, delta = N-K, points 0..N-1.

    Row i carries exponent k+delta-i, so the noise rows hold the lowest
    powers.
    """
    if not 1 <= K <= N:
        raise ParameterError(f"need 1 <= K <= N, got N={N}, K={K}")
    if 2 * K <= N:
        raise ParameterError(f"M_{{{N},{K}}} is infeasible (2K <= N)")
    if field.q < N:
        raise ParameterError(f"need q >= N distinct points, got q={field.q} < {N}")
    k, delta = 2 * K - N, N - K
    cols = [_vandermonde_column(field, j, k + delta) for j in range(N)]
    return _code(field, k, [1] * N, cols)


def _unit(length: int, *hot: tuple[int, int]) -> list[int]:
    v = [0] * length
    for i, c in hot:
        v[i] = c
    return v


W4_FIXTURE_A = [[0, 1, 0, 1, 0, 1, 1]]
W4_FIXTURE_B = [
    [1, 1, 0, 1, 0, 1, 0],
    [0, 0, 1, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0, 1],
]


def w4_fixture(field: FieldSpec) -> SecureCode:
    """Noise-aligned W4 code: b1 | a+b1, b2 | a+b1, b3 | a+b1, a+b2+b3."""
    return SecureCode(field, 1, 3, 1, (1, 2, 2, 2),
                      MatrixFq(field, W4_FIXTURE_A), MatrixFq(field, W4_FIXTURE_B))


def _w5_component3(field: FieldSpec, leaky: bool) -> SecureCode:
    h = 5  # rows: a, b1, b2, b3, b4
    a_b4 = _unit(h, (0, 1), (4, 1))
    cols = [
        _unit(h, (1, 1)),                          # b1
        _unit(h, (4, 1)),                          # b4
        _unit(h, (0, 1), (1, 1)),                  # a+b1
        _unit(h, (2, 1)),                          # b2
        a_b4,
        _unit(h, (3, 1)),                          # b3
        a_b4,
        (_unit(h, (0, 1), (2, 1), (3, 1)) if leaky
         else _unit(h, (1, 1), (2, 1), (3, 1))),   # a+b2+b3 leaks, b1+b2+b3 does not
        a_b4,
    ]
    return _code(field, 1, (2, 1, 2, 2, 2), cols)


def w5_component3_leaky(field: FieldSpec) -> SecureCode:
    """Third W5 component with a+b2+b3 on node 5; erasing {3,4,5} leaks the secret."""
    return _w5_component3(field, leaky=True)


def construct_wheel_component(N: int, variant: int, field: FieldSpec) -> SecureCode:
    """Component codes for the wheel W_N (hub is node 1).

    variant 1: hub stores b_1..b_{N-2}; spoke j stores a Vandermonde mix of
    (a, b) at a nonzero point, so q >= N.
    variant 2: hub stores b_1; each spoke stores the aligned symbol a+b_1 and
    a Vandermonde mix of (a, b_2..b_{N-1}); q >= N-1 (N = 4 uses the explicit
    code, valid over every field).
    variant 3: N = 5 only, any field.
    """
    if N < 4:
        raise ParameterError(f"wheel graphs need N >= 4, got {N}")
    if variant == 1:
        if field.q < N:
            raise ParameterError(f"variant 1 needs q >= N = {N} nonzero-point room, got q={field.q}")
        h = N - 1  # rows: a, b1..b_{N-2}
        cols = [_unit(h, (i, 1)) for i in range(1, h)]
        cols += [_vandermonde_column(field, j, h) for j in range(1, N)]
        return _code(field, 1, [N - 2] + [1] * (N - 1), cols)
    if variant == 2:
        if N == 4:
            return w4_fixture(field)
        if field.q < N - 1:
            raise ParameterError(f"variant 2 needs q >= N-1 = {N - 1}, got q={field.q}")
        h = N  # rows: a, b1, b2..b_{N-1}
        cols = [_unit(h, (1, 1))]
        for j in range(N - 1):
            tail = _vandermonde_column(field, j, N - 1)  # over (a, b2..b_{N-1})
            cols.append(_unit(h, (0, 1), (1, 1)))
            cols.append([tail[0], 0] + tail[1:])
        return _code(field, 1, [1] + [2] * (N - 1), cols)
    if variant == 3:
        if N != 5:
            raise ParameterError("variant 3 exists only for N = 5")
        return _w5_component3(field, leaky=False)
    raise ParameterError(f"unknown wheel component variant {variant}")


FANO_VECTORS = (
    (1, 1, 0, 0),
    (1, 0, 1, 0),
    (1, 0, 0, 1),
    (1, 1, 1, 0),
    (1, 0, 1, 1),
    (1, 1, 0, 1),
    (1, 1, 1, 1),
)


def fano_code_matrices(field: FieldSpec) -> SecureCode:
    """The Fano code over any field, for negative testing in odd characteristic."""
    return _code(field, 1, [1] * 7, [list(v) for v in FANO_VECTORS])


def construct_fano(field: FieldSpec) -> SecureCode:
    if field.p != 2:
        raise ParameterError(f"the Fano code needs even characteristic, got {field}")
    return fano_code_matrices(field)


def intersection42_fixture(field: FieldSpec) -> SecureCode:
    """Explicit code on the (4,2) intersection graph.

    z1 = a+b1+b2, z2 = b1, z3 = b2; labels 12,13,14,23,24,34 hold
    z2, z3, z1, z2+z3, z1+z2, z1-z3.
    """
    z1, z2, z3 = np.array([1, 1, 1]), np.array([0, 1, 0]), np.array([0, 0, 1])
    add, sub = field.add, field.sub
    cols = [z2, z3, z1, add(z2, z3), add(z1, z2), sub(z1, z3)]
    return _code(field, 1, [1] * 6, [list(c) for c in cols])


class XorShift64Star:
    """xorshift64* (Marsaglia shifts 12/25/27, multiplier 0x2545F4914F6CDD1D).

    The state is seeded as ``(seed + 0x9E3779B97F4A7C15) mod 2^64`` (replaced
    by the constant itself if that is zero).  Field entries are drawn as
    ``next() % q``.  Fixing the generator here keeps constructed codes stable
    across numpy and Python releases.
    """

    MASK = (1 << 64) - 1
    GOLDEN = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        s = (int(seed) + self.GOLDEN) & self.MASK
        self.state = s or self.GOLDEN

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & self.MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & self.MASK

    def below(self, n: int) -> int:
        return self.next() % n


def intersection_field_bound(Delta: int, m: int) -> int:
    """Field sizes above this value guarantee a valid random sample exists."""
    return comb(Delta - 1, m - 1) + Delta * comb(Delta - 2, m - 2)


def _intersection_columns(field: FieldSpec, Delta: int, m: int, base: np.ndarray) -> np.ndarray:
    """Extend the (k+delta)-column matrix of the label-1 nodes to all nodes."""
    labels = intersection_labels(Delta, m)
    with_one = [lab for lab in labels if 1 in lab]
    col_of = {lab: base[:, i] for i, lab in enumerate(with_one)}
    minus_one = field.neg(1)
    out = np.zeros((base.shape[0], len(labels)), dtype=np.int64)
    for n, lab in enumerate(labels):
        if 1 in lab:
            out[:, n] = col_of[lab]
            continue
        acc = np.zeros(base.shape[0], dtype=np.int64)
        for j, replaced in enumerate(lab, start=1):
            sj = tuple(sorted((set(lab) - {replaced}) | {1}))
            sign = 1 if j % 2 == 0 else minus_one
            acc = field.add(acc, field.mul(sign, col_of[sj]))
        out[:, n] = acc
    return out


def intersection_conditions(field: FieldSpec, Delta: int, m: int, full: np.ndarray, k: int) -> bool:
    """Full rank of the label-1 square block and of the delta x delta noise blocks."""
    labels = intersection_labels(Delta, m)
    M = MatrixFq(field, full)
    B = MatrixFq(field, full[k:])
    square = [n for n, lab in enumerate(labels) if 1 in lab]
    if rank(M.select_columns(square)) != len(square):
        return False
    delta = full.shape[0] - k
    blocks = [[n for n, lab in enumerate(labels) if 1 in lab and i not in lab] for i in range(2, Delta + 1)]
    blocks.append([n for n, lab in enumerate(labels) if 1 not in lab and 2 in lab])
    return all(len(b) == delta and rank(B.select_columns(b)) == delta for b in blocks)


def construct_intersection(Delta: int, m: int, field: FieldSpec, seed: int, max_retries: int = 20,
                           check_bound: bool = True) -> SecureCode:
    """Alternating-sign code on the intersection graph with Delta sets.

    Nodes are m-subsets of [Delta] in lexicographic order.  The nodes whose
    label contains 1 get the columns of a seeded random square matrix; any
    other label S = {i_1 < ... < i_m} gets sum_j (-1)^j Y(S with i_j -> 1).
    """
    if not Delta > m >= 2:
        raise ParameterError(f"need Delta > m >= 2, got Delta={Delta}, m={m}")
    bound = intersection_field_bound(Delta, m)
    if check_bound and field.q <= bound:
        raise ParameterError(f"field size {field.q} does not exceed the bound {bound}")
    k, delta = comb(Delta - 2, m - 2), comb(Delta - 2, m - 1)
    size = k + delta
    rng = XorShift64Star(seed)
    N = comb(Delta, m)
    for _ in range(max_retries):
        base = np.array([[rng.below(field.q) for _ in range(size)] for _ in range(size)], dtype=np.int64)
        full = _intersection_columns(field, Delta, m, base)
        if intersection_conditions(field, Delta, m, full, k):
            code = SecureCode(field, k, delta, 1, (1,) * N,
                              MatrixFq(field, full[:k]), MatrixFq(field, full[k:]))
            if verify_code(code, intersection_graph(Delta, m)).passed:
                return code
    raise RetriesExhausted(seed, max_retries)


def construct_feasibility(g: StorageGraph) -> SecureCode:
    """Binary one-symbol code: per decoding set, an additive sharing of a.

    The first |e|-1 nodes of e (sorted) each get a fresh noise bit, the last
    gets a plus the sum of those bits.  ``kappa`` is the least value with
    every width at most kappa * lambda_i.
    """
    feas = is_feasible(g)
    if not feas.feasible:
        a, b = feas.witness
        raise ParameterError(f"graph is infeasible: {sorted(a)} and {sorted(b)} are disjoint")
    f2 = make_field(2)
    per_node: dict[int, list[list[int]]] = {i: [] for i in g.ids}
    delta = sum(len(e) - 1 for e in g.decoding_sets)
    h = 1 + delta
    nxt = 1
    for e in sorted(g.decoding_sets, key=lambda s: sorted(s)):
        members = sorted(e)
        last = _unit(h, (0, 1))
        for node in members[:-1]:
            per_node[node].append(_unit(h, (nxt, 1)))
            last[nxt] = 1
            nxt += 1
        per_node[members[-1]].append(last)
    widths = [len(per_node[i]) for i in g.ids]
    cols = [c for i in g.ids for c in per_node[i]]
    kappa = max(math.ceil(Fraction(w) / lam) for w, lam in zip(widths, g.lambdas))
    return _code(f2, 1, widths, cols, kappa=max(kappa, 1))


def plaintext_code(field: FieldSpec, widths, message_columns: dict[int, list[int]] | None = None) -> SecureCode:
    """No-noise code; node i holds the listed message coordinates."""
    widths = list(widths)
    k = sum(widths) if message_columns is None else 1 + max(c for v in message_columns.values() for c in v)
    if message_columns is None:
        cols = [_unit(k, (i, 1)) for i in range(k)]
    else:
        cols = [_unit(k, (c, 1)) for pos in range(len(widths)) for c in message_columns.get(pos, [])]
    return _code(field, k, widths, cols)


def replicate(code: SecureCode, s: int) -> SecureCode:
    """Block-diagonal s-fold copy: k, delta, kappa and widths all scale by s."""
    if s < 1:
        raise ParameterError("replication factor must be positive")
    k, d = code.k, code.delta
    M = code.stacked.data
    rows = s * (k + d)
    cols = []
    for sl in code.node_slices():
        for t in range(s):
            for c in sl:
                v = np.zeros(rows, dtype=np.int64)
                v[t * k : (t + 1) * k] = M[:k, c]
                v[s * k + t * d : s * k + (t + 1) * d] = M[k:, c]
                cols.append(v)
    full = np.array(cols, dtype=np.int64).T.reshape(rows, -1)
    return SecureCode(code.field, s * k, s * d, s * code.kappa,
                      tuple(s * w for w in code.node_widths),
                      MatrixFq(code.field, full[: s * k]), MatrixFq(code.field, full[s * k :]))


def alignment_ranks(code: SecureCode, g: StorageGraph) -> list[int]:
    """rank of the erased-side share columns for every decoding set."""
    out = []
    for e in g.decoding_sets:
        _, c = _edge_columns(code, g, e)
        out.append(rank(code.stacked.select_columns(c)))
    return out

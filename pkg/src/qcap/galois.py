"""Arithmetic in finite fields F_q, q = p^m.

Elements are plain integers in ``[0, q)``.  The integer ``sum(c_i * p**i)``
stands for the polynomial ``sum(c_i * x**i)`` reduced modulo a fixed monic
irreducible polynomial of degree m.  All operations accept Python ints or
numpy integer arrays, so the same code serves scalar arithmetic and the
vectorized enumerations used by the verifiers.

The default modulus for ``(p, m)`` is the monic irreducible polynomial with
the smallest lower-coefficient index.  That rule reproduces the classical
choices ``x^2+x+1`` (F4), ``x^3+x+1`` (F8), ``x^2+1`` (F9) and ``x^4+x+1``
(F16) and extends deterministically to every order up to ``MAX_ORDER``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FieldError

MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power_decomposition(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m`` and p prime, or None."""
    if q < 2:
        return None
    p = next(f for f in range(2, q + 1) if q % f == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    return (p, m) if r == 1 else None


def smallest_prime_power_at_least(n: int) -> int:
    q = max(n, 2)
    while prime_power_decomposition(q) is None:
        q += 1
    return q


def _poly_divmod_rem(num: list[int], den: list[int], p: int) -> list[int]:
    """Remainder of num / den over F_p (ascending coefficient lists, den monic)."""
    r = list(num)
    d = len(den) - 1
    while len(r) - 1 >= d and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < d:
            break
        c = r[-1]
        shift = len(r) - 1 - d
        for i, di in enumerate(den):
            r[shift + i] = (r[shift + i] - c * di) % p
        while r and r[-1] == 0:
            r.pop()
    return r


def _monic_polys(p: int, degree: int):
    """Monic polynomials of a given degree in lower-coefficient index order."""
    for idx in range(p**degree):
        coeffs = []
        x = idx
        for _ in range(degree):
            coeffs.append(x % p)
            x //= p
        yield coeffs + [1]


def is_irreducible(modulus: list[int] | tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree up to half."""
    poly = [c % p for c in modulus]
    m = len(poly) - 1
    if m < 1 or poly[-1] != 1:
        return False
    for d in range(1, m // 2 + 1):
        for f in _monic_polys(p, d):
            if not _poly_divmod_rem(poly, f, p):
                return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, m: int) -> tuple[int, ...]:
    if m == 1:
        return (0, 1)
    for poly in _monic_polys(p, m):
        if is_irreducible(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {m} over F_{p}")  # pragma: no cover


@dataclass(frozen=True)
class FieldSpec:
    """A finite field F_q described by its characteristic, degree and modulus.

    Parameters
    ----------
    p : int
        Prime characteristic.
    m : int
        Extension degree, at least 1.
    modulus : tuple of int
        Ascending coefficients of a monic irreducible polynomial of degree m.
        For prime fields this is ``(0, 1)`` and unused.
    """

    p: int
    m: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    def __str__(self) -> str:
        return f"F{self.q}"

    def _t(self) -> "_Tables":
        return _tables(self.p, self.m, self.modulus)

    # arithmetic ------------------------------------------------------------

    def add(self, x, y):
        if self.m == 1:
            return _ret((np.asarray(x, dtype=np.int64) + y) % self.p, x, y)
        if self.p == 2:
            return _ret(np.bitwise_xor(np.asarray(x, dtype=np.int64), y), x, y)
        t = self._t()
        s = (t.digits[np.asarray(x)] + t.digits[np.asarray(y)]) % self.p
        return _ret(s @ t.place, x, y)

    def neg(self, x):
        if self.m == 1:
            return _ret((-np.asarray(x, dtype=np.int64)) % self.p, x)
        if self.p == 2:
            return _ret(np.asarray(x, dtype=np.int64), x)
        return _ret(self._t().neg[np.asarray(x)], x)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        if self.m == 1:
            return _ret((np.asarray(x, dtype=np.int64) * y) % self.p, x, y)
        t = self._t()
        xa, ya = np.asarray(x), np.asarray(y)
        r = t.exp[t.log[xa] + t.log[ya]]
        r = np.where((xa == 0) | (ya == 0), 0, r)
        return _ret(r, x, y)

    def inv(self, x):
        xa = np.asarray(x)
        if np.any(xa == 0):
            raise ZeroDivisionError("inverse of zero in " + str(self))
        return _ret(self._t().inv[xa], x)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def power(self, x, e: int):
        xa = np.asarray(x, dtype=np.int64)
        if e == 0:
            return _ret(np.ones_like(xa), x)
        if e < 0:
            xa, e = np.asarray(self.inv(xa)), -e
        t = self._t()
        r = t.exp[(t.log[xa] * e) % (self.q - 1)]
        return _ret(np.where(xa == 0, 0, r), x)

    def element(self, index: int) -> "FieldElement":
        return FieldElement(self, index)

    def elements(self) -> range:
        return range(self.q)

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        d = {"p": self.p, "m": self.m}
        if self.m > 1:
            d["modulus"] = list(self.modulus)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "FieldSpec":
        try:
            return make_field(int(d["p"]), int(d["m"]), d.get("modulus"))
        except (KeyError, TypeError) as exc:
            raise FieldError(f"malformed field description: {d!r}") from exc


def _ret(r, *operands):
    """Collapse 0-d results back to Python ints when every operand was scalar."""
    if all(np.ndim(o) == 0 for o in operands):
        return int(r)
    return np.asarray(r, dtype=np.int64)


def make_field(p: int, m: int = 1, modulus=None, limit: int = MAX_ORDER) -> FieldSpec:
    """Build F_{p^m}, using the default modulus unless one is supplied."""
    if not is_prime(p):
        raise FieldError(f"characteristic {p} is not prime")
    if m < 1:
        raise FieldError("extension degree must be at least 1")
    if p**m > limit:
        raise FieldError(f"field order {p}^{m} exceeds the cap {limit}")
    if m == 1:
        return FieldSpec(p, 1, (0, 1))
    if modulus is None:
        modulus = default_modulus(p, m)
    modulus = tuple(int(c) % p for c in modulus)
    if len(modulus) != m + 1 or modulus[-1] != 1:
        raise FieldError(f"modulus must be monic of degree {m}")
    if not is_irreducible(modulus, p):
        raise FieldError(f"modulus {modulus} is reducible over F_{p}")
    return FieldSpec(p, m, modulus)


def field_of_order(q: int) -> FieldSpec:
    pm = prime_power_decomposition(q)
    if pm is None:
        raise FieldError(f"{q} is not a prime power")
    return make_field(*pm)


def has_even_characteristic(f: FieldSpec) -> bool:
    return f.p == 2


# lookup tables -------------------------------------------------------------


@dataclass(frozen=True)
class _Tables:
    exp: np.ndarray  # length 2(q-1), exp[i] = g^i
    log: np.ndarray  # log[0] is a dummy value
    inv: np.ndarray
    neg: np.ndarray
    digits: np.ndarray  # (q, m) base-p digits
    place: np.ndarray  # p**i


def _slow_mul(a: int, b: int, p: int, m: int, modulus: tuple[int, ...]) -> int:
    da = [(a // p**i) % p for i in range(m)]
    db = [(b // p**i) % p for i in range(m)]
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(da):
        if x:
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
    rem = _poly_divmod_rem(prod, list(modulus), p) if m > 1 else [prod[0] % p]
    return sum(c * p**i for i, c in enumerate(rem))


@lru_cache(maxsize=64)
def _tables(p: int, m: int, modulus: tuple[int, ...]) -> _Tables:
    q = p**m
    mul = (lambda a, b: a * b % p) if m == 1 else (lambda a, b: _slow_mul(a, b, p, m, modulus))
    powers = None
    for g in range(1, q):
        seq = [1]
        x = g
        while x != 1:
            seq.append(x)
            x = mul(x, g)
        if len(seq) == q - 1:
            powers = seq
            break
    if powers is None:  # q == 2: the only nonzero element
        powers = [1]
    exp = np.array(powers + powers, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    log[np.array(powers, dtype=np.int64)] = np.arange(q - 1)
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = exp[(-log[1:]) % (q - 1)]
    idx = np.arange(q, dtype=np.int64)
    place = np.array([p**i for i in range(m)], dtype=np.int64)
    digits = (idx[:, None] // place[None, :]) % p
    neg = ((-digits) % p) @ place
    return _Tables(exp, log, inv, neg, digits, place)


@dataclass(frozen=True)
class FieldElement:
    """A single element bound to its field; operators check field equality."""

    field: FieldSpec
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.field.q:
            raise FieldError(f"index {self.index} outside {self.field}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"mixed-field operands {self.field} and {other.field}")
            return other.index
        if isinstance(other, (int, np.integer)):
            return int(other)
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.index, self._other(other)))

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.index, self._other(other)))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.index, self._other(other)))

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.index, self._other(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.index))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.power(self.index, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.index))

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"{self.field}({self.index})"

"""Scalar regimes, enclosures of rapidly convergent series, and determinants.

Two regimes are supported.  In the exact regime every scalar is a
:class:`fractions.Fraction` and arithmetic is error free.  In the float regime
scalars are ``mpf`` values bound to an :mod:`mpmath` context of the requested
precision, and every enclosure is widened by a few units in the last place
after each operation so that rounding never escapes the reported bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

import mpmath

Scalar = Union[Fraction, "mpmath.mpf"]

EXACT = "exact"
FLOAT = "float"
DEFAULT_PRECISION = 512


class PrecisionError(ArithmeticError):
    """A float-regime comparison could not be decided at the working precision."""


class RatioConditionError(ValueError):
    """The term-ratio certificate of a series failed at a checked index."""


@lru_cache(maxsize=None)
def _context(precision: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


def is_float(value) -> bool:
    return hasattr(value, "context") and hasattr(value, "_mpf_")


def fraction_from_mpf(value) -> Fraction:
    """Exact rational value of a binary floating point number."""
    sign, man, exp, _ = value._mpf_
    if man == 0:
        return Fraction(0)
    out = Fraction(man) * (Fraction(2) ** exp)
    return -out if sign else out


def _parse_fraction(text: str) -> Fraction:
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


@dataclass(frozen=True)
class Regime:
    """Arithmetic regime tag shared by all scalars of one computation."""

    kind: str = EXACT
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.kind not in (EXACT, FLOAT):
            raise ValueError(f"unknown regime {self.kind!r}")
        if self.precision < 16:
            raise ValueError("precision must be at least 16 bits")

    @property
    def exact(self) -> bool:
        return self.kind == EXACT

    @property
    def ctx(self):
        return _context(self.precision)

    def scalar(self, value) -> Scalar:
        """Convert ``value`` (int, Fraction, str, float or mpf) into this regime."""
        if isinstance(value, BoundedSum):
            raise TypeError("use BoundedSum.convert for enclosures")
        if self.exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            if isinstance(value, str):
                return _parse_fraction(value)
            if isinstance(value, float):
                return Fraction(value)
            if is_float(value):
                return fraction_from_mpf(value)
            raise TypeError(f"cannot convert {type(value).__name__} to an exact scalar")
        ctx = self.ctx
        if isinstance(value, Fraction):
            return ctx.mpf(value.numerator) / value.denominator
        if isinstance(value, str):
            text = value.strip()
            if "/" in text:
                fr = _parse_fraction(text)
                return ctx.mpf(fr.numerator) / fr.denominator
            return ctx.mpf(text)
        if isinstance(value, (int, float)) or is_float(value):
            return ctx.mpf(value)
        raise TypeError(f"cannot convert {type(value).__name__} to a float scalar")

    def zero(self) -> Scalar:
        return self.scalar(0)

    def one(self) -> Scalar:
        return self.scalar(1)

    def unit_roundoff(self) -> Fraction:
        return Fraction(1, 2 ** (self.precision - 1))

    def sqrt(self, value: Scalar) -> Scalar:
        """Square root; in the exact regime only perfect rational squares are accepted."""
        if self.exact:
            root = exact_sqrt(Fraction(value))
            if root is None:
                raise ValueError(f"{value} is not the square of a rational")
            return root
        return self.ctx.sqrt(self.scalar(value))


def regime_of(value) -> Regime:
    if is_float(value):
        return Regime(FLOAT, value.context.prec)
    return Regime(EXACT)


def exact_sqrt(value: Fraction) -> Fraction | None:
    """Rational square root of ``value`` or ``None`` when it is irrational."""
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def like(template, value):
    """Express ``value`` in the regime of ``template``."""
    if is_float(template):
        if isinstance(value, Fraction):
            return template.context.mpf(value.numerator) / value.denominator
        return template.context.mpf(value)
    if is_float(value):
        return fraction_from_mpf(value)
    return Fraction(value)


def _slack(value):
    """Outward rounding allowance for one float operation, zero for exact values."""
    if is_float(value):
        ctx = value.context
        return abs(value) * ctx.ldexp(ctx.one, 4 - ctx.prec)
    return 0


@dataclass(frozen=True)
class BoundedSum:
    """An enclosure ``[partial, partial + tail_bound]`` of a real number.

    With ``two_sided=True`` the enclosure is ``[partial - tail, partial + tail]``.
    The exact regime never widens; the float regime widens every derived
    enclosure by a few ulps.
    """

    partial: Scalar
    tail_bound: Scalar = field(default=None)
    two_sided: bool = False

    def __post_init__(self):
        if self.tail_bound is None:
            object.__setattr__(self, "tail_bound", like(self.partial, 0))
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")

    # construction -----------------------------------------------------
    @classmethod
    def exact(cls, value: Scalar) -> "BoundedSum":
        return cls(value, like(value, 0))

    @classmethod
    def between(cls, lo: Scalar, hi: Scalar) -> "BoundedSum":
        if hi < lo:
            raise ValueError("empty enclosure")
        return cls(lo, hi - lo)

    @staticmethod
    def of(value) -> "BoundedSum":
        return value if isinstance(value, BoundedSum) else BoundedSum.exact(value)

    def convert(self, regime: Regime) -> "BoundedSum":
        lo, hi = regime.scalar(self.lo), regime.scalar(self.hi)
        if regime.exact:
            return BoundedSum.between(lo, hi)
        return BoundedSum.between(lo - _slack(lo), hi + _slack(hi))

    # endpoints --------------------------------------------------------
    @property
    def lo(self) -> Scalar:
        return self.partial - self.tail_bound if self.two_sided else self.partial

    @property
    def hi(self) -> Scalar:
        return self.partial + self.tail_bound

    @property
    def mid(self) -> Scalar:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Scalar:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.tail_bound == 0

    @property
    def value(self) -> Scalar:
        """The represented number when the enclosure is degenerate."""
        if not self.is_exact:
            raise ValueError("enclosure is not a single value")
        return self.partial

    def contains(self, value) -> bool:
        value = like(self.partial, value)
        return self.lo <= value <= self.hi

    # arithmetic -------------------------------------------------------
    @staticmethod
    def _widened(lo, hi) -> "BoundedSum":
        return BoundedSum.between(lo - _slack(lo), hi + _slack(hi))

    def _other(self, other) -> "BoundedSum":
        if isinstance(other, BoundedSum):
            return other
        return BoundedSum.exact(like(self.partial, other))

    def __add__(self, other) -> "BoundedSum":
        other = self._other(other)
        return self._widened(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other) -> "BoundedSum":
        other = self._other(other)
        return self._widened(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other) -> "BoundedSum":
        return self._other(other) - self

    def __neg__(self) -> "BoundedSum":
        return BoundedSum.between(-self.hi, -self.lo)

    def __mul__(self, other) -> "BoundedSum":
        other = self._other(other)
        if self.lo >= 0 and other.lo >= 0:
            return self._widened(self.lo * other.lo, self.hi * other.hi)
        products = [a * b for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return self._widened(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BoundedSum":
        other = self._other(other)
        if other.lo > 0 or other.hi < 0:
            one = like(other.lo, 1)
            inverse = BoundedSum._widened(one / other.hi, one / other.lo)
            return self * inverse
        raise ZeroDivisionError("divisor enclosure contains zero")

    def __rtruediv__(self, other) -> "BoundedSum":
        return self._other(other) / self

    def __pow__(self, exponent: int) -> "BoundedSum":
        if exponent < 0:
            return BoundedSum.exact(like(self.partial, 1)) / (self ** -exponent)
        out = BoundedSum.exact(like(self.partial, 1))
        for _ in range(exponent):
            out = out * self
        return out

    # certified comparisons ----------------------------------------------
    def certainly_gt(self, value) -> bool:
        return self.lo > like(self.partial, value)

    def certainly_lt(self, value) -> bool:
        return self.hi < like(self.partial, value)

    def certainly_le(self, value) -> bool:
        return self.hi <= like(self.partial, value)

    def certainly_ge(self, value) -> bool:
        return self.lo >= like(self.partial, value)

    def compare(self, value) -> int | None:
        """``+1`` if certainly above, ``-1`` if certainly below, ``0`` if exactly equal, else ``None``."""
        value = like(self.partial, value)
        if self.lo > value:
            return 1
        if self.hi < value:
            return -1
        if self.is_exact and self.partial == value:
            return 0
        return None

    def __repr__(self) -> str:
        if self.is_exact:
            return f"BoundedSum({self.partial})"
        return f"BoundedSum([{mpmath.nstr(self.lo, 20)}, {mpmath.nstr(self.hi, 20)}])"


def sum_superexp(
    term: Callable[[int], Scalar],
    k0: int,
    truncation: int | None = None,
    *,
    start: int = 0,
    ratio: Fraction = Fraction(1, 2),
    rel_tol: Fraction | None = None,
    max_terms: int = 100_000,
) -> BoundedSum:
    """Enclose ``sum(term(k) for k >= start)`` for nonnegative, eventually fast-decaying terms.

    The caller certifies that ``term(k + 1) <= ratio * term(k)`` for every
    ``k >= k0``; this is re-checked numerically for ``k0 <= k <= truncation``.
    The tail beyond the truncation is bounded by the first omitted term times
    ``1 / (1 - ratio)``.  When ``truncation`` is omitted, summation continues
    past ``k0`` until the tail is at most ``rel_tol`` times the partial sum or
    ``max_terms`` terms have been added, whichever comes first.

    Raises
    ------
    RatioConditionError
        If a checked ratio exceeds ``ratio`` (the supplied ``k0`` is too small).
    """
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    if truncation is not None and truncation < max(k0, start) - 1:
        raise ValueError("truncation must not precede k0")
    if truncation is None and rel_tol is None:
        raise ValueError("give a truncation or a relative tolerance")

    first = term(start)
    r = like(first, ratio)
    if is_float(first):
        r = r * (1 + first.context.ldexp(first.context.one, 6 - first.context.prec))
    factor = 1 / (1 - r)
    partial = like(first, 0)
    k = start
    current = first
    while True:
        if current < 0:
            raise ValueError(f"negative term at index {k}")
        partial = partial + current
        following = term(k + 1)
        if k >= k0 and following > r * current:
            raise RatioConditionError(f"term ratio exceeds {ratio} at index {k}")
        if truncation is not None:
            if k >= truncation:
                break
        elif k >= k0 and (
            following * factor <= like(first, rel_tol) * partial or k - start + 1 >= max_terms
        ):
            break
        k += 1
        current = following
    tail = following * factor
    if is_float(partial):
        tail = tail + _slack(partial) * (k - start + 2)
    return BoundedSum(partial, tail)


# ---------------------------------------------------------------------------
# determinants


@dataclass(frozen=True)
class DetResult:
    """A determinant with an absolute error bound and its certified sign.

    ``sign`` is ``None`` when the float error bound does not separate the
    value from zero (the inconclusive outcome).
    """

    value: Scalar
    error_bound: Scalar
    sign: int | None

    @property
    def inconclusive(self) -> bool:
        return self.sign is None


def _bareiss(rows: list[list[int]]) -> int:
    n = len(rows)
    a = [row[:] for row in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def _det_rational(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    entries = [[Fraction(x) for x in row] for row in matrix]
    n = len(entries)
    common = 1
    for row in entries:
        for x in row:
            common = math.lcm(common, x.denominator)
    scaled = [[int(x * common) for x in row] for row in entries]
    return Fraction(_bareiss(scaled), common**n)


def _det_float(matrix, uncertainty, ctx) -> DetResult:
    n = len(matrix)
    u = ctx.ldexp(ctx.one, 1 - ctx.prec)
    a = [[ctx.mpf(x) for x in row] for row in matrix]
    delta = [[ctx.mpf(x) for x in row] for row in uncertainty]
    # symmetric diagonal scaling keeps the Hadamard-type bound close to one
    scale = [1 / ctx.sqrt(abs(a[i][i])) if a[i][i] != 0 else ctx.one for i in range(n)]
    b = [[a[i][j] * scale[i] * scale[j] for j in range(n)] for i in range(n)]
    db = [
        [delta[i][j] * scale[i] * scale[j] + 3 * u * abs(b[i][j]) for j in range(n)]
        for i in range(n)
    ]
    lu = [row[:] for row in b]
    perm = list(range(n))
    sign = 1
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(lu[i][k]))
        if lu[p][k] == 0:
            continue
        if p != k:
            lu[k], lu[p] = lu[p], lu[k]
            perm[k], perm[p] = perm[p], perm[k]
            sign = -sign
        for i in range(k + 1, n):
            lu[i][k] = lu[i][k] / lu[k][k]
            for j in range(k + 1, n):
                lu[i][j] -= lu[i][k] * lu[k][j]
    det_b = ctx.mpf(sign)
    for k in range(n):
        det_b *= lu[k][k]
    # backward error of the factorization: |dB| <= gamma_n |L||U| (taken twice)
    gamma = 4 * n * u
    backward = [[ctx.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = ctx.zero
            for k in range(min(i, j) + 1):
                lik = ctx.one if k == i else abs(lu[i][k])
                s += lik * abs(lu[k][j])
            backward[i][j] = gamma * s
    inv = [0] * n
    for i, pi in enumerate(perm):
        inv[pi] = i
    err_rows = []
    row_norms = []
    for i in range(n):
        e = ctx.sqrt(sum((db[i][j] + backward[inv[i]][j]) ** 2 for j in range(n)))
        err_rows.append(e)
        row_norms.append(ctx.sqrt(sum(b[i][j] ** 2 for j in range(n))))
    err_b = ctx.zero
    for i in range(n):
        prod = err_rows[i]
        for j in range(n):
            if j < i:
                prod *= row_norms[j] + err_rows[j]
            elif j > i:
                prod *= row_norms[j]
        err_b += prod
    err_b += abs(det_b) * 4 * n * u
    undo = ctx.one
    for s in scale:
        undo /= s * s
    value = det_b * undo
    error = err_b * undo * (1 + 8 * n * u)
    if value - error > 0:
        certified = 1
    elif value + error < 0:
        certified = -1
    else:
        certified = None
    return DetResult(value, error, certified)


def det_exact(matrix: Sequence[Sequence], regime: Regime | None = None) -> DetResult:
    """Determinant of a square matrix of scalars or enclosures.

    Exact regime: fraction-free Bareiss elimination, zero error.  Float regime:
    LU with partial pivoting plus a rigorous but crude error bound that also
    absorbs the widths of enclosure entries.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if n == 0:
        one = Fraction(1) if regime is None or regime.exact else regime.one()
        return DetResult(one, one * 0, 1)
    flat = [x for row in matrix for x in row]
    if regime is None:
        sample = next((x.partial if isinstance(x, BoundedSum) else x for x in flat), 0)
        regime = regime_of(sample)
    if regime.exact:
        values = []
        for row in matrix:
            out = []
            for x in row:
                x = BoundedSum.of(x).value if isinstance(x, BoundedSum) else x
                out.append(regime.scalar(x))
            values.append(out)
        d = _det_rational(values)
        return DetResult(d, Fraction(0), (d > 0) - (d < 0))
    ctx = regime.ctx
    mids, widths = [], []
    for row in matrix:
        mrow, wrow = [], []
        for x in row:
            if isinstance(x, BoundedSum):
                lo, hi = regime.scalar(x.lo), regime.scalar(x.hi)
                mrow.append((lo + hi) / 2)
                wrow.append((hi - lo) / 2 + _slack(hi) + _slack(lo))
            else:
                mrow.append(regime.scalar(x))
                wrow.append(ctx.zero)
        mids.append(mrow)
        widths.append(wrow)
    return _det_float(mids, widths, ctx)

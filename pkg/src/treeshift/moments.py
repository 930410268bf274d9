"""Finite-order tests on moment sequences.

Hankel determinants decide positivity at each order, the Carleman-type
growth bounds of the subnormal example are checked with enclosures, and the
backward moment ``gamma_{-1}`` is analysed through the fact that
``det[gamma_{i+j-1}]`` is affine in it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .numerics import BoundedSum, DetResult, PrecisionError, Regime, Scalar, det_exact

UNSHIFTED = "unshifted"
SHIFTED = "shifted"


class MomentIndexError(IndexError):
    """A moment outside the stored range was requested."""


@dataclass(frozen=True)
class MomentSequence:
    """Moments ``gamma_n`` for ``-kappa <= n <= horizon``, stored by index.

    Values are scalars or enclosures.  ``kappa`` is the number of negative
    indices (``None`` for an unbounded backward range that is stored only to
    a finite depth).
    """

    values: Mapping[int, Scalar | BoundedSum]
    regime: Regime = Regime()
    note: str = ""
    normalized: bool = False

    def __post_init__(self):
        idx = sorted(self.values)
        if idx and idx != list(range(idx[0], idx[-1] + 1)):
            raise ValueError("moment indices must be contiguous")
        if self.normalized and 0 in self.values:
            g0 = BoundedSum.of(self.values[0])
            if not g0.contains(1):
                raise ValueError("normalized sequence needs gamma_0 = 1")

    @classmethod
    def from_list(cls, values: Sequence, start: int = 0, regime: Regime = Regime(), note: str = ""):
        conv = {}
        for i, v in enumerate(values):
            conv[start + i] = v if isinstance(v, BoundedSum) else regime.scalar(v)
        return cls(conv, regime, note)

    @property
    def first(self) -> int:
        return min(self.values)

    @property
    def horizon(self) -> int:
        return max(self.values)

    def __getitem__(self, n: int):
        try:
            return self.values[n]
        except KeyError:
            raise MomentIndexError(f"moment {n} not stored ({self.first}..{self.horizon})") from None

    def shifted(self, offset: int) -> "MomentSequence":
        """The sequence ``n -> gamma_{n + offset}``."""
        return MomentSequence({n - offset: v for n, v in self.values.items()}, self.regime, self.note)

    def with_value(self, n: int, value) -> "MomentSequence":
        vals = dict(self.values)
        vals[n] = value if isinstance(value, BoundedSum) else self.regime.scalar(value)
        return MomentSequence(vals, self.regime, self.note, self.normalized)


def hankel_matrix(seq: MomentSequence, shift: int, n: int) -> list[list]:
    """The ``(n+1) x (n+1)`` matrix ``[gamma_{i+j+shift}]``."""
    return [[seq[i + j + shift] for j in range(n + 1)] for i in range(n + 1)]


def _det(seq: MomentSequence, shift: int, n: int) -> DetResult:
    return det_exact(hankel_matrix(seq, shift, n), seq.regime)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a finite-order test.

    ``kind`` is one of ``ConsistentUpTo``, ``RefutedAt``, ``CertifiedNotStieltjes``.
    """

    kind: str
    order: int
    which: str | None = None

    def __str__(self) -> str:
        if self.which:
            return f"{self.kind}({self.order}, {self.which})"
        return f"{self.kind}({self.order})"


@dataclass(frozen=True)
class PositivityReport:
    n_max: int
    determinants: dict[str, list[DetResult]]
    degenerate: list[tuple[int, str]]
    verdict: Verdict

    @property
    def refuted(self) -> bool:
        return self.verdict.kind == "RefutedAt"

    def signs(self, which: str) -> list[int | None]:
        return [d.sign for d in self.determinants[which]]


def stieltjes_check(seq: MomentSequence, n_max: int | None = None) -> PositivityReport:
    """Hankel positivity of ``gamma`` and ``gamma shifted by one`` through order ``n_max``.

    Both families start at index ``seq.first``.  A certified negative
    determinant refutes; so does a positive determinant that follows a zero
    in the same family (a singular positive semidefinite leading block forces
    all larger leading minors to vanish).  Zeros alone are reported as
    degenerate.  Without ``n_max`` the largest order the stored range allows is
    used; the final unshifted order may then exceed the shifted one by one.

    Raises
    ------
    PrecisionError
        If a float determinant sign cannot be certified.
    """
    base = seq.first
    span = seq.horizon - base
    if n_max is None:
        n_max = span // 2
    elif 2 * n_max > span:
        raise MomentIndexError(f"order {n_max} needs indices up to {base + 2 * n_max}")
    dets: dict[str, list[DetResult]] = {UNSHIFTED: [], SHIFTED: []}
    degenerate: list[tuple[int, str]] = []
    zero_seen = {UNSHIFTED: False, SHIFTED: False}
    complete = -1
    for order in range(n_max + 1):
        for which, shift in ((UNSHIFTED, 0), (SHIFTED, 1)):
            if 2 * order + shift > span:
                continue
            d = _det(seq, base + shift, order)
            dets[which].append(d)
            if d.sign is None:
                raise PrecisionError(f"sign of {which} Hankel determinant of order {order} is inconclusive")
            if d.sign < 0 or (d.sign > 0 and zero_seen[which]):
                return PositivityReport(n_max, dets, degenerate, Verdict("RefutedAt", order, which))
            if d.sign == 0:
                zero_seen[which] = True
                degenerate.append((order, which))
        if 2 * order + 1 <= span:
            complete = order
    return PositivityReport(n_max, dets, degenerate, Verdict("ConsistentUpTo", complete))


# ---------------------------------------------------------------------------
# Carleman-type bounds


@dataclass(frozen=True)
class BoundRow:
    index: int
    value: BoundedSum
    bound: BoundedSum
    holds: bool | None


@dataclass(frozen=True)
class CarlemanReport:
    rows: list[BoundRow]

    @property
    def all_hold(self) -> bool:
        return all(r.holds is True for r in self.rows)

    @property
    def inconclusive(self) -> list[BoundRow]:
        return [r for r in self.rows if r.holds is None]


def carleman_bound_check(
    seq: MomentSequence, n_range: Iterable[int], c, odd_factor: int = 4, even_factor: int = 5
) -> CarlemanReport:
    """Check ``gamma_{2n+1} <= 4 n^n / c`` and ``gamma_{2n} <= 5 n^n / c``.

    ``c`` may be an enclosure; the bound is certified against its worst case.
    """
    c = BoundedSum.of(c if isinstance(c, BoundedSum) else seq.regime.scalar(c))
    rows = []
    for n in n_range:
        if n < 1:
            raise ValueError("bounds are stated for n >= 1")
        power = seq.regime.scalar(n**n)
        for index, factor in ((2 * n, even_factor), (2 * n + 1, odd_factor)):
            value = BoundedSum.of(seq[index])
            bound = BoundedSum.of(power * factor) / c
            if value.hi <= bound.lo:
                holds = True
            elif value.lo > bound.hi:
                holds = False
            else:
                holds = None
            rows.append(BoundRow(index, value, bound, holds))
    return CarlemanReport(rows)


# ---------------------------------------------------------------------------
# backward moment thresholds


@dataclass(frozen=True)
class T0Ladder:
    """Roots of ``gamma_{-1} -> det[gamma_{i+j-1}]_{0..n}`` for ``n = 1..n_max``.

    ``bounds`` are the running maxima, each a lower bound for the smallest
    admissible backward moment.
    """

    thresholds: list[Scalar]
    bounds: list[Scalar]

    @property
    def best(self) -> Scalar:
        return self.bounds[-1]


def _affine_in_backward(seq: MomentSequence, n: int) -> tuple[DetResult, DetResult]:
    """Slope and intercept of ``x -> det[gamma_{i+j-1}]_{0..n}`` with ``gamma_{-1} = x``."""
    slope = _det(seq, 1, n - 1)
    values = dict(seq.values)
    values[-1] = seq.regime.zero()
    at_zero = det_exact(hankel_matrix(MomentSequence(values, seq.regime), -1, n), seq.regime)
    return slope, at_zero


def t0_lower_bound(seq: MomentSequence, n_max: int) -> T0Ladder:
    """Lower bounds for the least admissible backward moment.

    Requires ``gamma_0 .. gamma_{2 n_max - 1}``.

    Raises
    ------
    ValueError
        If a leading minor ``det[gamma_{i+j+1}]_{0..n-1}`` is not certified positive.
    """
    if seq.first > 0 or seq.horizon < 2 * n_max - 1:
        raise MomentIndexError(f"need gamma_0 .. gamma_{2 * n_max - 1}")
    thresholds, bounds = [], []
    best = None
    for n in range(1, n_max + 1):
        slope, at_zero = _affine_in_backward(seq, n)
        if slope.sign != 1:
            raise ValueError(f"leading minor of order {n - 1} is not certified positive")
        root = -at_zero.value / slope.value
        thresholds.append(root)
        best = root if best is None or root > best else best
        bounds.append(best)
    return T0Ladder(thresholds, bounds)


@dataclass(frozen=True)
class BackwardVerdict:
    verdict: Verdict
    determinants: list[DetResult]
    degenerate: list[int]
    t0_interval: tuple[Scalar, None]


def classify_backward(seq: MomentSequence, gamma_minus1, n_max: int) -> BackwardVerdict:
    """One-sided test of whether prepending ``gamma_minus1`` keeps a Stieltjes sequence.

    Returns ``CertifiedNotStieltjes(n)`` at the first order ``n`` where
    ``det[gamma_{i+j-1}]_{0..n}`` is certified negative (or positive after a
    zero), otherwise ``ConsistentUpTo(n_max)``.  The current interval for the
    least admissible backward moment is reported alongside.

    Raises
    ------
    ValueError
        If the sequence itself fails the positivity check through ``n_max``.
    PrecisionError
        On an undecidable float determinant sign.
    """
    if seq.first != 0:
        raise ValueError("sequence must start at index 0")
    base = stieltjes_check(seq, n_max)
    if base.refuted or base.verdict.order < n_max:
        raise ValueError(f"input sequence fails the positivity check: {base.verdict}")
    extended = seq.with_value(-1, gamma_minus1)
    dets: list[DetResult] = []
    degenerate: list[int] = []
    ladder = t0_lower_bound(seq, max(n_max, 1)) if seq.horizon >= 2 * max(n_max, 1) - 1 else None
    interval = (ladder.best if ladder else seq.regime.zero(), None)
    for n in range(n_max + 1):
        d = det_exact(hankel_matrix(extended, -1, n), seq.regime)
        dets.append(d)
        if d.sign is None:
            raise PrecisionError(f"backward determinant of order {n} is inconclusive")
        if d.sign < 0 or (d.sign > 0 and degenerate):
            return BackwardVerdict(Verdict("CertifiedNotStieltjes", n), dets, degenerate, interval)
        if d.sign == 0:
            degenerate.append(n)
    return BackwardVerdict(Verdict("ConsistentUpTo", n_max), dets, degenerate, interval)

"""Weighted shifts on the one-branching-vertex tree.

``(S f)(v) = lambda_v f(par v)``.  Weights are stored squared.  Every weight
``lambda_{i,1}^2`` on an edge leaving the branching vertex may carry a common
factor ``branch_scale`` (for instance a reciprocal normalising constant that
is only known as an enclosure); keeping it separate lets exact identities
survive even when that factor is irrational.

When the branching vertex has infinitely many children, sums over them are
split into the first ``branches`` terms plus a certified remainder supplied by
``branch_tail``.  A construction may also supply ``branch_moment``, the exact
closed form of the full sum, which is then preferred.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .measures import DiscreteMeasure, moment
from .numerics import BoundedSum, Regime, Scalar, like
from .tree import (
    INF,
    Br,
    Neg,
    TreeModel,
    Vertex,
    chi_n,
    children,
    lambda_path,
    parent,
)

Weight = Scalar | BoundedSum


class TailUnavailableError(ValueError):
    """An infinite sum was requested but no remainder certificate is known."""


class MissingChildMeasureError(KeyError):
    """A child measure needed by the consistency condition was not supplied."""


class ConsistencyError(ValueError):
    """The consistency sum certainly exceeds one."""


@dataclass(frozen=True)
class WeightedShift:
    """Positive squared weights on the non-root vertices of ``tree``.

    Parameters
    ----------
    reduced_sq
        ``v -> lambda_v^2`` except that ``Br(i, 1)`` omits ``branch_scale``.
    branch_tail
        ``(I, m) -> `` enclosure of ``sum_{i > I} reduced_sq(Br(i,1)) * c_i(m)``
        where ``c_i(m)`` is the product of ``lambda_{i,j}^2`` for
        ``2 <= j <= m + 1`` and ``c_i(-1) = 1 / lambda_{i,2}^2``.
    branch_moment
        Optional closed form ``m -> branch_scale * sum_i reduced_sq(Br(i,1)) c_i(m)``;
        it may return ``None`` for orders it does not cover.
    """

    tree: TreeModel
    reduced_sq: Callable[[Vertex], Weight]
    regime: Regime = Regime()
    branch_scale: BoundedSum = field(default_factory=lambda: BoundedSum.exact(Fraction(1)))
    branch_tail: Callable[[int, int], BoundedSum] | None = None
    branch_moment: Callable[[int], Weight | None] | None = None
    branches: int = 25
    use_closed_forms: bool = True

    def with_enclosures(self) -> "WeightedShift":
        """Copy that ignores closed forms and sums explicitly with certified tails."""
        return replace(self, use_closed_forms=False)

    def scale_power(self, v: Vertex) -> int:
        return 1 if isinstance(v, Br) and v.j == 1 else 0

    def weight_sq(self, v: Vertex) -> BoundedSum:
        if parent(self.tree, v) is None:
            raise ValueError("the root carries no weight")
        w = BoundedSum.of(self.reduced_sq(v))
        if self.scale_power(v):
            w = w * self.branch_scale
        if not w.lo > 0:
            raise ValueError(f"weight at {v} is not certified positive")
        return w

    def weight(self, v: Vertex) -> Scalar:
        """``lambda_v``; exact only for perfect rational squares."""
        w = self.weight_sq(v)
        if self.regime.exact:
            return self.regime.sqrt(w.value)
        return self.regime.sqrt(w.mid)

    def branch_count(self, branches: int | None) -> int:
        if self.tree.eta != INF:
            return int(self.tree.eta) if branches is None else min(branches, int(self.tree.eta))
        return self.branches if branches is None else branches

    def chain_factor(self, i: int, m: int) -> BoundedSum:
        """``c_i(m)`` from the docstring of the class."""
        one = BoundedSum.exact(self.regime.one())
        if m == -1:
            return one / BoundedSum.of(self.reduced_sq(Br(i, 2)))
        out = one
        for j in range(2, m + 2):
            out = out * BoundedSum.of(self.reduced_sq(Br(i, j)))
        return out

    def branch_sum(self, m: int, branches: int | None = None) -> BoundedSum:
        """``sum_i lambda_{i,1}^2 c_i(m)`` over all branches, scale included."""
        if self.use_closed_forms and self.branch_moment is not None:
            closed = self.branch_moment(m)
            if closed is not None:
                return BoundedSum.of(closed)
        count = self.branch_count(branches)
        total = BoundedSum.exact(self.regime.zero())
        for i in range(1, count + 1):
            total = total + BoundedSum.of(self.reduced_sq(Br(i, 1))) * self.chain_factor(i, m)
        if self.tree.eta == INF:
            if self.branch_tail is None:
                raise TailUnavailableError("no certificate for the branches beyond the truncation")
            total = total + self.branch_tail(count, m)
        return total * self.branch_scale


@dataclass(frozen=True)
class FiniteVector:
    """Finitely many coefficients plus a bound on the squared norm of what was cut off."""

    entries: Mapping[Vertex, Scalar]
    tail_sq: Scalar = Fraction(0)

    @classmethod
    def basis(cls, v: Vertex, regime: Regime = Regime()) -> "FiniteVector":
        return cls({v: regime.one()}, regime.zero())

    def support(self) -> list[Vertex]:
        return [v for v, c in self.entries.items() if c != 0]

    def norm_sq(self) -> BoundedSum:
        values = list(self.entries.values())
        total = like(values[0], 0) if values else Fraction(0)
        for c in values:
            total += c * c
        return BoundedSum(total, like(total, self.tail_sq))


def _neg_product(S: WeightedShift, top: int, bottom: int) -> BoundedSum:
    """``prod lambda_{-l}^2`` for ``bottom <= l < top``."""
    out = BoundedSum.exact(S.regime.one())
    for l in range(bottom, top):
        out = out * S.weight_sq(Neg(l))
    return out


def norm_sq_power_basis(S: WeightedShift, u: Vertex, n: int, branches: int | None = None) -> BoundedSum:
    """``||S^n e_u||^2``, the sum of squared path products over the ``n``-th generation."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return BoundedSum.exact(S.regime.one())
    if isinstance(u, Br):
        out = BoundedSum.exact(S.regime.one())
        for j in range(u.j + 1, u.j + n + 1):
            out = out * S.weight_sq(Br(u.i, j))
        return out
    if n <= u.k:
        return _neg_product(S, u.k, u.k - n)
    return _neg_product(S, u.k, 0) * S.branch_sum(n - u.k - 1, branches)


def norm_sq_power_basis_enumerated(S: WeightedShift, u: Vertex, n: int, branches: int | None = None) -> BoundedSum:
    """Same quantity by explicit enumeration of the generation; finite trees only."""
    gen = chi_n(S.tree, u, n, branches)
    if gen.truncated:
        raise TailUnavailableError("enumeration was truncated")
    total = BoundedSum.exact(S.regime.zero())
    for v in gen.vertices:
        total = total + lambda_path(S.tree, S.weight_sq, u, v)
    return total


def apply(S: WeightedShift, f: FiniteVector, branches: int | None = None) -> FiniteVector:
    """``S f``; children of ``0`` beyond the branch bound go into ``tail_sq``."""
    if f.tail_sq:
        _tail_unknown()
    out: dict[Vertex, Scalar] = {}
    tail = S.regime.zero()
    count = S.branch_count(branches)
    for u in f.support():
        c = f.entries[u]
        for v in children(S.tree, u):
            if isinstance(v, Br) and v.j == 1 and v.i > count:
                break
            out[v] = out.get(v, S.regime.zero()) + S.weight(v) * c
        if u == Neg(0) and S.tree.eta == INF:
            if S.branch_tail is None:
                raise TailUnavailableError("no certificate for the branches beyond the truncation")
            tail += c * c * (S.branch_tail(count, 0) * S.branch_scale).hi
    return FiniteVector(out, tail)


def _tail_unknown():
    raise TailUnavailableError("cannot propagate a truncated input through the shift")


def apply_power(S: WeightedShift, f: FiniteVector, n: int, branches: int | None = None) -> FiniteVector:
    """``S^n f`` as an orthogonal combination of the ``S^n e_u``."""
    if f.tail_sq:
        _tail_unknown()
    out: dict[Vertex, Scalar] = {}
    tail = S.regime.zero()
    count = S.branch_count(branches)
    for u in f.support():
        c = f.entries[u]
        gen = chi_n(S.tree, u, n, count)
        for v in gen.vertices:
            path_sq = BoundedSum.of(lambda_path(S.tree, S.weight_sq, u, v))
            root = S.regime.sqrt(path_sq.value if S.regime.exact else path_sq.mid)
            out[v] = c * root
        if isinstance(u, Neg) and n > u.k and S.tree.eta == INF:
            if S.branch_tail is None:
                raise TailUnavailableError("no certificate for the branches beyond the truncation")
            rest = _neg_product(S, u.k, 0) * S.branch_scale * S.branch_tail(count, n - u.k - 1)
            tail += c * c * rest.hi
    return FiniteVector(out, tail)


def norm_sq_power(S: WeightedShift, f: FiniteVector, n: int, branches: int | None = None) -> BoundedSum:
    """``||S^n f||^2 = sum_u f(u)^2 ||S^n e_u||^2``."""
    total = BoundedSum.exact(S.regime.zero())
    for u in f.support():
        c = f.entries[u]
        total = total + norm_sq_power_basis(S, u, n, branches) * (c * c)
    return total


# ---------------------------------------------------------------------------
# operator tests


def _verdict(value: BoundedSum, limit=1) -> str:
    if value.certainly_gt(limit):
        return "Violated"
    if value.certainly_le(limit):
        return "Satisfied"
    return "Inconclusive"


@dataclass(frozen=True)
class HypRow:
    vertex: Vertex
    value: BoundedSum
    verdict: str


@dataclass(frozen=True)
class HyponormalityReport:
    rows: list[HypRow]

    def row(self, v: Vertex) -> HypRow:
        return next(r for r in self.rows if r.vertex == v)

    @property
    def violated(self) -> list[Vertex]:
        return [r.vertex for r in self.rows if r.verdict == "Violated"]


def hyponormality_sum(S: WeightedShift, u: Vertex, branches: int | None = None) -> BoundedSum:
    """``sum_{v in Chi(u)} lambda_v^2 / ||S e_v||^2``."""
    if isinstance(u, Br):
        nxt = Br(u.i, u.j + 1)
        return S.weight_sq(nxt) / S.weight_sq(Br(u.i, u.j + 2))
    if u.k > 0:
        child = Neg(u.k - 1)
        return S.weight_sq(child) / norm_sq_power_basis(S, child, 1, branches)
    return S.branch_sum(-1, branches)


def hyponormality_test(S: WeightedShift, vertices: Iterable[Vertex], branches: int | None = None) -> HyponormalityReport:
    rows = []
    for u in vertices:
        value = hyponormality_sum(S, u, branches)
        rows.append(HypRow(u, value, _verdict(value)))
    return HyponormalityReport(rows)


@dataclass(frozen=True)
class ParanormalityReport:
    norm_sq_f: BoundedSum
    norm_sq_sf: BoundedSum
    norm_sq_s2f: BoundedSum
    holds: bool | None


def paranormality_check(S: WeightedShift, f: FiniteVector, branches: int | None = None) -> ParanormalityReport:
    """Certified ``||S f||^4 <= ||f||^2 ||S^2 f||^2``."""
    b = f.norm_sq()
    a = norm_sq_power(S, f, 1, branches)
    c = norm_sq_power(S, f, 2, branches)
    if a.hi * a.hi <= b.lo * c.lo:
        holds = True
    elif a.lo * a.lo > b.hi * c.hi:
        holds = False
    else:
        holds = None
    return ParanormalityReport(b, a, c, holds)


@dataclass(frozen=True)
class ConsistencyReport:
    vertex: Vertex
    value: BoundedSum
    verdict: str  # "holds", "fails" or "inconclusive"


def consistency_condition(
    S: WeightedShift,
    u: Vertex,
    child_measures: Mapping[Vertex, DiscreteMeasure],
    branches: int | None = None,
) -> ConsistencyReport:
    """Enclose ``sum_{v in Chi(u)} lambda_v^2 int (1/x) d mu_v`` and compare with one.

    For infinitely many children the measures of the first ``branches`` must be
    given; the remainder is bounded through ``branch_tail``, which presumes the
    remaining child measures are the point masses of a singleton partition.
    """
    count = S.branch_count(branches)
    total = BoundedSum.exact(S.regime.zero())
    for v in children(S.tree, u):
        if isinstance(v, Br) and v.j == 1 and v.i > count:
            if S.branch_tail is None:
                raise TailUnavailableError("no certificate for the branches beyond the truncation")
            total = total + S.branch_tail(count, -1) * S.branch_scale
            break
        if v not in child_measures:
            raise MissingChildMeasureError(str(v))
        total = total + S.weight_sq(v) * moment(child_measures[v], -1)
    if total.certainly_le(1):
        verdict = "holds"
    elif total.certainly_gt(1):
        verdict = "fails"
    else:
        verdict = "inconclusive"
    return ConsistencyReport(u, total, verdict)


def mu_u_from_children(
    S: WeightedShift, u: Vertex, child_measures: Mapping[Vertex, DiscreteMeasure]
) -> DiscreteMeasure:
    """``sum_v lambda_v^2 (1/x) mu_v + eps_u delta_0`` with ``eps_u = 1 - consistency sum``.

    When the consistency sum is only known to within an enclosure straddling
    one, ``eps_u`` is the enclosure clipped at zero.

    Raises
    ------
    ConsistencyError
        If the consistency sum certainly exceeds one.
    """
    if isinstance(u, Neg) and u.k == 0 and S.tree.eta == INF:
        raise ValueError("the branching vertex has infinitely many children")
    report = consistency_condition(S, u, child_measures)
    if report.verdict == "fails":
        raise ConsistencyError(f"consistency sum at {u} exceeds one: {report.value}")
    result = DiscreteMeasure((), S.regime.zero(), S.regime)
    for v in children(S.tree, u):
        result = result.plus(child_measures[v].reweighted(-1).scaled(S.weight_sq(v)))
    eps = BoundedSum.exact(S.regime.one()) - report.value
    if eps.is_exact:
        mass = eps.value
    else:
        zero = S.regime.zero()
        mass = BoundedSum.between(max(eps.lo, zero), max(eps.hi, zero))
    return DiscreteMeasure(result.families, mass, S.regime)

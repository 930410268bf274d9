"""Realising a weighted shift on a rootless tree as a composition operator.

With point masses ``alpha(v)`` satisfying ``alpha(v) = lambda_v^2 alpha(par v)``
and ``phi = par``, the map ``(U f)(u) = f(u) / sqrt(alpha(u))`` intertwines the
shift with composition by ``phi``.  All checks are done on squares so that
exact arithmetic survives.  The masses are stored as a reduced part times an
integer power of the shift's ``branch_scale``, which keeps them exact when
that scale is irrational.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .numerics import BoundedSum
from .shift import FiniteVector, WeightedShift
from .tree import Br, Neg, Vertex, children, format_vertex, parent, truncation_vertices


class TruncationTooSmallError(ValueError):
    """The vertex truncation does not cover the support and children of a vector."""


def _exact_or_enclosure(value):
    if isinstance(value, BoundedSum) and value.is_exact:
        return value.value
    return value


def _mul(a, b):
    if isinstance(a, BoundedSum) or isinstance(b, BoundedSum):
        return BoundedSum.of(a) * BoundedSum.of(b)
    return a * b


def _div(a, b):
    if isinstance(a, BoundedSum) or isinstance(b, BoundedSum):
        return BoundedSum.of(a) / BoundedSum.of(b)
    return a / b


def _equal(a, b) -> bool:
    """Exact equality for scalars, overlap for enclosures."""
    if isinstance(a, BoundedSum) or isinstance(b, BoundedSum):
        a, b = BoundedSum.of(a), BoundedSum.of(b)
        return not (a.hi < b.lo or b.hi < a.lo)
    return a == b


@dataclass(frozen=True)
class MeasureSpaceOnV:
    """Point masses ``alpha(v) = reduced[v] * scale ** power[v]`` on a finite vertex set."""

    anchor: Vertex
    reduced: Mapping[Vertex, object]
    power: Mapping[Vertex, int]
    scale: BoundedSum
    depth: int
    branches: int
    neg_depth: int

    @property
    def vertices(self) -> list[Vertex]:
        return list(self.reduced)

    def alpha(self, v: Vertex) -> BoundedSum:
        return BoundedSum.of(self.reduced[v]) * self.scale ** self.power[v]

    def is_frontier(self, v: Vertex) -> bool:
        """Vertices whose children fall outside the truncation."""
        return isinstance(v, Br) and v.j == self.depth

    def to_json(self) -> dict:
        return {
            "anchor": format_vertex(self.anchor),
            "alpha": {
                format_vertex(v): {"reduced": str(_exact_or_enclosure(r)), "scale_power": self.power[v]}
                for v, r in self.reduced.items()
            },
        }


def build_alpha(
    S: WeightedShift, z: Vertex, depth: int, branches: int | None = None, neg_depth: int | None = None
) -> MeasureSpaceOnV:
    """Masses normalised by ``alpha(z) = 1`` on the truncation.

    The ancestors of ``z`` receive reciprocal products of weights along the
    path, every other vertex the forward recursion from its parent.

    Raises
    ------
    ValueError
        If the tree has a root or ``z`` lies outside the truncation.
    """
    tree = S.tree
    if tree.rooted:
        raise ValueError("a rooted tree has no parent map at the root")
    count = S.branch_count(branches)
    neg_depth = depth if neg_depth is None else neg_depth
    verts = truncation_vertices(tree, depth, count, neg_depth)
    if z not in verts:
        raise ValueError(f"anchor {z} lies outside the truncation")
    one = S.regime.one()
    top = Neg(neg_depth)

    # climb from z to the top of the truncation: alpha(par^k z) = prod lambda^{-2}
    reduced: dict[Vertex, object] = {z: one}
    power: dict[Vertex, int] = {z: 0}
    v = z
    while v != top:
        p = parent(tree, v)
        reduced[p] = _div(reduced[v], _exact_or_enclosure(S.reduced_sq(v)))
        power[p] = power[v] - S.scale_power(v)
        v = p

    # forward recursion everywhere else, parents first
    for v in verts:
        if v in reduced:
            continue
        p = parent(tree, v)
        reduced[v] = _mul(_exact_or_enclosure(S.reduced_sq(v)), reduced[p])
        power[v] = power[p] + S.scale_power(v)
    ordered = {v: reduced[v] for v in verts}
    return MeasureSpaceOnV(z, ordered, {v: power[v] for v in verts}, S.branch_scale, depth, count, neg_depth)


@dataclass(frozen=True)
class UnitaryReport:
    checked: list[Vertex]
    failures: list[Vertex]
    norm_preserved: bool
    surjective_on_interior: bool

    @property
    def ok(self) -> bool:
        return not self.failures and self.norm_preserved and self.surjective_on_interior


def unitary_check(S: WeightedShift, space: MeasureSpaceOnV, f: FiniteVector) -> UnitaryReport:
    """Verify ``f(phi v)^2 alpha(v) / alpha(phi v) = (S f)(v)^2`` on the truncation interior.

    Both sides are compared as reduced parts and scale exponents, so the
    comparison is exact whenever the reduced weights are.

    Raises
    ------
    TruncationTooSmallError
        If ``f`` is supported on a frontier vertex or outside the truncation.
    """
    members = set(space.reduced)
    for u in f.support():
        if u not in members or space.is_frontier(u):
            raise TruncationTooSmallError(f"vertex {u} needs its children inside the truncation")
    zero = S.regime.zero()
    checked, failures = [], []
    for v in space.reduced:
        p = parent(S.tree, v)
        if p not in members:
            continue
        checked.append(v)
        fp = f.entries.get(p, zero)
        if fp == 0:
            continue  # both sides vanish
        left = _mul(_div(space.reduced[v], space.reduced[p]), fp * fp)
        left_power = space.power[v] - space.power[p]
        right = _mul(_exact_or_enclosure(S.reduced_sq(v)), fp * fp)
        right_power = S.scale_power(v)
        if left_power != right_power or not _equal(left, right):
            failures.append(v)

    norm_ok = True
    for u in f.support():
        c = f.entries[u]
        mass = space.reduced[u]
        if not _equal(_mul(_div(c * c, mass), mass), c * c):
            norm_ok = False

    surjective = True
    for v in space.reduced:
        if space.is_frontier(v):
            continue
        first_child = next(children(S.tree, v))
        if first_child not in members:
            surjective = False
    return UnitaryReport(checked, failures, norm_ok, surjective)


@dataclass(frozen=True)
class UniquenessReport:
    constant: bool
    ratio: object
    power_offset: int


def alpha_uniqueness(first: MeasureSpaceOnV, second: MeasureSpaceOnV) -> UniquenessReport:
    """Whether ``second = t * first`` for one constant ``t`` on the common vertices."""
    ratios, offsets = [], set()
    for v in first.reduced:
        if v not in second.reduced:
            continue
        ratios.append(_div(second.reduced[v], first.reduced[v]))
        offsets.add(second.power[v] - first.power[v])
    base = ratios[0]
    constant = len(offsets) == 1 and all(_equal(r, base) for r in ratios)
    return UniquenessReport(constant, base, offsets.pop() if len(offsets) == 1 else 0)

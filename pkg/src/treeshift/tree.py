"""The directed tree with one branching vertex.

Vertices are ``Neg(k)`` on the backward path ``0, -1, -2, ...`` and ``Br(i, j)``
on the ``i``-th branch leaving vertex ``0``.  Either count may be infinite
(``math.inf``); infinite sets are produced lazily and every materialised set
reports whether it was truncated.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import count
from typing import Callable, Iterator, Union

INF = math.inf


@dataclass(frozen=True, order=True)
class Neg:
    """Vertex ``-k`` of the backward path (``Neg(0)`` is the branching vertex)."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("Neg index must be nonnegative")

    def __str__(self) -> str:
        return "0" if self.k == 0 else f"-{self.k}"


@dataclass(frozen=True, order=True)
class Br:
    """Vertex ``(i, j)``: the ``j``-th vertex of branch ``i``."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1:
            raise ValueError("branch indices start at 1")

    def __str__(self) -> str:
        return f"({self.i},{self.j})"


Vertex = Union[Neg, Br]

_BRANCH = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)$")
_BACKWARD = re.compile(r"^-?(\d+)$")


def format_vertex(v: Vertex) -> str:
    return str(v)


def parse_vertex(text: str) -> Vertex:
    """Inverse of :func:`format_vertex`: ``"0"``, ``"-3"`` or ``"(i,j)"``."""
    text = text.strip()
    m = _BRANCH.match(text)
    if m:
        return Br(int(m.group(1)), int(m.group(2)))
    m = _BACKWARD.match(text)
    if m:
        k = int(m.group(1))
        if k > 0 and not text.startswith("-"):
            raise ValueError(f"positive integers are not vertices: {text!r}")
        return Neg(k)
    raise ValueError(f"not a vertex: {text!r}")


@dataclass(frozen=True)
class TreeModel:
    """Tree with ``eta`` branches at ``0`` and ``kappa`` ancestors of ``0``."""

    eta: int | float
    kappa: int | float

    def __post_init__(self):
        if not (self.eta == INF or (isinstance(self.eta, int) and self.eta >= 2)):
            raise ValueError("eta must be an integer >= 2 or infinite")
        if not (self.kappa == INF or (isinstance(self.kappa, int) and self.kappa >= 0)):
            raise ValueError("kappa must be a nonnegative integer or infinite")

    @property
    def rooted(self) -> bool:
        return self.kappa != INF

    @property
    def root(self) -> Vertex | None:
        return Neg(self.kappa) if self.rooted else None

    def contains(self, v: Vertex) -> bool:
        if isinstance(v, Neg):
            return v.k <= self.kappa
        return v.i <= self.eta


def _check(t: TreeModel, v: Vertex) -> None:
    if not t.contains(v):
        raise ValueError(f"{v} is not a vertex of the tree")


def parent(t: TreeModel, v: Vertex) -> Vertex | None:
    _check(t, v)
    if isinstance(v, Neg):
        return Neg(v.k + 1) if v.k + 1 <= t.kappa else None
    return Neg(0) if v.j == 1 else Br(v.i, v.j - 1)


def children(t: TreeModel, v: Vertex) -> Iterator[Vertex]:
    """Children of ``v``; infinite at ``Neg(0)`` when ``eta`` is infinite."""
    _check(t, v)
    if isinstance(v, Br):
        yield Br(v.i, v.j + 1)
    elif v.k > 0:
        yield Neg(v.k - 1)
    else:
        branches = count(1) if t.eta == INF else range(1, t.eta + 1)
        for i in branches:
            yield Br(i, 1)


@dataclass(frozen=True)
class VertexSet:
    """A materialised vertex set and whether branches beyond the bound were dropped."""

    vertices: tuple[Vertex, ...]
    truncated: bool


def iter_chi_n(t: TreeModel, u: Vertex, n: int) -> Iterator[Vertex]:
    """Lazy enumeration of the ``n``-th generation below ``u``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check(t, u)
    if isinstance(u, Br):
        yield Br(u.i, u.j + n)
    elif n <= u.k:
        yield Neg(u.k - n)
    else:
        depth = n - u.k
        branches = count(1) if t.eta == INF else range(1, t.eta + 1)
        for i in branches:
            yield Br(i, depth)


def chi_n(t: TreeModel, u: Vertex, n: int, branches: int | None = None) -> VertexSet:
    """The ``n``-th generation below ``u`` with at most ``branches`` branch indices."""
    if branches is None and t.eta == INF and isinstance(u, Neg) and n > u.k:
        raise ValueError("infinite generation: give a branch bound")
    limit = t.eta if branches is None else min(branches, t.eta)
    out = []
    truncated = False
    for v in iter_chi_n(t, u, n):
        if isinstance(v, Br) and v.i > limit:
            truncated = True
            break
        out.append(v)
    return VertexSet(tuple(out), truncated)


def ancestor(t: TreeModel, v: Vertex, n: int) -> Vertex | None:
    """``par^n(v)`` or ``None`` when the path leaves the tree at the root."""
    for _ in range(n):
        if v is None:
            return None
        v = parent(t, v)
    return v


def depth_below(t: TreeModel, u: Vertex, v: Vertex) -> int | None:
    """The ``n`` with ``v`` in the ``n``-th generation below ``u``, else ``None``."""
    _check(t, u)
    _check(t, v)
    if isinstance(u, Br):
        if isinstance(v, Br) and v.i == u.i and v.j >= u.j:
            return v.j - u.j
        return None
    if isinstance(v, Neg):
        return u.k - v.k if v.k <= u.k else None
    return u.k + v.j


def lambda_path(t: TreeModel, weights: Callable[[Vertex], object], u: Vertex, v: Vertex):
    """Product of ``weights`` over the edges from ``u`` down to ``v`` (1 if ``v == u``)."""
    n = depth_below(t, u, v)
    if n is None:
        raise ValueError(f"{v} is not a descendant of {u}")
    product = 1
    w = v
    for _ in range(n):
        product = weights(w) * product
        w = parent(t, w)
    return product


def truncation_vertices(t: TreeModel, depth: int, branches: int, neg_depth: int | None = None) -> list[Vertex]:
    """``Neg(k)`` for ``k <= min(kappa, neg_depth)`` and ``Br(i, j)`` for ``i <= branches, j <= depth``."""
    neg_depth = depth if neg_depth is None else neg_depth
    top = int(min(t.kappa, neg_depth))
    out: list[Vertex] = [Neg(k) for k in range(top, -1, -1)]
    for i in range(1, int(min(branches, t.eta)) + 1):
        out.extend(Br(i, j) for j in range(1, depth + 1))
    return out

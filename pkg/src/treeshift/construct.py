"""Weights from a moment system, a representing measure and a partition of its atoms.

Given ``gamma_n`` (``n >= -kappa``, ``gamma_0 = 1``), a measure ``rho`` with
``int x^n d rho = gamma_{n+1}`` and a partition of the atoms of ``rho`` into
groups ``Omega_i``, the shift on the tree with ``eta`` branches is

* ``lambda_{i,1}^2 = rho(Omega_i)``,
* ``lambda_{i,j}^2`` the ratio of consecutive moments of ``rho`` restricted to
  ``Omega_i``,
* ``lambda_{-k}^2 = gamma_{-k} / gamma_{-(k+1)}``.

Two instances are provided: the non-hyponormal q-lattice example and the
subnormal example built from a geometric and a Gaussian atom family.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .measures import (
    AtomFamily,
    DiscreteMeasure,
    GaussianAtoms,
    GeometricAtoms,
    InterleavedAtoms,
    QStieltjesFamily,
    build_lambda_a,
    moment,
)
from .moments import MomentSequence, T0Ladder, stieltjes_check, t0_lower_bound
from .numerics import BoundedSum, PrecisionError, Regime, Scalar
from .shift import ConsistencyReport, WeightedShift, consistency_condition
from .tree import INF, Br, Neg, TreeModel, Vertex


class ConstructionError(ValueError):
    """The inputs violate a hypothesis of the construction."""


# ---------------------------------------------------------------------------
# partitions


class Partition:
    """Groups of atoms of ``rho`` sharing the common scale of its families."""

    eta: int | float
    scale: BoundedSum
    singleton: bool

    def reduced_moment(self, i: int, m: int) -> BoundedSum:
        """``int_{Omega_i} x^m`` against ``rho`` without its common scale."""
        raise NotImplementedError

    def tail(self, count: int, m: int) -> BoundedSum:
        """``sum_{i > count}`` of :meth:`reduced_moment` (infinite partitions only)."""
        raise NotImplementedError

    def piece(self, i: int) -> DiscreteMeasure:
        """The probability measure ``rho(. & Omega_i) / rho(Omega_i)``."""
        raise NotImplementedError


@dataclass(frozen=True)
class SingletonPartition(Partition):
    """One atom per group, in the enumeration order of the single family of ``rho``."""

    rho: DiscreteMeasure
    singleton: bool = field(default=True, init=False)

    def __post_init__(self):
        if len(self.rho.families) != 1 or self.rho.families[0].shift != 0:
            raise ConstructionError("singleton partition expects a single unshifted atom family")
        if self.rho.has_mass_at_zero():
            raise ConstructionError("rho must not charge the origin")

    @property
    def family(self) -> AtomFamily:
        return self.rho.families[0]

    @property
    def eta(self):
        return self.family.source.length

    @property
    def scale(self) -> BoundedSum:
        return self.family.scale

    def position(self, i: int) -> Scalar:
        return self.family.source.atom(i - 1)[0]

    def reduced_moment(self, i: int, m: int) -> BoundedSum:
        x, w = self.family.source.atom(i - 1)
        return BoundedSum.exact(w * x**m)

    def tail(self, count: int, m: int) -> BoundedSum:
        return self.family.source.tail(count, m)

    def piece(self, i: int) -> DiscreteMeasure:
        return DiscreteMeasure.from_atoms([(self.position(i), 1)], regime=self.rho.regime)


@dataclass(frozen=True)
class FamilyPartition(Partition):
    """Each atom family of ``rho`` is one group."""

    rho: DiscreteMeasure
    singleton: bool = field(default=False, init=False)

    def __post_init__(self):
        fams = self.rho.families
        if len(fams) < 2:
            raise ConstructionError("need at least two groups")
        if any(f.scale != fams[0].scale or f.shift != 0 for f in fams):
            raise ConstructionError("families must share one scale and be unshifted")

    @property
    def eta(self) -> int:
        return len(self.rho.families)

    @property
    def scale(self) -> BoundedSum:
        return self.rho.families[0].scale

    def reduced_moment(self, i: int, m: int) -> BoundedSum:
        return self.rho.families[i - 1].reduced_moment(m)

    def tail(self, count: int, m: int) -> BoundedSum:
        raise ConstructionError("finite partition has no tail")

    def piece(self, i: int) -> DiscreteMeasure:
        fam = self.rho.families[i - 1]
        mass = fam.moment(0)
        return DiscreteMeasure((fam,), self.rho.regime.zero(), self.rho.regime).scaled(1 / mass)


def singleton_partition(rho: DiscreteMeasure) -> SingletonPartition:
    return SingletonPartition(rho)


# ---------------------------------------------------------------------------
# moment systems


@dataclass
class GammaSystem:
    """``gamma_n`` for ``n >= -kappa`` given by a forward rule and a backward rule, cached."""

    forward: Callable[[int], Scalar | BoundedSum]
    backward: Callable[[int], Scalar | BoundedSum]
    kappa: int | float
    regime: Regime
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, n: int):
        if n < -self.kappa:
            raise IndexError(f"gamma_{n} is outside the system (kappa = {self.kappa})")
        if n not in self._cache:
            self._cache[n] = self.forward(n) if n >= 0 else self.backward(-n)
        return self._cache[n]

    def sequence(self, lo: int, hi: int, note: str = "") -> MomentSequence:
        return MomentSequence({n: self(n) for n in range(lo, hi + 1)}, self.regime, note)


def backward_moment_rule(
    forward: Callable[[int], Scalar],
    start: Callable[[int], Scalar],
    n_max: int,
    regime: Regime,
) -> Callable[[int], Scalar]:
    """Choose ``gamma_{-k}`` so the prepended sequence passes Hankel tests with margin.

    Beginning from ``start(k)``, the candidate is doubled until half of it
    still gives strictly positive determinants of both Hankel families through
    order ``n_max``.  The determinant ``det[gamma_{i+j-k}]`` grows with
    ``gamma_{-k}``, so the chosen value clears the finite-order threshold by a
    factor of two.
    """
    chosen: dict[int, Scalar] = {}

    def value(n: int):
        return chosen[-n] if n < 0 else forward(n)

    def gamma_minus(k: int) -> Scalar:
        for j in range(1, k + 1):
            if j in chosen:
                continue
            candidate = regime.scalar(start(j))
            for _ in range(400):
                probe = {-j: candidate / 2}
                probe.update({n: value(n) for n in range(-j + 1, -j + 2 * n_max + 2)})
                try:
                    report = stieltjes_check(MomentSequence(probe, regime), n_max)
                    ok = not report.refuted and not report.degenerate
                except PrecisionError:
                    ok = False
                if ok:
                    break
                candidate *= 2
            else:
                raise ConstructionError(f"no backward moment found for index {-j}")
            chosen[j] = candidate
        return chosen[k]

    return gamma_minus


@dataclass(frozen=True)
class ConstructionInput:
    gamma: GammaSystem
    rho: DiscreteMeasure
    partition: Partition
    eta: int | float
    kappa: int | float
    nu: DiscreteMeasure | None = None
    rho_moment: Callable[[int], Scalar | BoundedSum] | None = None
    branches: int = 25
    checked_orders: int = 4


def _validate(inp: ConstructionInput) -> None:
    if not BoundedSum.of(inp.gamma(0)).contains(1):
        raise ConstructionError("gamma_0 must equal 1")
    if inp.partition.eta != inp.eta:
        raise ConstructionError("partition size does not match eta")
    for n in range(inp.checked_orders + 1):
        got = moment(inp.rho, n)
        want = BoundedSum.of(inp.gamma(n + 1))
        if got.hi < want.lo or want.hi < got.lo:
            raise ConstructionError(f"moment {n} of rho does not match gamma_{n + 1}")
    top = inp.checked_orders if inp.kappa == INF else min(int(inp.kappa) + 1, inp.checked_orders)
    for n in range(1, top + 1):
        if not moment(inp.rho, -n).lo > 0:
            raise ConstructionError(f"reciprocal moment of order {n} is not positive")
    count = inp.eta if inp.eta != INF else inp.branches
    for i in range(1, int(count) + 1):
        if not (inp.partition.reduced_moment(i, 0) * inp.partition.scale).lo > 0:
            raise ConstructionError(f"group {i} has no mass")


def generic_chain_weight(partition: Partition, i: int, j: int) -> BoundedSum:
    """``lambda_{i,j}^2`` for ``j >= 2`` from consecutive moments of the group."""
    return partition.reduced_moment(i, j - 1) / partition.reduced_moment(i, j - 2)


def build_weights(inp: ConstructionInput) -> WeightedShift:
    """The weighted shift of the construction on the tree with ``inp.eta`` branches."""
    _validate(inp)
    tree = TreeModel(inp.eta, inp.kappa)
    part = inp.partition
    gamma = inp.gamma
    regime = inp.rho.regime

    def reduced_sq(v: Vertex):
        if isinstance(v, Neg):
            if v.k >= tree.kappa:
                raise ValueError("the root carries no weight")
            return _ratio(gamma(-v.k), gamma(-v.k - 1))
        if v.j == 1:
            mass = part.reduced_moment(v.i, 0)
            return mass.value if mass.is_exact else mass
        if part.singleton:
            return part.position(v.i)
        return generic_chain_weight(part, v.i, v.j)

    tail = None
    if inp.eta == INF:
        if not part.singleton:
            raise ConstructionError("infinite partitions must be singletons")
        tail = part.tail

    closed_form = None
    if inp.rho_moment is not None:
        rho_moment = inp.rho_moment

        def closed(m: int):
            # sum_i rho(Omega_i) c_i(m) equals int x^m d rho for m >= 0 and,
            # for singleton groups, also for m = -1
            if m >= 0 or part.singleton:
                return rho_moment(m)
            return None

        closed_form = closed

    return WeightedShift(
        tree=tree,
        reduced_sq=lru_cache(maxsize=None)(reduced_sq),
        regime=regime,
        branch_scale=part.scale,
        branch_tail=tail,
        branch_moment=closed_form,
        branches=inp.branches,
    )


def _ratio(a, b):
    if isinstance(a, BoundedSum) or isinstance(b, BoundedSum):
        return BoundedSum.of(a) / BoundedSum.of(b)
    return a / b


# ---------------------------------------------------------------------------
# the q-lattice instance


@dataclass(frozen=True)
class MainRecord:
    """Expected values accompanying the q-lattice instance."""

    family: QStieltjesFamily
    t: Scalar
    kappa: int | float
    gamma: GammaSystem
    rho: DiscreteMeasure
    partition: SingletonPartition
    reciprocal_moment: Scalar
    t0_ladder: T0Ladder
    n_max: int

    @property
    def zeta_minus1(self) -> Scalar:
        return self.family.zeta(-1)

    def expected_norm_sq(self, u: Vertex, n: int) -> Scalar:
        """Closed form of ``||S^n e_u||^2`` for this instance."""
        if isinstance(u, Br):
            return self.partition.position(u.i) ** n
        return _ratio(self.gamma(n - u.k), self.gamma(-u.k))

    def child_measures(self, count: int) -> dict[Vertex, DiscreteMeasure]:
        return {Br(i, 1): self.partition.piece(i) for i in range(1, count + 1)}

    def notes(self) -> list[str]:
        out = []
        if self.t >= self.zeta_minus1:
            out.append("t >= zeta_{-1}: the reciprocal moment is at most one")
        if self.t < self.t0_ladder.best:
            out.append("t lies below a certified lower bound for t0")
        return out


def main_example(
    q="1/4",
    a=1,
    t=1,
    kappa: int | float = 2,
    truncation: int = 12,
    regime: Regime = Regime(),
    n_max: int = 6,
    backward: dict[int, object] | None = None,
) -> tuple[WeightedShift, MainRecord]:
    """The non-hyponormal shift built from the normalised q-lattice measure.

    ``rho = lambda_a / t`` with all atoms as singleton groups, so ``eta`` is
    infinite; ``gamma_0 = 1`` and ``gamma_n = zeta_{n-1} / t`` for ``n >= 1``.
    Backward moments come from ``backward`` when given, otherwise from
    :func:`backward_moment_rule` seeded with ``zeta_{-(k+1)} / t``.
    ``truncation`` is the number of lattice indices ``|k| <= K`` enumerated
    explicitly; branches beyond them enter through certified tails.
    """
    fam = QStieltjesFamily(q, a, regime)
    t = regime.scalar(t)
    if t <= 0:
        raise ConstructionError("t must be positive")
    lam = build_lambda_a(fam, truncation)
    rho = lam.scaled(BoundedSum.exact(1 / t))

    def forward(n: int):
        return regime.one() if n == 0 else fam.zeta(n - 1) / t

    given = {int(k): regime.scalar(v) for k, v in (backward or {}).items()}
    rule = backward_moment_rule(forward, lambda k: fam.zeta(-(k + 1)) / t, n_max, regime)

    def backward_value(k: int):
        return given[k] if k in given else rule(k)

    gamma = GammaSystem(forward, backward_value, kappa, regime)
    partition = SingletonPartition(rho)

    def rho_moment(m: int):
        value = fam.zeta(m) / t
        return value if regime.exact else BoundedSum.exact(value).convert(regime)

    branches = 2 * truncation + 1
    inp = ConstructionInput(gamma, rho, partition, INF, kappa, None, rho_moment, branches)
    shift = build_weights(inp)
    zeta = MomentSequence({n: fam.zeta(n) for n in range(2 * n_max)}, regime, "zeta")
    ladder = t0_lower_bound(zeta, n_max)
    record = MainRecord(fam, t, kappa, gamma, rho, partition, fam.zeta(-1) / t, ladder, n_max)
    return shift, record


# ---------------------------------------------------------------------------
# the subnormal instance


@dataclass(frozen=True)
class SubnormalRecord:
    normalizer: BoundedSum
    gamma: GammaSystem
    rho: DiscreteMeasure
    nu: DiscreteMeasure
    partition: Partition
    kappa: int | float
    eta: int | float

    def child_measures(self, count: int | None = None) -> dict[Vertex, DiscreteMeasure]:
        total = self.eta if self.eta != INF else count
        return {Br(i, 1): self.partition.piece(i) for i in range(1, int(total) + 1)}

    def consistency(self, shift: WeightedShift) -> ConsistencyReport:
        return consistency_condition(shift, Neg(0), self.child_measures(shift.branches), shift.branches)


def subnormal_example(
    truncation: int = 20,
    kappa: int | float = 2,
    eta: int | float = 2,
    precision: int = 256,
    series_terms: int | None = None,
) -> tuple[WeightedShift, SubnormalRecord]:
    """The subnormal shift from ``rho = (sum 2^{-j} delta_{1/j} + sum e^{-j^2} delta_j) / c``.

    ``c`` makes ``int 1/x d rho = 1``.  With ``eta = 2`` the two families form
    the two groups; with infinite ``eta`` every atom is its own group, the
    families interleaved.  ``truncation`` atoms per family are enumerated;
    ``series_terms`` optionally caps the terms added in each tail enclosure.
    """
    regime = Regime("float", precision)
    geo = GeometricAtoms(regime, series_terms)
    gauss = GaussianAtoms(regime, series_terms)
    one = BoundedSum.exact(regime.one())
    c = AtomFamily(geo, truncation, one).reduced_moment(-1) + AtomFamily(gauss, truncation, one).reduced_moment(-1)
    scale = 1 / c
    if eta == 2:
        families = (AtomFamily(geo, truncation, scale), AtomFamily(gauss, truncation, scale))
        rho = DiscreteMeasure(families, regime.zero(), regime)
        partition: Partition = FamilyPartition(rho)
    elif eta == INF:
        mixed = InterleavedAtoms(geo, gauss)
        rho = DiscreteMeasure((AtomFamily(mixed, 2 * truncation, scale),), regime.zero(), regime)
        partition = SingletonPartition(rho)
    else:
        raise ConstructionError("eta must be 2 or infinite for this instance")

    def forward(n: int):
        return one if n == 0 else moment(rho, n - 1)

    def backward_value(k: int):
        return moment(rho, -k - 1)

    gamma = GammaSystem(forward, backward_value, kappa, regime)

    def rho_moment(m: int):
        # int 1/x d rho = 1 holds by the choice of c
        return regime.one() if m == -1 else moment(rho, m)

    branches = 2 * truncation if eta == INF else 2
    inp = ConstructionInput(gamma, rho, partition, eta, kappa, rho.reweighted(-1), rho_moment, branches)
    shift = build_weights(inp)
    record = SubnormalRecord(c, gamma, rho, rho.reweighted(-1), partition, kappa, eta)
    return shift, record

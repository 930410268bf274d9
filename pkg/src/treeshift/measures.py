"""Discrete positive measures on the half line and their moments.

A :class:`DiscreteMeasure` is a sum of :class:`AtomFamily` components plus an
optional point mass at the origin.  Each family draws its atoms from an
:class:`AtomSequence`, keeps the first ``n_explicit`` of them explicitly and
bounds the remainder through a ratio certificate, so infinite measures such as
the q-lattice measure are handled with certified enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

import mpmath

from .numerics import (
    BoundedSum,
    PrecisionError,
    Regime,
    Scalar,
    exact_sqrt,
    like,
    sum_superexp,
)

RATIO_STEPS = (Fraction(1, 2), Fraction(3, 4), Fraction(7, 8))
_SEARCH_LIMIT = 10_000


class InfiniteMomentError(ValueError):
    """A negative moment was requested from a measure with mass at the origin."""


class NotBackwardExtendableError(ValueError):
    """The requested backward moment is smaller than the reciprocal moment."""


# ---------------------------------------------------------------------------
# atom sources


class AtomSequence:
    """Lazily enumerated atoms ``(x_i, w_i)`` with positive positions and weights.

    Subclasses provide :meth:`atom` and :meth:`tail`, the latter an enclosure
    of ``sum(w_i * x_i**n for i >= start)``.
    """

    regime: Regime
    length: float = math.inf

    def atom(self, index: int) -> tuple[Scalar, Scalar]:
        raise NotImplementedError

    def tail(self, start: int, n: int) -> BoundedSum:
        raise NotImplementedError

    def is_finite(self) -> bool:
        return self.length != math.inf


@dataclass(frozen=True)
class FiniteAtoms(AtomSequence):
    atoms: tuple[tuple[Scalar, Scalar], ...]
    regime: Regime = Regime()

    @property
    def length(self) -> int:
        return len(self.atoms)

    def atom(self, index: int) -> tuple[Scalar, Scalar]:
        return self.atoms[index]

    def tail(self, start: int, n: int) -> BoundedSum:
        total = self.regime.zero()
        for x, w in self.atoms[start:]:
            total += w * x**n
        return BoundedSum.exact(total)


class RatioCertifiedSeries(AtomSequence):
    """One-sided infinite atom sequence whose term ratios admit a monotone bound.

    ``ratio_sup(i, n)`` must bound ``w_{j+1} x_{j+1}^n / (w_j x_j^n)`` for every
    ``j >= i``.
    """

    def ratio_sup(self, index: int, n: int) -> Scalar:
        raise NotImplementedError

    max_terms: int | None = None

    def tail(self, start: int, n: int) -> BoundedSum:
        return certified_tail(self.atom, self.ratio_sup, start, n, self.regime, self.max_terms)


def tail_tolerance(regime: Regime) -> Fraction:
    """Relative accuracy to which lazily enumerated series are summed."""
    bits = 200 if regime.exact else max(regime.precision - 12, 8)
    return Fraction(1, 2**bits)


def certified_tail(
    atom, ratio_sup, start: int, n: int, regime: Regime, max_terms: int | None = None
) -> BoundedSum:
    """Enclose ``sum_{i >= start} w_i x_i^n`` from an atom map and its ratio certificate."""

    def term(i):
        x, w = atom(i)
        return w * x**n

    for r in RATIO_STEPS:
        for k0 in range(start, start + _SEARCH_LIMIT):
            bound = ratio_sup(k0, n)
            if bound <= like(bound, r):
                return sum_superexp(
                    term,
                    k0,
                    start=start,
                    ratio=r,
                    rel_tol=tail_tolerance(regime),
                    max_terms=max_terms or 100_000,
                )
    raise PrecisionError("no ratio certificate found for the series tail")


@dataclass(frozen=True)
class QLatticeAtoms(AtomSequence):
    """Atoms ``(a q^k, a^k q^{k^2/2})`` of the unnormalised q-lattice measure.

    Indices enumerate ``k = 0, 1, -1, 2, -2, ...``.  ``root`` is ``sqrt(q)``.
    """

    root: Scalar
    a: Scalar
    regime: Regime = Regime()

    @staticmethod
    def k_of(index: int) -> int:
        return (index + 1) // 2 if index % 2 else -(index // 2)

    @staticmethod
    def index_of(k: int) -> int:
        return 2 * k - 1 if k > 0 else -2 * k

    def position(self, k: int) -> Scalar:
        return self.a * self.root ** (2 * k)

    def weight(self, k: int) -> Scalar:
        return self.a**k * self.root ** (k * k)

    def atom(self, index: int) -> tuple[Scalar, Scalar]:
        k = self.k_of(index)
        return self.position(k), self.weight(k)

    def side_tail(self, first_k: int, n: int, upward: bool) -> BoundedSum:
        """Enclosure of ``sum w_k x_k^n`` over ``k >= first_k`` (upward) or ``k <= -first_k``."""
        a, r = self.a, self.root
        if upward:
            atom = lambda m: (self.position(m), self.weight(m))
            ratio = lambda m, p: a * r ** (2 * m + 1 + 2 * p)
            return certified_tail(atom, ratio, first_k, n, self.regime)
        atom = lambda m: (self.position(-m), self.weight(-m))
        ratio = lambda m, p: r ** (2 * m + 1 - 2 * p) / a
        return certified_tail(atom, ratio, first_k, n, self.regime)

    def tail(self, start: int, n: int) -> BoundedSum:
        if start == 0:
            upper, lower = 0, 1
        else:
            upper, lower = start // 2 + 1, (start - 1) // 2 + 1
        return self.side_tail(upper, n, True) + self.side_tail(lower, n, False)


@dataclass(frozen=True)
class GeometricAtoms(RatioCertifiedSeries):
    """Atoms ``(1/j, 2^{-j})`` for ``j >= 2``.

    ``max_terms`` caps how many terms a tail enclosure may add explicitly.
    """

    regime: Regime = Regime()
    max_terms: int | None = None

    def atom(self, index: int) -> tuple[Scalar, Scalar]:
        j = index + 2
        return self.regime.scalar(Fraction(1, j)), self.regime.scalar(Fraction(1, 2**j))

    def ratio_sup(self, index: int, n: int) -> Scalar:
        j = index + 2
        half = self.regime.scalar(Fraction(1, 2))
        if n >= 0:
            return half
        return half * self.regime.scalar(Fraction(j + 1, j)) ** (-n)


@dataclass(frozen=True)
class GaussianAtoms(RatioCertifiedSeries):
    """Atoms ``(j, exp(-j^2))`` for ``j >= 2``; float regime only."""

    regime: Regime = Regime("float")
    max_terms: int | None = None

    def __post_init__(self):
        if self.regime.exact:
            raise ValueError("Gaussian weights are transcendental; use the float regime")

    def atom(self, index: int) -> tuple[Scalar, Scalar]:
        j = index + 2
        ctx = self.regime.ctx
        return ctx.mpf(j), ctx.exp(-ctx.mpf(j * j))

    def ratio_sup(self, index: int, n: int) -> Scalar:
        j = index + 2
        ctx = self.regime.ctx
        bound = ctx.exp(-ctx.mpf(2 * j + 1))
        if n > 0:
            bound *= (ctx.mpf(j + 1) / j) ** n
        return bound * (1 + ctx.ldexp(ctx.one, 8 - ctx.prec))


@dataclass(frozen=True)
class InterleavedAtoms(AtomSequence):
    """Alternate the atoms of two infinite sequences: ``first[0], second[0], first[1], ...``."""

    first: AtomSequence
    second: AtomSequence

    @property
    def regime(self) -> Regime:
        return self.first.regime

    def atom(self, index: int) -> tuple[Scalar, Scalar]:
        source = self.first if index % 2 == 0 else self.second
        return source.atom(index // 2)

    def tail(self, start: int, n: int) -> BoundedSum:
        return self.first.tail((start + 1) // 2, n) + self.second.tail(start // 2, n)


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class AtomFamily:
    """``scale * sum_i w_i x_i^shift delta_{x_i}`` over the atoms of ``source``.

    The first ``n_explicit`` atoms are enumerated; the rest enter moments only
    through the certified ``source.tail``.
    """

    source: AtomSequence
    n_explicit: int
    scale: BoundedSum
    shift: int = 0

    def __post_init__(self):
        if self.n_explicit < 0 or self.n_explicit > self.source.length:
            raise ValueError("n_explicit out of range")

    @cached_property
    def explicit(self) -> tuple[tuple[Scalar, Scalar], ...]:
        return tuple(self.source.atom(i) for i in range(self.n_explicit))

    @property
    def complete(self) -> bool:
        return self.n_explicit == self.source.length

    def reduced_weight(self, index: int) -> Scalar:
        """Weight of atom ``index`` before the common scale is applied."""
        x, w = self.source.atom(index)
        return w * x**self.shift

    def reduced_moment(self, n: int) -> BoundedSum:
        m = n + self.shift
        zero = self.source.regime.zero()
        partial = zero
        for x, w in self.explicit:
            partial += w * x**m
        if self.complete:
            return BoundedSum.exact(partial)
        return BoundedSum.exact(partial) + self.source.tail(self.n_explicit, m)

    def moment(self, n: int) -> BoundedSum:
        return self.scale * self.reduced_moment(n)

    def rescaled(self, factor: BoundedSum) -> "AtomFamily":
        return AtomFamily(self.source, self.n_explicit, self.scale * factor, self.shift)

    def shifted(self, power: int) -> "AtomFamily":
        return AtomFamily(self.source, self.n_explicit, self.scale, self.shift + power)

    def materialized(self) -> tuple[tuple[Scalar, Scalar], ...] | None:
        """Exact atom list when the family is finite with a degenerate scale."""
        if not self.complete or not self.scale.is_exact:
            return None
        c = self.scale.value
        return tuple((x, c * w * x**self.shift) for x, w in self.explicit)


@dataclass(frozen=True)
class DiscreteMeasure:
    """A positive discrete measure on ``[0, inf)``."""

    families: tuple[AtomFamily, ...]
    mass_at_zero: Scalar | BoundedSum = Fraction(0)
    regime: Regime = Regime()

    @classmethod
    def from_atoms(
        cls,
        atoms: Iterable[tuple],
        mass_at_zero=0,
        regime: Regime = Regime(),
    ) -> "DiscreteMeasure":
        pairs = tuple((regime.scalar(x), regime.scalar(w)) for x, w in atoms)
        for x, w in pairs:
            if x <= 0 or w <= 0:
                raise ValueError("atom positions and weights must be positive")
        if len({x for x, _ in pairs}) != len(pairs):
            raise ValueError("atom positions must be distinct")
        mass = regime.scalar(mass_at_zero) if not isinstance(mass_at_zero, BoundedSum) else mass_at_zero
        if BoundedSum.of(mass).certainly_lt(0):
            raise ValueError("mass at zero must be nonnegative")
        family = AtomFamily(FiniteAtoms(pairs, regime), len(pairs), BoundedSum.exact(regime.one()))
        return cls((family,), mass, regime)

    @property
    def is_finite(self) -> bool:
        return all(f.complete for f in self.families)

    def has_mass_at_zero(self) -> bool:
        m = BoundedSum.of(self.mass_at_zero)
        return not (m.is_exact and m.partial == 0)

    def atoms(self) -> list[tuple[Scalar, Scalar]]:
        """Exact ``(position, weight)`` list; only for finite measures with exact scales."""
        out: list[tuple[Scalar, Scalar]] = []
        for fam in self.families:
            mat = fam.materialized()
            if mat is None:
                raise ValueError("measure is not an exactly representable finite atom list")
            out.extend(mat)
        return out

    def explicit_atoms(self) -> list[tuple[Scalar, BoundedSum]]:
        """Enumerated atoms with their (possibly enclosed) weights."""
        out = []
        for fam in self.families:
            for x, w in fam.explicit:
                out.append((x, fam.scale * (w * x**fam.shift)))
        return out

    def scaled(self, factor) -> "DiscreteMeasure":
        factor = BoundedSum.of(self.regime.scalar(factor) if not isinstance(factor, BoundedSum) else factor)
        mass = BoundedSum.of(self.mass_at_zero) * factor
        mass = mass.value if mass.is_exact else mass
        return DiscreteMeasure(tuple(f.rescaled(factor) for f in self.families), mass, self.regime)

    def reweighted(self, power: int) -> "DiscreteMeasure":
        """The measure ``x^power d(self)`` restricted to ``(0, inf)``."""
        fams = []
        for fam in self.families:
            mat = fam.materialized()
            if mat is not None:
                atoms = tuple((x, w * x**power) for x, w in mat)
                one = BoundedSum.exact(self.regime.one())
                fams.append(AtomFamily(FiniteAtoms(atoms, self.regime), len(atoms), one))
            else:
                fams.append(fam.shifted(power))
        mass = self.mass_at_zero if power == 0 else self.regime.zero()
        return DiscreteMeasure(tuple(fams), mass, self.regime)

    def plus(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        mass = BoundedSum.of(self.mass_at_zero) + BoundedSum.of(other.mass_at_zero)
        mass = mass.value if mass.is_exact else mass
        return DiscreteMeasure(self.families + other.families, mass, self.regime)

    def total_mass(self) -> BoundedSum:
        return moment(self, 0)

    def same_atoms(self, other: "DiscreteMeasure") -> bool:
        """Exact equality of atom lists and origin masses."""
        return self.atoms() == other.atoms() and BoundedSum.of(self.mass_at_zero) == BoundedSum.of(
            other.mass_at_zero
        )


def moment(mu: DiscreteMeasure, n: int) -> BoundedSum:
    """Enclosure of ``integral x^n d mu`` for any integer ``n``.

    Raises
    ------
    InfiniteMomentError
        For ``n < 0`` when ``mu`` charges the origin.
    """
    if n < 0 and mu.has_mass_at_zero():
        raise InfiniteMomentError(f"moment of order {n} is infinite: mass at zero")
    total = BoundedSum.exact(mu.regime.zero())
    for fam in mu.families:
        total = total + fam.moment(n)
    if n == 0:
        total = total + BoundedSum.of(mu.mass_at_zero)
    return total


def backward_transform_nu(mu: DiscreteMeasure, gamma_minus1) -> DiscreteMeasure:
    """The measure ``(1/x) mu + (gamma_minus1 - int 1/x dmu) delta_0``.

    Raises
    ------
    NotBackwardExtendableError
        When ``int 1/x dmu`` certainly exceeds ``gamma_minus1``.
    PrecisionError
        When the comparison cannot be decided.
    """
    gamma = gamma_minus1 if isinstance(gamma_minus1, BoundedSum) else BoundedSum.exact(mu.regime.scalar(gamma_minus1))
    reciprocal = moment(mu, -1)
    if reciprocal.lo > gamma.hi:
        raise NotBackwardExtendableError("integral of 1/x exceeds the backward moment")
    if not reciprocal.hi <= gamma.lo:
        raise PrecisionError("cannot certify integral of 1/x against the backward moment")
    mass = gamma - reciprocal
    if mass.is_exact:
        mass = mass.value
    else:
        mass = BoundedSum.between(max(mass.lo, mu.regime.zero()), mass.hi)
    inner = mu.reweighted(-1)
    return DiscreteMeasure(inner.families, mass, mu.regime)


def backward_transform_mu(nu: DiscreteMeasure) -> DiscreteMeasure:
    """The measure ``x dnu``; any mass at the origin disappears."""
    return nu.reweighted(1)


# ---------------------------------------------------------------------------
# q-lattice family


@dataclass(frozen=True)
class QStieltjesFamily:
    """Parameters ``(q, a)`` of the log-normal moment family ``zeta_n = q^{-n^2/2}``."""

    q: Scalar
    a: Scalar = Fraction(1)
    regime: Regime = Regime()

    def __post_init__(self):
        q = self.regime.scalar(self.q)
        a = self.regime.scalar(self.a)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a", a)
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        if a <= 0:
            raise ValueError("a must be positive")
        if self.regime.exact and exact_sqrt(q) is None:
            raise ValueError("exact regime needs q to be the square of a rational")

    @property
    def root(self) -> Scalar:
        return self.regime.sqrt(self.q)

    def zeta(self, n: int) -> Scalar:
        return (1 / self.root) ** (n * n)

    @property
    def sigma(self):
        regime = self.regime if not self.regime.exact else Regime("float")
        return regime.ctx.sqrt(-regime.ctx.log(regime.scalar(self.q)))

    def atoms(self) -> QLatticeAtoms:
        return QLatticeAtoms(self.root, self.a, self.regime)

    def normalizer(self, rel_tol: Fraction = Fraction(1, 2**200), min_terms: int = 0) -> BoundedSum:
        """Enclosure of ``L(a) = sum_k a^k q^{k^2/2}``."""
        atoms = self.atoms()
        r, a = atoms.root, atoms.a

        def upper(m):
            return atoms.weight(m)

        def lower(m):
            return atoms.weight(-m)

        half = self.regime.scalar(Fraction(1, 2))
        k_up = next(m for m in range(_SEARCH_LIMIT) if a * r ** (2 * m + 1) <= half)
        k_dn = next(m for m in range(1, _SEARCH_LIMIT) if r ** (2 * m + 1) / a <= half)
        up = sum_superexp(upper, max(k_up, min_terms), rel_tol=rel_tol, start=0)
        dn = sum_superexp(lower, max(k_dn, min_terms), rel_tol=rel_tol, start=1)
        return up + dn


def build_lambda_a(fam: QStieltjesFamily, K: int, rel_tol: Fraction = Fraction(1, 2**200)) -> DiscreteMeasure:
    """The normalised q-lattice measure with atoms ``|k| <= K`` enumerated explicitly."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    scale = 1 / fam.normalizer(rel_tol=rel_tol, min_terms=K)
    family = AtomFamily(fam.atoms(), 2 * K + 1, scale)
    return DiscreteMeasure((family,), fam.regime.zero(), fam.regime)


def eval_omega_theta(fam: QStieltjesFamily, theta, x):
    """Log-normal density with a sinusoidal perturbation of relative size ``theta``."""
    regime = fam.regime if not fam.regime.exact else Regime("float")
    ctx = regime.ctx
    theta = regime.scalar(theta)
    x = regime.scalar(x)
    if x <= 0:
        raise ValueError("x must be positive")
    if not -1 <= theta <= 1:
        raise ValueError("theta must lie in [-1, 1]")
    sigma = fam.sigma
    log_x = ctx.log(x)
    base = ctx.exp(-(log_x**2) / (2 * sigma**2)) / (ctx.sqrt(2 * ctx.pi) * sigma * x)
    return base * (1 + theta * ctx.sin(2 * ctx.pi * log_x / sigma**2))


# ---------------------------------------------------------------------------
# JSON


def format_scalar(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return mpmath.nstr(value, max(20, int(value.context.prec * 0.30103)), strip_zeros=True)


def measure_to_json(mu: DiscreteMeasure) -> dict:
    """``{"atoms": [[x, w], ...], "mass_at_zero": w0}`` with values as strings."""
    if mu.is_finite and all(f.scale.is_exact for f in mu.families):
        atoms = mu.atoms()
    elif mu.regime.exact:
        raise ValueError("only finite measures with exact weights serialise in the exact regime")
    else:
        atoms = [(x, w.mid) for x, w in mu.explicit_atoms()]
    mass = BoundedSum.of(mu.mass_at_zero)
    mass_value = mass.value if mass.is_exact else mass.mid
    return {
        "atoms": [[format_scalar(x), format_scalar(w)] for x, w in atoms],
        "mass_at_zero": format_scalar(mass_value),
    }


def measure_from_json(doc: dict, regime: Regime = Regime()) -> DiscreteMeasure:
    atoms = [(str(x), str(w)) for x, w in doc.get("atoms", [])]
    return DiscreteMeasure.from_atoms(atoms, str(doc.get("mass_at_zero", "0")), regime)

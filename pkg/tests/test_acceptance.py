"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import random
import time
from fractions import Fraction

import pytest

from conftest import make_random_shift
from treeshift.composition import alpha_uniqueness, build_alpha, unitary_check
from treeshift.construct import main_example, subnormal_example
from treeshift.measures import DiscreteMeasure, QStieltjesFamily, backward_transform_mu, backward_transform_nu, moment
from treeshift.moments import MomentSequence, carleman_bound_check, stieltjes_check, t0_lower_bound
from treeshift.numerics import BoundedSum
from treeshift.shift import (
    FiniteVector,
    apply,
    consistency_condition,
    hyponormality_sum,
    norm_sq_power,
    norm_sq_power_basis,
    paranormality_check,
)
from treeshift.tree import INF, Br, Neg, truncation_vertices

HYP_TOLERANCE = Fraction(1, 2**30)
HYP_SECONDS = 10
SUBNORMAL_TOLERANCE = "1e-20"
SUBNORMAL_PRECISION = 256
SUBNORMAL_J = 20
SEED = 20240601


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} -- {detail}")
        assert ok, detail

    return emit


def test_hyponormality_fails_at_branching_vertex(verdict):
    details, ok = [], True
    for kappa in (0, 2):
        start = time.perf_counter()
        S, _ = main_example(kappa=kappa)
        closed = hyponormality_sum(S, Neg(0))
        series = hyponormality_sum(S.with_enclosures(), Neg(0))
        elapsed = time.perf_counter() - start
        in_band = closed.lo >= 2 - HYP_TOLERANCE and closed.hi <= 2
        series_ok = series.lo >= 2 - HYP_TOLERANCE and series.contains(2)
        ok &= in_band and series_ok and closed.certainly_gt(1) and elapsed < HYP_SECONDS
        details.append(f"kappa={kappa}: sum={closed.value}, series lo=2-{float(2 - series.lo):.1e}, {elapsed:.2f}s")
    verdict(1, ok, "; ".join(details))


def test_basis_sequences_pass_stieltjes_check(verdict):
    refuted, checked = [], 0
    for kappa in (0, 2):
        S, _ = main_example(kappa=kappa)
        for u in truncation_vertices(S.tree, 4, 12, neg_depth=kappa):
            seq = MomentSequence({n: norm_sq_power_basis(S, u, n) for n in range(13)}, S.regime)
            checked += 1
            if stieltjes_check(seq).refuted:
                refuted.append((kappa, str(u)))
    verdict(2, not refuted, f"{checked} vertex sequences n=0..12, refuted: {refuted or 'none'}")


def test_paranormality(verdict):
    S, _ = main_example(kappa=2)
    verts = truncation_vertices(S.tree, 4, 12)
    vectors = [FiniteVector.basis(Neg(0))] + [FiniteVector.basis(v) for v in verts]
    rng = random.Random(SEED)
    for _ in range(100):
        support = rng.sample(verts, rng.randint(1, 8))
        vectors.append(FiniteVector({v: Fraction(rng.randint(-30, 30) or 1, rng.randint(1, 30)) for v in support}))
    outcomes = [paranormality_check(S, f).holds for f in vectors]
    ok = all(o is True for o in outcomes)
    verdict(3, ok, f"{sum(o is True for o in outcomes)}/{len(vectors)} vectors certified")


def test_consistency_condition(verdict):
    S, rec = main_example(kappa=2)
    main = consistency_condition(S, Neg(0), rec.child_measures(S.branches))
    Ssub, sub = subnormal_example(SUBNORMAL_J, 2, 2, SUBNORMAL_PRECISION)
    value = sub.consistency(Ssub).value
    tol = Ssub.regime.scalar(SUBNORMAL_TOLERANCE)
    distance = max(abs(value.hi - 1), abs(value.lo - 1))
    ok = main.value.certainly_gt(1) and distance <= tol
    verdict(4, ok, f"main value >= {float(main.value.lo):.15f} > 1; subnormal |value - 1| <= {float(distance):.2e}")


def test_backward_extension_bijection(verdict):
    rng = random.Random(SEED)
    failures = 0
    for _ in range(50):
        size = rng.randint(1, 6)
        positions = [Fraction(p, 12) for p in rng.sample(range(1, 120), size)]
        mu = DiscreteMeasure.from_atoms([(x, Fraction(rng.randint(1, 20), rng.randint(1, 20))) for x in positions])
        excess = Fraction(rng.randint(0, 5), rng.randint(1, 5)) if rng.random() < 0.8 else Fraction(0)
        gamma = moment(mu, -1).value + excess
        nu = backward_transform_nu(mu, gamma)
        same = backward_transform_mu(nu).same_atoms(mu)
        shift = all(moment(nu, n + 1).value == moment(mu, n).value for n in range(8))
        total = moment(nu, 0).value == gamma
        failures += not (same and shift and total)
    verdict(5, failures == 0, f"50 random measures, {failures} failures")


def test_t0_ladder(verdict):
    fam = QStieltjesFamily("1/4")
    seq = MomentSequence({n: fam.zeta(n) for n in range(12)})
    ladder = t0_lower_bound(seq, 6)
    th = ladder.thresholds
    ok = th[0] == Fraction(1, 2) and all(a <= b for a, b in zip(th, th[1:])) and all(x < fam.zeta(-1) for x in th)
    verdict(6, ok, "thresholds " + ", ".join(str(x) for x in th))


def test_carleman_bounds(verdict):
    S, rec = subnormal_example(SUBNORMAL_J, 2, 2, SUBNORMAL_PRECISION)
    report = carleman_bound_check(rec.gamma.sequence(0, 17), range(4, 9), rec.normalizer)
    worst = max(float((r.value / r.bound).hi) for r in report.rows)
    verdict(7, report.all_hold, f"indices 8..17 certified, worst ratio gamma/bound {worst:.3e}")


def test_composition_realisation(verdict):
    S, _ = main_example(kappa=INF, truncation=6)
    space = build_alpha(S, Neg(0), 5)
    other = build_alpha(S, Neg(2), 5)
    pool = [v for v in space.vertices if not space.is_frontier(v)]
    rng = random.Random(SEED)
    failures = 0
    for _ in range(50):
        support = rng.sample(pool, rng.randint(1, 12))
        f = FiniteVector({v: Fraction(rng.randint(-25, 25) or 1, rng.randint(1, 25)) for v in support})
        failures += not unitary_check(S, space, f).ok
    uniq = alpha_uniqueness(space, other)
    ok = failures == 0 and uniq.constant
    verdict(8, ok, f"50 vectors, {failures} failures; alpha ratio across anchors {uniq.ratio}")


def test_norm_formula_matches_repeated_apply(verdict):
    mismatches, checked = 0, 0
    for seed in range(20):
        rng = random.Random(seed)
        eta, kappa = rng.choice((2, 3)), rng.choice((0, 1, 2))
        S = make_random_shift(eta, kappa, seed)
        verts = truncation_vertices(S.tree, 3, eta)
        f = FiniteVector({v: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 9)) for v in rng.sample(verts, 4)})
        g = f
        for n in range(5):
            checked += 1
            if norm_sq_power(S, f, n).value != g.norm_sq().value:
                mismatches += 1
            g = apply(S, g)
    verdict(9, mismatches == 0, f"{checked} comparisons over 20 weight assignments, {mismatches} mismatches")


def test_weights_are_exact_squares_in_oracle():
    S = make_random_shift(3, 2, 0)
    assert S.weight(Br(1, 1)) ** 2 == S.weight_sq(Br(1, 1)).value
    assert isinstance(BoundedSum.of(S.weight_sq(Neg(0))).value, Fraction)

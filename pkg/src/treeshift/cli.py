"""Command-line front end.

Each command builds its instance from a JSON config (overridable by flags),
runs the checks, prints text tables, writes ``<command>.json`` plus one CSV per
table into ``--out`` and exits with

* 0 when every expected verdict was obtained,
* 1 on a verdict mismatch,
* 2 when a verdict could not be certified (precision or truncation),
* 3 on a configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

import mpmath

from .composition import TruncationTooSmallError, alpha_uniqueness, build_alpha, unitary_check
from .construct import ConstructionError, main_example, subnormal_example
from .measures import QStieltjesFamily
from .moments import (
    MomentIndexError,
    MomentSequence,
    carleman_bound_check,
    classify_backward,
    stieltjes_check,
    t0_lower_bound,
)
from .numerics import DEFAULT_PRECISION, BoundedSum, PrecisionError, Regime
from .shift import (
    FiniteVector,
    TailUnavailableError,
    consistency_condition,
    hyponormality_test,
    norm_sq_power_basis,
    paranormality_check,
)
from .tree import INF, Br, Neg, format_vertex, parse_vertex

EXIT_OK, EXIT_MISMATCH, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3
SUBNORMAL_PRECISION = 256
COMMANDS = ("verify_main", "verify_subnormal", "moments", "hankel", "t0", "classify", "composition")

DEFAULTS: dict[str, Any] = {
    "q": "1/4",
    "a": "1",
    "t": "1",
    "kappa": 2,
    "eta": 2,
    "K": 12,
    "N": 6,
    "n_max": 6,
    "depth": 4,
    "precision": None,
    "regime": "exact",
    "seed": 20240601,
    "samples": 100,
    "vectors": 50,
    "support_size": 10,
    "J": 20,
    "tolerance": "1e-20",
    "sequence": "zeta",
    "gamma_minus1": "2",
    "vertices": ["0", "-1", "(1,1)"],
    "anchors": ["0", "-1"],
}


class ConfigError(ValueError):
    pass


class Inconclusive(Exception):
    pass


# ---------------------------------------------------------------------------
# formatting


def fmt(value) -> str:
    if isinstance(value, BoundedSum):
        if value.is_exact or value.lo == value.hi:
            return fmt(value.lo)
        if value.width * 10**20 < abs(value.mid):
            return f"{_decimal(value.mid)} +/- {_decimal(value.width / 2, 3)}"
        return f"[{_decimal(value.lo)}, {_decimal(value.hi)}]"
    if isinstance(value, Fraction):
        if value.denominator == 1 or len(str(value)) <= 40:
            return str(value)
        return _decimal(value)
    if isinstance(value, float) or hasattr(value, "_mpf_"):
        return _decimal(value)
    return str(value)


def _decimal(value, digits: int = 22) -> str:
    if isinstance(value, Fraction):
        with mpmath.workdps(digits + 10):
            return mpmath.nstr(mpmath.mpf(value.numerator) / value.denominator, digits)
    return mpmath.nstr(value, digits)


@dataclass
class Table:
    name: str
    headers: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def add(self, *cells) -> None:
        self.rows.append([fmt(c) for c in cells])

    def render(self) -> str:
        widths = [len(h) for h in self.headers]
        for row in self.rows:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]
        line = "  ".join(h.ljust(w) for h, w in zip(self.headers, widths))
        out = [f"== {self.name} ==", line, "-" * len(line)]
        out += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in self.rows]
        return "\n".join(out)


@dataclass
class Report:
    command: str
    config: dict
    tables: list[Table] = field(default_factory=list)
    checks: list[dict] = field(default_factory=list)
    facts: dict = field(default_factory=dict)

    def table(self, name: str, headers: list[str]) -> Table:
        t = Table(name, headers)
        self.tables.append(t)
        return t

    def expect(self, name: str, expected, got, status: str) -> None:
        """Record a check; ``status`` is ``match``, ``mismatch`` or ``inconclusive``."""
        self.checks.append({"check": name, "expected": str(expected), "got": str(got), "status": status})

    def exit_code(self) -> int:
        statuses = [c["status"] for c in self.checks]
        if "mismatch" in statuses:
            return EXIT_MISMATCH
        if "inconclusive" in statuses:
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    def first_mismatch(self) -> str | None:
        for c in self.checks:
            if c["status"] != "match":
                return f"{c['status']}: {c['check']} (expected {c['expected']}, got {c['got']})"
        return None

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "config": {k: str(v) if not isinstance(v, (list, dict, int)) else v for k, v in self.config.items()},
            "facts": self.facts,
            "tables": [{"name": t.name, "headers": t.headers, "rows": t.rows} for t in self.tables],
            "checks": self.checks,
            "exit_code": self.exit_code(),
        }

    def write(self, out: Path | None, stream=sys.stdout) -> None:
        for t in self.tables:
            print(t.render(), file=stream)
            print(file=stream)
        for c in self.checks:
            print(f"[{c['status'].upper():>12}] {c['check']}: {c['got']}", file=stream)
        summary = self.first_mismatch()
        print(f"exit {self.exit_code()}" + (f" -- {summary}" if summary else ""), file=stream)
        if out is None:
            return
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{self.command}.json").write_text(json.dumps(self.to_json(), indent=2))
        for t in self.tables:
            slug = "".join(ch if ch.isalnum() else "_" for ch in t.name.lower()).strip("_")
            with open(out / f"{self.command}_{slug}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(t.headers)
                writer.writerows(t.rows)


# ---------------------------------------------------------------------------
# configuration


def _infinite_or_int(value, name: str):
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    try:
        out = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be an integer or 'inf'") from exc
    return out


def _positive_int(cfg: dict, name: str, minimum: int = 0) -> int:
    try:
        out = int(cfg[name])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be an integer") from exc
    if out < minimum:
        raise ConfigError(f"{name} must be at least {minimum}")
    return out


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = dict(DEFAULTS)
    if path:
        try:
            text = Path(path).read_text()
            loaded = json.loads(text, parse_float=str, parse_int=int)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        cfg.update(loaded)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if cfg.get("command") not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.get('command')!r}; choose from {', '.join(COMMANDS)}")
    if cfg["regime"] not in ("exact", "float"):
        raise ConfigError("regime must be 'exact' or 'float'")
    cfg["kappa"] = _infinite_or_int(cfg["kappa"], "kappa")
    cfg["eta"] = _infinite_or_int(cfg["eta"], "eta")
    for name, minimum in (("K", 0), ("N", 1), ("n_max", 0), ("depth", 1), ("J", 1)):
        cfg[name] = _positive_int(cfg, name, minimum)
    if cfg["precision"] is not None:
        cfg["precision"] = _positive_int(cfg, "precision", 16)
    return cfg


def _regime(cfg: dict) -> Regime:
    return Regime(cfg["regime"], cfg["precision"] or DEFAULT_PRECISION)


def _rational(cfg: dict, name: str, regime: Regime):
    try:
        return regime.scalar(str(cfg[name]))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{name} is not a number: {cfg[name]!r}") from exc


def _sequence(cfg: dict, regime: Regime, length: int) -> MomentSequence:
    source = cfg["sequence"]
    if source == "zeta":
        try:
            fam = QStieltjesFamily(str(cfg["q"]), str(cfg["a"]), regime)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return MomentSequence({n: fam.zeta(n) for n in range(length)}, regime, "zeta")
    if isinstance(source, dict) and "values" in source:
        try:
            return MomentSequence.from_list([str(v) for v in source["values"]], int(source.get("start", 0)), regime)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad sequence values: {exc}") from exc
    raise ConfigError("sequence must be 'zeta' or {\"values\": [...], \"start\": n}")


def _main_instance(cfg: dict, kappa=None):
    regime = _regime(cfg)
    backward = cfg.get("backward_moments")
    try:
        return main_example(
            str(cfg["q"]),
            str(cfg["a"]),
            str(cfg["t"]),
            cfg["kappa"] if kappa is None else kappa,
            cfg["K"],
            regime,
            cfg["n_max"],
            {int(k): str(v) for k, v in backward.items()} if backward else None,
        )
    except (ValueError, ConstructionError) as exc:
        raise ConfigError(str(exc)) from exc


def _status(ok: bool | None) -> str:
    return "match" if ok is True else "inconclusive" if ok is None else "mismatch"


def _random_vector(rng: random.Random, pool: list, size: int) -> FiniteVector:
    chosen = rng.sample(pool, min(size, len(pool)))
    entries = {}
    for v in chosen:
        num = rng.randint(-20, 20) or 1
        entries[v] = Fraction(num, rng.randint(1, 20))
    return FiniteVector(entries)


def _convert_vector(f: FiniteVector, regime: Regime) -> FiniteVector:
    return FiniteVector({v: regime.scalar(c) for v, c in f.entries.items()}, regime.zero())


# ---------------------------------------------------------------------------
# commands


def cmd_verify_main(cfg: dict) -> Report:
    rep = Report("verify_main", cfg)
    S, rec = _main_instance(cfg)
    N, depth = cfg["N"], cfg["depth"]
    branches = min(S.branches, cfg["K"]) if cfg["K"] > 0 else 1
    neg = [Neg(k) for k in range(int(min(rec.kappa, depth)), -1, -1)]
    verts = neg + [Br(i, j) for i in range(1, branches + 1) for j in range(1, depth + 1)]
    rep.facts.update(
        {
            "t": fmt(rec.t),
            "zeta_minus1": fmt(rec.zeta_minus1),
            "reciprocal_moment_of_rho": fmt(rec.reciprocal_moment),
            "backward_moments": {str(-k): fmt(rec.gamma(-k)) for k in range(1, int(min(rec.kappa, depth)) + 1)},
            "notes": rec.notes(),
        }
    )

    # (1) moment table per vertex class
    sample = neg + [Br(1, 1), Br(2, 1), Br(3, 2)]
    t1 = rep.table("moment table", ["vertex"] + [f"n={n}" for n in range(N + 1)])
    mismatched = []
    for u in sample:
        values = [norm_sq_power_basis(S, u, n) for n in range(N + 1)]
        t1.add(format_vertex(u), *values)
        for n, v in enumerate(values):
            if not v.contains(rec.expected_norm_sq(u, n)):
                mismatched.append(f"{u}@{n}")
    rep.expect("moment closed forms", "all match", mismatched or "all match", _status(not mismatched))

    # (2) positivity of every basis sequence
    t2 = rep.table("stieltjes check", ["vertex", "verdict", "degenerate"])
    refuted = []
    for u in verts:
        seq = MomentSequence({n: norm_sq_power_basis(S, u, n) for n in range(2 * N + 1)}, S.regime)
        try:
            r = stieltjes_check(seq, N)
        except PrecisionError:
            t2.add(format_vertex(u), "inconclusive", "")
            refuted.append(None)
            continue
        t2.add(format_vertex(u), str(r.verdict), len(r.degenerate))
        if r.refuted:
            refuted.append(format_vertex(u))
    bad = [x for x in refuted if x is not None]
    status = "mismatch" if bad else ("inconclusive" if refuted else "match")
    rep.expect("no RefutedAt on basis sequences", "none", bad or ("none" if not refuted else "inconclusive"), status)

    # (3) paranormality
    rng = random.Random(cfg["seed"])
    vectors = [FiniteVector.basis(u, S.regime) for u in verts]
    vectors += [_convert_vector(_random_vector(rng, verts, 6), S.regime) for _ in range(int(cfg["samples"]))]
    t3 = rep.table("paranormality sample", ["vector", "|f|^2", "|Sf|^2", "|S^2 f|^2", "holds"])
    outcomes = []
    for idx, f in enumerate(vectors):
        r = paranormality_check(S, f)
        outcomes.append(r.holds)
        if idx < 8 or r.holds is not True:
            label = format_vertex(f.support()[0]) if idx < len(verts) else f"random #{idx - len(verts)}"
            t3.add(label, r.norm_sq_f, r.norm_sq_sf, r.norm_sq_s2f, r.holds)
    ok = all(o is True for o in outcomes) if all(o is not None for o in outcomes) else None
    if any(o is False for o in outcomes):
        ok = False
    rep.expect(f"paranormality on {len(vectors)} vectors (seed {cfg['seed']})", "holds", ok, _status(ok))

    # (4) hyponormality
    t4 = rep.table("hyponormality", ["vertex", "sum", "verdict"])
    hyp = hyponormality_test(S, verts)
    recip = BoundedSum.of(rec.reciprocal_moment)
    for row in hyp.rows:
        label = row.verdict.upper()
        shown = f"{fmt(row.value)} > 1: {label}" if row.verdict == "Violated" else f"{fmt(row.value)}: {label}"
        t4.add(format_vertex(row.vertex), shown, row.verdict)
    expect_violation = recip.certainly_gt(1)
    for row in hyp.rows:
        want = "Violated" if (row.vertex == Neg(0) and expect_violation) else "Satisfied"
        got = row.verdict
        if got != want:
            rep.expect(f"hyponormality at {format_vertex(row.vertex)}", want, got, "inconclusive" if got == "Inconclusive" else "mismatch")
    rep.expect("hyponormality at 0", "Violated" if expect_violation else "Satisfied", hyp.row(Neg(0)).verdict,
               _status(hyp.row(Neg(0)).verdict == ("Violated" if expect_violation else "Satisfied")))
    enclosure = hyponormality_test(S.with_enclosures(), [Neg(0)]).rows[0].value
    rep.facts["hyponormality_sum_at_0"] = fmt(hyp.row(Neg(0)).value)
    rep.facts["hyponormality_sum_at_0_series_enclosure"] = fmt(enclosure)

    # (5) consistency
    t5 = rep.table("consistency at 0", ["value", "verdict"])
    cons = consistency_condition(S, Neg(0), rec.child_measures(S.branches))
    t5.add(cons.value, cons.verdict)
    want = "fails" if expect_violation else "holds"
    rep.expect("consistency at 0", want, cons.verdict,
               "inconclusive" if cons.verdict == "inconclusive" else _status(cons.verdict == want))

    # (6) t0 ladder
    t6 = rep.table("t0 ladder", ["n", "threshold", "running max", "t", "zeta_-1"])
    ladder = rec.t0_ladder
    for n, (th, best) in enumerate(zip(ladder.thresholds, ladder.bounds), start=1):
        t6.add(n, th, best, rec.t, rec.zeta_minus1)
    nondecreasing = all(a <= b for a, b in zip(ladder.thresholds, ladder.thresholds[1:]))
    below = all(th < rec.zeta_minus1 for th in ladder.thresholds)
    rep.expect("t0 ladder nondecreasing and below zeta_-1", True, nondecreasing and below, _status(nondecreasing and below))
    return rep


def cmd_verify_subnormal(cfg: dict) -> Report:
    rep = Report("verify_subnormal", cfg)
    eta = cfg["eta"]
    if eta not in (2, INF):
        raise ConfigError("eta must be 2 or inf for the subnormal instance")
    precision = cfg["precision"] or SUBNORMAL_PRECISION
    series_terms = cfg.get("series_terms")
    try:
        S, rec = subnormal_example(cfg["J"], cfg["kappa"], eta, precision, int(series_terms) if series_terms else None)
    except (ValueError, ConstructionError) as exc:
        raise ConfigError(str(exc)) from exc
    regime = S.regime
    tol = BoundedSum.exact(regime.scalar(str(cfg["tolerance"])))
    rep.facts["c"] = fmt(rec.normalizer)
    rep.facts["precision"] = precision

    t1 = rep.table("consistency at 0", ["value", "distance bound to 1", "verdict"])
    try:
        cons = rec.consistency(S)
    except TailUnavailableError as exc:
        raise Inconclusive(str(exc)) from exc
    distance = max(abs(cons.value.hi - 1), abs(cons.value.lo - 1))
    t1.add(cons.value, distance, cons.verdict)
    if distance <= tol.value:
        status = "match"
    elif cons.value.certainly_gt(1 + tol.value) or cons.value.certainly_lt(1 - tol.value):
        status = "mismatch"
    else:
        status = "inconclusive"
    rep.expect("consistency equals 1 within tolerance", f"|value - 1| <= {cfg['tolerance']}", fmt(distance), status)

    t2 = rep.table("carleman bounds", ["index", "gamma", "bound", "holds"])
    top = 17
    seq = rec.gamma.sequence(0, top)
    carl = carleman_bound_check(seq, range(4, 9), rec.normalizer)
    for row in carl.rows:
        t2.add(row.index, row.value, row.bound, row.holds)
    ok = False if any(r.holds is False for r in carl.rows) else (True if carl.all_hold else None)
    rep.expect("Carleman bounds n = 4..8", "hold", ok, _status(ok))

    t3 = rep.table("hyponormality", ["vertex", "sum", "verdict"])
    count = 2 if eta == 2 else min(S.branches, 6)
    verts = [Neg(k) for k in range(int(cfg["kappa"]), -1, -1)] if cfg["kappa"] != INF else [Neg(k) for k in range(3, -1, -1)]
    verts += [Br(i, j) for i in range(1, count + 1) for j in range(1, cfg["depth"] + 1)]
    hyp = hyponormality_test(S, verts)
    for row in hyp.rows:
        t3.add(format_vertex(row.vertex), row.value, row.verdict)
    verdicts = {r.verdict for r in hyp.rows}
    ok = False if "Violated" in verdicts else (None if "Inconclusive" in verdicts else True)
    rep.expect("hyponormality satisfied at checked vertices", "Satisfied", sorted(verdicts), _status(ok))
    return rep


def cmd_moments(cfg: dict) -> Report:
    rep = Report("moments", cfg)
    S, rec = _main_instance(cfg)
    try:
        verts = [parse_vertex(str(v)) for v in cfg["vertices"]]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for v in verts:
        if not S.tree.contains(v):
            raise ConfigError(f"vertex {format_vertex(v)} is not in the tree")
    N = cfg["N"]
    table = rep.table("moment table", ["vertex"] + [f"n={n}" for n in range(N + 1)])
    bad = []
    for u in verts:
        values = [norm_sq_power_basis(S, u, n) for n in range(N + 1)]
        table.add(format_vertex(u), *values)
        bad += [f"{u}@{n}" for n, v in enumerate(values) if not v.contains(rec.expected_norm_sq(u, n))]
    rep.expect("closed forms", "all match", bad or "all match", _status(not bad))
    return rep


def cmd_hankel(cfg: dict) -> Report:
    rep = Report("hankel", cfg)
    regime = _regime(cfg)
    n_max = cfg["n_max"]
    seq = _sequence(cfg, regime, 2 * n_max + 2)
    try:
        r = stieltjes_check(seq, n_max)
    except MomentIndexError as exc:
        raise ConfigError(str(exc)) from exc
    except PrecisionError as exc:
        raise Inconclusive(str(exc)) from exc
    table = rep.table("hankel determinants", ["order", "unshifted", "shifted"])
    unshifted = r.determinants["unshifted"]
    shifted = r.determinants["shifted"]
    for n in range(max(len(unshifted), len(shifted))):
        a = unshifted[n].value if n < len(unshifted) else ""
        b = shifted[n].value if n < len(shifted) else ""
        table.add(n, a, b)
    rep.facts["verdict"] = str(r.verdict)
    rep.facts["degenerate"] = [f"{o}:{w}" for o, w in r.degenerate]
    expected = cfg.get("expect")
    if expected:
        rep.expect("verdict", expected, r.verdict.kind, _status(r.verdict.kind == expected))
    else:
        rep.expect("verdict", "reported", str(r.verdict), "match")
    return rep


def cmd_t0(cfg: dict) -> Report:
    rep = Report("t0", cfg)
    regime = _regime(cfg)
    n_max = cfg["n_max"]
    seq = _sequence(cfg, regime, 2 * n_max)
    table = rep.table("t0 ladder", ["n", "threshold", "running max"])
    if n_max == 0:
        rep.expect("ladder", "empty", "empty", "match")
        return rep
    try:
        ladder = t0_lower_bound(seq, n_max)
    except (MomentIndexError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    for n, (th, best) in enumerate(zip(ladder.thresholds, ladder.bounds), start=1):
        table.add(n, th, best)
    ok = all(a <= b for a, b in zip(ladder.thresholds, ladder.thresholds[1:]))
    rep.expect("thresholds nondecreasing", True, ok, _status(ok))
    if cfg["sequence"] == "zeta":
        zeta_m1 = QStieltjesFamily(str(cfg["q"]), str(cfg["a"]), regime).zeta(-1)
        below = all(th < zeta_m1 for th in ladder.thresholds)
        rep.expect("thresholds below zeta_-1", True, below, _status(below))
    return rep


def cmd_classify(cfg: dict) -> Report:
    rep = Report("classify", cfg)
    regime = _regime(cfg)
    n_max = cfg["n_max"]
    seq = _sequence(cfg, regime, 2 * n_max + 2)
    gm1 = _rational(cfg, "gamma_minus1", regime)
    try:
        out = classify_backward(seq, gm1, n_max)
    except PrecisionError as exc:
        raise Inconclusive(str(exc)) from exc
    except (MomentIndexError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    table = rep.table("backward determinants", ["order", "det"])
    for n, d in enumerate(out.determinants):
        table.add(n, d.value)
    rep.facts["verdict"] = str(out.verdict)
    rep.facts["t0_interval"] = [fmt(out.t0_interval[0]), "inf"]
    expected = cfg.get("expect")
    if expected:
        rep.expect("verdict", expected, out.verdict.kind, _status(out.verdict.kind == expected))
    else:
        rep.expect("verdict", "reported", str(out.verdict), "match")
    return rep


def cmd_composition(cfg: dict) -> Report:
    rep = Report("composition", cfg)
    if cfg["kappa"] != INF:
        raise ConfigError("composition needs a rootless tree: set kappa to 'inf'")
    S, rec = _main_instance(cfg)
    depth = cfg["depth"]
    try:
        anchors = [parse_vertex(str(a)) for a in cfg["anchors"]]
        spaces = [build_alpha(S, z, depth) for z in anchors]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    table = rep.table("alpha", ["vertex"] + [f"anchor {format_vertex(z)}" for z in anchors])
    for v in spaces[0].vertices[: depth + 8]:
        table.add(format_vertex(v), *[fmt(BoundedSum.of(sp.reduced[v])) + (f" * s^{sp.power[v]}" if sp.power[v] else "") for sp in spaces])
    rng = random.Random(cfg["seed"])
    pool = [v for v in spaces[0].vertices if not spaces[0].is_frontier(v)]
    size = int(cfg["support_size"])
    results = rep.table("unitary check", ["vector", "support", "checked", "ok"])
    failures = 0
    for k in range(int(cfg["vectors"])):
        f = _convert_vector(_random_vector(rng, pool, size), S.regime) if size else FiniteVector({})
        try:
            r = unitary_check(S, spaces[0], f)
        except TruncationTooSmallError as exc:
            raise ConfigError(str(exc)) from exc
        failures += 0 if r.ok else 1
        if k < 10 or not r.ok:
            results.add(k, len(f.support()), len(r.checked), r.ok)
    rep.expect(f"squared intertwining on {cfg['vectors']} vectors (seed {cfg['seed']})", 0, failures, _status(failures == 0))
    if len(spaces) > 1:
        uniq = alpha_uniqueness(spaces[0], spaces[1])
        rep.facts["alpha_ratio"] = fmt(uniq.ratio)
        rep.facts["alpha_scale_power_offset"] = uniq.power_offset
        rep.expect("alpha unique up to a constant", True, uniq.constant, _status(uniq.constant))
    return rep


HANDLERS: dict[str, Callable[[dict], Report]] = {
    "verify_main": cmd_verify_main,
    "verify_subnormal": cmd_verify_subnormal,
    "moments": cmd_moments,
    "hankel": cmd_hankel,
    "t0": cmd_t0,
    "classify": cmd_classify,
    "composition": cmd_composition,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treeshift", description="Weighted shifts on directed trees: verification suites.")
    p.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--command", metavar="NAME", choices=COMMANDS, help="command to run")
    p.add_argument("--precision", metavar="BITS", type=int, help="float precision in bits")
    p.add_argument("--regime", choices=("exact", "float"))
    p.add_argument("--truncation-K", dest="K", type=int, metavar="K", help="explicit lattice indices |k| <= K")
    p.add_argument("--horizon-N", dest="N", type=int, metavar="N", help="moment horizon")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="DIR", help="directory for JSON and CSV reports")
    return p


def main(argv: list[str] | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    overrides = {
        "command": args.command,
        "precision": args.precision,
        "regime": args.regime,
        "K": args.K,
        "N": args.N,
        "seed": args.seed,
    }
    try:
        cfg = load_config(args.config, overrides)
        out = Path(args.out) if args.out else (Path(cfg["out"]) if cfg.get("out") else None)
        report = HANDLERS[cfg["command"]](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stream)
        return EXIT_CONFIG
    except (Inconclusive, PrecisionError, TailUnavailableError) as exc:
        print(f"inconclusive: {exc}", file=stream)
        return EXIT_INCONCLUSIVE
    report.write(out, stream)
    return report.exit_code()


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()

"""
Command-line front end.

Every subcommand prints a JSON document (scalar results) or a CSV table
(tabular results) to standard output or to ``--output``.  Field angles and
coin phases are given in units of 2 pi.  Exit status is 0 on success, 2 for
invalid input and 3 when a verification exceeds its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import __version__
from .cmv import (
    PairSequence,
    VerblunskyPair,
    boxed_entry_defect,
    cmv_to_walk,
    correspondence_defect,
    stencil_defect,
    walk_to_cmv,
)
from .core import CoinSequence, Field, RationalField, Ring, SU2Coin, WalkSpec, build_matrix
from .dynamics import continued_fraction, evolve_trace, figure1_state, write_csv
from .exceptions import EwalkError
from .floquet import (
    DispersionProfile,
    closed_form_momentum,
    max_velocity,
    regrouped_symbol,
    revival_defect,
    revival_relation,
    spectrum_bands,
    sweep_threads,
)
from .sieve import electric_sieve_check, verify_sieving

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DEFECT = 3

VELOCITY_TOL = 1e-9
REVIVAL_TOL = 1e-8
SIEVE_TOL = 1e-13
CMV_TOL = 1e-13
SPECTRUM_TOL = 1e-10


class UsageError(ValueError):
    """Invalid combination of otherwise well-formed flags."""


@dataclass
class RunConfig:
    command: str
    coin: SU2Coin
    kind: str
    fields: list[RationalField]
    variant: str
    steps: int
    theta_samples: int
    ring_size: int | None
    output: str | None
    fmt: str | None
    seed: int
    trials: int
    kind_given: bool = False

    @property
    def field(self) -> RationalField:
        return self.fields[0]


def parse_field(text: str) -> RationalField:
    """``"n/m"`` in units of 2 pi, reduced; rejects ``m = 0``."""
    try:
        frac = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid field {text!r}: expected n/m with m >= 1") from exc
    return RationalField(frac.numerator, frac.denominator)


def parse_coin(name: str | None, abs_a: float | None, arg_a: float, arg_b: float) -> SU2Coin:
    """Named coin, complex literal for ``a``, or modulus plus phase."""
    two_pi = 2.0 * math.pi
    if abs_a is not None:
        if not 0.0 <= abs_a <= 1.0:
            raise UsageError(f"--abs-a must lie in [0, 1], got {abs_a}")
        return SU2Coin.from_polar(abs_a, two_pi * arg_a, two_pi * arg_b)
    if name is None or name == "hadamard":
        return SU2Coin.hadamard()
    if name == "identity":
        return SU2Coin.identity()
    try:
        a = complex(name.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"--coin must be 'hadamard', 'identity' or a complex number, got {name!r}") from exc
    if abs(a) > 1.0 + 1e-12:
        raise UsageError(f"coin parameter |a| = {abs(a)} exceeds 1")
    return SU2Coin.from_polar(min(abs(a), 1.0), float(np.angle(a)), two_pi * arg_b)


def _add_common(p: argparse.ArgumentParser, field_repeat: bool = False) -> None:
    p.add_argument("--kind", choices=("U", "W"), default=None,
                   help="shift-coin walk U or split-step walk W")
    p.add_argument("--coin", default=None, help="'hadamard' (default), 'identity', or complex a like 0.6+0.2j")
    p.add_argument("--abs-a", type=float, default=None, help="coin modulus |a| in [0, 1]")
    p.add_argument("--arg-a", type=float, default=0.0, help="phase of a in units of 2 pi")
    p.add_argument("--arg-b", type=float, default=0.0, help="phase of b in units of 2 pi")
    if field_repeat:
        p.add_argument("--field", action="append", default=None,
                       help="field n/m in units of 2 pi; repeat for several traces")
    else:
        p.add_argument("--field", default="0/1", help="field n/m in units of 2 pi")
    p.add_argument("--variant", choices=("auto", "plain", "tilde"), default="auto",
                   help="field operator; auto uses plain for U and tilde for W")
    p.add_argument("--output", "-o", default=None, help="output file (default: standard output)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ewalk", description="Electric quantum walk toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="position moments and revival errors over time (CSV)")
    _add_common(p, field_repeat=True)
    p.add_argument("--steps", type=int, default=100)

    p = sub.add_parser("dispersion", help="theta table of eigenphases and group velocities (CSV)")
    _add_common(p)
    p.add_argument("--theta-samples", type=int, default=256)

    p = sub.add_parser("velocity", help="closed-form and numeric maximal velocity (JSON)")
    _add_common(p)

    p = sub.add_parser("revival", help="numeric and closed-form revival defect (JSON)")
    _add_common(p)

    p = sub.add_parser("spectrum", help="band arcs of the electric walk (CSV)")
    _add_common(p)
    p.add_argument("--theta-samples", type=int, default=256)
    p.add_argument("--ring-size", type=int, default=None, help="ring cells for the eigenvalue check (default 4m)")

    for name, text in (("sieve-check", "even/odd decomposition defects (JSON)"),
                       ("cmv-check", "CMV stencil and correspondence defects (JSON)")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--ring-size", type=int, default=None)
        p.add_argument("--trials", type=int, default=10, help="random coin or pair sequences to test")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cf", help="continued fraction expansion of p/q (JSON)")
    p.add_argument("value", help="rational number p/q")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    if ns.command == "cf":
        return RunConfig("cf", SU2Coin.hadamard(), "W", [], "auto", 0, 0, None, ns.output, ns.fmt, 0, 0)
    raw = ns.field if isinstance(ns.field, list) else ([ns.field] if ns.field is not None else [])
    fields = [parse_field(f) for f in (raw or ["0/1"])]
    coin = parse_coin(ns.coin, ns.abs_a, ns.arg_a, ns.arg_b)
    steps = getattr(ns, "steps", 100)
    samples = getattr(ns, "theta_samples", 256)
    if steps < 1:
        raise UsageError("--steps must be at least 1")
    if samples < 2:
        raise UsageError("--theta-samples must be at least 2")
    ring = getattr(ns, "ring_size", None)
    if ring is not None and ring < 1:
        raise UsageError("--ring-size must be positive")
    if ns.variant != "auto" and ns.command != "evolve":
        raise UsageError("--variant is only supported by the evolve subcommand")
    return RunConfig(ns.command, coin, ns.kind or "W", fields, ns.variant, steps, samples, ring,
                     ns.output, ns.fmt, getattr(ns, "seed", 0), getattr(ns, "trials", 0),
                     kind_given=ns.kind is not None)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


@contextmanager
def _sink(path: str | None):
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def emit_json(doc: dict, path: str | None) -> None:
    with _sink(path) as fh:
        fh.write(json.dumps(doc, indent=2) + "\n")


def emit_table(columns: Sequence[str], rows: Sequence[Sequence], path: str | None, fmt: str) -> None:
    if fmt == "json":
        emit_json({"columns": list(columns), "rows": [dict(zip(columns, r)) for r in rows]}, path)
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else (format(v, ".17g") if isinstance(v, float) else v)
                         for v in row])
    with _sink(path) as fh:
        fh.write(buf.getvalue())


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _walk(kind: str, coin, field: RationalField, variant: str = "auto") -> WalkSpec:
    spec = WalkSpec.shift_coin(coin) if kind == "U" else WalkSpec.split_step(coin)
    if field.num == 0 and variant == "auto":
        return spec
    if variant == "auto":
        variant = "plain" if kind == "U" else "tilde"
    name = f"{kind}[{field.num}/{field.den}{'~' if variant == 'tilde' else ''}]"
    return WalkSpec((Field(field.with_variant(variant)),) + spec.layers, name)


def cmd_evolve(cfg: RunConfig) -> int:
    kinds = [cfg.kind] if cfg.kind_given else ["U", "W"]
    psi0 = figure1_state()
    trajs = []
    for f in cfg.fields:
        for kind in kinds:
            standard = cfg.variant in ("auto", "plain" if kind == "U" else "tilde")
            power, lam, _ = revival_relation(kind, f)
            trajs.append(evolve_trace(
                _walk(kind, cfg.coin, f, cfg.variant), psi0, cfg.steps,
                revival_period=power if standard else None, revival_phase=complex(-lam),
                label=f"{kind} {f.num}/{f.den}"))
    if (cfg.fmt or "csv") == "json":
        rows = [r for t in trajs for r in t.rows()]
        emit_table(("label", "t", "mean", "sigma", "revival_error"), rows, cfg.output, "json")
    else:
        with _sink(cfg.output) as fh:
            write_csv(trajs, fh)
    return EXIT_OK


def cmd_dispersion(cfg: RunConfig) -> int:
    f = cfg.field
    sym = regrouped_symbol(cfg.kind, cfg.coin, f)
    theta = np.arange(cfg.theta_samples) * (2.0 * math.pi / cfg.theta_samples)
    phases = sym.eigenphases(theta)
    vel = np.abs(sym.group_velocities(theta))
    prof = DispersionProfile.from_coin(cfg.coin, sym.power)
    closed = np.abs(prof.group_velocity(closed_form_momentum(theta)))
    two_pi = 2.0 * math.pi
    rows = [(float(t / two_pi), float(p[0] / two_pi), float(p[1] / two_pi), float(v.max()), float(c))
            for t, p, v, c in zip(theta, phases, vel, closed)]
    cols = ("theta", "omega_plus", "omega_minus", "abs_group_velocity", "closed_form_abs_group_velocity")
    emit_table(cols, rows, cfg.output, cfg.fmt or "csv")
    return EXIT_OK


def cmd_velocity(cfg: RunConfig) -> int:
    rep = max_velocity(cfg.kind, cfg.coin, cfg.field)
    doc = rep.as_dict()
    doc["abs_a"] = cfg.coin.abs_a
    doc["gap"] = abs(rep.numeric - rep.closed_form)
    doc["tolerance"] = VELOCITY_TOL
    _emit_scalar(doc, cfg)
    return EXIT_OK if doc["gap"] <= VELOCITY_TOL else EXIT_DEFECT


def cmd_revival(cfg: RunConfig) -> int:
    rep = revival_defect(cfg.kind, cfg.coin, cfg.field)
    doc = rep.as_dict()
    doc["gap"] = abs(rep.numeric - rep.closed_form)
    doc["tolerance"] = REVIVAL_TOL
    _emit_scalar(doc, cfg)
    return EXIT_OK if doc["gap"] <= REVIVAL_TOL else EXIT_DEFECT


def _ring_outside(kind: str, coin: SU2Coin, field: RationalField, bands, cells: int, twists: int = 32) -> float:
    spec = _walk(kind, coin, field)
    worst = 0.0
    for j in range(twists):
        mat = build_matrix(spec, Ring(cells, 2.0 * math.pi * j / twists))
        ev = mat.eigvals()
        worst = max(worst, float(bands.distance(np.angle(ev)).max()))
    return worst


def cmd_spectrum(cfg: RunConfig) -> int:
    f = cfg.field
    bands = spectrum_bands(cfg.kind, cfg.coin, f, max(cfg.theta_samples, 64))
    cells = cfg.ring_size or 4 * f.den
    outside = _ring_outside(cfg.kind, cfg.coin, f, bands, cells)
    two_pi = 2.0 * math.pi
    rows = [(float(lo / two_pi), float(hi / two_pi)) for lo, hi in bands.rows()]
    if (cfg.fmt or "csv") == "csv":
        emit_table(("start", "end"), rows, cfg.output, "csv")
    else:
        emit_json({"kind": cfg.kind, "field": f"{f.num}/{f.den}", "arcs": [list(r) for r in rows],
                   "total_length": bands.total_length / two_pi, "ring_cells": cells,
                   "max_eigenvalue_distance": outside, "tolerance": SPECTRUM_TOL}, cfg.output)
    return EXIT_OK if outside <= SPECTRUM_TOL else EXIT_DEFECT


def _random_unitary(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def cmd_sieve(cfg: RunConfig) -> int:
    f = cfg.field
    rng = np.random.default_rng(cfg.seed)
    cells = cfg.ring_size or math.lcm(2 * f.den, 4)
    const = verify_sieving(cfg.coin, cells)
    rand = 0.0
    for _ in range(cfg.trials):
        seq = CoinSequence.periodic([_random_unitary(rng) for _ in range(cells)])
        rand = max(rand, verify_sieving(seq, cells))
    electric = electric_sieve_check(cfg.coin, f, cells)
    worst = max(const, rand, electric)
    _emit_scalar({"field": f"{f.num}/{f.den}", "ring_cells": cells, "constant_coin_defect": const,
                  "random_coin_defect": rand, "random_trials": cfg.trials, "electric_defect": electric,
                  "tolerance": SIEVE_TOL}, cfg)
    return EXIT_OK if worst <= SIEVE_TOL else EXIT_DEFECT


def cmd_cmv(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    sites = cfg.ring_size or 64
    data = walk_to_cmv(cfg.coin)
    roundtrip = 0.0
    for pairs, spec in ((data.u, WalkSpec.shift_coin(cfg.coin)), (data.w, WalkSpec.split_step(cfg.coin))):
        a = build_matrix(cmv_to_walk(pairs), Ring(sites // 2)).matrix
        b = build_matrix(spec, Ring(sites // 2)).matrix
        roundtrip = max(roundtrip, float(np.abs(a - b).max()))
    stencil = corr = boxed = 0.0
    for _ in range(cfg.trials):
        pairs = PairSequence.periodic([VerblunskyPair.random(rng) for _ in range(sites)])
        stencil = max(stencil, stencil_defect(pairs, sites))
        corr = max(corr, correspondence_defect(pairs, sites))
        boxed = max(boxed, boxed_entry_defect(pairs, sites))
    pair = data.w(0)
    _emit_scalar({"sites": sites, "coin_pair": {"alpha": _complex_pair(pair.alpha),
                                                "rho": _complex_pair(pair.rho)},
                  "roundtrip_defect": roundtrip, "stencil_defect": stencil,
                  "correspondence_defect": corr, "boxed_entry_defect": boxed,
                  "random_trials": cfg.trials, "tolerance": CMV_TOL}, cfg)
    return EXIT_OK if max(roundtrip, stencil, corr, boxed) <= CMV_TOL else EXIT_DEFECT


def cmd_cf(cfg: RunConfig, value: str) -> int:
    try:
        frac = Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid rational {value!r}") from exc
    cf = continued_fraction(frac.numerator, frac.denominator)
    if cfg.fmt == "csv":
        rows = [(k, a, f"{c.numerator}/{c.denominator}")
                for k, (a, c) in enumerate(zip(cf.quotients, cf.convergents))]
        emit_table(("k", "quotient", "convergent"), rows, cfg.output, "csv")
    else:
        emit_json(cf.as_dict(), cfg.output)
    return EXIT_OK


def _complex_pair(z: complex) -> list[float]:
    # adding 0.0 turns negative zeros into plain zeros
    return [z.real + 0.0, z.imag + 0.0]


def _emit_scalar(doc: dict, cfg: RunConfig) -> None:
    if cfg.fmt == "csv":
        flat = {k: v for k, v in doc.items() if not isinstance(v, (dict, list))}
        emit_table(tuple(flat), [tuple(flat.values())], cfg.output, "csv")
    else:
        emit_json(doc, cfg.output)


_COMMANDS = {
    "evolve": cmd_evolve,
    "dispersion": cmd_dispersion,
    "velocity": cmd_velocity,
    "revival": cmd_revival,
    "spectrum": cmd_spectrum,
    "sieve-check": cmd_sieve,
    "cmv-check": cmd_cmv,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        sweep_threads()
        cfg = make_config(ns)
        if ns.command == "cf":
            return cmd_cf(cfg, ns.value)
        return _COMMANDS[ns.command](cfg)
    except (UsageError, EwalkError, ValueError) as exc:
        print(f"ewalk {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

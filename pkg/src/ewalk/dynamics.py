"""
Time-evolution experiments on the infinite lattice.

Trajectories record the position mean and standard deviation after every
step, plus an optional revival error at multiples of a revival period.
States live on windows that grow with the light cone, so no amplitude is
ever truncated.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from .core import RationalField, SU2Coin, WalkSpec, WaveFunction, position_moments, step
from .exceptions import NotNormalized
from .floquet import revival_relation, velocity_exponent

__all__ = [
    "TracePoint",
    "Trajectory",
    "ContinuedFraction",
    "VelocityTrace",
    "evolve_trace",
    "velocity_estimate",
    "continued_fraction",
    "figure1_dataset",
    "figure1_state",
    "write_csv",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("label", "t", "mean", "sigma", "revival_error")
NORM_ATOL = 1e-10


@dataclass(frozen=True)
class TracePoint:
    t: int
    mean: float
    sigma: float
    revival_error: float | None = None


@dataclass
class Trajectory:
    """Position moments along an evolution, one point per step starting at ``t = 0``."""

    label: str
    points: list[TracePoint] = dc_field(default_factory=list)

    def __post_init__(self) -> None:
        ts = [p.t for p in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("trajectory times must be strictly increasing")

    def append(self, point: TracePoint) -> None:
        if self.points and point.t <= self.points[-1].t:
            raise ValueError("trajectory times must be strictly increasing")
        self.points.append(point)

    @property
    def t(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    @property
    def sigma(self) -> np.ndarray:
        return np.array([p.sigma for p in self.points])

    @property
    def mean(self) -> np.ndarray:
        return np.array([p.mean for p in self.points])

    def revival_errors(self) -> list[tuple[int, float]]:
        return [(p.t, p.revival_error) for p in self.points if p.revival_error is not None]

    def local_minima(self) -> list[int]:
        """Interior times where ``sigma`` is no larger than both neighbours."""
        s = self.sigma
        return [int(self.points[i].t) for i in range(1, len(s) - 1)
                if s[i] <= s[i - 1] and s[i] <= s[i + 1]]

    def rows(self) -> list[tuple]:
        return [(self.label, p.t, p.mean, p.sigma, p.revival_error) for p in self.points]


def _check_state(psi0: WaveFunction) -> None:
    if abs(psi0.norm() - 1.0) > NORM_ATOL:
        raise NotNormalized(f"initial state has norm {psi0.norm()!r}")


def evolve_trace(spec: WalkSpec, psi0: WaveFunction, steps: int,
                 revival_period: int | None = None, revival_phase: complex = 1.0,
                 reference: str = "previous", label: str | None = None) -> Trajectory:
    """
    Evolve ``psi0`` for ``steps`` steps and record position moments.

    Parameters
    ----------
    revival_period, revival_phase
        When a period ``p`` is given, times ``t = k p`` also record a revival
        error with the per-period phase ``revival_phase``.
    reference
        ``"previous"`` compares ``psi_t`` with ``phase * psi_{t-p}``, the
        statewise form of the operator identity for the period.  ``"initial"``
        compares with ``phase**k * psi0``; those errors add up over periods.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    if reference not in ("previous", "initial"):
        raise ValueError(f"unknown revival reference {reference!r}")
    _check_state(psi0)
    traj = Trajectory(label or spec.name)
    mean, _, sigma = position_moments(psi0)
    traj.append(TracePoint(0, mean, sigma, 0.0 if revival_period else None))
    anchor = psi0
    state = psi0
    for t in range(1, steps + 1):
        state = step(state, spec)
        mean, _, sigma = position_moments(state)
        err = None
        if revival_period and t % revival_period == 0:
            if reference == "previous":
                target = WaveFunction(anchor.offset, anchor.amps * revival_phase)
                anchor = state
            else:
                k = t // revival_period
                target = WaveFunction(psi0.offset, psi0.amps * revival_phase**k)
            err = state.distance(target)
        traj.append(TracePoint(t, mean, sigma, err))
    return traj


@dataclass(frozen=True)
class VelocityTrace:
    """Ballistic scaling ``||Q psi_t|| / t`` with an optional asymptotic reference."""

    values: list[tuple[int, float]]
    reference: float | None = None
    note: str = "finite-time estimate; convergence to the reference is not asserted"

    @property
    def final(self) -> float:
        return self.values[-1][1]

    def tail(self, count: int = 10) -> list[tuple[int, float]]:
        return self.values[-count:]


def velocity_estimate(spec: WalkSpec, psi0: WaveFunction, steps: int,
                      reference: float | None = None) -> VelocityTrace:
    """Sequence ``(t, ||Q psi_t|| / t)`` for ``t = 1 .. steps``."""
    if steps < 1:
        raise ValueError("need at least one step")
    _check_state(psi0)
    out = []
    state = psi0
    for t in range(1, steps + 1):
        state = step(state, spec)
        _, second, _ = position_moments(state)
        out.append((t, math.sqrt(second) / t))
    return VelocityTrace(out, reference)


@dataclass(frozen=True)
class ContinuedFraction:
    """Regular continued fraction ``[a0; a1, a2, ...]`` with exact convergents."""

    quotients: tuple[int, ...]
    convergents: tuple[Fraction, ...]

    @property
    def value(self) -> Fraction:
        return self.convergents[-1]

    def __str__(self) -> str:
        head, *rest = self.quotients
        return f"[{head};{','.join(map(str, rest))}]" if rest else f"[{head}]"

    def as_dict(self) -> dict:
        return {
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "quotients": list(self.quotients),
            "expansion": str(self),
            "convergents": [f"{c.numerator}/{c.denominator}" for c in self.convergents],
        }


def continued_fraction(p: int, q: int) -> ContinuedFraction:
    """Euclidean expansion of ``p / q``; the last quotient exceeds 1 unless the expansion has one term."""
    if q < 1:
        raise ValueError("denominator must be positive")
    quotients = []
    num, den = p, q
    while den:
        a, r = divmod(num, den)
        quotients.append(a)
        num, den = den, r
    # Recurrence h_k = a_k h_{k-1} + h_{k-2}, seeded with (1, 0) and (0, 1).
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    convergents = []
    for a in quotients:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        convergents.append(Fraction(h, k))
    return ContinuedFraction(tuple(quotients), tuple(convergents))


def figure1_state() -> WaveFunction:
    """``delta_0 (x) (1, i) / sqrt(2)``."""
    return WaveFunction.delta(0, np.array([1.0, 1.0j]) / math.sqrt(2.0))


def _walk(kind: str, coin: SU2Coin, field: RationalField) -> WalkSpec:
    if kind == "U":
        return WalkSpec.shift_coin(coin, field)
    if kind == "W":
        return WalkSpec.split_step(coin, field=field)
    raise ValueError(f"kind must be 'U' or 'W', got {kind!r}")


def figure1_dataset(coin: SU2Coin, fields: Sequence[RationalField], psi0: WaveFunction | None = None,
                    steps: int = 100, kinds: Iterable[str] = ("U", "W")) -> list[Trajectory]:
    """
    Standard-deviation traces of the electric walks for each field.

    Each trajectory is labelled ``"<kind> <n>/<m>"`` and carries revival
    errors at multiples of the revival period of that walk.
    """
    psi0 = figure1_state() if psi0 is None else psi0
    out = []
    for f in fields:
        for kind in kinds:
            power, lam, _ = revival_relation(kind, f)
            out.append(evolve_trace(_walk(kind, coin, f), psi0, steps, power, complex(-lam),
                                    label=f"{kind} {f.num}/{f.den}"))
    return out


def closed_form_velocity(kind: str, coin: SU2Coin, field: RationalField) -> float:
    return coin.abs_a ** velocity_exponent(kind, field)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(trajectories: Iterable[Trajectory], stream: TextIO | None = None) -> str:
    """Write ``label,t,mean,sigma,revival_error`` rows; returns the text when ``stream`` is None."""
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for traj in trajectories:
        for label, t, mean, sigma, err in traj.rows():
            writer.writerow([label, t, _fmt(mean), _fmt(sigma), _fmt(err)])
    return buf.getvalue() if stream is None else ""

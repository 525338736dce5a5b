"""
Momentum-space engine for translation-invariant and regrouped electric walks.

Fourier convention: ``psi_hat(theta) = sum_n exp(-i theta n) psi(n)``, so
``S_+ -> diag(e^{-i theta}, 1)``, ``S_- -> diag(1, e^{i theta})`` and the
plain field ``F_Phi`` becomes the momentum translation ``theta -> theta - Phi``.

Every walk layer is represented as ``psi_hat(theta) -> A(theta) psi_hat(theta - s)``.
Composition multiplies matrices and adds momentum shifts, so an ``m``-fold
regrouped electric walk is an ordered matrix product whose accumulated shift is
an integer number of turns (checked with exact fractions).

The closed-form dispersion relations are written in the opposite momentum
orientation: ``DispersionProfile`` at ``theta`` describes the product symbol at
``-theta`` (see :func:`closed_form_momentum`).  Velocities, revival defects and
band edges are invariant under this reflection.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .core import (
    Coin,
    Field,
    FullShift,
    GlobalPhase,
    RationalField,
    ShiftMinus,
    ShiftPlus,
    SU2Coin,
    WalkSpec,
    unit_phase,
)
from .exceptions import NotTranslationInvariant

__all__ = [
    "LayerSymbol",
    "FloquetSymbol",
    "DispersionProfile",
    "BandSet",
    "VelocityReport",
    "RevivalReport",
    "layer_symbol",
    "symbol_of_spec",
    "regrouped_symbol",
    "dispersion_closed_form",
    "group_velocity_closed_form",
    "closed_form_momentum",
    "velocity_exponent",
    "max_velocity",
    "revival_relation",
    "revival_defect",
    "spectrum_bands",
    "maximize_periodic",
    "sweep_threads",
]

TWO_PI = 2.0 * math.pi

_PAULI = np.array(
    [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128
)


def sweep_threads() -> int:
    """Worker cap for theta sweeps, read from ``EWALK_THREADS`` (default 1)."""
    raw = os.environ.get("EWALK_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"EWALK_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"EWALK_THREADS must be a positive integer, got {raw!r}")
    return value


def _sweep(fn: Callable[[np.ndarray], np.ndarray], thetas: np.ndarray) -> np.ndarray:
    workers = sweep_threads()
    if workers == 1 or len(thetas) < 4096:
        return fn(thetas)
    chunks = np.array_split(thetas, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# layer symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayerSymbol:
    """
    Momentum representation of one layer: ``psi_hat(theta) -> A(theta) psi_hat(theta - shift)``.

    ``kind`` is ``"multiplication"`` (no shift) or ``"momentum_shift"``.
    ``diag`` selects the theta-dependent diagonal of shift layers
    (``"plus"``, ``"minus"``, ``"full"``); ``const`` is a constant factor.
    """

    kind: str
    const: NDArray[np.complex128]
    diag: str | None = None
    shift: Fraction = Fraction(0)

    def matrix(self, theta: np.ndarray) -> NDArray[np.complex128]:
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape + (2, 2), dtype=np.complex128)
        if self.diag is None:
            out[...] = self.const
            return out
        e_minus, e_plus = np.exp(-1j * theta), np.exp(1j * theta)
        out[..., 0, 0] = e_minus if self.diag in ("plus", "full") else 1.0
        out[..., 1, 1] = e_plus if self.diag in ("minus", "full") else 1.0
        return out

    def derivative(self, theta: np.ndarray) -> NDArray[np.complex128]:
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape + (2, 2), dtype=np.complex128)
        if self.diag in ("plus", "full"):
            out[..., 0, 0] = -1j * np.exp(-1j * theta)
        if self.diag in ("minus", "full"):
            out[..., 1, 1] = 1j * np.exp(1j * theta)
        return out


def layer_symbol(layer) -> LayerSymbol:
    eye = np.eye(2, dtype=np.complex128)
    if isinstance(layer, ShiftPlus):
        return LayerSymbol("multiplication", eye, "plus")
    if isinstance(layer, ShiftMinus):
        return LayerSymbol("multiplication", eye, "minus")
    if isinstance(layer, FullShift):
        return LayerSymbol("multiplication", eye, "full")
    if isinstance(layer, Coin):
        if not layer.coins.is_constant:
            raise NotTranslationInvariant("position-dependent coin has no Fourier symbol")
        return LayerSymbol("multiplication", np.array(layer.coins(0)))
    if isinstance(layer, GlobalPhase):
        return LayerSymbol("multiplication", layer.phase * eye)
    if isinstance(layer, Field):
        f = layer.field
        if f.variant == "plain":
            return LayerSymbol("momentum_shift", eye, None, f.turns)
        internal = np.diag([1.0, unit_phase(f.turns)]).astype(np.complex128)
        return LayerSymbol("momentum_shift", internal, None, 2 * f.turns)
    raise TypeError(f"unknown layer {layer!r}")


# ---------------------------------------------------------------------------
# Floquet symbols
# ---------------------------------------------------------------------------


class FloquetSymbol:
    """
    2x2 unitary symbol ``theta -> prod_i A_i(theta - o_i)`` of a translation-invariant walk.

    Eigenphases are written ``omega_pm = gamma +- omega_rel`` where
    ``exp(2 i gamma) = det`` and ``omega_rel`` in ``[0, pi]``.
    """

    def __init__(self, factors: Sequence[tuple[LayerSymbol, float]], power: int = 1,
                 provenance: str = "") -> None:
        self.factors = tuple(factors)
        self.power = power
        self.provenance = provenance
        eye = np.eye(2)
        ops: list[tuple] = []
        for sym, off in self.factors:
            if sym.diag is not None:
                ops.append(("diag", off, sym.diag in ("plus", "full"), sym.diag in ("minus", "full")))
            elif not np.array_equal(sym.const, eye):
                if ops and ops[-1][0] == "const":
                    ops[-1] = ("const", ops[-1][1] @ sym.const)
                else:
                    ops.append(("const", np.array(sym.const)))
        self._ops = ops

    period = TWO_PI

    def __repr__(self) -> str:
        return f"FloquetSymbol({self.provenance!r}, power={self.power}, factors={len(self.factors)})"

    def __call__(self, theta) -> NDArray[np.complex128]:
        return self.value_and_derivative(theta, with_derivative=False)[0]

    def value_and_derivative(self, theta, with_derivative: bool = True):
        """Symbol and its exact theta-derivative (product rule)."""
        theta = np.asarray(theta, dtype=float)
        value = np.broadcast_to(np.eye(2, dtype=np.complex128), theta.shape + (2, 2)).copy()
        deriv = np.zeros_like(value) if with_derivative else None
        for op in self._ops:
            if op[0] == "const":
                value = value @ op[1]
                if with_derivative:
                    deriv = deriv @ op[1]
                continue
            _, off, plus, minus = op
            # right factor diag(e^{-it}, e^{it}); derivative entries -i e^{-it}, +i e^{it}
            if plus:
                d0 = np.exp(-1j * (theta - off))[..., None]
                if with_derivative:
                    deriv[..., :, 0] = (deriv[..., :, 0] - 1j * value[..., :, 0]) * d0
                value[..., :, 0] *= d0
            if minus:
                d1 = np.exp(1j * (theta - off))[..., None]
                if with_derivative:
                    deriv[..., :, 1] = (deriv[..., :, 1] + 1j * value[..., :, 1]) * d1
                value[..., :, 1] *= d1
        return value, deriv

    # -- spectral data -----------------------------------------------------

    @staticmethod
    def _su2_parts(value, deriv=None):
        det = value[..., 0, 0] * value[..., 1, 1] - value[..., 0, 1] * value[..., 1, 0]
        gamma = 0.5 * np.angle(det)
        norm = np.exp(-1j * gamma)[..., None, None]
        red = value * norm
        x0 = 0.5 * np.real(red[..., 0, 0] + red[..., 1, 1])
        x = 0.5 * np.imag(np.einsum("kij,...ji->...k", _PAULI, red))
        if deriv is None:
            return gamma, x0, x, None, None, None
        # d(gamma) = Im tr(M^dagger dM) / 2 for unitary M
        dgamma = 0.5 * np.imag(np.einsum("...ji,...ji->...", value.conj(), deriv))
        dred = (deriv - 1j * dgamma[..., None, None] * value) * norm
        dx0 = 0.5 * np.real(dred[..., 0, 0] + dred[..., 1, 1])
        dx = 0.5 * np.imag(np.einsum("kij,...ji->...k", _PAULI, dred))
        return gamma, x0, x, dgamma, dx0, dx

    def eigenphases(self, theta) -> NDArray[np.float64]:
        """Array ``[..., (omega_plus, omega_minus)]``."""
        gamma, x0, x, *_ = self._su2_parts(self(theta))
        rel = np.arctan2(np.linalg.norm(x, axis=-1), x0)
        return np.stack([gamma + rel, gamma - rel], axis=-1)

    def eigenvalues(self, theta) -> NDArray[np.complex128]:
        return np.exp(1j * self.eigenphases(theta))

    def projections(self, theta) -> NDArray[np.complex128]:
        """Eigenprojections ``[..., s, 2, 2]`` matching :meth:`eigenphases`."""
        _, _, x, *_ = self._su2_parts(self(theta))
        nx = np.linalg.norm(x, axis=-1, keepdims=True)
        axis = np.where(nx > 0, x / np.where(nx > 0, nx, 1.0), np.array([0.0, 0.0, 1.0]))
        ndots = np.einsum("...k,kij->...ij", axis, _PAULI)
        eye = np.eye(2, dtype=np.complex128)
        return np.stack([(eye + ndots) / 2, (eye - ndots) / 2], axis=-3)

    def group_velocities(self, theta) -> NDArray[np.float64]:
        """Exact ``d omega_s / d theta`` for both bands, ``[..., (plus, minus)]``."""
        value, deriv = self.value_and_derivative(theta)
        _, x0, x, dgamma, dx0, dx = self._su2_parts(value, deriv)
        nx = np.linalg.norm(x, axis=-1)
        ndx = np.linalg.norm(dx, axis=-1)
        dot = np.einsum("...k,...k->...", x, dx)
        # near a band touching x -> 0 and d|x| -> +-|dx| up to O(|x|^2)
        regular = nx > 1e-7 * ndx
        dnorm = np.where(regular, dot / np.where(regular, nx, 1.0), np.sign(dot) * ndx)
        drel = x0 * dnorm - nx * dx0
        return np.stack([dgamma + drel, dgamma - drel], axis=-1)

    def max_abs_group_velocity(self, theta) -> NDArray[np.float64]:
        return np.abs(self.group_velocities(theta)).max(axis=-1)


def _compose(spec_layers, power: int) -> tuple[list[tuple[LayerSymbol, float]], Fraction]:
    factors: list[tuple[LayerSymbol, float]] = []
    offset = Fraction(0)
    for _ in range(power):
        for layer in spec_layers:
            sym = layer_symbol(layer)
            factors.append((sym, TWO_PI * float(offset % 1)))
            offset += sym.shift
    return factors, offset


def symbol_of_spec(spec: WalkSpec) -> FloquetSymbol:
    """Fourier symbol of a field-free walk with constant coins."""
    if spec.has_field:
        raise NotTranslationInvariant(f"{spec.name} contains a field layer")
    factors, _ = _compose(spec.layers, 1)
    return FloquetSymbol(factors, 1, spec.name)


def _walk_for(kind: str, coin: SU2Coin, field: RationalField) -> WalkSpec:
    if kind == "U":
        return WalkSpec.shift_coin(coin, field)
    if kind == "W":
        return WalkSpec.split_step(coin, coin, field)
    raise ValueError(f"kind must be 'U' or 'W', got {kind!r}")


def regrouped_symbol(kind: str, coin: SU2Coin, field: RationalField, power: int | None = None) -> FloquetSymbol:
    """
    Symbol of ``U_Phi^p`` or ``W_Phi^p`` (default ``p = m``).

    The accumulated momentum shift must vanish modulo one turn; this is checked
    with exact rational arithmetic.
    """
    spec = _walk_for(kind, coin, field)
    p = field.den if power is None else int(power)
    factors, total = _compose(spec.layers, p)
    if total.denominator != 1:
        raise NotTranslationInvariant(
            f"{kind}^{p} at field {field} leaves a momentum shift of {total} turns")
    return FloquetSymbol(factors, p, f"{spec.name}^{p}")


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def closed_form_momentum(theta):
    """Map a symbol momentum to the orientation used by the closed forms."""
    return -np.asarray(theta)


@dataclass(frozen=True)
class DispersionProfile:
    """Closed-form dispersion data of the ``m``-fold regrouped shift-coin walk."""

    m: int
    abs_a: float
    arg_a: float = 0.0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be positive")
        if not -1e-15 <= self.abs_a <= 1.0 + 1e-15:
            raise ValueError(f"|a| must lie in [0, 1] (got {self.abs_a})")

    @classmethod
    def from_coin(cls, coin: SU2Coin, m: int) -> "DispersionProfile":
        return cls(m, coin.abs_a, coin.arg_a)

    @property
    def parity(self) -> str:
        return "odd" if self.m % 2 else "even"

    @property
    def _am(self) -> float:
        return self.abs_a ** self.m

    def cos_omega(self, theta):
        m = self.m
        c = np.cos(m * (np.asarray(theta, dtype=float) + self.arg_a))
        if m % 2:
            return self._am * c
        return -self._am * c + (-1) ** (m // 2) * (self._am - 1.0)

    def cos_range(self) -> tuple[float, float]:
        """Exact ``(min, max)`` of ``cos omega`` over theta."""
        am = self._am
        if self.m % 2:
            return -am, am
        sign = (-1) ** (self.m // 2 + 1)
        ends = sorted((sign * 1.0, sign * (1.0 - 2.0 * am)))
        return ends[0], ends[1]

    def omega(self, theta):
        """``(omega_plus, omega_minus)`` with ``omega_plus`` in ``[0, pi]``."""
        w = np.arccos(np.clip(self.cos_omega(theta), -1.0, 1.0))
        return w, -w

    def group_velocity(self, theta):
        """``|d omega / d theta|`` through the regular squared forms."""
        m, am = self.m, self._am
        phase = m * (np.asarray(theta, dtype=float) + self.arg_a)
        if m % 2:
            y = np.cos(phase) ** 2
            den = 1.0 - am * am * y
            ratio = np.where(den > 0, (1.0 - y) / np.where(den > 0, den, 1.0), 1.0)
            return m * am * np.sqrt(np.clip(ratio, 0.0, None))
        y = 1.0 - (-1) ** (m // 2) * np.cos(phase)
        den = 2.0 - am * y
        ratio = np.where(den > 0, (2.0 - y) / np.where(den > 0, den, 1.0), 1.0)
        return m * math.sqrt(am) * np.sqrt(np.clip(ratio, 0.0, None))

    def raw_group_velocity(self, theta):
        """Quotient form ``(-1)^{m+1} m |a|^m sin(m(theta + arg a)) / sin(omega_plus)``; singular at band edges."""
        m = self.m
        w, _ = self.omega(theta)
        return (-1) ** (m + 1) * m * self._am * np.sin(m * (np.asarray(theta) + self.arg_a)) / np.sin(w)


def dispersion_closed_form(profile: DispersionProfile, theta):
    return profile.omega(theta)


def group_velocity_closed_form(profile: DispersionProfile, theta):
    return profile.group_velocity(theta)


# ---------------------------------------------------------------------------
# maximization
# ---------------------------------------------------------------------------

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a: np.ndarray, b: np.ndarray, iters: int):
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc >= fd
        a_new = np.where(left, a, c)
        b_new = np.where(left, d, b)
        c_new = np.where(left, b_new - _INV_PHI * (b_new - a_new), d)
        d_new = np.where(left, c, a_new + _INV_PHI * (b_new - a_new))
        probe = np.where(left, c_new, d_new)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        a, b, c, d = a_new, b_new, c_new, d_new
    x = np.where(fc >= fd, c, d)
    return x, np.maximum(fc, fd)


def maximize_periodic(f: Callable[[np.ndarray], np.ndarray], period: float = TWO_PI,
                      n_grid: int = 4096, n_best: int = 8, rounds: int = 3,
                      iters: int = 16) -> tuple[float, float]:
    """
    Maximize a vectorized periodic function.

    A uniform grid locates the ``n_best`` largest samples.  Each is refined by
    ``rounds`` golden-section passes; every pass re-brackets around the
    previous result with four times the bracket it ended on.
    Returns ``(argmax, max)``.
    """
    grid = np.arange(n_grid) * (period / n_grid)
    values = _sweep(f, grid)
    order = np.argsort(values)[::-1][:n_best]
    best_x, best_f = grid[order], values[order]
    half = period / n_grid
    for _ in range(rounds):
        x, fx = _golden_max(f, best_x - half, best_x + half, iters)
        better = fx > best_f
        best_x = np.where(better, x, best_x)
        best_f = np.where(better, fx, best_f)
        half = 4.0 * half * _INV_PHI ** iters
    i = int(np.argmax(best_f))
    return float(best_x[i] % period), float(best_f[i])


# ---------------------------------------------------------------------------
# velocities, revivals, spectra
# ---------------------------------------------------------------------------


def velocity_exponent(kind: str, field: RationalField) -> int:
    """Integer ``e`` with ``v = |a|^e``: ``m`` except ``m/2`` for ``U`` at even ``m``."""
    m = field.den
    if kind == "U":
        return m if m % 2 else m // 2
    if kind == "W":
        return m
    raise ValueError(f"kind must be 'U' or 'W', got {kind!r}")


@dataclass(frozen=True)
class VelocityReport:
    kind: str
    field: RationalField
    exponent: int
    closed_form: float
    numeric: float
    legacy_bound: float
    power: int

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "field": f"{self.field.num}/{self.field.den}",
            "exponent": self.exponent,
            "closed_form": self.closed_form,
            "numeric": self.numeric,
            "legacy_bound": self.legacy_bound,
            "regroup_power": self.power,
        }


def max_velocity(kind: str, coin: SU2Coin, field: RationalField, n_grid: int = 4096,
                 power: int | None = None) -> VelocityReport:
    """
    Maximal velocity of ``U_Phi`` or ``W_Phi``.

    ``numeric`` maximizes the exact eigenphase derivatives of the regrouped
    product symbol and divides by the regrouping power; it does not use the
    closed-form dispersion.
    """
    sym = regrouped_symbol(kind, coin, field, power)
    _, vmax = maximize_periodic(sym.max_abs_group_velocity, n_grid=n_grid)
    e = velocity_exponent(kind, field)
    abs_a = coin.abs_a
    return VelocityReport(kind, field, e, abs_a**e, vmax / sym.power,
                          (4.0 * abs_a) ** field.den, sym.power)


def revival_relation(kind: str, field: RationalField) -> tuple[int, int, int]:
    """
    ``(power, lam, exponent)`` with ``||X^power + lam|| = 2 |a|^exponent``.

    For ``W`` the sign is ``lam = -(-1)^m`` for either parity of ``n``.
    """
    m = field.den
    if kind == "U":
        if m % 2:
            return 2 * m, 1, m
        return m, (-1) ** (m // 2), m // 2
    if kind == "W":
        return m, -((-1) ** m), m
    raise ValueError(f"kind must be 'U' or 'W', got {kind!r}")


@dataclass(frozen=True)
class RevivalReport:
    kind: str
    field: RationalField
    power: int
    numeric: float
    closed_form: float
    phase: complex

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "field": f"{self.field.num}/{self.field.den}",
            "power": self.power,
            "numeric": self.numeric,
            "closed_form": self.closed_form,
            "phase": [self.phase.real, self.phase.imag],
        }


def revival_defect(kind: str, coin: SU2Coin, field: RationalField, n_grid: int = 4096,
                   lam: int | None = None) -> RevivalReport:
    """
    Numeric ``sup_theta ||M(theta) + lam||`` against the closed form ``2 |a|^e``.

    ``lam`` defaults to the sign from :func:`revival_relation`; passing the
    other sign measures how far the walk is from that alternative identity.
    """
    power, default_lam, e = revival_relation(kind, field)
    lam = default_lam if lam is None else lam
    sym = regrouped_symbol(kind, coin, field, power)

    def defect(theta):
        return np.abs(sym.eigenvalues(theta) + lam).max(axis=-1)

    _, sup = maximize_periodic(defect, n_grid=n_grid)
    return RevivalReport(kind, field, power, sup, 2.0 * coin.abs_a**e, complex(-lam))


@dataclass(frozen=True)
class BandSet:
    """
    Closed arcs on the unit circle as sorted, disjoint ``(start, end)`` angles in ``[0, 2 pi]``.

    ``multiplicity`` counts the raw arcs that were merged.
    """

    arcs: tuple[tuple[float, float], ...]
    multiplicity: int

    @classmethod
    def from_raw(cls, raw: Sequence[tuple[float, float]], tol: float = 1e-12) -> "BandSet":
        pieces: list[tuple[float, float]] = []
        for start, end in raw:
            if end < start:
                start, end = end, start
            if end - start >= TWO_PI - tol:
                pieces.append((0.0, TWO_PI))
                continue
            s = start % TWO_PI
            e = s + (end - start)
            if e > TWO_PI:
                pieces.append((s, TWO_PI))
                pieces.append((0.0, e - TWO_PI))
            else:
                pieces.append((s, e))
        pieces.sort()
        merged: list[list[float]] = []
        for s, e in pieces:
            if merged and s <= merged[-1][1] + tol:
                merged[-1][1] = max(merged[-1][1], e)
            else:
                merged.append([s, e])
        return cls(tuple((float(s), float(e)) for s, e in merged), len(raw))

    @property
    def total_length(self) -> float:
        return sum(e - s for s, e in self.arcs)

    @property
    def is_full_circle(self) -> bool:
        return len(self.arcs) == 1 and self.arcs[0][1] - self.arcs[0][0] >= TWO_PI - 1e-12

    def distance(self, angle) -> NDArray[np.float64]:
        """Angular distance from ``angle`` to the nearest arc (0 inside)."""
        a = np.mod(np.asarray(angle, dtype=float), TWO_PI)
        best = np.full(a.shape, np.inf)
        for s, e in self.arcs:
            inside = (a >= s) & (a <= e)
            ds = np.abs(a - s)
            de = np.abs(a - e)
            d = np.minimum(np.minimum(ds, TWO_PI - ds), np.minimum(de, TWO_PI - de))
            best = np.minimum(best, np.where(inside, 0.0, d))
        return best

    def contains(self, z, tol: float = 1e-10) -> NDArray[np.bool_]:
        """Whether unit-circle points ``z`` (complex) lie within ``tol`` of the bands."""
        return self.distance(np.angle(np.asarray(z))) <= tol

    def rows(self) -> list[tuple[float, float]]:
        return list(self.arcs)


def _omega_range(profile: DispersionProfile, theta_samples: int) -> tuple[float, float]:
    thetas = np.arange(theta_samples) * (TWO_PI / theta_samples)
    sampled = profile.cos_omega(thetas)
    lo, hi = profile.cos_range()
    cmin = min(lo, float(sampled.min()))
    cmax = max(hi, float(sampled.max()))
    return math.acos(max(-1.0, min(1.0, cmax))), math.acos(max(-1.0, min(1.0, cmin)))


def spectrum_bands(kind: str, coin: SU2Coin, field: RationalField, theta_samples: int = 256) -> BandSet:
    """
    Spectral bands of ``U_Phi`` or ``W_Phi``.

    ``U``: ``m``-th roots of the arcs traced by ``exp(i omega_pm(theta, m))``.
    ``W``: ``exp(i (w_s + pi k) / m)`` for ``k = 0..2m-1`` with ``w = omega(., 2m)``
    for odd ``n`` and ``w = 2 omega(., m)`` for even ``n``.
    """
    if theta_samples < 64:
        raise ValueError("theta_samples must be at least 64")
    m, n = field.den, field.num
    raw: list[tuple[float, float]] = []
    if kind == "U":
        lo, hi = _omega_range(DispersionProfile.from_coin(coin, m), theta_samples)
        for s_lo, s_hi in ((lo, hi), (-hi, -lo)):
            for k in range(m):
                raw.append(((s_lo + TWO_PI * k) / m, (s_hi + TWO_PI * k) / m))
    elif kind == "W":
        if n % 2:
            lo, hi = _omega_range(DispersionProfile.from_coin(coin, 2 * m), theta_samples)
        else:
            lo, hi = _omega_range(DispersionProfile.from_coin(coin, m), theta_samples)
            lo, hi = 2 * lo, 2 * hi
        for s_lo, s_hi in ((lo, hi), (-hi, -lo)):
            for k in range(2 * m):
                raw.append(((s_lo + math.pi * k) / m, (s_hi + math.pi * k) / m))
    else:
        raise ValueError(f"kind must be 'U' or 'W', got {kind!r}")
    return BandSet.from_raw(raw)

"""
Position-space building blocks for one-dimensional two-component walks.

States live on the cell lattice Z with a C^2 fiber per cell.  Amplitudes are
stored cell-major, so the flat index of the basis vector at cell ``n`` with
component ``s`` is ``2 * (n - offset) + (0 if s == "+" else 1)``.

Walks are written as ordered layer lists in operator-product order: the
layer list ``(FullShift(), Coin(c))`` is the operator ``S C``, so the coin
acts first.  Open windows grow with the light cone, hence evolution of a
finitely supported state is exact on the infinite lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import IncompatibleRing

__all__ = [
    "SU2Coin",
    "CoinSequence",
    "RationalField",
    "WaveFunction",
    "ShiftPlus",
    "ShiftMinus",
    "FullShift",
    "Coin",
    "Field",
    "GlobalPhase",
    "WalkSpec",
    "Ring",
    "OpenWindow",
    "BandedUnitary",
    "unit_phase",
    "roots_of_unity",
    "as_unitary",
    "is_unitary",
    "apply_shift",
    "apply_coin",
    "apply_field",
    "apply_layer",
    "step",
    "evolve",
    "build_matrix",
    "position_moments",
]

ComplexArray = NDArray[np.complex128]

UNITARY_ATOL = 1e-12

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)


# ---------------------------------------------------------------------------
# exact phases
# ---------------------------------------------------------------------------

_QUARTER_TURNS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def unit_phase(turns: Fraction | int) -> complex:
    """Return ``exp(2 pi i * turns)``, exact when ``turns`` is a multiple of 1/4."""
    t = Fraction(turns) % 1
    if (4 * t).denominator == 1:
        return _QUARTER_TURNS[int(4 * t)]
    return complex(np.exp(2j * np.pi * float(t)))


def roots_of_unity(m: int) -> ComplexArray:
    """Table ``exp(2 pi i k / m)`` for ``k = 0..m-1`` with exact quarter turns."""
    return np.array([unit_phase(Fraction(k, m)) for k in range(m)], dtype=np.complex128)


# ---------------------------------------------------------------------------
# coins
# ---------------------------------------------------------------------------


def is_unitary(mat: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    mat = np.asarray(mat)
    eye = np.eye(mat.shape[-1])
    return bool(np.allclose(mat.conj().swapaxes(-1, -2) @ mat, eye, atol=atol, rtol=0))


@dataclass(frozen=True)
class SU2Coin:
    """
    Translation-invariant coin with unit determinant.

    The matrix is ``[[a, b], [-conj(b), conj(a)]]``.  The pair ``(a, b)`` is
    rescaled onto the unit sphere on construction.
    """

    a: complex
    b: complex

    def __post_init__(self) -> None:
        a, b = complex(self.a), complex(self.b)
        norm = math.hypot(abs(a), abs(b))
        if norm == 0.0:
            raise ValueError("coin parameters a and b cannot both vanish")
        if abs(norm - 1.0) > 0.0:
            a, b = a / norm, b / norm
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def hadamard(cls) -> "SU2Coin":
        s = 1.0 / math.sqrt(2.0)
        return cls(s, s)

    @classmethod
    def identity(cls) -> "SU2Coin":
        return cls(1.0, 0.0)

    @classmethod
    def from_polar(cls, abs_a: float, arg_a: float = 0.0, arg_b: float = 0.0) -> "SU2Coin":
        if not 0.0 <= abs_a <= 1.0:
            raise ValueError(f"|a| must lie in [0, 1] (got {abs_a})")
        abs_b = math.sqrt(max(0.0, 1.0 - abs_a * abs_a))
        return cls(abs_a * np.exp(1j * arg_a), abs_b * np.exp(1j * arg_b))

    @property
    def abs_a(self) -> float:
        return min(1.0, abs(self.a))

    @property
    def arg_a(self) -> float:
        return float(np.angle(self.a))

    @property
    def matrix(self) -> ComplexArray:
        a, b = self.a, self.b
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=np.complex128)


CoinLike = Union[SU2Coin, np.ndarray, Sequence[Sequence[complex]]]


def as_unitary(coin: CoinLike) -> ComplexArray:
    """Return ``coin`` as a validated 2x2 unitary array."""
    if isinstance(coin, SU2Coin):
        return coin.matrix
    mat = np.asarray(coin, dtype=np.complex128)
    if mat.shape != (2, 2):
        raise ValueError(f"coin must be 2x2, got shape {mat.shape}")
    if not is_unitary(mat):
        raise ValueError("coin matrix is not unitary within 1e-12")
    return mat


class CoinSequence:
    """
    Position-dependent coin rule ``n -> C(n)``.

    Use one of the constructors :meth:`constant`, :meth:`periodic` or
    :meth:`explicit`.  Every produced coin is a 2x2 unitary.
    """

    __slots__ = ("kind", "_mats", "_table", "_default")

    def __init__(self, kind: str, mats: ComplexArray, table: dict[int, ComplexArray] | None = None,
                 default: ComplexArray | None = None) -> None:
        self.kind = kind
        self._mats = mats
        self._table = table or {}
        self._default = default

    @classmethod
    def constant(cls, coin: CoinLike) -> "CoinSequence":
        return cls("constant", as_unitary(coin)[None, :, :])

    @classmethod
    def periodic(cls, coins: Iterable[CoinLike]) -> "CoinSequence":
        mats = np.stack([as_unitary(c) for c in coins])
        if len(mats) == 0:
            raise ValueError("periodic coin rule needs at least one coin")
        return cls("periodic", mats)

    @classmethod
    def explicit(cls, coins: Mapping[int, CoinLike], default: CoinLike | None = None) -> "CoinSequence":
        table = {int(n): as_unitary(c) for n, c in coins.items()}
        dflt = as_unitary(np.eye(2) if default is None else default)
        return cls("explicit", dflt[None, :, :], table, dflt)

    @property
    def period(self) -> int | None:
        """Spatial period, or ``None`` for explicit rules."""
        if self.kind == "explicit":
            return None
        return len(self._mats)

    @property
    def is_constant(self) -> bool:
        if self.kind == "constant":
            return True
        if self.kind == "periodic":
            return bool(np.all(self._mats == self._mats[0]))
        return not self._table

    @property
    def overrides(self) -> dict[int, ComplexArray]:
        """Cell-specific coins of an explicit rule (empty otherwise)."""
        return dict(self._table)

    def __call__(self, n: int) -> ComplexArray:
        n = int(n)
        if self.kind == "explicit":
            return self._table.get(n, self._default)
        return self._mats[n % len(self._mats)]

    def at(self, cells: np.ndarray) -> ComplexArray:
        """Stack of coins at the integer ``cells``, shape ``(len(cells), 2, 2)``."""
        cells = np.asarray(cells, dtype=np.int64)
        if self.kind == "explicit":
            out = np.broadcast_to(self._default, (len(cells), 2, 2)).copy()
            for i, n in enumerate(cells.tolist()):
                if n in self._table:
                    out[i] = self._table[n]
            return out
        return self._mats[cells % len(self._mats)]

    def reindexed(self, scale: int, shift: int) -> "CoinSequence":
        """Coin rule ``n -> C(scale * n + shift)``."""
        if self.kind == "constant":
            return self
        if self.kind == "periodic":
            p = len(self._mats)
            new_p = p // math.gcd(p, scale)
            return CoinSequence("periodic", self._mats[(scale * np.arange(new_p) + shift) % p])
        table = {}
        for n, mat in self._table.items():
            q, r = divmod(n - shift, scale)
            if r == 0:
                table[q] = mat
        return CoinSequence("explicit", self._mats, table, self._default)

    def mapped(self, fn: Callable[[ComplexArray], ComplexArray]) -> "CoinSequence":
        """Same rule with every matrix replaced by ``fn(matrix)``."""
        mats = np.stack([as_unitary(fn(m)) for m in self._mats])
        if self.kind != "explicit":
            return CoinSequence(self.kind, mats)
        table = {n: as_unitary(fn(m)) for n, m in self._table.items()}
        return CoinSequence("explicit", mats, table, mats[0])

    def __repr__(self) -> str:
        return f"CoinSequence(kind={self.kind!r}, period={self.period})"


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalField:
    """
    Electric field with angle ``2 pi num / den`` (reduced, ``0 <= num < den``).

    ``variant="plain"`` multiplies cell ``q`` by ``exp(i Phi q)``.
    ``variant="tilde"`` multiplies by ``diag(1, exp(i Phi)) * exp(2 i Phi q)``.
    """

    num: int
    den: int = 1
    variant: str = "plain"

    def __post_init__(self) -> None:
        if self.variant not in ("plain", "tilde"):
            raise ValueError(f"unknown field variant {self.variant!r}")
        if self.den == 0:
            raise ValueError("field denominator must be nonzero")
        frac = Fraction(int(self.num), int(self.den)) % 1
        object.__setattr__(self, "num", frac.numerator)
        object.__setattr__(self, "den", frac.denominator)

    @classmethod
    def parse(cls, text: str, variant: str = "plain") -> "RationalField":
        """Parse ``"n/m"`` (or an integer) given in units of 2 pi."""
        frac = Fraction(text.strip())
        return cls(frac.numerator, frac.denominator, variant)

    @property
    def turns(self) -> Fraction:
        """Field angle in units of 2 pi."""
        return Fraction(self.num, self.den)

    @property
    def phi(self) -> float:
        return 2.0 * math.pi * self.num / self.den

    def ell(self) -> int:
        """Fundamental period of the half field: ``2m`` for odd ``n``, ``m`` otherwise."""
        return 2 * self.den if self.num % 2 else self.den

    def half(self) -> "RationalField":
        """Plain field at half the angle, reduced."""
        return RationalField(self.num, 2 * self.den, "plain")

    def with_variant(self, variant: str) -> "RationalField":
        return RationalField(self.num, self.den, variant)

    @property
    def spatial_period(self) -> int:
        if self.variant == "plain":
            return self.den
        return self.den // math.gcd(2 * self.num, self.den)

    def site_phases(self, cells: np.ndarray) -> ComplexArray:
        """Per-cell diagonal phases, shape ``(len(cells), 2)``."""
        cells = np.asarray(cells, dtype=np.int64)
        m, n = self.den, self.num
        roots = roots_of_unity(m)
        if self.variant == "plain":
            ph = roots[(n * cells) % m]
            return np.stack([ph, ph], axis=1)
        k = (2 * n * cells) % m
        return np.stack([roots[k], roots[(k + n) % m]], axis=1)

    def __str__(self) -> str:
        suffix = "~" if self.variant == "tilde" else ""
        return f"{self.num}/{self.den}{suffix}"


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass
class WaveFunction:
    """Finitely supported C^2-valued state on cells ``offset .. offset + len(amps) - 1``."""

    offset: int
    amps: ComplexArray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise ValueError(f"amps must have shape (L, 2), got {amps.shape}")
        self.amps = amps
        self.offset = int(self.offset)

    @classmethod
    def delta(cls, cell: int, spinor: Sequence[complex] = (1.0, 0.0)) -> "WaveFunction":
        return cls(cell, np.asarray(spinor, dtype=np.complex128).reshape(1, 2))

    @classmethod
    def from_cells(cls, values: Mapping[int, Sequence[complex]]) -> "WaveFunction":
        lo, hi = min(values), max(values)
        amps = np.zeros((hi - lo + 1, 2), dtype=np.complex128)
        for n, v in values.items():
            amps[n - lo] = v
        return cls(lo, amps)

    @property
    def cells(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.amps))

    def __len__(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def flat(self) -> ComplexArray:
        return self.amps.reshape(-1)

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.offset, self.amps.copy())

    def support(self, atol: float = 0.0) -> tuple[int, int] | None:
        """First and last cell with amplitude above ``atol``."""
        nz = np.nonzero(np.abs(self.amps).max(axis=1) > atol)[0]
        if len(nz) == 0:
            return None
        return self.offset + int(nz[0]), self.offset + int(nz[-1])

    def on_window(self, offset: int, length: int) -> "WaveFunction":
        """Same state embedded in (or cut to) the given window."""
        out = np.zeros((length, 2), dtype=np.complex128)
        lo = max(offset, self.offset)
        hi = min(offset + length, self.offset + len(self.amps))
        if hi > lo:
            out[lo - offset:hi - offset] = self.amps[lo - self.offset:hi - self.offset]
        return WaveFunction(offset, out)

    def distance(self, other: "WaveFunction") -> float:
        lo = min(self.offset, other.offset)
        hi = max(self.offset + len(self), other.offset + len(other))
        a = self.on_window(lo, hi - lo).amps
        b = other.on_window(lo, hi - lo).amps
        return float(np.linalg.norm(a - b))


# ---------------------------------------------------------------------------
# layers and walk specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftPlus:
    """``S_+``: moves the ``+`` component one cell right."""


@dataclass(frozen=True)
class ShiftMinus:
    """``S_-``: moves the ``-`` component one cell left."""


@dataclass(frozen=True)
class FullShift:
    """``S = S_+ S_-``."""


@dataclass(frozen=True)
class Coin:
    coins: CoinSequence

    @classmethod
    def of(cls, coin: CoinLike | CoinSequence) -> "Coin":
        if isinstance(coin, CoinSequence):
            return cls(coin)
        return cls(CoinSequence.constant(coin))


@dataclass(frozen=True)
class Field:
    field: RationalField


@dataclass(frozen=True)
class GlobalPhase:
    phase: complex

    def __post_init__(self) -> None:
        if abs(abs(self.phase) - 1.0) > UNITARY_ATOL:
            raise ValueError("global phase must have unit modulus")


Layer = Union[ShiftPlus, ShiftMinus, FullShift, Coin, Field, GlobalPhase]
_SHIFTS = (ShiftPlus, ShiftMinus, FullShift)


def _as_coin_seq(coin: CoinLike | CoinSequence) -> CoinSequence:
    return coin if isinstance(coin, CoinSequence) else CoinSequence.constant(coin)


@dataclass(frozen=True)
class WalkSpec:
    """Walk operator as a product of layers, listed left to right as written."""

    layers: tuple[Layer, ...]
    name: str = dc_field(default="walk", compare=False)

    @classmethod
    def shift_coin(cls, coin: CoinLike | CoinSequence, field: RationalField | None = None) -> "WalkSpec":
        """``U = S C``, or ``U_Phi = F_Phi S C`` when a field is given."""
        layers: list[Layer] = [FullShift(), Coin(_as_coin_seq(coin))]
        name = "U"
        if field is not None:
            layers.insert(0, Field(field.with_variant("plain")))
            name = f"U[{field.num}/{field.den}]"
        return cls(tuple(layers), name)

    @classmethod
    def split_step(cls, coin1: CoinLike | CoinSequence, coin2: CoinLike | CoinSequence | None = None,
                   field: RationalField | None = None) -> "WalkSpec":
        """``W = S_+ C_1 S_- C_2``, or ``W_Phi = F~_Phi W`` when a field is given."""
        c1 = _as_coin_seq(coin1)
        c2 = c1 if coin2 is None else _as_coin_seq(coin2)
        layers: list[Layer] = [ShiftPlus(), Coin(c1), ShiftMinus(), Coin(c2)]
        name = "W"
        if field is not None:
            layers.insert(0, Field(field.with_variant("tilde")))
            name = f"W[{field.num}/{field.den}]"
        return cls(tuple(layers), name)

    def then(self, *layers: Layer) -> "WalkSpec":
        """Prepend ``layers`` (they act after this walk)."""
        return WalkSpec(tuple(layers) + self.layers, self.name)

    @property
    def fields(self) -> list[RationalField]:
        return [ly.field for ly in self.layers if isinstance(ly, Field)]

    @property
    def has_field(self) -> bool:
        return bool(self.fields)

    @property
    def shift_count(self) -> tuple[int, int]:
        """Cells gained per step on the (left, right) side."""
        left = sum(isinstance(ly, (ShiftMinus, FullShift)) for ly in self.layers)
        right = sum(isinstance(ly, (ShiftPlus, FullShift)) for ly in self.layers)
        return left, right

    def split_step_tail(self) -> tuple[CoinSequence, CoinSequence] | None:
        """Coins ``(C_1, C_2)`` if the last four layers form ``S_+ C_1 S_- C_2``."""
        tail = self.layers[-4:]
        if (len(tail) == 4 and isinstance(tail[0], ShiftPlus) and isinstance(tail[1], Coin)
                and isinstance(tail[2], ShiftMinus) and isinstance(tail[3], Coin)):
            return tail[1].coins, tail[3].coins
        return None

    def required_period(self) -> int:
        """Least ring size compatible with every field and periodic coin layer."""
        period = 1
        for ly in self.layers:
            if isinstance(ly, Field):
                period = math.lcm(period, ly.field.den)
            elif isinstance(ly, Coin) and ly.coins.kind == "periodic":
                period = math.lcm(period, ly.coins.period)
        return period


# ---------------------------------------------------------------------------
# layer application on auto-growing windows
# ---------------------------------------------------------------------------


def apply_shift(state: WaveFunction, direction: str) -> WaveFunction:
    """Apply ``S_+`` (``"plus"``), ``S_-`` (``"minus"``) or ``S`` (``"full"``)."""
    amps = state.amps
    if direction == "full":
        return apply_shift(apply_shift(state, "plus"), "minus")
    out = np.zeros((len(amps) + 1, 2), dtype=np.complex128)
    out[1:, 0] = amps[:, 0]
    out[:-1, 1] = amps[:, 1]
    if direction == "plus":
        return WaveFunction(state.offset, out)
    if direction == "minus":
        return WaveFunction(state.offset - 1, out)
    raise ValueError(f"unknown shift direction {direction!r}")


def _apply_local(amps: ComplexArray, mats: ComplexArray) -> ComplexArray:
    if len(mats) == 1:
        return amps @ mats[0].T
    return np.einsum("nij,nj->ni", mats, amps)


def apply_coin(state: WaveFunction, coins: CoinSequence | CoinLike) -> WaveFunction:
    coins = _as_coin_seq(coins)
    mats = coins.at([0]) if coins.kind == "constant" else coins.at(state.cells)
    return WaveFunction(state.offset, _apply_local(state.amps, mats))


def apply_field(state: WaveFunction, field: RationalField) -> WaveFunction:
    return WaveFunction(state.offset, state.amps * field.site_phases(state.cells))


def apply_layer(state: WaveFunction, layer: Layer) -> WaveFunction:
    if isinstance(layer, ShiftPlus):
        return apply_shift(state, "plus")
    if isinstance(layer, ShiftMinus):
        return apply_shift(state, "minus")
    if isinstance(layer, FullShift):
        return apply_shift(state, "full")
    if isinstance(layer, Coin):
        return apply_coin(state, layer.coins)
    if isinstance(layer, Field):
        return apply_field(state, layer.field)
    if isinstance(layer, GlobalPhase):
        return WaveFunction(state.offset, state.amps * layer.phase)
    raise TypeError(f"unknown layer {layer!r}")


def _split_step_kernel(state: WaveFunction, c1: CoinSequence, c2: CoinSequence) -> WaveFunction:
    # Basis action of S_+ C_1 S_- C_2, written as a gather over neighbouring cells.
    L = len(state)
    cells = np.arange(state.offset - 1, state.offset + L + 1)
    psi = np.zeros((L + 2, 2), dtype=np.complex128)
    psi[1:-1] = state.amps
    m1 = c1.at(cells)
    m2 = c2.at(cells)
    u = np.einsum("nij,nj->ni", m2, psi)
    a1, b1, c1_, d1 = m1[:, 0, 0], m1[:, 0, 1], m1[:, 1, 0], m1[:, 1, 1]
    out = np.zeros_like(psi)
    out[1:, 0] = a1[:-1] * u[:-1, 0] + b1[:-1] * u[1:, 1]
    out[:-1, 1] = c1_[:-1] * u[:-1, 0] + d1[:-1] * u[1:, 1]
    return WaveFunction(state.offset - 1, out)


def step(state: WaveFunction, spec: WalkSpec, fused: bool = True) -> WaveFunction:
    """
    One application of the walk operator ``spec`` to ``state``.

    With ``fused=True`` a trailing split-step block ``S_+ C_1 S_- C_2`` is
    evaluated through its closed basis action instead of four layer passes.
    """
    layers = spec.layers
    tail = spec.split_step_tail() if fused else None
    if tail is not None:
        state = _split_step_kernel(state, *tail)
        layers = layers[:-4]
    for layer in reversed(layers):
        state = apply_layer(state, layer)
    return state


def evolve(state: WaveFunction, spec: WalkSpec, steps: int, fused: bool = True):
    """Yield ``state`` after 1, 2, ..., ``steps`` applications of the walk."""
    for _ in range(steps):
        state = step(state, spec, fused=fused)
        yield state


def position_moments(state: WaveFunction) -> tuple[float, float, float]:
    """Mean, second moment and standard deviation of the cell position."""
    prob = np.sum(np.abs(state.amps) ** 2, axis=1)
    cells = state.cells.astype(float)
    mean = float(prob @ cells)
    second = float(prob @ cells**2)
    return mean, second, math.sqrt(max(0.0, second - mean * mean))


# ---------------------------------------------------------------------------
# finite matrix realizations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ring:
    """Periodic window of ``cells`` sites with Bloch twist ``psi(n + N) = e^{i twist} psi(n)``."""

    cells: int
    twist: float = 0.0


@dataclass(frozen=True)
class OpenWindow:
    """Cells ``start .. start + length - 1``; amplitude leaving the window is dropped."""

    start: int
    length: int


Window = Union[Ring, OpenWindow]


@dataclass
class BandedUnitary:
    """
    Finite matrix realization of a banded operator.

    ``site_dim`` is 2 for cell windows (C^2 fibers) and 1 for scalar lattices.
    Entries are held densely; the windows used here are small.
    """

    window: Window
    matrix: ComplexArray
    site_dim: int = 2

    def __matmul__(self, other: "BandedUnitary") -> "BandedUnitary":
        return BandedUnitary(self.window, self.matrix @ other.matrix, self.site_dim)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def matvec(self, state: WaveFunction) -> WaveFunction:
        if not isinstance(self.window, OpenWindow):
            raise TypeError("matvec on WaveFunction needs an open window")
        w = self.window
        vec = state.on_window(w.start, w.length).flat()
        return WaveFunction(w.start, (self.matrix @ vec).reshape(-1, 2))

    def unitarity_defect(self) -> float:
        eye = np.eye(self.matrix.shape[0])
        return float(np.abs(self.matrix.conj().T @ self.matrix - eye).max())

    def is_unitary(self, atol: float = UNITARY_ATOL) -> bool:
        return self.unitarity_defect() <= atol

    def bandwidth(self) -> int:
        """Largest cyclic distance (in sites) between coupled sites."""
        rows, cols = np.nonzero(self.matrix)
        n = self.matrix.shape[0] // self.site_dim
        d = np.abs(rows // self.site_dim - cols // self.site_dim)
        if isinstance(self.window, Ring):
            d = np.minimum(d, n - d)
        return int(d.max()) if len(d) else 0

    def eigvals(self) -> ComplexArray:
        return np.linalg.eigvals(self.matrix)


def _window_cells(window: Window) -> np.ndarray:
    if isinstance(window, Ring):
        return np.arange(window.cells)
    return np.arange(window.start, window.start + window.length)


def _shift_matrix(window: Window, hop: int, comp: int) -> ComplexArray:
    """Identity on the other component; component ``comp`` hops by ``hop`` cells."""
    cells = _window_cells(window)
    n = len(cells)
    mat = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    other = 1 - comp
    idx = np.arange(n)
    mat[2 * idx + other, 2 * idx + other] = 1.0
    target = idx + hop
    if isinstance(window, Ring):
        wrap = (target < 0) | (target >= n)
        phase = np.where(wrap, np.exp(-1j * hop * window.twist), 1.0)
        mat[2 * (target % n) + comp, 2 * idx + comp] = phase
    else:
        keep = (target >= 0) & (target < n)
        mat[2 * target[keep] + comp, 2 * idx[keep] + comp] = 1.0
    return mat


def _layer_matrix(layer: Layer, window: Window) -> ComplexArray:
    cells = _window_cells(window)
    n = len(cells)
    if isinstance(layer, ShiftPlus):
        return _shift_matrix(window, +1, 0)
    if isinstance(layer, ShiftMinus):
        return _shift_matrix(window, -1, 1)
    if isinstance(layer, FullShift):
        return _shift_matrix(window, +1, 0) @ _shift_matrix(window, -1, 1)
    if isinstance(layer, Coin):
        mats = layer.coins.at(cells)
        out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        for i in range(n):
            out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = mats[i]
        return out
    if isinstance(layer, Field):
        return np.diag(layer.field.site_phases(cells).reshape(-1))
    if isinstance(layer, GlobalPhase):
        return layer.phase * np.eye(2 * n, dtype=np.complex128)
    raise TypeError(f"unknown layer {layer!r}")


def build_matrix(spec: WalkSpec, window: Window) -> BandedUnitary:
    """
    Matrix of ``spec`` on a twisted ring or an open window.

    Rings must hold a whole number of field periods (and of coin periods for
    periodic coin rules); otherwise :class:`IncompatibleRing` is raised.
    """
    if isinstance(window, Ring):
        if window.cells < 1:
            raise IncompatibleRing("ring needs at least one cell")
        period = spec.required_period()
        if window.cells % period:
            raise IncompatibleRing(
                f"ring of {window.cells} cells is not a multiple of the layer period {period}")
    n = len(_window_cells(window))
    mat = np.eye(2 * n, dtype=np.complex128)
    for layer in spec.layers:
        mat = mat @ _layer_matrix(layer, window)
    return BandedUnitary(window, mat, 2)

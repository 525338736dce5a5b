"""
Even/odd decomposition of the squared shift-coin walk.

The square of ``U = S C`` never couples cells of opposite parity.  Relabeling
even cells ``2n -> n`` and odd cells ``2n + 1 -> n`` turns each parity block
into a split-step walk, which :func:`verify_sieving` and
:func:`electric_sieve_check` confirm as exact matrix identities on rings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    CoinSequence,
    GlobalPhase,
    RationalField,
    Ring,
    SU2Coin,
    WalkSpec,
    build_matrix,
    unit_phase,
)
from .exceptions import IncompatibleRing

__all__ = [
    "ParityReindex",
    "SievedCoins",
    "sieve_coins",
    "verify_sieving",
    "electric_sieve_check",
    "parity_leak",
    "half_field_phase_turns",
    "default_ring_size",
    "revival_sign_exponent",
]

SIEVE_TOL = 1e-13


@dataclass(frozen=True)
class ParityReindex:
    """
    Permutation between a ring of ``cells`` cells and its two parity rings.

    Block coordinates list the even ring (cells ``2n``) first and the odd
    ring (cells ``2n + 1``) second, each cell-major with two components.
    ``direction="split"`` maps full-lattice vectors to block vectors,
    ``direction="merge"`` maps back.
    """

    cells: int
    direction: str = "split"

    def __post_init__(self) -> None:
        if self.direction not in ("split", "merge"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.cells < 2 or self.cells % 2:
            raise IncompatibleRing(f"parity split needs an even ring, got {self.cells} cells")

    @property
    def source_of_block(self) -> np.ndarray:
        """Full-lattice flat index feeding each block flat index."""
        half = self.cells // 2
        n = np.arange(half)
        out = np.empty(2 * self.cells, dtype=np.int64)
        for parity in (0, 1):
            base = parity * 2 * half
            for s in (0, 1):
                out[base + 2 * n + s] = 2 * (2 * n + parity) + s
        return out

    @property
    def permutation(self) -> np.ndarray:
        """Index array ``p`` with ``output = input[p]``."""
        src = self.source_of_block
        if self.direction == "split":
            return src
        inv = np.empty_like(src)
        inv[src] = np.arange(len(src))
        return inv

    def inverse(self) -> "ParityReindex":
        return ParityReindex(self.cells, "merge" if self.direction == "split" else "split")

    def matrix(self) -> np.ndarray:
        """Permutation matrix ``P`` with ``P @ v == v[permutation]``."""
        size = 2 * self.cells
        out = np.zeros((size, size))
        out[np.arange(size), self.permutation] = 1.0
        return out

    def __call__(self, vec: np.ndarray) -> np.ndarray:
        return np.asarray(vec)[..., self.permutation]

    def conjugate(self, mat: np.ndarray) -> np.ndarray:
        """Operator ``mat`` expressed in the output coordinates."""
        p = self.permutation
        return mat[np.ix_(p, p)]


@dataclass(frozen=True)
class SievedCoins:
    """Coins of the even walk ``(c1, c2)`` and the odd walk ``(c1_odd, c2_odd)``."""

    c1: CoinSequence
    c2: CoinSequence
    c1_odd: CoinSequence
    c2_odd: CoinSequence

    @property
    def even(self) -> tuple[CoinSequence, CoinSequence]:
        return self.c1, self.c2

    @property
    def odd(self) -> tuple[CoinSequence, CoinSequence]:
        return self.c1_odd, self.c2_odd


def sieve_coins(coins: CoinSequence) -> SievedCoins:
    """Split-step coins of the two parity blocks of ``(S C)^2``."""
    return SievedCoins(
        c1=coins.reindexed(2, 1),
        c2=coins.reindexed(2, 0),
        c1_odd=coins.reindexed(2, 2),
        c2_odd=coins.reindexed(2, 1),
    )


def _on_ring(coins: CoinSequence, cells: int) -> CoinSequence:
    # Pin the rule to the ring so every reindexed sequence wraps consistently.
    if coins.kind == "constant":
        return coins
    if coins.kind == "periodic" and cells % coins.period == 0:
        return coins
    if coins.kind == "periodic":
        raise IncompatibleRing(f"ring of {cells} cells does not hold whole coin periods ({coins.period})")
    return CoinSequence.periodic(coins.at(np.arange(cells)))


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0],) * 2, dtype=np.complex128)
    out[:a.shape[0], :a.shape[0]] = a
    out[a.shape[0]:, a.shape[0]:] = b
    return out


def _sieve_defect(lhs: WalkSpec, even: WalkSpec, odd: WalkSpec, cells: int) -> float:
    full = build_matrix(lhs, Ring(cells)).matrix
    squared = ParityReindex(cells).conjugate(full @ full)
    half = cells // 2
    blocks = _block_diag(build_matrix(even, Ring(half)).matrix, build_matrix(odd, Ring(half)).matrix)
    return float(np.abs(squared - blocks).max())


def verify_sieving(coins: CoinSequence | SU2Coin | np.ndarray, cells: int) -> float:
    """
    Largest entrywise difference between ``(S C)^2`` and ``W (+) W~``.

    Both sides live on rings: ``cells`` for the shift-coin walk and
    ``cells / 2`` for each split-step block.
    """
    if cells < 2 or cells % 2:
        raise IncompatibleRing(f"sieving needs an even ring, got {cells} cells")
    if not isinstance(coins, CoinSequence):
        coins = CoinSequence.constant(coins)
    coins = _on_ring(coins, cells)
    sc = sieve_coins(coins)
    return _sieve_defect(
        WalkSpec.shift_coin(coins),
        WalkSpec.split_step(sc.c1, sc.c2),
        WalkSpec.split_step(sc.c1_odd, sc.c2_odd),
        cells,
    )


def default_ring_size(field: RationalField) -> int:
    """Smallest ring holding whole periods of the half field with even parity blocks."""
    return math.lcm(2 * field.den, 4)


def half_field_phase_turns(field: RationalField) -> Fraction:
    """Angle of ``exp(i Phi / 2)`` in units of 2 pi."""
    return field.turns / 2


def electric_sieve_check(coin: SU2Coin, field: RationalField, cells: int | None = None) -> float:
    """
    Defect of ``U_{Phi/2}^2 = (e^{-i Phi/2} F~_Phi W) (+) (e^{i Phi/2} F~_Phi W~)``.

    ``field`` carries ``Phi``; the shift-coin side runs in the half field,
    reduced to lowest terms.  The ring defaults to :func:`default_ring_size`.
    """
    if cells is None:
        cells = default_ring_size(field)
    if cells % 2 or cells % (2 * field.den):
        raise IncompatibleRing(
            f"ring of {cells} cells must be even and hold whole half-field periods ({2 * field.den})")
    coins = CoinSequence.constant(coin)
    sc = sieve_coins(coins)
    tilde = field.with_variant("tilde")
    half_turns = half_field_phase_turns(field)
    even = WalkSpec.split_step(sc.c1, sc.c2, tilde).then(GlobalPhase(unit_phase(-half_turns)))
    odd = WalkSpec.split_step(sc.c1_odd, sc.c2_odd, tilde).then(GlobalPhase(unit_phase(half_turns)))
    return _sieve_defect(WalkSpec.shift_coin(coins, field.half()), even, odd, cells)


def parity_leak(spec: WalkSpec, cells: int) -> float:
    """Largest entry of ``spec^2`` coupling cells of opposite parity on a ring."""
    mat = build_matrix(spec, Ring(cells)).matrix
    sq = mat @ mat
    cell = np.arange(2 * cells) // 2
    mixed = (cell[:, None] - cell[None, :]) % 2 == 1
    return float(np.abs(sq[mixed]).max()) if mixed.any() else 0.0


def revival_sign_exponent(field: RationalField) -> Fraction:
    """Angle of ``exp(i m Phi / 2)`` in units of 2 pi, equal to ``n / 2``."""
    return field.den * half_field_phase_turns(field)

"""
Generalized extended CMV matrices and their split-step walk form.

A Verblunsky pair ``(alpha, rho)`` with ``|alpha|^2 + |rho|^2 = 1`` defines
the block ``Theta = [[conj(alpha), rho], [conj(rho), -alpha]]``.  On the
scalar lattice, ``L`` places ``Theta(alpha_{2n}, rho_{2n})`` on the sites
``{2n, 2n + 1}`` and ``M`` places ``Theta(alpha_{2n+1}, rho_{2n+1})`` on
``{2n + 1, 2n + 2}``; the product ``E = L M`` is five-diagonal.

Grouping the sites ``2n - 1`` and ``2n`` into the cell ``n`` (components
``+`` and ``-`` respectively) turns ``E`` into the split-step walk with
coins ``C_1(n) = sigma_1 Theta_{2n}`` and ``C_2(n) = sigma_1 Theta_{2n-1}``.

Pair sequences are stored as rules of ``Theta`` blocks, reusing
:class:`~ewalk.core.CoinSequence`, so constant, periodic and explicit
assignments behave exactly like coin rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import (
    SIGMA_1,
    BandedUnitary,
    Coin,
    CoinSequence,
    FullShift,
    Ring,
    SU2Coin,
    WalkSpec,
    as_unitary,
    build_matrix,
)
from .exceptions import IncompatibleRing, NotNormalized, NotRepresentable

__all__ = [
    "VerblunskyPair",
    "PairSequence",
    "CMVData",
    "theta_matrix",
    "build_LM",
    "gecmv_matrix",
    "gecmv_stencil",
    "base_identification",
    "cmv_to_walk",
    "walk_to_cmv",
    "correspondence_defect",
    "stencil_defect",
    "boxed_entry_defect",
]

PAIR_ATOL = 1e-12


@dataclass(frozen=True)
class VerblunskyPair:
    """Point ``(alpha, rho)`` on the unit sphere of C^2."""

    alpha: complex
    rho: complex

    def __post_init__(self) -> None:
        alpha, rho = complex(self.alpha), complex(self.rho)
        if abs(abs(alpha) ** 2 + abs(rho) ** 2 - 1.0) > PAIR_ATOL:
            raise NotNormalized(f"|alpha|^2 + |rho|^2 = {abs(alpha) ** 2 + abs(rho) ** 2!r} is not 1")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_theta(cls, theta: np.ndarray) -> "VerblunskyPair":
        return cls(complex(np.conj(theta[0, 0])), complex(theta[0, 1]))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "VerblunskyPair":
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        return cls(complex(v[0], v[1]), complex(v[2], v[3]))

    @property
    def theta(self) -> np.ndarray:
        return theta_matrix(self)


def theta_matrix(pair: VerblunskyPair | tuple[complex, complex]) -> np.ndarray:
    """The block ``[[conj(alpha), rho], [conj(rho), -alpha]]`` (determinant -1)."""
    if not isinstance(pair, VerblunskyPair):
        pair = VerblunskyPair(*pair)
    a, r = pair.alpha, pair.rho
    return np.array([[a.conjugate(), r], [r.conjugate(), -a]], dtype=np.complex128)


PairLike = VerblunskyPair | tuple


class PairSequence:
    """
    Rule ``j -> (alpha_j, rho_j)`` on the scalar lattice.

    Internally a :class:`CoinSequence` of ``Theta`` blocks.
    """

    __slots__ = ("thetas",)

    def __init__(self, thetas: CoinSequence) -> None:
        self.thetas = thetas

    @classmethod
    def constant(cls, pair: PairLike) -> "PairSequence":
        return cls(CoinSequence.constant(theta_matrix(pair)))

    @classmethod
    def periodic(cls, pairs: Iterable[PairLike]) -> "PairSequence":
        return cls(CoinSequence.periodic([theta_matrix(p) for p in pairs]))

    @classmethod
    def explicit(cls, pairs: Mapping[int, PairLike], default: PairLike = (0.0, 1.0)) -> "PairSequence":
        return cls(CoinSequence.explicit({j: theta_matrix(p) for j, p in pairs.items()},
                                         theta_matrix(default)))

    @property
    def kind(self) -> str:
        return self.thetas.kind

    @property
    def period(self) -> int | None:
        return self.thetas.period

    def __call__(self, j: int) -> VerblunskyPair:
        return VerblunskyPair.from_theta(self.thetas(j))

    def at(self, sites) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``(alpha_j, rho_j)`` for the integer ``sites``."""
        th = self.thetas.at(np.asarray(sites))
        return np.conj(th[:, 0, 0]), th[:, 0, 1].copy()

    def on_ring(self, sites: int) -> "PairSequence":
        """Periodic rule agreeing with this one on ``0 .. sites - 1``."""
        _check_ring(sites, self)
        if self.kind != "explicit":
            return self
        return PairSequence(CoinSequence.periodic(self.thetas.at(np.arange(sites))))

    def __repr__(self) -> str:
        return f"PairSequence(kind={self.kind!r}, period={self.period})"


def _as_pairs(pairs) -> PairSequence:
    if isinstance(pairs, PairSequence):
        return pairs
    return PairSequence.constant(pairs)


def _check_ring(sites: int, pairs: PairSequence | None = None) -> None:
    if sites < 2 or sites % 2:
        raise IncompatibleRing(f"CMV rings need an even number of scalar sites, got {sites}")
    if pairs is not None and pairs.kind == "periodic" and sites % pairs.period:
        raise IncompatibleRing(f"ring of {sites} sites does not hold whole pair periods ({pairs.period})")


def _block_layer(thetas: np.ndarray, first: np.ndarray, sites: int) -> np.ndarray:
    out = np.zeros((sites, sites), dtype=np.complex128)
    for th, j in zip(thetas, first.tolist()):
        idx = [j % sites, (j + 1) % sites]
        out[np.ix_(idx, idx)] += th
    return out


def build_LM(pairs, sites: int) -> tuple[BandedUnitary, BandedUnitary]:
    """
    The two block-diagonal factors on a ring of ``sites`` scalar sites.

    ``L`` holds ``Theta(alpha_{2n}, rho_{2n})`` on ``{2n, 2n + 1}`` and ``M``
    holds ``Theta(alpha_{2n+1}, rho_{2n+1})`` on ``{2n + 1, 2n + 2}``
    (indices modulo ``sites``).
    """
    pairs = _as_pairs(pairs)
    _check_ring(sites, pairs)
    even = np.arange(0, sites, 2)
    odd = even + 1
    ring = Ring(sites)
    L = BandedUnitary(ring, _block_layer(pairs.thetas.at(even), even, sites), site_dim=1)
    M = BandedUnitary(ring, _block_layer(pairs.thetas.at(odd), odd, sites), site_dim=1)
    return L, M


def gecmv_matrix(pairs, sites: int) -> BandedUnitary:
    """``E = L M`` on a ring of ``sites`` scalar sites."""
    L, M = build_LM(pairs, sites)
    return L @ M


def gecmv_stencil(pairs, sites: int, conjugate_lower: bool = True) -> BandedUnitary:
    """
    Five-diagonal matrix assembled entry by entry from the closed stencil.

    Rows ``2n`` and ``2n + 1`` read, over the columns ``2n - 1 .. 2n + 2``::

        conj(a_2n) conj(r_2n-1)   -conj(a_2n) a_2n-1   conj(a_2n+1) r_2n    r_2n+1 r_2n
        conj(r_2n) conj(r_2n-1)   -conj(r_2n) a_2n-1   -conj(a_2n+1) a_2n   -r_2n+1 a_2n

    With ``conjugate_lower=False`` the factor ``conj(r_2n-1)`` in the first
    column is replaced by ``r_2n-1``; the two agree when every ``rho`` is real.
    """
    pairs = _as_pairs(pairs)
    _check_ring(sites, pairs)
    E = np.zeros((sites, sites), dtype=np.complex128)
    for j in range(0, sites, 2):
        (am1, a0, a1), (rm1, r0, r1) = pairs.at([(j - 1) % sites, j, (j + 1) % sites])
        rl = np.conj(rm1) if conjugate_lower else rm1
        cols = [(j - 1) % sites, j, (j + 1) % sites, (j + 2) % sites]
        top = [np.conj(a0) * rl, -np.conj(a0) * am1, np.conj(a1) * r0, r1 * r0]
        bottom = [np.conj(r0) * rl, -np.conj(r0) * am1, -np.conj(a1) * a0, -r1 * a0]
        for c, t, b in zip(cols, top, bottom):
            E[j, c] += t
            E[j + 1, c] += b
    return BandedUnitary(Ring(sites), E, site_dim=1)


def base_identification(sites: int) -> np.ndarray:
    """
    Cell-major flat index assigned to each scalar site ``0 .. sites - 1``.

    Site ``2n - 1`` becomes ``(n, +)`` and site ``2n`` becomes ``(n, -)``,
    with cells taken modulo ``sites / 2``.
    """
    _check_ring(sites)
    j = np.arange(sites)
    cell = ((j + 1) // 2) % (sites // 2)
    comp = np.where(j % 2 == 1, 0, 1)
    return 2 * cell + comp


def cmv_to_walk(pairs) -> WalkSpec:
    """Split-step walk ``S_+ C_1 S_- C_2`` equal to ``E`` under the base identification."""
    pairs = _as_pairs(pairs)
    flipped = pairs.thetas.mapped(lambda th: SIGMA_1 @ th)
    return WalkSpec.split_step(flipped.reindexed(2, 0), flipped.reindexed(2, -1))


def _pair_of_coin(coin) -> VerblunskyPair:
    # sigma_1 Theta(alpha, rho) = [[conj(rho), -alpha], [conj(alpha), rho]]
    mat = as_unitary(coin)
    alpha, rho = -mat[0, 1], mat[1, 1]
    if abs(mat[0, 0] - np.conj(rho)) > PAIR_ATOL or abs(mat[1, 0] - np.conj(alpha)) > PAIR_ATOL:
        raise NotRepresentable("coin is not of the form sigma_1 Theta(alpha, rho); "
                               "only unit-determinant coins [[a, b], [-conj(b), conj(a)]] are")
    return VerblunskyPair(complex(alpha), complex(rho))


def _interleave(c1: CoinSequence, c2: CoinSequence) -> PairSequence:
    # alpha_{2n} from C_1(n), alpha_{2n-1} from C_2(n)
    if c1.kind == "constant" and c2.kind == "constant":
        p1, p2 = _pair_of_coin(c1(0)), _pair_of_coin(c2(0))
        if p1 == p2:
            return PairSequence.constant(p1)
        return PairSequence.periodic([p1, p2])
    if c1.kind != "explicit" and c2.kind != "explicit":
        cells = math.lcm(c1.period, c2.period)
        seq = []
        for n in range(cells):
            seq.append(_pair_of_coin(c1(n)))
            seq.append(_pair_of_coin(c2(n + 1)))
        return PairSequence.periodic(seq)
    d1, d2 = c1(10**9), c2(10**9)
    if c1.kind != "explicit" or c2.kind != "explicit" or not np.array_equal(d1, d2):
        raise NotRepresentable("mixed explicit coin rules need a common default coin")
    table = {}
    for n, mat in c1.overrides.items():
        table[2 * n] = _pair_of_coin(mat)
    for n, mat in c2.overrides.items():
        table[2 * n - 1] = _pair_of_coin(mat)
    return PairSequence.explicit(table, _pair_of_coin(d1))


@dataclass(frozen=True)
class CMVData:
    """Pair sequences realizing the shift-coin walk ``u`` and the split-step walk ``w``."""

    u: PairSequence
    w: PairSequence


def walk_to_cmv(walk: SU2Coin | np.ndarray | WalkSpec) -> CMVData | PairSequence:
    """
    Verblunsky data of a walk.

    For a single coin ``C`` returns :class:`CMVData` with ``U = S C`` given by
    alternating pairs ``(0, 1), (alpha, rho)`` and ``W = S_+ C S_- C`` given
    by the constant pair ``(alpha, rho)``, where ``C = sigma_1 Theta(alpha, rho)``.
    For a :class:`WalkSpec` (shift-coin or split-step, without fields)
    returns the single :class:`PairSequence` reproducing it.

    Raises
    ------
    NotRepresentable
        If a coin is not of the form ``sigma_1 Theta`` or the walk has a
        field or any other extra layer.
    """
    if not isinstance(walk, WalkSpec):
        pair = _pair_of_coin(walk)
        return CMVData(u=PairSequence.periodic([(0.0, 1.0), pair]), w=PairSequence.constant(pair))
    if walk.has_field:
        raise NotRepresentable("electric walks are not GECMV matrices")
    layers = walk.layers
    if len(layers) == 2 and isinstance(layers[0], FullShift) and isinstance(layers[1], Coin):
        ident = CoinSequence.constant(np.eye(2))
        return _interleave(ident, layers[1].coins)
    tail = walk.split_step_tail()
    if tail is None or len(layers) != 4:
        raise NotRepresentable(f"walk {walk.name!r} is neither S C nor S_+ C_1 S_- C_2")
    return _interleave(*tail)


def correspondence_defect(pairs, sites: int) -> float:
    """Largest entrywise difference between ``E`` and its split-step walk under the base identification."""
    pairs = _as_pairs(pairs).on_ring(sites)
    E = gecmv_matrix(pairs, sites).matrix
    W = build_matrix(cmv_to_walk(pairs), Ring(sites // 2)).matrix
    idx = base_identification(sites)
    return float(np.abs(W[np.ix_(idx, idx)] - E).max())


def stencil_defect(pairs, sites: int, conjugate_lower: bool = True) -> float:
    """Largest entrywise difference between ``L M`` and :func:`gecmv_stencil`."""
    E = gecmv_matrix(pairs, sites).matrix
    return float(np.abs(E - gecmv_stencil(pairs, sites, conjugate_lower).matrix).max())


def boxed_entry_defect(pairs, sites: int) -> float:
    """``|<delta_0, E delta_0> + conj(alpha_0) alpha_{-1}|``."""
    pairs = _as_pairs(pairs)
    E = gecmv_matrix(pairs, sites).matrix
    (am1, a0), _ = pairs.at([sites - 1, 0])
    return float(abs(E[0, 0] + np.conj(a0) * am1))

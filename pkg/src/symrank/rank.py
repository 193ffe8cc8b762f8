"""Rank behavior of operator symbols over the unit sphere.

rank_profile sweeps a deterministic sample set of directions, classifies
the operator as Elliptic, ConstantRank, or NonConstantRank, and for the
last case localizes rank-drop directions by bisection and extracts a
certificate witness: a unit vector killed by the symbol at the drop
direction but visible to the adjoint at a nearby full-rank direction,
together with a lower bound forcing the pseudoinverse norm to blow up.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .operators import Operator, symbol, symbol_stack
from .pinv import DEFAULT_TOL, kernel_projector, numerical_rank, pinv_svd

# refinement target for drop directions, radians
ANGULAR_RESOLUTION = 1e-3
# a witness pairs a drop direction with a full-rank direction this close
WITNESS_MAX_ANGLE = 0.1
_MAX_BISECTIONS = 64


class Verdict(str, Enum):
    ELLIPTIC = "Elliptic"
    CONSTANT_RANK = "ConstantRank"
    NON_CONSTANT_RANK = "NonConstantRank"


class NoRankDropError(ValueError):
    """Witness extraction requested for an operator without rank drops."""


class DegenerateWitnessError(ValueError):
    """No kernel vector at the drop direction survives projection off the nearby kernel."""


def angular_distance(a, b) -> float:
    """Angle in radians between two unit vectors."""
    return float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))


def slerp(a, b, t: float) -> np.ndarray:
    """Point at parameter t on the unit-sphere arc from a to b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    theta = angular_distance(a, b)
    if theta < 1e-14:
        return a.copy()
    out = (np.sin((1.0 - t) * theta) * a + np.sin(t * theta) * b) / np.sin(theta)
    return out / np.linalg.norm(out)


def sphere_samples(n: int, num_random: int, seed: int = 0) -> np.ndarray:
    """Deterministic unit-sphere sample set, shape (m, n).

    Contains the +-coordinate axes and every normalized +-1 sign vector
    first (axis-aligned and diagonal degeneracies live there), then
    num_random seeded gaussian directions.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if num_random < n + 1:
        raise ValueError("need num_random >= n + 1")
    structured = []
    for j in range(n):
        for s in (1.0, -1.0):
            e = np.zeros(n)
            e[j] = s
            structured.append(e)
    for signs in itertools.product((1.0, -1.0), repeat=n):
        structured.append(np.array(signs) / np.sqrt(n))
    # drop exact duplicates (n = 1 makes signs coincide with axes)
    unique = []
    for vec in structured:
        if not any(np.array_equal(vec, u) for u in unique):
            unique.append(vec)
    rng = np.random.default_rng(seed)
    randoms = rng.standard_normal((num_random, n))
    norms = np.linalg.norm(randoms, axis=1)
    while (norms < 1e-8).any():  # essentially never; keeps normalization safe
        bad = norms < 1e-8
        randoms[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(randoms, axis=1)
    return np.vstack(unique + [randoms / norms[:, None]])


@dataclass(frozen=True)
class RankProfile:
    """Sampled rank landscape of a symbol on the unit sphere."""

    operator: str
    directions: np.ndarray
    ranks: np.ndarray
    tolerance: float
    min_rank: int
    max_rank: int
    verdict: Verdict
    drop_directions: tuple[np.ndarray, ...]
    # per drop direction: nearby full-rank directions seen during bisection
    drop_neighbors: tuple[tuple[np.ndarray, ...], ...]

    @property
    def samples(self) -> list[tuple[np.ndarray, int]]:
        return [(self.directions[i], int(self.ranks[i])) for i in range(len(self.ranks))]

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "verdict": self.verdict.value,
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "tolerance": self.tolerance,
            "sample_count": int(len(self.ranks)),
            "drop_directions": [[float(x) for x in d] for d in self.drop_directions],
        }


def _ranks_at(op: Operator, directions: np.ndarray, tol: float) -> np.ndarray:
    mats = symbol_stack(op, directions)
    sigma = np.linalg.svd(mats, compute_uv=False)
    smax = sigma[:, 0]
    counts = (sigma > tol * np.where(smax > 0.0, smax, 1.0)[:, None]).sum(axis=1)
    return np.where(smax > 0.0, counts, 0).astype(int)


def rank_profile(op: Operator, num_samples: int = 1024, tol: float = DEFAULT_TOL,
                 seed: int = 0) -> RankProfile:
    """Classify the symbol's rank behavior over the sphere.

    num_samples seeded random directions are swept on top of the built-in
    structured directions.  When ranks differ, each low-rank sample is
    refined by bisection toward its nearest full-rank sample until the
    drop direction is localized to ANGULAR_RESOLUTION radians.  The
    verdict for equal ranks is sampling-based, not a certificate; the
    NonConstantRank verdict is certified by the returned drop directions.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    directions = sphere_samples(op.n, num_samples, seed)
    ranks = _ranks_at(op, directions, tol)
    min_rank = int(ranks.min())
    max_rank = int(ranks.max())
    drops: list[np.ndarray] = []
    neighbors: list[tuple[np.ndarray, ...]] = []
    if min_rank == max_rank:
        verdict = Verdict.ELLIPTIC if max_rank == op.dim_v else Verdict.CONSTANT_RANK
    else:
        verdict = Verdict.NON_CONSTANT_RANK
        high_dirs = directions[ranks == max_rank]
        for i in np.flatnonzero(ranks < max_rank):
            low = directions[i]
            angles = np.arccos(np.clip(high_dirs @ low, -1.0, 1.0))
            lo, hi = low, high_dirs[int(np.argmin(angles))]
            seen_high = [hi]
            for _ in range(_MAX_BISECTIONS):
                if angular_distance(lo, hi) <= ANGULAR_RESOLUTION:
                    break
                mid = slerp(lo, hi, 0.5)
                if _ranks_at(op, mid[None, :], tol)[0] < max_rank:
                    lo = mid
                else:
                    hi = mid
                    seen_high.append(hi)
            if any(angular_distance(lo, d) <= ANGULAR_RESOLUTION for d in drops):
                continue
            drops.append(lo)
            neighbors.append(tuple(seen_high))
    order = sorted(range(len(drops)), key=lambda i: tuple(drops[i]))
    return RankProfile(
        operator=op.name,
        directions=directions,
        ranks=ranks,
        tolerance=tol,
        min_rank=min_rank,
        max_rank=max_rank,
        verdict=verdict,
        drop_directions=tuple(drops[i] for i in order),
        drop_neighbors=tuple(neighbors[i] for i in order),
    )


def is_elliptic(op: Operator, profile: RankProfile) -> bool:
    """True iff the sampled minimum rank equals dimV (symbol injective everywhere seen)."""
    if profile.operator != op.name:
        raise ValueError(f"profile was built for {profile.operator!r}, not {op.name!r}")
    return profile.min_rank == op.dim_v


@dataclass(frozen=True)
class RankDropWitness:
    """Certificate that the symbol rank drops at xi_low.

    v is unit, lies in ker A(xi_low), and is orthogonal to ker A(xi_high);
    for rank(A(xi_high)) > rank(A(xi_low)) this forces

        |A+(xi_high)| >= 1 / |A(xi_high) - A(xi_low)| = dagger_lower_bound,

    which grows without bound as xi_high approaches xi_low.
    """

    xi_high: np.ndarray
    xi_low: np.ndarray
    v: np.ndarray
    dagger_lower_bound: float
    rank_high: int
    rank_low: int

    def to_dict(self) -> dict:
        return {
            "xi_high": [float(x) for x in self.xi_high],
            "xi_low": [float(x) for x in self.xi_low],
            "v": [[float(z.real), float(z.imag)] for z in self.v],
            "dagger_lower_bound": float(self.dagger_lower_bound),
            "rank_high": self.rank_high,
            "rank_low": self.rank_low,
        }


def _operator_norm(mat: np.ndarray) -> float:
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def find_rank_drop_witness(op: Operator, profile: RankProfile,
                           tol: float = DEFAULT_TOL) -> RankDropWitness:
    """Extract a rank-drop certificate from a NonConstantRank profile.

    xi_low is a refined drop direction; xi_high is the nearby full-rank
    direction (within WITNESS_MAX_ANGLE) minimizing |A(xi_high) - A(xi_low)|
    among the refinement samples, ties broken by angular distance and then
    lexicographic order.  v is the largest kernel vector of A(xi_low) after
    projecting off ker A(xi_high).
    """
    if profile.operator != op.name:
        raise ValueError(f"profile was built for {profile.operator!r}, not {op.name!r}")
    if profile.verdict is not Verdict.NON_CONSTANT_RANK:
        raise NoRankDropError(f"{op.name}: verdict is {profile.verdict.value}, no rank drop")
    candidates = []
    for low, highs in zip(profile.drop_directions, profile.drop_neighbors):
        mat_low = symbol(op, low)
        for high in highs:
            angle = angular_distance(low, high)
            if angle > WITNESS_MAX_ANGLE:
                continue
            gap = _operator_norm(symbol(op, high) - mat_low)
            candidates.append((gap, angle, tuple(low), tuple(high), low, high))
    if not candidates:
        raise DegenerateWitnessError(f"{op.name}: no full-rank direction near any drop direction")
    _, _, _, _, low, high = min(candidates, key=lambda c: c[:4])
    mat_low = symbol(op, low)
    mat_high = symbol(op, high)
    rank_low = numerical_rank(mat_low, tol)
    rank_high = numerical_rank(mat_high, tol)
    # kernel basis of A(xi_low): trailing right singular vectors
    _, _, vh = np.linalg.svd(mat_low)
    kernel_basis = vh[rank_low:].conj().T
    proj_high = kernel_projector(mat_high, tol)
    visible = kernel_basis - proj_high @ kernel_basis
    norms = np.linalg.norm(visible, axis=0)
    best = int(np.argmax(norms))
    if norms[best] <= tol:
        raise DegenerateWitnessError(
            f"{op.name}: kernel of A(xi_low) is invisible to the adjoint at xi_high")
    gap = _operator_norm(mat_high - mat_low)
    return RankDropWitness(
        xi_high=high,
        xi_low=low,
        v=visible[:, best] / norms[best],
        dagger_lower_bound=1.0 / gap,
        rank_high=rank_high,
        rank_low=rank_low,
    )


class DaggerBound(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def daggerbound_check(op: Operator, witness: RankDropWitness,
                      tol: float = DEFAULT_TOL) -> DaggerBound:
    """Check |A+(xi_high)| >= dagger_lower_bound on a witness.

    The inequality is only claimed when rank_high > rank_low; a witness
    with equal ranks makes the check vacuous (holds is returned True
    without asserting anything).
    """
    lhs = _operator_norm(pinv_svd(symbol(op, witness.xi_high), tol))
    rhs = witness.dagger_lower_bound
    applies = witness.rank_high > witness.rank_low
    return DaggerBound(lhs=lhs, rhs=rhs, holds=(not applies) or lhs >= rhs * (1.0 - 1e-8))

"""Estimate-ratio experiments, symbol bounds, witness families, and reports.

The central quantity is

    estimate_ratio(op, phi, p) = ||D^k(phi - P_A phi)||_p / ||A phi||_p,

which stays bounded over field families exactly when the symbol has
constant rank on the sphere, and is driven to infinity along witness
families concentrated near rank-drop directions otherwise.
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import Operator, symbol
from .pinv import DEFAULT_TOL
from .rank import sphere_samples
from .spectral import (Grid, GridField, apply_A, apply_A_adjoint, apply_Dk, apply_PA,
                       lp_norm, periodic_bump, random_band_limited, single_mode,
                       _coordinate_mesh)

CONTEXT_RANDOM_FIELDS = "RandomFields"
CONTEXT_WITNESS_FAMILY = "WitnessFamily"
CONTEXT_SYMBOL_BOUND = "SymbolBound"


class KernelInputError(ValueError):
    """estimate_ratio called on an approximate kernel element; the quotient is meaningless."""


class DegenerateProbeError(ValueError):
    """The probe vector w is annihilated by the adjoint symbol at this frequency."""


class EmptyExperimentError(ValueError):
    """A report was requested for an experiment with no completed trials."""


def estimate_ratio(op: Operator, phi: GridField, p: float, tol: float = DEFAULT_TOL) -> float:
    """||D^k(phi - P_A phi)||_p / ||A phi||_p on phi's grid.

    Raises KernelInputError when ||A phi||_2 <= tol * ||phi||_2.
    Invariant under rescaling of phi; for p = 2 this is the sharp constant
    of the derivative recovery estimate on the given field.
    """
    a_phi = apply_A(op, phi)
    if lp_norm(a_phi, 2) <= tol * lp_norm(phi, 2):
        raise KernelInputError(f"{op.name}: field is in the kernel to tolerance {tol}")
    resolved = phi - apply_PA(op, phi, tol)
    return lp_norm(apply_Dk(op.k, resolved), p) / lp_norm(a_phi, p)


def symbol_bound_ratio(op: Operator, xi, w, tol: float = DEFAULT_TOL) -> float:
    """|xi|^k ||A*(xi) w|| / ||A(xi) A*(xi) w||, the single-mode estimate ratio.

    Scale-invariant in xi.  Raises DegenerateProbeError when A*(xi) w
    vanishes to tolerance (relative to sigma_max(A) |w|).
    """
    xi = np.asarray(xi, dtype=float)
    w = np.asarray(w, dtype=complex)
    mat = symbol(op, xi)
    adjoint_w = mat.conj().T @ w
    sigma_max = float(np.linalg.svd(mat, compute_uv=False)[0])
    if np.linalg.norm(adjoint_w) <= tol * sigma_max * np.linalg.norm(w):
        raise DegenerateProbeError(f"{op.name}: probe annihilated by the adjoint symbol at {tuple(xi)}")
    return float(np.linalg.norm(xi) ** op.k * np.linalg.norm(adjoint_w)
                 / np.linalg.norm(mat @ adjoint_w))


@dataclass(frozen=True)
class SymbolBoundResult:
    sup: float
    xi: np.ndarray
    w: np.ndarray


def symbol_bound_sup(op: Operator, directions=512, probes: int = 4, seed: int = 0,
                     tol: float = DEFAULT_TOL) -> SymbolBoundResult:
    """Maximum of symbol_bound_ratio over sphere directions and probe vectors.

    directions is either a count (seeded sphere sweep) or an explicit array
    of directions.  Probes per direction are the left singular vectors of
    the symbol plus seeded random complex unit vectors; degenerate pairs
    are skipped.
    """
    if isinstance(directions, (int, np.integer)):
        dirs = sphere_samples(op.n, int(directions), seed)
    else:
        dirs = np.asarray(directions, dtype=float)
        dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
    rng = np.random.default_rng(seed)
    best = None
    for xi in dirs:
        mat = symbol(op, xi)
        u, sigma, _ = np.linalg.svd(mat)
        candidates = [u[:, i] for i in range(len(sigma)) if sigma[i] > 0]
        for _ in range(probes):
            probe = rng.standard_normal(op.dim_w) + 1j * rng.standard_normal(op.dim_w)
            candidates.append(probe / np.linalg.norm(probe))
        for w in candidates:
            try:
                value = symbol_bound_ratio(op, xi, w, tol)
            except DegenerateProbeError:
                continue
            if best is None or value > best[0]:
                best = (value, xi, w)
    if best is None:
        raise DegenerateProbeError(f"{op.name}: every probe was degenerate")
    return SymbolBoundResult(sup=best[0], xi=best[1], w=best[2])


@dataclass(frozen=True)
class WitnessConfig:
    """Recipe for a family of near-kernel-orthogonal test fields.

    frequencies is the integer ladder approaching the target drop
    direction; w is a fixed unit codomain probe, or None to use the top
    left singular vector of the symbol at each rung; window is None for
    exact single modes or a bump width in (0, 1] (fraction of the torus).
    """

    frequencies: tuple[tuple[int, ...], ...]
    w: tuple[complex, ...] | None = None
    window: float | None = None
    target_direction: tuple[float, ...] | None = None

    def __post_init__(self):
        freqs = tuple(tuple(int(x) for x in f) for f in self.frequencies)
        if not freqs:
            raise ValueError("frequencies must be nonempty")
        if any(not any(f) for f in freqs):
            raise ValueError("frequencies must be nonzero integer vectors")
        object.__setattr__(self, "frequencies", freqs)
        if self.w is not None:
            w = tuple(complex(x) for x in self.w)
            if abs(np.linalg.norm(w) - 1.0) > 1e-8:
                raise ValueError("w must be a unit vector")
            object.__setattr__(self, "w", w)
        if self.window is not None and not 0.0 < self.window <= 1.0:
            raise ValueError("window width must lie in (0, 1]")


def witness_family(op: Operator, cfg: WitnessConfig, grid: Grid,
                   tol: float = DEFAULT_TOL) -> list[GridField]:
    """One field per configured frequency: A* applied spectrally to a probe wave.

    For window = None the field is the exact single mode with coefficient
    A*(xi_m) w at xi_m, so P_A phi_m = 0 exactly and estimate_ratio at any
    p equals symbol_bound_ratio(op, xi_m, w).  With a window, the wave is
    multiplied by a periodized bump before applying A*; the measured ratio
    approaches the single-mode value as the window widens.
    """
    if grid.n != op.n:
        raise ValueError(f"grid has {grid.n} axes, operator acts on {op.n}")
    fields = []
    for freq in cfg.frequencies:
        if max(abs(x) for x in freq) > grid.size // 4:
            raise ValueError(f"frequency {freq} unresolvable on grid size {grid.size} "
                             f"(|xi|_inf must be <= {grid.size // 4})")
        mat = symbol(op, np.array(freq, dtype=float))
        if cfg.w is None:
            u, sigma, _ = np.linalg.svd(mat)
            if sigma[0] <= tol * max(1.0, float(np.linalg.norm(freq)) ** op.k):
                raise DegenerateProbeError(f"{op.name}: symbol vanishes at {freq}")
            w = u[:, 0]
        else:
            w = np.array(cfg.w, dtype=complex)
            if w.shape != (op.dim_w,):
                raise ValueError(f"w must have length {op.dim_w}")
        if np.linalg.norm(mat.conj().T @ w) <= tol * max(1.0, float(np.linalg.norm(freq)) ** op.k):
            raise DegenerateProbeError(f"{op.name}: probe annihilated by the adjoint symbol at {freq}")
        if cfg.window is None:
            wave = single_mode(grid, freq, w)
        else:
            bump = periodic_bump(grid, cfg.window)
            mesh = _coordinate_mesh(grid)
            phase = np.exp(1j * sum(f * axis for f, axis in zip(freq, mesh)))
            wave = GridField(grid, w.reshape((-1,) + (1,) * grid.n) * (bump * phase)[None])
        fields.append(apply_A_adjoint(op, wave))
    return fields


def build_frequency_ladder(op: Operator, drop_direction, rungs: int = 4,
                           base: int = 2) -> list[tuple[int, ...]]:
    """Integer frequencies approaching a drop direction with doubling magnitude.

    Rung j targets (base * 2^j) * u rounded to integers; when the rounded
    frequency lands where the symbol vanishes (for example exactly on the
    degenerate axis), the smallest axis offset that revives the symbol is
    added.  For the mixed second derivative with u = e1 this yields the
    family (m, 1), m = base * 2^j.
    """
    if rungs < 1:
        raise ValueError("rungs must be positive")
    u = np.asarray(drop_direction, dtype=float)
    u = u / np.linalg.norm(u)
    offsets = [np.zeros(op.n, dtype=int)]
    for j in range(op.n):
        for s in (1, -1):
            e = np.zeros(op.n, dtype=int)
            e[j] = s
            offsets.append(e)
    ladder = []
    for j in range(rungs):
        scale = base * 2 ** j
        chosen = None
        for offset in offsets:
            cand = np.rint(scale * u).astype(int) + offset
            if not cand.any():
                continue
            mat = symbol(op, cand.astype(float))
            sigma_max = float(np.linalg.svd(mat, compute_uv=False)[0])
            if sigma_max > 1e-9 * max(1.0, float(np.linalg.norm(cand)) ** op.k):
                chosen = tuple(int(x) for x in cand)
                break
        if chosen is None:
            raise DegenerateProbeError(
                f"{op.name}: no usable frequency near rung {scale} of direction {tuple(u)}")
        ladder.append(chosen)
    return ladder


def l2_minimality_check(op: Operator, phi: GridField, kernel_trials: int = 20,
                        seed: int = 0, tol: float = DEFAULT_TOL,
                        slack: float = 1e-10) -> bool:
    """Check that P_A phi minimizes ||D^k(phi - psi)||_2 over kernel fields psi.

    Competitors are kernel projections of seeded random band-limited
    fields.  Returns True when no competitor beats the canonical
    projection by more than slack.
    """
    base = lp_norm(apply_Dk(op.k, phi - apply_PA(op, phi, tol)), 2)
    grid = phi.grid
    for trial in range(kernel_trials):
        # trailing 1 keeps this seed stream disjoint from any [seed, trial]
        # stream a caller used for phi (SeedSequence drops trailing zeros)
        raw = random_band_limited(grid, op.dim_v, grid.size // 4, seed=[seed, trial, 1])
        psi = apply_PA(op, raw, tol)
        if base > lp_norm(apply_Dk(op.k, phi - psi), 2) + slack:
            return False
    return True


@dataclass(frozen=True)
class TrialRecord:
    """One measured ratio: trial index, grid size, provenance detail, value."""

    index: int
    grid_size: int
    detail: str
    ratio: float


@dataclass(frozen=True)
class EstimateReport:
    """Aggregated, reproducible record of an estimate-ratio experiment."""

    operator: str
    context: str
    p: float
    grid_sizes: tuple[int, ...]
    trials: int
    seed: int | None
    records: tuple[TrialRecord, ...]
    excluded: int = 0
    verdict: str | None = None
    parameters: dict = field(default_factory=dict)

    @property
    def ratios(self) -> list[float]:
        return [r.ratio for r in self.records]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "context": self.context,
            "p": self.p if np.isfinite(self.p) else "inf",
            "grid_sizes": list(self.grid_sizes),
            "trials": self.trials,
            "seed": self.seed,
            "excluded": self.excluded,
            "verdict": self.verdict,
            "parameters": {k: self.parameters[k] for k in sorted(self.parameters)},
            "max_ratio": self.max_ratio,
            "records": [
                {"index": r.index, "grid_size": r.grid_size, "detail": r.detail, "ratio": r.ratio}
                for r in self.records
            ],
        }

    def csv_rows(self) -> list[str]:
        rows = ["index,grid_size,detail,ratio"]
        rows.extend(f"{r.index},{r.grid_size},{r.detail},{r.ratio!r}" for r in self.records)
        return rows


def assemble_report(operator: str, context: str, p: float, grid_sizes, trials: int,
                    seed: int | None, records, excluded: int = 0,
                    verdict: str | None = None, parameters: dict | None = None) -> EstimateReport:
    """Validate and freeze an experiment into an EstimateReport.

    Serialization of the result is deterministic: the same inputs produce
    byte-identical documents.  Raises EmptyExperimentError when no trial
    completed.
    """
    records = tuple(records)
    if not records:
        raise EmptyExperimentError(f"{operator}: no completed trials to report")
    for record in records:
        if not np.isfinite(record.ratio) or record.ratio < 0:
            raise ValueError(f"trial {record.index}: ratio {record.ratio} is not a finite nonnegative number")
    return EstimateReport(
        operator=operator,
        context=context,
        p=float(p),
        grid_sizes=tuple(int(s) for s in grid_sizes),
        trials=int(trials),
        seed=seed,
        records=records,
        excluded=int(excluded),
        verdict=verdict,
        parameters=dict(parameters or {}),
    )


def ratio_sweep(op: Operator, p: float, trials: int, grid_sizes, max_freq: int | None = None,
                seed: int = 0, tol: float = DEFAULT_TOL) -> EstimateReport:
    """Measure estimate_ratio on seeded random band-limited fields.

    Runs `trials` fields per grid size; each trial derives its randomness
    from (seed, grid size, trial index).  Kernel inputs are excluded and
    counted rather than reported as ratios.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    grid_sizes = [int(size) for size in grid_sizes]
    if not grid_sizes:
        raise ValueError("grid_sizes must be nonempty")
    records = []
    excluded = 0
    index = 0
    for size in grid_sizes:
        grid = Grid(op.n, size)
        band = max_freq if max_freq is not None else grid.size // 4
        for trial in range(trials):
            phi = random_band_limited(grid, op.dim_v, band, seed=[seed, size, trial])
            try:
                ratio = estimate_ratio(op, phi, p, tol)
            except KernelInputError:
                excluded += 1
                continue
            records.append(TrialRecord(index=index, grid_size=grid.size,
                                       detail=f"seed={seed} N={grid.size} trial={trial}",
                                       ratio=ratio))
            index += 1
    return assemble_report(
        operator=op.name, context=CONTEXT_RANDOM_FIELDS, p=p, grid_sizes=grid_sizes,
        trials=trials, seed=seed, records=records, excluded=excluded,
        parameters={"max_freq": "size//4" if max_freq is None else max_freq, "tol": tol},
    )

"""Periodic grid fields and frequency-wise application of operator symbols.

The computational domain is the torus [0, 2pi)^n sampled at N points per
axis (N a power of two, at least 4); frequencies are the integer vectors
in [-N/2, N/2)^n.  The forward transform is scaled so that the l2 norm of
the coefficient array equals the grid L2 norm of the field (Riemann sums
with cell volume (2pi/N)^n), which keeps Parseval identities exact to
rounding: a single mode c * exp(i x.xi) has the lone coefficient
c * (2pi)^(n/2).

Differentiation, operator application, and kernel projection are all
frequency multipliers here, hence exact on resolved modes.  Band-limited
random fields keep |xi|_inf <= N/4 so products of symbols and fields stay
well inside the grid.
"""

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .operators import Operator, multi_indices, multinomial_weight
from .pinv import DEFAULT_TOL, multiplier

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid: n axes, size points per axis."""

    n: int
    size: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be a positive integer")
        if (not isinstance(self.size, int) or self.size < 4
                or self.size & (self.size - 1) != 0):
            raise ValueError("size must be a power of two, at least 4")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.size,) * self.n

    @property
    def cell_volume(self) -> float:
        return (TWO_PI / self.size) ** self.n

    @property
    def spacing(self) -> float:
        return TWO_PI / self.size


@lru_cache(maxsize=64)
def _coordinate_mesh(grid: Grid) -> np.ndarray:
    axis = TWO_PI * np.arange(grid.size) / grid.size
    mesh = np.stack(np.meshgrid(*([axis] * grid.n), indexing="ij"))
    mesh.setflags(write=False)
    return mesh


@lru_cache(maxsize=64)
def integer_frequencies(grid: Grid) -> np.ndarray:
    """Integer frequency mesh, shape (n, size, ..., size), fft layout."""
    axis = np.fft.fftfreq(grid.size, d=1.0 / grid.size)
    mesh = np.stack(np.meshgrid(*([axis] * grid.n), indexing="ij"))
    mesh.setflags(write=False)
    return mesh


def _check_weights(weights, fiber_dim: int):
    if weights is None:
        return None
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (fiber_dim,) or (weights <= 0).any():
        raise ValueError("fiber_weights must be positive with one entry per fiber component")
    return weights


@dataclass(frozen=True)
class GridField:
    """Complex field sampled on a Grid; data has shape (fiber_dim, size, ..., size).

    fiber_weights, when present, weight the squared fiber components in
    every pointwise norm (used for derivative arrays).  Treat instances as
    immutable values.
    """

    grid: Grid
    data: np.ndarray
    fiber_weights: np.ndarray | None = None

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim != self.grid.n + 1 or data.shape[1:] != self.grid.shape:
            raise ValueError(f"data must have shape (fiber, {', '.join(map(str, self.grid.shape))})")
        if not np.isfinite(data).all():
            raise ValueError("field has non-finite values")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "fiber_weights", _check_weights(self.fiber_weights, data.shape[0]))

    @property
    def fiber_dim(self) -> int:
        return self.data.shape[0]

    def _merge_weights(self, other: "GridField") -> np.ndarray | None:
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")
        a, b = self.fiber_weights, other.fiber_weights
        if (a is None) != (b is None) or (a is not None and not np.array_equal(a, b)):
            raise ValueError("fields have incompatible fiber weights")
        if self.data.shape != other.data.shape:
            raise ValueError("fields have different fiber dimensions")
        return a

    def __add__(self, other: "GridField") -> "GridField":
        weights = self._merge_weights(other)
        return GridField(self.grid, self.data + other.data, weights)

    def __sub__(self, other: "GridField") -> "GridField":
        weights = self._merge_weights(other)
        return GridField(self.grid, self.data - other.data, weights)

    def __mul__(self, scalar) -> "GridField":
        return GridField(self.grid, self.data * complex(scalar), self.fiber_weights)

    __rmul__ = __mul__

    def pointwise_norm(self) -> np.ndarray:
        """sqrt(sum_c w_c |f_c(x)|^2) over the grid."""
        mags = np.abs(self.data) ** 2
        if self.fiber_weights is not None:
            mags = self.fiber_weights.reshape((-1,) + (1,) * self.grid.n) * mags
        return np.sqrt(mags.sum(axis=0))


@dataclass(frozen=True)
class FrequencyField:
    """Coefficient-side twin of GridField; same layout, fft frequency order."""

    grid: Grid
    coeffs: np.ndarray
    fiber_weights: np.ndarray | None = None

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != self.grid.n + 1 or coeffs.shape[1:] != self.grid.shape:
            raise ValueError(f"coeffs must have shape (fiber, {', '.join(map(str, self.grid.shape))})")
        if not np.isfinite(coeffs).all():
            raise ValueError("coefficients have non-finite values")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "fiber_weights", _check_weights(self.fiber_weights, coeffs.shape[0]))

    @property
    def fiber_dim(self) -> int:
        return self.coeffs.shape[0]


def _spatial_axes(grid: Grid) -> tuple[int, ...]:
    return tuple(range(1, grid.n + 1))


def forward_transform(field: GridField) -> FrequencyField:
    """Grid values to coefficients; unitary between grid L2 and coefficient l2."""
    scale = (TWO_PI / field.grid.size) ** (field.grid.n / 2.0)
    coeffs = np.fft.fftn(field.data, axes=_spatial_axes(field.grid), norm="ortho") * scale
    return FrequencyField(field.grid, coeffs, field.fiber_weights)


def inverse_transform(freq: FrequencyField) -> GridField:
    """Coefficients back to grid values; exact inverse of forward_transform."""
    scale = (TWO_PI / freq.grid.size) ** (freq.grid.n / 2.0)
    data = np.fft.ifftn(freq.coeffs / scale, axes=_spatial_axes(freq.grid), norm="ortho")
    return GridField(freq.grid, data, freq.fiber_weights)


def mode_index(grid: Grid, xi) -> tuple[int, ...]:
    """Array index of integer frequency xi in fft layout; xi in [-N/2, N/2)^n."""
    xi = [int(x) for x in xi]
    if len(xi) != grid.n:
        raise ValueError(f"frequency must have length {grid.n}")
    half = grid.size // 2
    for x in xi:
        if not -half <= x < half:
            raise ValueError(f"frequency component {x} outside [-{half}, {half})")
    return tuple(x % grid.size for x in xi)


def single_mode(grid: Grid, xi, amplitude) -> GridField:
    """The field amplitude * exp(i x.xi) for an integer frequency xi."""
    amplitude = np.atleast_1d(np.asarray(amplitude, dtype=complex))
    coeffs = np.zeros((amplitude.shape[0],) + grid.shape, dtype=complex)
    coeffs[(slice(None),) + mode_index(grid, xi)] = amplitude * (TWO_PI ** (grid.n / 2.0))
    return inverse_transform(FrequencyField(grid, coeffs))


def lp_norm(field: GridField, p: float) -> float:
    """Grid L^p norm: Riemann sum of the pointwise fiber norm; p = inf gives the max."""
    if p < 1.0:
        raise ValueError("p must be at least 1")
    pointwise = field.pointwise_norm()
    if math.isinf(p):
        return float(pointwise.max())
    return float((np.sum(pointwise ** p) * field.grid.cell_volume) ** (1.0 / p))


@lru_cache(maxsize=32)
def _symbol_tensor(op: Operator, grid: Grid) -> np.ndarray:
    """A(xi) over the whole frequency mesh, shape (dimW, dimV, size, ..., size)."""
    mesh = integer_frequencies(grid)
    out = np.zeros((op.dim_w, op.dim_v) + grid.shape, dtype=complex)
    for (alpha, _), mat in zip(op.terms, op.matrix_array):
        power = np.ones(grid.shape)
        for axis_exp, axis_mesh in zip(alpha, mesh):
            if axis_exp:
                power = power * axis_mesh ** axis_exp
        out += np.multiply.outer(mat, power)
    out *= 1j ** op.k
    out.setflags(write=False)
    return out


def _check_field(op: Operator, field: GridField, fiber_dim: int, role: str):
    if field.grid.n != op.n:
        raise ValueError(f"field has {field.grid.n} axes, operator acts on {op.n}")
    if field.fiber_dim != fiber_dim:
        raise ValueError(f"{role} field must have fiber dimension {fiber_dim}")
    if field.fiber_weights is not None:
        raise ValueError(f"{role} field must not carry fiber weights")


def apply_A(op: Operator, field: GridField) -> GridField:
    """Apply the operator spectrally: multiply coefficients by A(xi)."""
    _check_field(op, field, op.dim_v, "input")
    coeffs = forward_transform(field).coeffs
    out = np.einsum("wv...,v...->w...", _symbol_tensor(op, field.grid), coeffs)
    return inverse_transform(FrequencyField(field.grid, out))


def apply_A_adjoint(op: Operator, field: GridField) -> GridField:
    """Apply the adjoint spectrally: multiply coefficients by A*(xi)."""
    _check_field(op, field, op.dim_w, "input")
    coeffs = forward_transform(field).coeffs
    out = np.einsum("wv...,w...->v...", _symbol_tensor(op, field.grid).conj(), coeffs)
    return inverse_transform(FrequencyField(field.grid, out))


@lru_cache(maxsize=32)
def _kernel_projector_table(op: Operator, grid: Grid, tol: float) -> np.ndarray:
    """Projector onto ker A(xi) per frequency, shape (dimV, dimV, size, ..., size).

    Frequency zero (and any exact rank-0 frequency) gets the identity:
    everything there is kernel, so the projection keeps constants intact.
    """
    tensor = _symbol_tensor(op, grid)
    count = int(np.prod(grid.shape))
    mats = tensor.reshape(op.dim_w, op.dim_v, count).transpose(2, 0, 1)
    _, sigma, vh = np.linalg.svd(mats, full_matrices=False)
    keep = sigma > tol * sigma[:, :1]
    cokernel = np.einsum("mi,miv,miw->mvw", keep.astype(float), vh.conj(), vh)
    proj = np.eye(op.dim_v, dtype=complex)[None, :, :] - cokernel
    proj = 0.5 * (proj + proj.conj().transpose(0, 2, 1))
    proj = proj.transpose(1, 2, 0).reshape((op.dim_v, op.dim_v) + grid.shape)
    proj.setflags(write=False)
    return proj


def apply_PA(op: Operator, field: GridField, tol: float = DEFAULT_TOL) -> GridField:
    """Project every coefficient onto ker A(xi) (the canonical kernel part of the field)."""
    _check_field(op, field, op.dim_v, "input")
    coeffs = forward_transform(field).coeffs
    table = _kernel_projector_table(op, field.grid, float(tol))
    out = np.einsum("vw...,w...->v...", table, coeffs)
    return inverse_transform(FrequencyField(field.grid, out))


def _derivative_weights(n: int, k: int, fiber_dim: int) -> np.ndarray:
    weights = np.array([multinomial_weight(a) for a in multi_indices(n, k)], dtype=float)
    return np.tile(weights, fiber_dim)


def apply_Dk(k: int, field: GridField) -> GridField:
    """All order-k derivatives as one field.

    Output fiber index is j * T + t for input component j and the t-th
    multi-index of degree k in lexicographic order; entry (j, t) holds
    (i xi)^alpha_t phi_j.  The attached fiber weights k!/alpha! make the
    pointwise norm satisfy |D^k phi-hat(xi)| = |xi|^k |phi-hat(xi)|.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    if field.fiber_weights is not None:
        raise ValueError("input field must not carry fiber weights")
    grid = field.grid
    alphas = multi_indices(grid.n, k)
    mesh = integer_frequencies(grid)
    coeffs = forward_transform(field).coeffs
    powers = np.empty((len(alphas),) + grid.shape, dtype=complex)
    for t, alpha in enumerate(alphas):
        power = np.ones(grid.shape, dtype=complex)
        for axis_exp, axis_mesh in zip(alpha, mesh):
            if axis_exp:
                power = power * (1j * axis_mesh) ** axis_exp
        powers[t] = power
    out = np.einsum("t...,v...->vt...", powers, coeffs)
    out = out.reshape((field.fiber_dim * len(alphas),) + grid.shape)
    weights = _derivative_weights(grid.n, k, field.fiber_dim)
    return inverse_transform(FrequencyField(grid, out, weights))


def apply_multiplier(op: Operator, field: GridField, tol: float = DEFAULT_TOL) -> GridField:
    """Apply the derivative recovery multiplier frequency by frequency.

    Input is a codomain-valued field (fiber dimW, typically apply_A(phi));
    output is a derivative array (fiber dimV * T) equal to
    apply_Dk(k, phi - apply_PA(phi)) when the input is apply_A(phi).  The
    multiplier vanishes at frequency zero by convention (the symbol is
    zero there and constants never contribute to either side).
    """
    _check_field(op, field, op.dim_w, "input")
    grid = field.grid
    coeffs = forward_transform(field).coeffs.reshape(op.dim_w, -1)
    mesh = integer_frequencies(grid).reshape(grid.n, -1)
    slots = len(multi_indices(grid.n, op.k))
    out = np.zeros((op.dim_v * slots, coeffs.shape[1]), dtype=complex)
    for idx in range(coeffs.shape[1]):
        xi = mesh[:, idx]
        if not xi.any():
            continue
        out[:, idx] = multiplier(op, xi, tol).matrix @ coeffs[:, idx]
    out = out.reshape((op.dim_v * slots,) + grid.shape)
    weights = _derivative_weights(grid.n, op.k, op.dim_v)
    return inverse_transform(FrequencyField(grid, out, weights))


def random_band_limited(grid: Grid, fiber_dim: int, max_freq: int, seed) -> GridField:
    """Real-valued random field with independent unit-variance coefficients.

    Every integer frequency with 0 < |xi|_inf <= max_freq (max_freq at most
    size/4) carries a complex gaussian coefficient, Hermitian-paired so the
    field is real up to rounding; the mean (frequency zero) is exactly zero.
    Deterministic for a given seed (an int or sequence of ints).
    """
    if fiber_dim < 1:
        raise ValueError("fiber_dim must be positive")
    if not 1 <= max_freq <= grid.size // 4:
        raise ValueError(f"max_freq must lie in [1, {grid.size // 4}] on this grid")
    band = [v for v in itertools.product(range(-max_freq, max_freq + 1), repeat=grid.n) if any(v)]
    primaries = [v for v in band if v > tuple(-c for c in v)]
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((fiber_dim, len(primaries), 2))
    values = (draws[..., 0] + 1j * draws[..., 1]) / np.sqrt(2.0)
    coeffs = np.zeros((fiber_dim,) + grid.shape, dtype=complex)
    pos = np.array([[c % grid.size for c in v] for v in primaries]).T
    neg = np.array([[-c % grid.size for c in v] for v in primaries]).T
    coeffs[(slice(None), *pos)] = values
    coeffs[(slice(None), *neg)] = values.conj()
    return inverse_transform(FrequencyField(grid, coeffs))


def periodic_bump(grid: Grid, width: float) -> np.ndarray:
    """Smooth periodized window, centered at pi per axis, shape grid.shape.

    width in (0, 1] is the support diameter as a fraction of the torus:
    per axis the profile is 1 for |x - pi| <= width*pi/2, 0 for
    |x - pi| >= width*pi, with a smooth exponential step between.
    """
    if not 0.0 < width <= 1.0:
        raise ValueError("width must lie in (0, 1]")
    mesh = _coordinate_mesh(grid)
    out = np.ones(grid.shape)
    for axis_mesh in mesh:
        t = np.abs(axis_mesh - math.pi) / (width * math.pi)
        s = np.clip(2.0 * (1.0 - t), 0.0, 1.0)
        inner = (s > 0.0) & (s < 1.0)
        profile = np.where(s >= 1.0, 1.0, 0.0)
        a = np.exp(-1.0 / np.where(inner, s, 1.0))
        b = np.exp(-1.0 / np.where(inner, 1.0 - s, 1.0))
        profile[inner] = (a / (a + b))[inner]
        out = out * profile
    return out


def dump_field(field: GridField, path: str) -> None:
    """Write a field document: JSON header plus [re, im] pairs.

    Data is laid out row-major by grid point (C order) and then by fiber
    component within each point.
    """
    flat = field.data.reshape(field.fiber_dim, -1).T
    doc = {
        "n": field.grid.n,
        "N": field.grid.size,
        "fiber_dim": field.fiber_dim,
        "layout": "grid-major",
        "fiber_weights": None if field.fiber_weights is None else list(field.fiber_weights),
        "data": [[float(z.real), float(z.imag)] for z in flat.ravel()],
    }
    with open(path, "w") as handle:
        json.dump(doc, handle, sort_keys=True)
        handle.write("\n")


def load_field(path: str) -> GridField:
    """Read a field document written by dump_field."""
    with open(path) as handle:
        doc = json.load(handle)
    grid = Grid(int(doc["n"]), int(doc["N"]))
    fiber_dim = int(doc["fiber_dim"])
    pairs = np.array(doc["data"], dtype=float)
    if pairs.shape != (fiber_dim * grid.size ** grid.n, 2):
        raise ValueError("field document data has the wrong length")
    flat = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(-1, fiber_dim).T
    weights = doc.get("fiber_weights")
    return GridField(grid, flat.reshape((fiber_dim,) + grid.shape),
                     None if weights is None else np.array(weights, dtype=float))

"""Moore-Penrose calculus on symbol matrices.

Two independent pseudoinverse routes are provided and cross-validated by
the test suite: an SVD route (pinv_svd) and a characteristic-polynomial
route (pinv_decell) built on a Faddeev-LeVerrier trace recursion.  On top
of these sit the kernel projector I - A+ A and the derivative recovery
multiplier that maps Aphi-coefficients to D^k(phi - P_A phi)-coefficients
frequency by frequency.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .operators import Operator, MultiIndex, multi_indices, multinomial_weight, symbol

DEFAULT_TOL = 1e-10

# pinv_decell refuses to divide by a trailing coefficient this small
# relative to the largest one; callers fall back to pinv_svd.
DECELL_COEFF_FLOOR = 1e-12


class IllConditionedError(ArithmeticError):
    """Polynomial pseudoinverse route rejected: trailing coefficient is numerically zero."""


class ZeroFrequencyError(ValueError):
    """The derivative recovery multiplier is undefined at frequency zero."""


def _as_matrix(mat) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ValueError(f"expected a 2d matrix, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError("matrix has non-finite entries")
    return mat


def numerical_rank(mat, tol: float = DEFAULT_TOL) -> int:
    """Count of singular values above tol * sigma_max; 0 for the zero matrix."""
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    mat = _as_matrix(mat)
    sigma = np.linalg.svd(mat, compute_uv=False)
    if sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > tol * sigma[0]))


def pinv_svd(mat, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Pseudoinverse via SVD.

    Singular values at or below tol * sigma_max are treated as zero, so the
    zero matrix maps to the zero matrix.  Satisfies the four Penrose
    identities to rounding for well-separated spectra.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    mat = _as_matrix(mat)
    u, sigma, vh = np.linalg.svd(mat, full_matrices=False)
    cutoff = tol * sigma[0]
    inv = np.zeros_like(sigma)
    keep = sigma > cutoff
    inv[keep] = 1.0 / sigma[keep]
    return vh.conj().T @ (inv[:, None] * u.conj().T)


def char_poly_coeffs(mat, hermitian_tol: float = 1e-10) -> np.ndarray:
    """Characteristic polynomial coefficients a_0..a_d of a Hermitian matrix B.

    Convention: det(B - lam I) = (-1)^d sum_{j=0..d} a_j lam^(d-j) with
    a_0 = 1, computed by the Faddeev-LeVerrier trace recursion.  Hermitian
    input keeps every coefficient real; non-Hermitian input is rejected.
    """
    mat = _as_matrix(mat)
    d = mat.shape[0]
    if mat.shape[1] != d:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.abs(mat).max()))
    if float(np.abs(mat - mat.conj().T).max()) > hermitian_tol * scale:
        raise ValueError("matrix is not Hermitian to the requested tolerance")
    coeffs = [1.0]
    aux = np.zeros_like(mat)
    eye = np.eye(d, dtype=complex)
    for m in range(1, d + 1):
        aux = mat @ aux + coeffs[-1] * eye
        coeffs.append(float((-np.trace(mat @ aux) / m).real))
    return np.array(coeffs)


def pinv_decell(mat, rank: int) -> np.ndarray:
    """Pseudoinverse from the characteristic polynomial of A A*.

    With a_0..a_d the coefficients of det(A A* - lam I) in the convention of
    char_poly_coeffs and r = rank(A):

        A+ = -(1/a_r) A* (a_0 (A A*)^(r-1) + a_1 (A A*)^(r-2) + .. + a_(r-1) I)

    The zero matrix (rank 0) maps to the zero matrix by convention.  Raises
    IllConditionedError when |a_r| is negligible next to max_j |a_j|, in
    which case callers should fall back to pinv_svd.
    """
    mat = _as_matrix(mat)
    rows, cols = mat.shape
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 0 or rank > min(rows, cols):
        raise ValueError(f"rank must be an integer in [0, {min(rows, cols)}]")
    if rank == 0:
        return np.zeros((cols, rows), dtype=complex)
    gram = mat @ mat.conj().T
    coeffs = char_poly_coeffs(gram)
    if abs(coeffs[rank]) < DECELL_COEFF_FLOOR * float(np.abs(coeffs).max()):
        raise IllConditionedError(
            f"trailing coefficient a_{rank} = {coeffs[rank]:.3e} is numerically zero")
    eye = np.eye(rows, dtype=complex)
    acc = coeffs[0] * eye
    for i in range(1, rank):
        acc = acc @ gram + coeffs[i] * eye
    return (-1.0 / coeffs[rank]) * (mat.conj().T @ acc)


def kernel_projector(mat, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto ker A, computed as I - A+ A.

    Hermitian and idempotent to rounding; the zero matrix yields the
    identity (everything is kernel).
    """
    mat = _as_matrix(mat)
    proj = np.eye(mat.shape[1], dtype=complex) - pinv_svd(mat, tol) @ mat
    return 0.5 * (proj + proj.conj().T)


@dataclass(frozen=True)
class MultiplierValue:
    """Frequency-domain value of the derivative recovery map.

    Sends a codomain vector w to A+(xi) w tensored with the array of
    (i xi)^alpha over |alpha| = k.  Flattened row index is j * T + t for
    domain component j and multi-index slot t, with the T multi-indices in
    lexicographic order.  Row weights k!/alpha! turn the Euclidean row
    norm into the derivative-array norm in which |D^k phi-hat| equals
    |xi|^k |phi-hat|.
    """

    matrix: np.ndarray
    alphas: tuple[MultiIndex, ...]
    dim_v: int
    dim_w: int

    @cached_property
    def row_weights(self) -> np.ndarray:
        weights = np.array([multinomial_weight(a) for a in self.alphas], dtype=float)
        return np.tile(weights, self.dim_v)

    def operator_norm(self) -> float:
        """Largest amplification from |w| to the weighted derivative-array norm."""
        scaled = np.sqrt(self.row_weights)[:, None] * self.matrix
        return float(np.linalg.svd(scaled, compute_uv=False)[0])


def multiplier(op: Operator, xi, tol: float = DEFAULT_TOL) -> MultiplierValue:
    """Derivative recovery multiplier at a nonzero frequency.

    The pseudoinverse is taken from pinv_decell at the numerical rank of
    the symbol, falling back to pinv_svd when the polynomial route reports
    ill-conditioning.  Degree-0 homogeneous wherever the rank is locally
    constant; at rank-drop frequencies the value is still returned
    pointwise (this is exactly where its norm blows up nearby).
    """
    xi = np.asarray(xi, dtype=float)
    mat = symbol(op, xi)
    if not xi.any():
        raise ZeroFrequencyError("multiplier undefined at frequency zero")
    rank = numerical_rank(mat, tol)
    try:
        dagger = pinv_decell(mat, rank)
    except IllConditionedError:
        dagger = pinv_svd(mat, tol)
    alphas = multi_indices(op.n, op.k)
    powers = np.array([math.prod((1j * x) ** a for x, a in zip(xi, alpha)) for alpha in alphas])
    return MultiplierValue(
        matrix=np.kron(dagger, powers[:, None]),
        alphas=alphas,
        dim_v=op.dim_v,
        dim_w=op.dim_w,
    )

"""Interferometers, matrix decompositions, and circuit embeddings.

Circuits are zero-mean Gaussian states (per-mode squeezed thermal inputs,
optionally lossy) followed by a passive unitary.  Matrix-function targets are
embedded into such circuits by rescaling their spectrum into [0, 1) and
reading squeezing / thermal parameters off the rescaled values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NotHpsd,
    NotSymmetric,
    SingularVQ,
    StructureMismatch,
    ZeroMatrix,
)
from .phase_space import (
    MeasurementOutcome,
    ModeCovariance,
    classicality,
    lossy_covariance,
    photon,
)

UNITARY_TOL = 1e-10
RECONSTRUCT_TOL = 1e-8


@dataclass(frozen=True)
class Interferometer:
    """Passive M-mode unitary."""

    m: int
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (self.m, self.m):
            raise DimensionMismatch(f"unitary shape {u.shape} != ({self.m},{self.m})")
        dev = np.max(np.abs(u.conj().T @ u - np.eye(self.m)))
        if dev > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary: max deviation {dev:.3e}")
        object.__setattr__(self, "u", u)


def identity_interferometer(m: int) -> Interferometer:
    return Interferometer(m, np.eye(m, dtype=complex))


def haar_unitary(m: int, seed: int) -> Interferometer:
    """Haar-random unitary via QR of a complex Gaussian matrix.

    Deterministic for a given seed; the R-diagonal phase fix makes the
    distribution exactly Haar.
    """
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return Interferometer(m, q)


def propagate(interf: Interferometer, alpha: np.ndarray) -> np.ndarray:
    """Phase-space image beta_i = sum_j U_ji alpha_j of input points alpha."""
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape[-1] != interf.m:
        raise DimensionMismatch(
            f"vector length {alpha.shape[-1]} != mode count {interf.m}"
        )
    return alpha @ interf.u


@dataclass(frozen=True)
class CircuitSpec:
    """Gaussian boson sampling circuit: per-mode inputs, loss, unitary, pattern.

    Per-mode covariance is eta*(2n_i+1)*exp(+-2r_i) + (1-eta)*(2*n_th+1),
    which covers both the lossless squeezed-thermal and the lossy
    squeezed-vacuum conventions.
    """

    modes: tuple  # tuple of (r_i, n_i)
    unitary: Interferometer
    pattern: tuple  # tuple of MeasurementOutcome
    eta: float = 1.0
    n_th: float = 0.0

    def __post_init__(self):
        if len(self.modes) != self.unitary.m or len(self.pattern) != self.unitary.m:
            raise DimensionMismatch("modes, unitary, and pattern sizes disagree")
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.n_th < 0.0:
            raise ValueError("n_th must be nonnegative")
        for r, n in self.modes:
            if r < 0.0 or n < 0.0:
                raise ValueError("squeezing and thermal photons must be nonnegative")

    @property
    def m(self) -> int:
        return self.unitary.m

    def covariances(self) -> list[ModeCovariance]:
        return [lossy_covariance(r, n, self.eta, self.n_th) for r, n in self.modes]

    @property
    def s_max(self) -> float:
        return classicality(self.covariances())

    @property
    def a_max(self) -> float:
        return max(c.a_plus for c in self.covariances())

    def with_pattern(self, pattern: Sequence[MeasurementOutcome]) -> "CircuitSpec":
        return CircuitSpec(
            self.modes, self.unitary, tuple(pattern), self.eta, self.n_th
        )


class MatrixTag(enum.Enum):
    COMPLEX_SYMMETRIC_R = "R"
    HPSD_B = "B"
    BLOCK_A = "A"
    BLOCK_A_PRIME = "A'"
    BLOCK_R_PRIME = "R'"
    BLOCK_B_PRIME = "B'"


@dataclass
class MatrixClass:
    """Tagged target matrix with a cached decomposition.

    ``st_params`` carries (n, r_list, unitary) for the squeezed-thermal block
    families when they were built rather than recovered.
    """

    tag: MatrixTag
    data: np.ndarray
    scale_a: float = 1.001
    decomposition: Optional[tuple] = field(default=None, repr=False)
    st_params: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        n = self.data.shape[0]
        if self.data.shape != (n, n):
            raise DimensionMismatch("matrix must be square")
        if self.scale_a <= 1.0:
            raise ValueError("rescale factor a must exceed 1")
        if self.tag is MatrixTag.COMPLEX_SYMMETRIC_R:
            _check_symmetric(self.data)
        elif self.tag is MatrixTag.HPSD_B:
            _check_hermitian(self.data)

    def decompose(self) -> tuple:
        """Cached decomposition (U, spectrum) of the tag-relevant block:
        Takagi for the symmetric families, eigendecomposition for the HPSD
        ones.  Written once; safe for concurrent reads afterwards."""
        if self.decomposition is not None:
            return self.decomposition
        if self.tag is MatrixTag.COMPLEX_SYMMETRIC_R:
            self.decomposition = takagi(self.data)
        elif self.tag is MatrixTag.HPSD_B:
            self.decomposition = hpsd_eigendecompose(self.data)
        elif self.tag is MatrixTag.BLOCK_R_PRIME:
            r_block, _ = split_blocks(self)
            self.decomposition = takagi(r_block)
        elif self.tag is MatrixTag.BLOCK_B_PRIME:
            _, b_block = split_blocks(self)
            self.decomposition = hpsd_eigendecompose(b_block)
        elif self.tag is MatrixTag.BLOCK_A_PRIME:
            r_block, _ = split_blocks(self)
            self.decomposition = takagi(r_block)
        else:  # BLOCK_A carries R in the upper-left block
            m = self.data.shape[0] // 2
            self.decomposition = takagi(self.data[:m, :m])
        return self.decomposition


def _check_symmetric(mat: np.ndarray, tol: float = 1e-10):
    dev = np.max(np.abs(mat - mat.T)) if mat.size else 0.0
    if dev > tol * max(1.0, np.max(np.abs(mat))):
        raise NotSymmetric(f"matrix is not symmetric: max deviation {dev:.3e}")


def _check_hermitian(mat: np.ndarray, tol: float = 1e-10):
    dev = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if dev > tol * max(1.0, np.max(np.abs(mat))):
        raise NotHpsd(f"matrix is not Hermitian: max deviation {dev:.3e}")


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------


def takagi(r_mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization R = U diag(lam) U^T of a complex symmetric matrix.

    SVD-based with a blockwise unitary square root over groups of equal
    singular values, so degenerate spectra reconstruct correctly.  ``lam`` is
    sorted in descending order (stable in the original SVD order on ties).
    """
    r_mat = np.asarray(r_mat, dtype=complex)
    _check_symmetric(r_mat)
    v, lam, wh = np.linalg.svd(r_mat)
    w = wh.conj().T

    # group indices of (numerically) equal singular values
    groups: list[list[int]] = []
    scale = max(1.0, lam[0] if lam.size else 1.0)
    for idx, val in enumerate(lam):
        if groups and abs(lam[groups[-1][0]] - val) <= 1e-11 * scale:
            groups[-1].append(idx)
        else:
            groups.append([idx])

    blocks = []
    for idx in groups:
        z = v[:, idx].T @ w[:, idx]
        blocks.append(scipy.linalg.sqrtm(z))
    q = scipy.linalg.block_diag(*blocks) if blocks else np.zeros((0, 0))
    u = v @ q.conj()

    resid = np.max(np.abs(u @ np.diag(lam) @ u.T - r_mat)) if r_mat.size else 0.0
    if resid > RECONSTRUCT_TOL * max(1.0, np.max(np.abs(r_mat))):
        raise NotSymmetric(f"takagi reconstruction failed: residual {resid:.3e}")
    return u, lam


def hpsd_eigendecompose(b_mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition B = U diag(lam) U^dagger of an HPSD matrix.

    Eigenvalues sorted descending; values in [-1e-12*scale, 0) are clipped
    to zero, anything more negative raises NotHpsd.
    """
    b_mat = np.asarray(b_mat, dtype=complex)
    _check_hermitian(b_mat)
    lam, u = np.linalg.eigh(b_mat)
    lam = lam[::-1].copy()
    u = u[:, ::-1].copy()
    scale = max(1.0, abs(lam[0]) if lam.size else 1.0)
    if lam.size and lam[-1] < -1e-10 * scale:
        raise NotHpsd(f"negative eigenvalue {lam[-1]:.3e}")
    np.clip(lam, 0.0, None, out=lam)
    return u, lam


# ---------------------------------------------------------------------------
# embeddings of matrix functions into circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """Circuit embedding of a matrix target.

    ``value = scale_pow * z * p`` recovers the matrix function from the
    circuit probability p; ``lambdas`` are the original spectrum values and
    ``lambdas_scaled`` the rescaled ones actually realized by the circuit.
    """

    circuit: CircuitSpec
    z: float
    scale_pow: float
    lambdas: np.ndarray
    lambdas_scaled: np.ndarray

    @property
    def prefactor(self) -> float:
        return self.scale_pow * self.z


def embed_hafnian(r_mat: np.ndarray, a: float = 1.001) -> Embedding:
    """Pure-squeezed circuit whose all-single-photon probability encodes
    |Haf(R)|^2 after rescaling the singular values into [0, 1/a]."""
    u, lam = takagi(r_mat)
    m = lam.size
    lam_max = lam[0] if m else 0.0
    if lam_max <= 0.0:
        raise ZeroMatrix("hafnian embedding needs a nonzero matrix")
    lam_scaled = lam / (a * lam_max)
    r_list = np.arctanh(lam_scaled)
    z = float(np.prod(np.cosh(r_list)))
    circuit = CircuitSpec(
        modes=tuple((float(r), 0.0) for r in r_list),
        unitary=Interferometer(m, u),
        pattern=tuple(photon(1) for _ in range(m)),
    )
    return Embedding(circuit, z, (a * lam_max) ** m, lam, lam_scaled)


def embed_permanent(b_mat: np.ndarray, a: float = 1.001) -> Embedding:
    """Thermal circuit whose all-single-photon probability encodes Per(B)."""
    u, lam = hpsd_eigendecompose(b_mat)
    m = lam.size
    lam_max = lam[0] if m else 0.0
    if lam_max <= 0.0:
        raise ZeroMatrix("permanent embedding needs a nonzero matrix")
    lam_scaled = lam / (a * lam_max)
    n_list = lam_scaled / (1.0 - lam_scaled)
    z = float(np.prod(1.0 + n_list))
    circuit = CircuitSpec(
        modes=tuple((0.0, float(n)) for n in n_list),
        unitary=Interferometer(m, u),
        pattern=tuple(photon(1) for _ in range(m)),
    )
    return Embedding(circuit, z, (a * lam_max) ** m, lam, lam_scaled)


def _st_diagonals(n: float, r_list: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal entries (d, d') of the squeezed-thermal block structure."""
    r_list = np.asarray(r_list, dtype=float)
    k = 1.0 + 2.0 * n * (1.0 + n) + (1.0 + 2.0 * n) * np.cosh(2.0 * r_list)
    d = (1.0 + 2.0 * n) * np.sinh(2.0 * r_list) / k
    dp = 2.0 * n * (1.0 + n) / k
    return d, dp


def sqrt_vq_factor(n: float, r_list) -> float:
    """sqrt|V_Q| = prod_i sqrt(1/2 + n(n+1) + (n+1/2) cosh 2r_i)."""
    r_list = np.asarray(r_list, dtype=float)
    return float(
        np.prod(np.sqrt(0.5 + n * (n + 1.0) + (n + 0.5) * np.cosh(2.0 * r_list)))
    )


def build_block_A(
    n: float, r_list: Sequence[float], interf: Interferometer
) -> tuple[MatrixClass, float]:
    """Squeezed-thermal block matrix A = [[R, B], [B^T, R*]].

    R = U D U^T and B = U D' U^dagger with the diagonal entries fixed by the
    shared thermal occupation ``n`` and per-mode squeezing ``r_list``.
    Returns the tagged matrix and sqrt|V_Q| of the underlying state.
    """
    if n < 0.0 or any(r < 0.0 for r in r_list):
        raise ValueError("n and r_i must be nonnegative")
    r_arr = np.asarray(r_list, dtype=float)
    u = interf.u
    d, dp = _st_diagonals(n, r_arr)
    r_block = u @ np.diag(d) @ u.T
    b_block = u @ np.diag(dp) @ u.conj().T
    a_mat = np.block([[r_block, b_block], [b_block.T, r_block.conj()]])
    mat = MatrixClass(
        MatrixTag.BLOCK_A, a_mat, st_params=(float(n), tuple(map(float, r_arr)), interf)
    )
    return mat, sqrt_vq_factor(n, r_arr)


def block_a_prime(n: float, r_list: Sequence[float], interf: Interferometer) -> MatrixClass:
    """A' = [[B^T, R*], [R, B]] built from the same structure as build_block_A."""
    mat, _ = build_block_A(n, r_list, interf)
    m = interf.m
    r_block = mat.data[:m, :m]
    b_block = mat.data[:m, m:]
    a_prime = np.block([[b_block.T, r_block.conj()], [r_block, b_block]])
    return MatrixClass(
        MatrixTag.BLOCK_A_PRIME, a_prime, st_params=mat.st_params
    )


def block_r_prime(r_mat: np.ndarray) -> MatrixClass:
    """R' = [[0, R*], [R, 0]] for a complex symmetric R."""
    r_mat = np.asarray(r_mat, dtype=complex)
    _check_symmetric(r_mat)
    zero = np.zeros_like(r_mat)
    return MatrixClass(
        MatrixTag.BLOCK_R_PRIME, np.block([[zero, r_mat.conj()], [r_mat, zero]])
    )


def block_b_prime(b_mat: np.ndarray) -> MatrixClass:
    """B' = [[B^T, 0], [0, B]] for an HPSD B."""
    b_mat = np.asarray(b_mat, dtype=complex)
    _check_hermitian(b_mat)
    zero = np.zeros_like(b_mat)
    return MatrixClass(
        MatrixTag.BLOCK_B_PRIME, np.block([[b_mat.T, zero], [zero, b_mat]])
    )


def split_blocks(mat: MatrixClass) -> tuple[np.ndarray, np.ndarray]:
    """Extract (R, B) from a 2M x 2M block matrix of the A'/R'/B' families."""
    data = mat.data
    m2 = data.shape[0]
    if m2 % 2:
        raise DimensionMismatch("block matrices must have even dimension")
    m = m2 // 2
    r_block = data[m:, :m]
    b_block = data[m:, m:]
    tol = 1e-8 * max(1.0, np.max(np.abs(data)))
    if np.max(np.abs(data[:m, :m] - b_block.T)) > tol:
        raise StructureMismatch("upper-left block is not B^T")
    if np.max(np.abs(data[:m, m:] - r_block.conj())) > tol:
        raise StructureMismatch("upper-right block is not R*")
    return r_block, b_block


def recover_block_a_params(mat: MatrixClass) -> tuple[float, np.ndarray, Interferometer]:
    """Recover (n, r_list, U) from an A'-tagged matrix.

    Uses the Takagi basis of R, requires B to be diagonal in the same basis,
    and solves the shared-n consistency equation per mode.  Raises
    StructureMismatch when the rebuilt matrix disagrees with the input.
    """
    r_block, b_block = split_blocks(mat)
    m = r_block.shape[0]
    if np.max(np.abs(b_block)) < 1e-12:
        # pure squeezed limit: n = 0, d_i = tanh r_i
        u, d = takagi(r_block)
        r_list = np.arctanh(np.clip(d, 0.0, 1.0 - 1e-15))
        return 0.0, r_list, Interferometer(m, u)
    u, d = takagi(r_block)
    dp_mat = u.conj().T @ b_block @ u
    if np.max(np.abs(dp_mat - np.diag(np.diagonal(dp_mat)))) > 1e-7:
        raise StructureMismatch("B is not diagonal in the Takagi basis of R")
    dp = np.real(np.diagonal(dp_mat))
    if np.min(dp) <= 0.0:
        raise StructureMismatch("B eigenvalues must be positive for shared n > 0")

    # per-mode consistency: cosh^2 - sinh^2 = 1 as a function of u = 2n+1
    def residual(u_var: float, di: float, dpi: float) -> float:
        k = (u_var * u_var - 1.0) / (2.0 * dpi)
        cosh_term = (k - (u_var * u_var + 1.0) / 2.0) / u_var
        sinh_term = di * k / u_var
        return cosh_term * cosh_term - sinh_term * sinh_term - 1.0

    d0, dp0 = float(d[0]), float(dp[0])
    lo, hi = 1.0 + 1e-12, 1e6
    f_lo = residual(lo, d0, dp0)
    u_var = None
    # bracket and bisect; residual is monotone-ish in the physical range
    grid = np.geomspace(lo, hi, 4000)
    vals = [residual(g, d0, dp0) for g in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0 or vals[i] * vals[i + 1] < 0.0:
            a_lo, a_hi = grid[i], grid[i + 1]
            for _ in range(200):
                mid = 0.5 * (a_lo + a_hi)
                if residual(a_lo, d0, dp0) * residual(mid, d0, dp0) <= 0.0:
                    a_hi = mid
                else:
                    a_lo = mid
            u_var = 0.5 * (a_lo + a_hi)
            break
    if u_var is None:
        raise StructureMismatch("no shared thermal occupation solves the block structure")
    n = (u_var - 1.0) / 2.0
    k_list = (u_var * u_var - 1.0) / (2.0 * dp)
    cosh2r = (k_list - (u_var * u_var + 1.0) / 2.0) / u_var
    if np.min(cosh2r) < 1.0 - 1e-9:
        raise StructureMismatch("recovered cosh 2r below 1")
    r_list = 0.5 * np.arccosh(np.clip(cosh2r, 1.0, None))
    interf = Interferometer(m, u)
    rebuilt = block_a_prime(n, r_list, interf)
    dev = np.max(np.abs(rebuilt.data - mat.data))
    if dev > 1e-8 * max(1.0, np.max(np.abs(mat.data))):
        raise StructureMismatch(f"block structure verification failed: residual {dev:.3e}")
    return n, r_list, interf


# ---------------------------------------------------------------------------
# full-circuit covariance and the GBS A matrix
# ---------------------------------------------------------------------------


def xxpp_covariance(circuit: CircuitSpec) -> np.ndarray:
    """Real 2M x 2M covariance in xxpp ordering after the interferometer."""
    covs = circuit.covariances()
    m = circuit.m
    v_in = np.zeros((2 * m, 2 * m))
    for i, c in enumerate(covs):
        v_in[i, i] = c.a_plus / 2.0
        v_in[m + i, m + i] = c.a_minus / 2.0
    ur, ui = circuit.unitary.u.real, circuit.unitary.u.imag
    symp = np.block([[ur, -ui], [ui, ur]])
    return symp @ v_in @ symp.T


def complex_sigma(circuit: CircuitSpec) -> np.ndarray:
    """Symmetric-ordered covariance in the (a, a^dagger) complex basis."""
    m = circuit.m
    v = xxpp_covariance(circuit)
    eye = np.eye(m)
    omega = np.block([[eye, 1j * eye], [eye, -1j * eye]]) / math.sqrt(2.0)
    return omega @ v @ omega.conj().T


def gbs_A_matrix(circuit: CircuitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Kernel A = X (I - sigma_Q^{-1}) and the Husimi covariance sigma_Q."""
    m = circuit.m
    sigma_q = complex_sigma(circuit) + 0.5 * np.eye(2 * m)
    sign, logdet = np.linalg.slogdet(sigma_q)
    if sign == 0 or not np.isfinite(logdet):
        raise SingularVQ("Husimi covariance is singular")
    inv = np.linalg.inv(sigma_q)
    x = np.block(
        [[np.zeros((m, m)), np.eye(m)], [np.eye(m), np.zeros((m, m))]]
    )
    a_mat = x @ (np.eye(2 * m) - inv)
    return a_mat, sigma_q

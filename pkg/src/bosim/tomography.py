"""Two-photon polarization tomography: simulated counts and maximum-likelihood reconstruction.

Density matrices live on the ordered basis (HH, HV, VH, VV), the first
letter belonging to the photon in path a. Reconstruction uses the
Cholesky-style parametrisation ``rho = T^dagger T / Tr(T^dagger T)`` with
``T`` lower triangular (16 real parameters), which is positive and unit
trace for every parameter vector.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import fock
from .fock import ModeLabel, PhotonicState

BASIS = ("HH", "HV", "VH", "VV")
DIM = 4
HERMITIAN_TOL = 1e-10
EIGEN_CLAMP_TOL = 1e-12

# canonical 16-setting set drawn from {H, V, D, A, R, L}
CANONICAL_SETTINGS = (
    "HH", "HV", "VH", "VV",
    "HD", "HL", "VD", "VL",
    "DH", "DV", "DD", "DL",
    "LH", "LV", "LD", "LL",
)


def polarization_ket(label: str) -> np.ndarray:
    """Two-photon ket for a label like ``"HV"`` (one letter per photon)."""
    if len(label) != 2:
        raise ValueError(f"expected two polarization letters, got {label!r}")
    return np.kron(fock.POLARIZATION_VECTORS[label[0]], fock.POLARIZATION_VECTORS[label[1]])


class DensityMatrix:
    """Validated 4x4 two-qubit density matrix over ``BASIS``."""

    def __init__(self, entries, check: bool = True):
        m = np.array(entries, dtype=complex)
        if m.shape != (DIM, DIM):
            raise ValueError(f"density matrix must be {DIM}x{DIM}, got {m.shape}")
        if check:
            if not np.allclose(m, m.conj().T, atol=HERMITIAN_TOL, rtol=0):
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(m).real - 1.0) > HERMITIAN_TOL:
                raise ValueError(f"density matrix trace is {np.trace(m).real}, not 1")
            if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < -HERMITIAN_TOL:
                raise ValueError("density matrix has negative eigenvalues")
        m.setflags(write=False)
        self.entries = m

    @classmethod
    def pure(cls, ket) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def from_label(cls, label: str) -> "DensityMatrix":
        return cls.pure(polarization_ket(label))

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(np.eye(DIM) / DIM)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.entries, precision=4)})"


def named_state(name: str) -> DensityMatrix:
    """States accepted by the CLI: two-letter product labels, ``psi+`` or ``mixed``."""
    if name == "mixed":
        return DensityMatrix.maximally_mixed()
    if name == "psi+":
        return DensityMatrix.pure(polarization_ket("HV") + polarization_ket("VH"))
    if len(name) == 2 and all(c in fock.POLARIZATION_VECTORS for c in name):
        return DensityMatrix.from_label(name)
    raise ValueError(f"unknown state {name!r}")


def _as_matrix(rho: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


@dataclass(frozen=True)
class TomographySettings:
    projector_set: tuple[str, ...] = CANONICAL_SETTINGS
    counts_per_setting: float = 5000.0
    rng_seed: int = 0
    projectors: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.projector_set)
        object.__setattr__(self, "projector_set", labels)
        if len(labels) != 16:
            raise ValueError(f"need 16 projectors, got {len(labels)}")
        if not self.counts_per_setting > 0:
            raise ValueError("counts_per_setting must be positive")
        kets = [polarization_ket(label) for label in labels]
        projectors = np.array([np.outer(k, k.conj()) for k in kets])
        projectors.setflags(write=False)
        object.__setattr__(self, "projectors", projectors)
        if gram_rank(projectors) != 16:
            raise ValueError("projector set is not tomographically complete")


def gram_rank(projectors: np.ndarray) -> int:
    gram = np.einsum("kij,lji->kl", projectors, projectors).real
    return int(np.linalg.matrix_rank(gram, tol=1e-9))


def probabilities(rho, settings: TomographySettings) -> np.ndarray:
    """``Tr(rho Pi_k)`` for every projector."""
    return np.einsum("kij,ji->k", settings.projectors, _as_matrix(rho)).real


def expected_counts(rho, settings: TomographySettings) -> np.ndarray:
    return settings.counts_per_setting * probabilities(rho, settings)


def simulate_tomography(rho, settings: TomographySettings) -> list[int]:
    """Poisson counts for each projector, deterministic under ``settings.rng_seed``."""
    rng = np.random.default_rng(settings.rng_seed)
    means = np.clip(expected_counts(rho, settings), 0.0, None)
    return [int(n) for n in rng.poisson(means)]


# ---------------------------------------------------------------- parametrisation

_TRIL = np.tril_indices(DIM)
_DIAG = _TRIL[0] == _TRIL[1]
_OFF_ROWS, _OFF_COLS = _TRIL[0][~_DIAG], _TRIL[1][~_DIAG]
N_PARAMS = DIM * DIM


def t_matrix(params: np.ndarray) -> np.ndarray:
    """Lower-triangular T: 4 real diagonal entries, then 6 real and 6 imaginary parts."""
    params = np.asarray(params, dtype=float)
    t = np.zeros((DIM, DIM), dtype=complex)
    t[np.diag_indices(DIM)] = params[:DIM]
    n_off = len(_OFF_ROWS)
    t[_OFF_ROWS, _OFF_COLS] = params[DIM:DIM + n_off] + 1j * params[DIM + n_off:]
    return t


def params_from_t(t: np.ndarray) -> np.ndarray:
    off = t[_OFF_ROWS, _OFF_COLS]
    return np.concatenate([np.diag(t).real, off.real, off.imag])


def rho_from_params(params: np.ndarray) -> np.ndarray:
    t = t_matrix(params)
    a = t.conj().T @ t
    return a / np.trace(a).real


def params_from_rho(rho: np.ndarray) -> np.ndarray:
    """Parameters with ``rho_from_params(p) == rho`` for a full-rank ``rho``.

    Cholesky of the index-reversed matrix gives the lower-triangular T with
    ``T^dagger T = rho``.
    """
    j = np.eye(DIM)[::-1]
    chol = np.linalg.cholesky(j @ rho @ j)
    return params_from_t(j @ chol.conj().T @ j)


def log_likelihood(params: np.ndarray, counts: np.ndarray, settings: TomographySettings) -> float:
    mu = settings.counts_per_setting * probabilities(rho_from_params(params), settings)
    if np.any((mu <= 0) & (counts > 0)):
        return -math.inf
    safe = np.where(counts > 0, mu, 1.0)
    return float(np.sum(counts * np.log(safe)) - np.sum(mu))


def log_likelihood_gradient(params: np.ndarray, counts: np.ndarray, settings: TomographySettings) -> np.ndarray:
    t = t_matrix(params)
    a = t.conj().T @ t
    s = np.trace(a).real
    rho = a / s
    mu = settings.counts_per_setting * probabilities(rho, settings)
    ratio = np.where(counts > 0, counts / np.where(mu > 0, mu, 1.0), 0.0)
    m = settings.counts_per_setting * np.einsum("k,kij->ij", ratio - 1.0, settings.projectors)
    k = (m - np.trace(m @ rho).real * np.eye(DIM)) / s
    # dL = 2 Re Tr(K T^dagger dT)
    g = (k @ t.conj().T).T
    n_off = len(_OFF_ROWS)
    grad = np.empty(N_PARAMS)
    grad[:DIM] = 2 * np.diag(g).real
    grad[DIM:DIM + n_off] = 2 * g[_OFF_ROWS, _OFF_COLS].real
    grad[DIM + n_off:] = -2 * g[_OFF_ROWS, _OFF_COLS].imag
    return grad


def linear_inversion(counts: Sequence[float], settings: TomographySettings) -> np.ndarray:
    """Unconstrained estimate solving ``Tr(rho Pi_k) = n_k / N``; may be unphysical."""
    a = np.array([p.T.reshape(-1) for p in settings.projectors])
    vec = np.linalg.solve(a, np.asarray(counts, dtype=float) / settings.counts_per_setting)
    rho = vec.reshape(DIM, DIM)
    return 0.5 * (rho + rho.conj().T)


def _physical_start(rho: np.ndarray, mix: float = 0.1) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return np.eye(DIM) / DIM
    rho = (v * w) @ v.conj().T / w.sum()
    return (1 - mix) * rho + mix * np.eye(DIM) / DIM


# ---------------------------------------------------------------- reconstruction


@dataclass
class MLEResult:
    rho: DensityMatrix
    log_likelihood: float
    iterations: int
    converged: bool
    history: list[float]


def mle_reconstruct(
    counts: Sequence[int],
    settings: TomographySettings,
    max_iter: int = 10000,
    tol: float = 1e-9,
) -> MLEResult:
    """Maximum-likelihood density matrix for Poisson counts.

    Quasi-Newton (BFGS) ascent on the 16 T-parameters with backtracking
    line search, started from the linear-inversion estimate. Stops when an
    iteration improves the log-likelihood by less than ``tol`` or after
    ``max_iter`` iterations; in the latter case ``converged`` is False and a
    ``RuntimeWarning`` is issued.
    """
    n = np.asarray(counts, dtype=float)
    if n.shape != (len(settings.projectors),):
        raise ValueError(f"expected {len(settings.projectors)} counts, got {n.shape}")
    if np.any(n < 0):
        raise ValueError("counts must be non-negative")
    if not np.any(n > 0):
        raise ValueError("all counts are zero; nothing to reconstruct")

    x = params_from_rho(_physical_start(linear_inversion(n, settings)))
    f = log_likelihood(x, n, settings)
    g = log_likelihood_gradient(x, n, settings)
    h = np.eye(N_PARAMS)  # inverse-Hessian estimate of -L
    history = [f]
    converged = False
    iterations = 0
    fresh = False
    while iterations < max_iter:
        iterations += 1
        direction = h @ g
        slope = g @ direction
        if slope <= 0:
            h, direction, slope = np.eye(N_PARAMS), g, g @ g
        step = 1.0
        while step > 1e-20:
            x_new = x + step * direction
            f_new = log_likelihood(x_new, n, settings)
            if f_new >= f + 1e-4 * step * slope:
                break
            step *= 0.5
        else:
            if fresh:
                converged = True
                break
            # line search failed with the quasi-Newton direction; retry along the gradient
            h, fresh = np.eye(N_PARAMS), True
            continue
        fresh = False
        g_new = log_likelihood_gradient(x_new, n, settings)
        s_vec, y_vec = x_new - x, -(g_new - g)
        sy = s_vec @ y_vec
        if sy > 1e-300:
            r = 1.0 / sy
            i_m = np.eye(N_PARAMS)
            h = (i_m - r * np.outer(s_vec, y_vec)) @ h @ (i_m - r * np.outer(y_vec, s_vec)) + r * np.outer(s_vec, s_vec)
        improvement = f_new - f
        x, f, g = x_new, f_new, g_new
        history.append(f)
        if improvement < tol:
            converged = True
            break
    if not converged:
        warnings.warn(f"MLE did not converge within {max_iter} iterations", RuntimeWarning, stacklevel=2)
    return MLEResult(DensityMatrix(rho_from_params(x)), f, iterations, converged, history)


# ---------------------------------------------------------------- state comparison


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.where(w < EIGEN_CLAMP_TOL, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    r = _as_matrix(DensityMatrix(_as_matrix(rho)))
    s = _as_matrix(DensityMatrix(_as_matrix(sigma)))
    sr = _psd_sqrt(r)
    value = np.trace(_psd_sqrt(sr @ s @ sr)).real ** 2
    return float(min(max(value, 0.0), 1.0))


def trace_distance(rho, sigma) -> float:
    diff = _as_matrix(rho) - _as_matrix(sigma)
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def entangled_target_state(path: str = "a'") -> PhotonicState:
    """Polarization state of two fully overlapped photons, one H and one V, in one path.

    In occupation form this is ``a_H^dagger a_V^dagger |vac>``; its
    first-quantized form is ``(|HV> + |VH>)/sqrt(2)``.
    """
    return fock.create_pair(ModeLabel(path, "H", 0), ModeLabel(path, "V", 0))

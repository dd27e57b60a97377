"""Brute-force two-photon amplitudes from single-particle vectors.

Independent of the occupation-number machinery in ``fock``: a two-photon
state ``a_phi1^dagger a_phi2^dagger |vac>`` is described by two vectors in
a single-particle space, and its overlap with another such state is the
permanent of the 2x2 matrix of single-particle overlaps.
"""

from __future__ import annotations

import itertools

import numpy as np


def permanent(matrix: np.ndarray) -> complex:
    """Permanent by summation over permutations (fine for the tiny sizes used here)."""
    m = np.asarray(matrix)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("permanent needs a square matrix")
    return complex(sum(np.prod([m[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n))))


def pair_norm_squared(phi1: np.ndarray, phi2: np.ndarray) -> float:
    """``|| a_phi1^dagger a_phi2^dagger |vac> ||^2`` for unit vectors: ``1 + |<phi1|phi2>|^2``."""
    gram = np.array([[np.vdot(phi1, phi1), np.vdot(phi1, phi2)], [np.vdot(phi2, phi1), np.vdot(phi2, phi2)]])
    return float(permanent(gram).real)


def pair_projection_probability(
    phi1: np.ndarray, phi2: np.ndarray, chi1: np.ndarray, chi2: np.ndarray
) -> float:
    """``|<chi|phi>|^2`` with both two-photon states normalized."""
    overlaps = np.array([[np.vdot(chi1, phi1), np.vdot(chi1, phi2)], [np.vdot(chi2, phi1), np.vdot(chi2, phi2)]])
    amp = permanent(overlaps)
    return abs(amp) ** 2 / (pair_norm_squared(phi1, phi2) * pair_norm_squared(chi1, chi2))


def single_particle_vector(polarization: np.ndarray, temporal: np.ndarray) -> np.ndarray:
    """Kronecker product of a polarization ket (H, V) and a temporal-mode ket."""
    return np.kron(np.asarray(polarization, dtype=complex), np.asarray(temporal, dtype=complex))

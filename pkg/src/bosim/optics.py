"""Optical elements as mode transforms, plus post-selection on output paths.

Beam-splitter convention (r = reflectivity, t = 1 - r)::

    a -> sqrt(t) a' + sqrt(r) b'
    b -> sqrt(t) b' - sqrt(r) a'

so at r = 0.5 the second input picks up the minus sign, and r = 0 routes
a -> a', b -> b' unchanged. Half-wave plate Jones matrix on (H, V) with
fast axis at angle theta: [[cos 2theta, sin 2theta], [sin 2theta, -cos 2theta]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fock
from .fock import ModeLabel, ModeTransform, PhotonicState

ELEMENT_KINDS = ("half_wave_plate", "polarizer", "beam_splitter", "delay_line")
TEMPORAL_MODES = (0, 1)


@dataclass(frozen=True)
class ElementSpec:
    kind: str
    angle: float = 0.0
    reflectivity: float = 0.5
    delay: float = 0.0  # fs
    transmission: float = 1.0

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}")
        if not 0.0 <= self.angle < math.pi:
            raise ValueError(f"angle must lie in [0, pi), got {self.angle}")
        if not 0.0 <= self.reflectivity <= 1.0:
            raise ValueError(f"reflectivity must lie in [0, 1], got {self.reflectivity}")
        if not 0.0 <= self.transmission <= 1.0:
            raise ValueError(f"transmission must lie in [0, 1], got {self.transmission}")

    def transform(self, path: str = "a", temporal_modes: Sequence[int] = TEMPORAL_MODES) -> ModeTransform:
        if self.kind == "half_wave_plate":
            return hwp_transform(self.angle, path, temporal_modes)
        if self.kind == "polarizer":
            return polarizer_projection(self.angle, self.transmission, path, temporal_modes)
        if self.kind == "beam_splitter":
            return beam_splitter_transform(self.reflectivity, temporal_modes=temporal_modes)
        raise ValueError("a delay line acts on the temporal overlap, not as a mode transform")


def jones_hwp(angle: float) -> np.ndarray:
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    return np.array([[c, s], [s, -c]], dtype=complex)


def jones_polarizer(angle: float) -> np.ndarray:
    p = np.array([math.cos(angle), math.sin(angle)], dtype=complex)
    return np.outer(p, p.conj())


def _polarization_block(jones: np.ndarray, path: str, temporal_modes: Sequence[int], projection: bool) -> ModeTransform:
    blocks = []
    for t in temporal_modes:
        modes = (ModeLabel(path, "H", t), ModeLabel(path, "V", t))
        blocks.append(ModeTransform(modes, jones, projection=projection))
    return fock.block_transform(blocks)


def hwp_transform(angle: float, path: str = "a", temporal_modes: Sequence[int] = TEMPORAL_MODES) -> ModeTransform:
    return _polarization_block(jones_hwp(angle), path, temporal_modes, projection=False)


def polarizer_projection(
    angle: float,
    transmission: float = 1.0,
    path: str = "a'",
    temporal_modes: Sequence[int] = TEMPORAL_MODES,
) -> ModeTransform:
    """Ideal polarizer transmitting ``cos(angle)|H> + sin(angle)|V>``.

    ``transmission`` is the per-photon intensity transmission, applied as
    an amplitude factor ``sqrt(transmission)``; a photon pair therefore
    passes with an extra factor ``transmission**2``. The returned transform
    is flagged as a projection. Extinction is taken as infinite.
    """
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {transmission}")
    jones = math.sqrt(transmission) * jones_polarizer(angle)
    return _polarization_block(jones, path, temporal_modes, projection=True)


def beam_splitter_transform(
    reflectivity: float = 0.5,
    inputs: tuple[str, str] = ("a", "b"),
    outputs: tuple[str, str] = ("a'", "b'"),
    polarizations: Sequence[str] = fock.BASE_POLARIZATIONS,
    temporal_modes: Sequence[int] = TEMPORAL_MODES,
) -> ModeTransform:
    if not 0.0 <= reflectivity <= 1.0:
        raise ValueError(f"reflectivity must lie in [0, 1], got {reflectivity}")
    r, t = math.sqrt(reflectivity), math.sqrt(1.0 - reflectivity)
    routing = np.array([[t, -r], [r, t]], dtype=complex)  # rows: outputs, columns: inputs
    blocks = []
    for pol in polarizations:
        for k in temporal_modes:
            domain = tuple(ModeLabel(p, pol, k) for p in inputs)
            codomain = tuple(ModeLabel(p, pol, k) for p in outputs)
            blocks.append(ModeTransform(domain, routing, codomain))
    return fock.block_transform(blocks)


def _path_counts(occ: fock.OccupationVector) -> dict[str, int]:
    counts: dict[str, int] = {}
    for mode, n in occ.counts:
        counts[mode.path] = counts.get(mode.path, 0) + n
    return counts


def path_component(state: PhotonicState, path_counts: dict[str, int]) -> PhotonicState:
    """Unnormalized part of ``state`` with exactly ``path_counts`` photons per path."""
    return PhotonicState({occ: amp for occ, amp in state.amplitudes.items() if _path_counts(occ) == path_counts})


def path_probability(state: PhotonicState, path_counts: dict[str, int]) -> float:
    return path_component(state, path_counts).norm_squared() / state.norm_squared()


def coincidence_probability(state: PhotonicState, path1: str, path2: str) -> float:
    """Probability of one photon in each of two paths."""
    return path_probability(state, {path1: 1, path2: 1})


def post_select_same_output(state: PhotonicState, output_path: str) -> tuple[PhotonicState, float]:
    """Keep only the branch with both photons in ``output_path``.

    Returns the renormalized branch and its probability.
    """
    branch = path_component(state, {output_path: 2})
    probability = branch.norm_squared() / state.norm_squared()
    if probability < fock.PRUNE_TOL:
        raise ValueError(f"no amplitude for both photons in {output_path!r}")
    return fock.normalize(branch), probability

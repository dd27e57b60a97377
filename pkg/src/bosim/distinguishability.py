"""Delay-line position to temporal overlap of the two photon wavepackets.

The wavepacket shape is taken as Gaussian with amplitude overlap
``v(tau) = exp(-tau**2 / (2 tau_c**2))``. Only ``v(0) = 1``, the decay to
zero well beyond ``tau_c`` and monotonicity matter for the experiments.

The delayed photon is written in a two-mode temporal basis: mode 0 is the
undelayed reference wavepacket and mode 1 its orthogonal complement, with
real non-negative coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import ModeLabel

SPEED_OF_LIGHT_UM_PER_FS = 0.299792458

REFERENCE_MODE = 0
ORTHOGONAL_MODE = 1


@dataclass(frozen=True)
class WavepacketModel:
    coherence_time: float = 210.0  # fs
    shape: str = "gaussian"

    def __post_init__(self):
        if not self.coherence_time > 0:
            raise ValueError(f"coherence_time must be positive, got {self.coherence_time}")
        if self.shape != "gaussian":
            raise ValueError(f"unsupported wavepacket shape {self.shape!r}")


@dataclass(frozen=True)
class DelaySetting:
    path_difference: float  # um

    @property
    def delay(self) -> float:
        return delay_from_path(self.path_difference)


def delay_from_path(path_difference):
    """Arrival-time difference in fs for a path difference in micrometres."""
    tau = np.asarray(path_difference, dtype=float) / SPEED_OF_LIGHT_UM_PER_FS
    return tau if tau.ndim else float(tau)


def overlap(delay, model: WavepacketModel):
    """Amplitude overlap ``|<phi(t)|phi(t + delay)>|`` of the two wavepackets."""
    x = np.asarray(delay, dtype=float) / model.coherence_time
    v = np.exp(-0.5 * x * x)
    return v if np.ndim(delay) else float(v)


def temporal_decomposition(delay: float, model: WavepacketModel) -> tuple[float, float]:
    """Coefficients ``(c_parallel, c_perp)`` of the delayed wavepacket in the two-mode basis."""
    v = overlap(delay, model)
    return v, math.sqrt(max(0.0, 1.0 - v * v))


def decomposition_from_overlap(v: float) -> tuple[float, float]:
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {v}")
    return v, math.sqrt(max(0.0, 1.0 - v * v))


def delayed_mode(path: str, polarization: str, delay: float, model: WavepacketModel) -> dict[ModeLabel, float]:
    """Creation-operator superposition for a photon delayed by ``delay`` fs."""
    return mode_with_overlap(path, polarization, overlap(delay, model))


def mode_with_overlap(path: str, polarization: str, v: float) -> dict[ModeLabel, float]:
    c_par, c_perp = decomposition_from_overlap(v)
    return {
        ModeLabel(path, polarization, REFERENCE_MODE): c_par,
        ModeLabel(path, polarization, ORTHOGONAL_MODE): c_perp,
    }

"""The three two-photon experiments and the counting layer on top of them.

Every probability is computed by pushing an explicit Fock state through
the apparatus (preparation, BS1, post-selection, polarizer, BS2) and is
checked against its closed form. Reported probabilities are conditioned
on the BS1 post-selection; the BS1 and BS2 selection factors are common
to all curves and are kept out of the counts so that curves compare
directly with the baseline pair budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import fock, optics
from .distinguishability import WavepacketModel, delay_from_path, mode_with_overlap, overlap
from .fock import ModeLabel, PhotonicState

SCAN_KINDS = ("baseline", "projected", "hom_dip")

SELECTED_OUTPUT = "a'"
PIPELINE_TOL = 1e-10
DEFAULT_TRANSMISSION = 0.968
DEFAULT_PAIR_BUDGET = 20777.0

_MASK64 = (1 << 64) - 1


def default_scan_positions(points: int = 81, lo: float = -160.0, hi: float = 160.0) -> tuple[float, ...]:
    return tuple(float(x) for x in np.linspace(lo, hi, points))


@dataclass(frozen=True)
class ExperimentConfig:
    tau_c: float = 210.0  # fs
    scan_positions: tuple[float, ...] = field(default_factory=default_scan_positions)  # um
    pair_budget: float = DEFAULT_PAIR_BUDGET
    polarizer_transmission: float = DEFAULT_TRANSMISSION
    mode_match_visibility: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scan_positions", tuple(float(x) for x in self.scan_positions))
        if not self.scan_positions:
            raise ValueError("scan_positions must not be empty")
        if not self.pair_budget > 0:
            raise ValueError("pair_budget must be positive")
        if not 0.0 <= self.polarizer_transmission <= 1.0:
            raise ValueError("polarizer_transmission must lie in [0, 1]")
        if not 0.0 <= self.mode_match_visibility <= 1.0:
            raise ValueError("mode_match_visibility must lie in [0, 1]")
        if not 0 <= self.rng_seed <= _MASK64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")
        WavepacketModel(self.tau_c)

    @property
    def wavepacket(self) -> WavepacketModel:
        return WavepacketModel(self.tau_c)


@dataclass(frozen=True)
class ScanPoint:
    position_um: float
    delay_fs: float
    probability: float
    expected_count: float
    simulated_count: Optional[int] = None


@dataclass(frozen=True)
class ScanCurve:
    kind: str
    points: tuple[ScanPoint, ...]

    @property
    def positions(self) -> np.ndarray:
        return np.array([p.position_um for p in self.points])

    @property
    def delays(self) -> np.ndarray:
        return np.array([p.delay_fs for p in self.points])

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p.probability for p in self.points])

    @property
    def expected_counts(self) -> np.ndarray:
        return np.array([p.expected_count for p in self.points])

    @property
    def simulated_counts(self) -> Optional[np.ndarray]:
        if any(p.simulated_count is None for p in self.points):
            return None
        return np.array([p.simulated_count for p in self.points], dtype=np.int64)


# ---------------------------------------------------------------- pipeline


def prepare_pair(v: float, orthogonal: bool = True) -> PhotonicState:
    """Photon in path a (reference wavepacket) and photon in path b with overlap ``v``.

    Both photons start horizontally polarized; for ``orthogonal`` the half-wave
    plate in path b sits at 45 degrees and turns its photon vertical, otherwise
    at 0 degrees, which leaves H unchanged.
    """
    state = fock.create_pair(ModeLabel("a", "H", 0), mode_with_overlap("b", "H", v))
    angle = math.pi / 4 if orthogonal else 0.0
    return fock.apply_transform(state, optics.hwp_transform(angle, path="b"))


def combine_on_bs1(state: PhotonicState) -> PhotonicState:
    return fock.apply_transform(state, optics.beam_splitter_transform(0.5))


def selected_pair_state(v: float) -> tuple[PhotonicState, float]:
    """Orthogonally polarized pair after BS1, post-selected on both photons in one output."""
    return optics.post_select_same_output(combine_on_bs1(prepare_pair(v, orthogonal=True)), SELECTED_OUTPUT)


def pair_counter_click_probability(state: PhotonicState, path: str = SELECTED_OUTPUT) -> float:
    """Both-detectors-click probability of the BS2 pair counter fed from ``path``."""
    other = "b'" if path == "a'" else "a'"
    bs2 = optics.beam_splitter_transform(0.5, inputs=(path, other), outputs=("out1", "out2"))
    return optics.coincidence_probability(fock.apply_transform(state, bs2), "out1", "out2")


def _check(name: str, value: float, expected: float, tol: float = PIPELINE_TOL) -> None:
    if abs(value - expected) > tol:
        raise RuntimeError(f"{name}: pipeline value {value!r} disagrees with closed form {expected!r}")


def _overlap(delay: float, cfg: ExperimentConfig) -> float:
    return overlap(delay, cfg.wavepacket)


# ---------------------------------------------------------------- closed forms


def analytic_projected_probability(delay, cfg: ExperimentConfig):
    v = overlap(delay, cfg.wavepacket)
    return (1.0 + v * v) / 4.0 * cfg.polarizer_transmission ** 2


def analytic_hom_dip_probability(delay, cfg: ExperimentConfig):
    v = overlap(delay, cfg.wavepacket)
    return 0.5 * (1.0 - cfg.mode_match_visibility * v * v)


# ---------------------------------------------------------------- experiments


def baseline_pair_probability(delay: float, cfg: Optional[ExperimentConfig] = None) -> float:
    """Relative pair-detection rate without the projection polarizer.

    The pipeline verifies that the BS1 selection (1/4) and the BS2 pair
    counting efficiency (1/2) are both independent of the delay; the
    relative rate is then exactly 1.
    """
    cfg = cfg or ExperimentConfig()
    state, p_select = selected_pair_state(_overlap(delay, cfg))
    _check("BS1 post-selection", p_select, 0.25)
    _check("BS2 pair counting", pair_counter_click_probability(state), 0.5)
    return 1.0


def polarization_hom_probability(delay: float, cfg: ExperimentConfig) -> float:
    """Probability that the post-selected pair passes the 45 degree polarizer."""
    state, _ = selected_pair_state(_overlap(delay, cfg))
    polarizer = optics.polarizer_projection(math.pi / 4, cfg.polarizer_transmission, path=SELECTED_OUTPUT)
    probability = fock.apply_transform(state, polarizer).norm_squared()
    _check("projected probability", probability, analytic_projected_probability(delay, cfg))
    return probability


def _bs1_routing(delay: float, cfg: ExperimentConfig) -> tuple[float, float]:
    """(coincidence, same-output) probabilities for co-polarized photons at BS1.

    Imperfect mode matching enters as a mixture: with weight V the photons
    have the wavepacket overlap of the delay, otherwise they are fully
    distinguishable.
    """
    vis = cfg.mode_match_visibility
    cross = same = 0.0
    for weight, v in ((vis, _overlap(delay, cfg)), (1.0 - vis, 0.0)):
        if weight == 0.0:
            continue
        out = combine_on_bs1(prepare_pair(v, orthogonal=False))
        cross += weight * optics.coincidence_probability(out, "a'", "b'")
        same += weight * (optics.path_probability(out, {"a'": 2}) + optics.path_probability(out, {"b'": 2}))
    return cross, same


def hom_dip_probability(delay: float, cfg: ExperimentConfig) -> float:
    """Cross-output coincidence probability at BS1 for co-polarized photons."""
    cross, _ = _bs1_routing(delay, cfg)
    _check("HOM coincidence probability", cross, analytic_hom_dip_probability(delay, cfg))
    return cross


def same_output_rate(delay: float, cfg: ExperimentConfig) -> float:
    """Probability that co-polarized photons leave BS1 through the same port."""
    _, same = _bs1_routing(delay, cfg)
    _check("same-output probability", same, 1.0 - analytic_hom_dip_probability(delay, cfg))
    return same


_PROBABILITY = {
    "baseline": baseline_pair_probability,
    "projected": polarization_hom_probability,
    "hom_dip": hom_dip_probability,
}


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def point_seed(seed: int, index: int) -> int:
    """Per-point seed: ``seed XOR splitmix64(index)``."""
    return (seed ^ splitmix64(index)) & _MASK64


def run_scan(kind: str, cfg: ExperimentConfig, monte_carlo: bool = False) -> ScanCurve:
    """Evaluate one experiment over ``cfg.scan_positions``.

    Expected counts are ``probability * pair_budget`` (the baseline
    probability is 1). With ``monte_carlo`` each point also gets a Poisson
    draw from its own generator seeded by :func:`point_seed`.
    """
    if kind not in _PROBABILITY:
        raise ValueError(f"unknown scan kind {kind!r}; expected one of {SCAN_KINDS}")
    prob_fn = _PROBABILITY[kind]
    points = []
    for i, x in enumerate(cfg.scan_positions):
        delay = delay_from_path(x)
        p = prob_fn(delay, cfg)
        expected = p * cfg.pair_budget
        simulated = None
        if monte_carlo:
            rng = np.random.default_rng(point_seed(cfg.rng_seed, i))
            simulated = int(rng.poisson(expected))
        points.append(ScanPoint(x, delay, p, expected, simulated))
    return ScanCurve(kind, tuple(points))


def fit_visibility(curve: ScanCurve) -> float:
    """Dip visibility ``(P_far - P_min) / P_far``.

    ``P_far`` is the mean over the 10% of points with the largest |delay|.
    Simulated counts are used when every point has one.
    """
    n = len(curve.points)
    if n < 10:
        raise ValueError(f"need at least 10 points to estimate a visibility, got {n}")
    counts = curve.simulated_counts
    values = counts.astype(float) if counts is not None else curve.probabilities
    n_far = math.ceil(0.1 * n)
    far = np.argsort(-np.abs(curve.delays), kind="stable")[:n_far]
    p_far = float(np.mean(values[far]))
    if p_far <= 0:
        raise ValueError("far-delay level is zero; not a dip curve")
    return (p_far - float(np.min(values))) / p_far


def peak_contrast(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    hi, lo = values.max(), values.min()
    return float((hi - lo) / (hi + lo))


def fit_transmission(separated_count: float, cfg: ExperimentConfig, delay: Optional[float] = None) -> float:
    """Per-photon polarizer transmission reproducing ``separated_count`` at ``delay``.

    ``delay`` defaults to the scan point with the largest |delay|.
    """
    if delay is None:
        delay = float(np.max(np.abs(delay_from_path(np.array(cfg.scan_positions)))))
    unit = replace(cfg, polarizer_transmission=1.0)
    eta_sq = separated_count / (cfg.pair_budget * analytic_projected_probability(delay, unit))
    if not 0.0 < eta_sq <= 1.0:
        raise ValueError(f"count {separated_count} implies transmission^2 = {eta_sq}, outside (0, 1]")
    return math.sqrt(eta_sq)

"""Two-photon linear-optics simulator for polarization-space Hong-Ou-Mandel interference."""

from .distinguishability import WavepacketModel, delay_from_path, overlap, temporal_decomposition
from .experiments import (
    ExperimentConfig,
    ScanCurve,
    ScanPoint,
    baseline_pair_probability,
    fit_visibility,
    hom_dip_probability,
    polarization_hom_probability,
    run_scan,
    same_output_rate,
)
from .fock import ModeLabel, ModeTransform, OccupationVector, PhotonicState
from .tomography import DensityMatrix, TomographySettings, fidelity, mle_reconstruct, simulate_tomography

__version__ = "0.1.0"

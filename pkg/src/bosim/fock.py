"""Two-photon Fock-state algebra over labelled optical modes.

States are stored in the occupation-number representation, so exchange
symmetry of the photons holds by construction. A mode is the triple
(path, polarization, temporal index). Polarization labels ``D``, ``A``,
``R`` and ``L`` are accepted and expanded into the ``H``/``V`` basis
whenever two states are compared.

Expanding ``a_H(t) a_V(t+tau)`` in the D/A basis gives
``(1/2)[a_D a_D' - a_D a_A' + a_A a_D' - a_A a_A']`` (primes: delayed
mode). At ``tau = 0`` the two mixed terms cancel, leaving
``(|2_D> - |2_A>)/sqrt(2)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

PRUNE_TOL = 1e-15
NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
MAX_PHOTONS = 2

PATHS = ("a", "b", "a'", "b'", "out1", "out2")
BASE_POLARIZATIONS = ("H", "V")
DERIVED_POLARIZATIONS = ("D", "A", "R", "L")

_SQRT_HALF = 1.0 / math.sqrt(2.0)

# single-photon kets in the (H, V) basis
POLARIZATION_VECTORS: dict[str, np.ndarray] = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex),
    "A": np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex),
    "R": np.array([_SQRT_HALF, 1j * _SQRT_HALF], dtype=complex),
    "L": np.array([_SQRT_HALF, -1j * _SQRT_HALF], dtype=complex),
}


@dataclass(frozen=True, order=True)
class ModeLabel:
    """A single-photon mode: spatial path, polarization and temporal mode."""

    path: str
    polarization: str
    temporal: int = 0

    def __post_init__(self):
        if self.path not in PATHS:
            raise ValueError(f"unknown path {self.path!r}; expected one of {PATHS}")
        if self.polarization not in POLARIZATION_VECTORS:
            raise ValueError(f"unknown polarization {self.polarization!r}")
        if not isinstance(self.temporal, (int, np.integer)) or self.temporal < 0:
            raise ValueError(f"temporal index must be a non-negative integer, got {self.temporal!r}")

    def with_polarization(self, polarization: str) -> "ModeLabel":
        return ModeLabel(self.path, polarization, self.temporal)

    def __str__(self):
        return f"{self.path}:{self.polarization}{self.temporal}"


@dataclass(frozen=True, order=True)
class OccupationVector:
    """Photon numbers per mode, stored as a sorted tuple of (mode, count)."""

    counts: tuple[tuple[ModeLabel, int], ...] = ()

    @classmethod
    def from_mapping(cls, counts: Mapping[ModeLabel, int]) -> "OccupationVector":
        items = []
        for mode, n in counts.items():
            if n < 0:
                raise ValueError("photon numbers must be non-negative")
            if n:
                items.append((mode, int(n)))
        return cls(tuple(sorted(items)))

    def as_dict(self) -> dict[ModeLabel, int]:
        return dict(self.counts)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.counts)

    @property
    def modes(self) -> tuple[ModeLabel, ...]:
        return tuple(m for m, _ in self.counts)

    def get(self, mode: ModeLabel) -> int:
        for m, n in self.counts:
            if m == mode:
                return n
        return 0

    def add(self, mode: ModeLabel) -> "OccupationVector":
        counts = self.as_dict()
        counts[mode] = counts.get(mode, 0) + 1
        return OccupationVector.from_mapping(counts)

    def creation_sequence(self) -> list[ModeLabel]:
        """Modes listed with multiplicity, i.e. the creation operators making up this vector."""
        return [m for m, n in self.counts for _ in range(n)]

    def __str__(self):
        if not self.counts:
            return "|vac>"
        return "|" + ", ".join(f"{n}_{m}" for m, n in self.counts) + ">"


def _pruned(amplitudes: Mapping[OccupationVector, complex]) -> dict[OccupationVector, complex]:
    return {occ: complex(amp) for occ, amp in amplitudes.items() if abs(amp) >= PRUNE_TOL}


@dataclass(frozen=True)
class PhotonicState:
    """Superposition of occupation vectors with complex amplitudes.

    Treat instances as immutable: every operation returns a new state.
    """

    amplitudes: Mapping[OccupationVector, complex] = field(default_factory=dict)
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _pruned(self.amplitudes))
        if self.normalized and abs(self.norm_squared() - 1.0) > NORM_TOL:
            raise ValueError("state flagged as normalized does not have unit norm")

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    @property
    def modes(self) -> set[ModeLabel]:
        return {m for occ in self.amplitudes for m in occ.modes}

    @property
    def photon_numbers(self) -> set[int]:
        return {occ.total for occ in self.amplitudes}

    def amplitude(self, occupation: Union[OccupationVector, Mapping[ModeLabel, int]]) -> complex:
        if not isinstance(occupation, OccupationVector):
            occupation = OccupationVector.from_mapping(occupation)
        return self.amplitudes.get(occupation, 0j)

    def __add__(self, other: "PhotonicState") -> "PhotonicState":
        out: dict[OccupationVector, complex] = defaultdict(complex, self.amplitudes)
        for occ, amp in other.amplitudes.items():
            out[occ] += amp
        return PhotonicState(out)

    def __sub__(self, other: "PhotonicState") -> "PhotonicState":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "PhotonicState":
        return PhotonicState({occ: scalar * amp for occ, amp in self.amplitudes.items()})

    __rmul__ = __mul__

    def __str__(self):
        if not self.amplitudes:
            return "0"
        terms = [f"({amp:.6g}){occ}" for occ, amp in sorted(self.amplitudes.items())]
        return " + ".join(terms)


def vacuum() -> PhotonicState:
    return PhotonicState({OccupationVector(): 1.0}, normalized=True)


def fock_state(counts: Mapping[ModeLabel, int]) -> PhotonicState:
    """Normalized number state with the given occupations."""
    return PhotonicState({OccupationVector.from_mapping(counts): 1.0}, normalized=True)


ModeSpec = Union[ModeLabel, Mapping[ModeLabel, complex]]


def _as_superposition(mode: ModeSpec) -> dict[ModeLabel, complex]:
    if isinstance(mode, ModeLabel):
        return {mode: 1.0}
    return dict(mode)


def create(state: PhotonicState, mode: ModeSpec) -> PhotonicState:
    """Apply a creation operator to ``state``.

    ``mode`` is a single ``ModeLabel`` or a mapping ``{mode: coefficient}``
    describing the operator ``sum_j c_j a_j^dagger``. Each occupation gains
    one photon with the bosonic factor ``sqrt(n + 1)``; the result is not
    normalized.
    """
    if state.amplitudes and max(state.photon_numbers) + 1 > MAX_PHOTONS:
        raise ValueError(f"creation would exceed {MAX_PHOTONS} photons")
    out: dict[OccupationVector, complex] = defaultdict(complex)
    for target, coeff in _as_superposition(mode).items():
        if coeff == 0:
            continue
        for occ, amp in state.amplitudes.items():
            n = occ.get(target)
            out[occ.add(target)] += coeff * amp * math.sqrt(n + 1)
    return PhotonicState(out)


def create_pair(first: ModeSpec, second: ModeSpec, normalize_result: bool = True) -> PhotonicState:
    """``a_first^dagger a_second^dagger |vac>``, normalized by default."""
    state = create(create(vacuum(), first), second)
    return normalize(state) if normalize_result else state


def normalize(state: PhotonicState) -> PhotonicState:
    norm = state.norm()
    if norm < PRUNE_TOL:
        raise ValueError("cannot normalize a zero-norm state (post-selected branch has no support)")
    return PhotonicState({occ: amp / norm for occ, amp in state.amplitudes.items()}, normalized=True)


@dataclass(frozen=True)
class ModeTransform:
    """Linear substitution of creation operators.

    ``matrix[j, i]`` is the coefficient of ``codomain[j]`` in the image of
    ``domain[i]``, i.e. ``a_i^dagger -> sum_j matrix[j, i] b_j^dagger``.
    ``codomain`` defaults to ``domain``. Transforms that are not isometries
    (polarizers) must set ``projection=True``.
    """

    domain: tuple[ModeLabel, ...]
    matrix: np.ndarray
    codomain: tuple[ModeLabel, ...] | None = None
    projection: bool = False

    def __post_init__(self):
        domain = tuple(self.domain)
        codomain = domain if self.codomain is None else tuple(self.codomain)
        matrix = np.array(self.matrix, dtype=complex)
        matrix.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "matrix", matrix)
        if len(set(domain)) != len(domain) or len(set(codomain)) != len(codomain):
            raise ValueError("transform domain and codomain must not repeat labels")
        if matrix.shape != (len(codomain), len(domain)):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match codomain x domain "
                f"({len(codomain)}, {len(domain)})"
            )
        if not self.projection and not self.is_unitary():
            raise ValueError("transform is not unitary; flag it as a projection if intended")

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            return False
        return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[1]), atol=tol, rtol=0))

    def image(self, mode: ModeLabel) -> dict[ModeLabel, complex]:
        i = self.domain.index(mode)
        return {out: self.matrix[j, i] for j, out in enumerate(self.codomain) if self.matrix[j, i] != 0}

    def then(self, other: "ModeTransform") -> "ModeTransform":
        """Composite transform: apply ``self`` first, then ``other``."""
        if set(self.codomain) != set(other.domain):
            raise ValueError("cannot compose: codomain and domain differ")
        order = [other.domain.index(m) for m in self.codomain]
        matrix = other.matrix[:, order] @ self.matrix
        return ModeTransform(self.domain, matrix, other.codomain, self.projection or other.projection)


def block_transform(blocks: Iterable[ModeTransform]) -> ModeTransform:
    """Direct sum of transforms acting on disjoint mode sets."""
    blocks = list(blocks)
    domain = [m for b in blocks for m in b.domain]
    codomain = [m for b in blocks for m in b.codomain]
    matrix = np.zeros((len(codomain), len(domain)), dtype=complex)
    r = c = 0
    for b in blocks:
        rows, cols = b.matrix.shape
        matrix[r:r + rows, c:c + cols] = b.matrix
        r += rows
        c += cols
    return ModeTransform(tuple(domain), matrix, tuple(codomain), any(b.projection for b in blocks))


def identity_transform(modes: Sequence[ModeLabel]) -> ModeTransform:
    return ModeTransform(tuple(modes), np.eye(len(modes)))


def _hv_image(mode: ModeLabel) -> dict[ModeLabel, complex]:
    vec = POLARIZATION_VECTORS[mode.polarization]
    return {mode.with_polarization(p): vec[k] for k, p in enumerate(BASE_POLARIZATIONS) if vec[k] != 0}


def _substitute(state: PhotonicState, images: Mapping[ModeLabel, Mapping[ModeLabel, complex]]) -> PhotonicState:
    result = PhotonicState()
    for occ, amp in state.amplitudes.items():
        # |n> = prod_m (a_m^dagger)^n_m / sqrt(n_m!) |vac>
        weight = amp / math.sqrt(math.prod(math.factorial(n) for _, n in occ.counts))
        term = vacuum()
        for mode in occ.creation_sequence():
            term = create(term, images.get(mode, {mode: 1.0}))
        result = result + weight * term
    return result


def to_hv_basis(state: PhotonicState) -> PhotonicState:
    """Rewrite any D/A/R/L modes in terms of H and V modes."""
    derived = {m for m in state.modes if m.polarization in DERIVED_POLARIZATIONS}
    if not derived:
        return state
    out = _substitute(state, {m: _hv_image(m) for m in derived})
    return PhotonicState(out.amplitudes, normalized=state.normalized)


def apply_transform(state: PhotonicState, t: ModeTransform) -> PhotonicState:
    """Substitute every creation operator in ``t.domain`` by its image.

    Modes outside the domain pass through untouched. Derived polarization
    labels that the transform does not name are first expanded into H/V.
    """
    if any(m.polarization in DERIVED_POLARIZATIONS and m not in t.domain for m in state.modes):
        state = to_hv_basis(state)
    if state.modes and not state.modes & set(t.domain):
        raise ValueError("transform domain does not act on any mode of the state")
    images = {m: t.image(m) for m in t.domain}
    out = _substitute(state, images)
    unitary_like = not t.projection
    if unitary_like and state.normalized:
        return PhotonicState(out.amplitudes, normalized=abs(out.norm_squared() - 1.0) <= NORM_TOL)
    return out


def inner_product(s1: PhotonicState, s2: PhotonicState) -> complex:
    """``<s1|s2>``, antilinear in the first argument."""
    a, b = to_hv_basis(s1), to_hv_basis(s2)
    return complex(sum(amp.conjugate() * b.amplitudes.get(occ, 0j) for occ, amp in a.amplitudes.items()))


def _require_normalized(state: PhotonicState, name: str) -> None:
    if abs(state.norm_squared() - 1.0) > NORM_TOL:
        raise ValueError(f"{name} must be normalized (norm^2 = {state.norm_squared():.15g})")


def projection_probability(
    state: PhotonicState, projector: Union[PhotonicState, Sequence[PhotonicState]]
) -> float:
    """Probability of finding ``state`` in ``projector``.

    ``projector`` is a single normalized state or an orthonormal basis of
    the projection subspace, in which case the squared overlaps are summed.
    """
    _require_normalized(state, "state")
    basis = [projector] if isinstance(projector, PhotonicState) else list(projector)
    total = 0.0
    for p in basis:
        _require_normalized(p, "projector")
        total += abs(inner_product(p, state)) ** 2
    return min(max(total, 0.0), 1.0)


def pair_subspace(path: str, pol1: str, pol2: str, temporal_modes: Sequence[int] = (0, 1)) -> list[PhotonicState]:
    """Orthonormal basis for "one photon ``pol1``, one ``pol2``, any temporal modes" in ``path``.

    For ``pol1 == pol2`` this covers both photons in the same polarization.
    ``pol1`` and ``pol2`` must be orthogonal or equal.
    """
    modes1 = [ModeLabel(path, pol1, t) for t in temporal_modes]
    modes2 = [ModeLabel(path, pol2, t) for t in temporal_modes]
    overlap = np.vdot(POLARIZATION_VECTORS[pol1], POLARIZATION_VECTORS[pol2])
    if pol1 == pol2:
        basis = []
        for i, m in enumerate(modes1):
            basis.append(fock_state({m: 2}))
            basis.extend(fock_state({m: 1, n: 1}) for n in modes1[i + 1:])
        return basis
    if abs(overlap) > 1e-12:
        raise ValueError(f"polarizations {pol1} and {pol2} are neither equal nor orthogonal")
    return [fock_state({m: 1, n: 1}) for m in modes1 for n in modes2]


def to_first_quantized(state: PhotonicState) -> dict[tuple[ModeLabel, ModeLabel], complex]:
    """Symmetric two-particle wavefunction ``psi(m1, m2)`` in the H/V basis.

    ``|1_m 1_n>`` maps to ``(|m>|n> + |n>|m>)/sqrt(2)`` and ``|2_m>`` to ``|m>|m>``.
    """
    state = to_hv_basis(state)
    if state.photon_numbers - {2}:
        raise ValueError("first-quantized form is only defined for two-photon states")
    psi: dict[tuple[ModeLabel, ModeLabel], complex] = defaultdict(complex)
    for occ, amp in state.amplitudes.items():
        seq = occ.creation_sequence()
        if seq[0] == seq[1]:
            psi[(seq[0], seq[0])] += amp
        else:
            psi[(seq[0], seq[1])] += amp * _SQRT_HALF
            psi[(seq[1], seq[0])] += amp * _SQRT_HALF
    return dict(psi)


def first_quantized_overlap(state: PhotonicState, first: ModeSpec, second: ModeSpec) -> complex:
    """``(<first| x <second|) psi`` for labelled (distinguishable) single-particle states."""
    psi = to_first_quantized(state)
    total = 0j
    for m1, c1 in _as_superposition(first).items():
        for h1, w1 in _hv_image(m1).items():
            for m2, c2 in _as_superposition(second).items():
                for h2, w2 in _hv_image(m2).items():
                    total += np.conj(c1 * w1 * c2 * w2) * psi.get((h1, h2), 0j)
    return complex(total)

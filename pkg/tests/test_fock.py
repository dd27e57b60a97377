import math

import numpy as np
import pytest

from bosim import fock
from bosim.fock import ModeLabel, ModeTransform, OccupationVector, PhotonicState

H0 = ModeLabel("a'", "H", 0)
V0 = ModeLabel("a'", "V", 0)
V1 = ModeLabel("a'", "V", 1)
D0 = ModeLabel("a'", "D", 0)
A0 = ModeLabel("a'", "A", 0)


def hv_to_da():
    # a_H -> (a_D + a_A)/sqrt(2), a_V -> (a_D - a_A)/sqrt(2)
    s = 1 / math.sqrt(2)
    return ModeTransform((H0, V0), np.array([[s, s], [s, -s]]), codomain=(D0, A0))


def test_mode_label_equality_needs_all_coordinates():
    assert ModeLabel("a", "H", 0) == ModeLabel("a", "H", 0)
    assert ModeLabel("a", "H", 0) != ModeLabel("a", "H", 1)
    assert ModeLabel("a", "H", 0) != ModeLabel("b", "H", 0)
    assert ModeLabel("a", "H", 0) != ModeLabel("a", "V", 0)


@pytest.mark.parametrize("kwargs", [dict(path="c", polarization="H"), dict(path="a", polarization="X"),
                                    dict(path="a", polarization="H", temporal=-1)])
def test_mode_label_rejects_bad_coordinates(kwargs):
    with pytest.raises(ValueError):
        ModeLabel(**kwargs)


def test_create_on_vacuum():
    s = fock.create(fock.vacuum(), H0)
    assert s.amplitudes == {OccupationVector.from_mapping({H0: 1}): 1.0}


def test_double_creation_has_bosonic_factor():
    s = fock.create(fock.create(fock.vacuum(), H0), H0)
    assert s.amplitude({H0: 2}) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_create_h_v_projects_half_onto_dd():
    s = fock.normalize(fock.create(fock.create(fock.vacuum(), H0), V0))
    assert fock.projection_probability(s, fock.fock_state({D0: 2})) == pytest.approx(0.5, abs=1e-12)


def test_create_rejects_third_photon():
    s = fock.create(fock.create(fock.vacuum(), H0), V0)
    with pytest.raises(ValueError):
        fock.create(s, H0)


def test_normalize_examples():
    m, n = H0, V1
    s = fock.normalize(2 * fock.fock_state({m: 1, n: 1}))
    assert s.amplitude({m: 1, n: 1}) == pytest.approx(1.0)
    hv = fock.create(fock.create(fock.vacuum(), H0), V0)
    assert fock.normalize(hv).amplitudes == pytest.approx(hv.amplitudes)
    dd = fock.create(fock.create(fock.vacuum(), D0), D0)
    assert fock.normalize(dd).amplitude({D0: 2}) == pytest.approx(1.0)
    assert fock.normalize(dd).normalized


def test_normalize_zero_state_raises():
    with pytest.raises(ValueError):
        fock.normalize(PhotonicState())


def test_pruning_of_tiny_amplitudes():
    s = PhotonicState({OccupationVector.from_mapping({H0: 1}): 1e-16, OccupationVector.from_mapping({V0: 1}): 1.0})
    assert len(s.amplitudes) == 1


def test_inner_product_examples():
    s = fock.create_pair(H0, V0)
    assert fock.inner_product(s, s) == pytest.approx(1.0)
    assert fock.inner_product(fock.fock_state({H0: 1, V0: 1}), fock.fock_state({H0: 1, V1: 1})) == 0
    created = (1 / math.sqrt(2)) * fock.create(fock.create(fock.vacuum(), D0), D0)
    assert fock.inner_product(fock.fock_state({D0: 2}), created) == pytest.approx(1.0)


def test_inner_product_expands_derived_polarizations():
    # <D|H> = 1/sqrt(2) for single photons
    assert fock.inner_product(fock.fock_state({D0: 1}), fock.fock_state({H0: 1})) == pytest.approx(1 / math.sqrt(2))


def test_hv_state_rewritten_in_da_basis():
    s = fock.create_pair(H0, V0)
    out = fock.apply_transform(s, hv_to_da())
    expected = {OccupationVector.from_mapping({D0: 2}): 1 / math.sqrt(2),
                OccupationVector.from_mapping({A0: 2}): -1 / math.sqrt(2)}
    assert out.amplitudes.keys() == expected.keys()
    for k, v in expected.items():
        assert out.amplitudes[k] == pytest.approx(v, abs=1e-15)
    # no D-A cross term: the two mixed terms cancel
    assert out.amplitude({D0: 1, A0: 1}) == 0


def test_identity_transform_leaves_state_unchanged():
    s = fock.create_pair(H0, V1)
    out = fock.apply_transform(s, fock.identity_transform([H0, V0, V1]))
    assert out.amplitudes == pytest.approx(s.amplitudes)


def test_transform_on_foreign_modes_is_rejected():
    s = fock.create_pair(H0, V0)
    t = fock.identity_transform([ModeLabel("b", "H", 0)])
    with pytest.raises(ValueError):
        fock.apply_transform(s, t)


def test_non_unitary_transform_must_be_flagged():
    with pytest.raises(ValueError):
        ModeTransform((H0, V0), np.array([[1, 0], [0, 0]]))
    ModeTransform((H0, V0), np.array([[1, 0], [0, 0]]), projection=True)


def test_projection_onto_dd_subspace_for_separated_photons():
    s = fock.create_pair(ModeLabel("a'", "H", 0), ModeLabel("a'", "V", 1))
    assert fock.projection_probability(s, fock.pair_subspace("a'", "D", "D")) == pytest.approx(0.25, abs=1e-12)


def test_projection_onto_dd_for_overlapped_photons():
    s = fock.create_pair(H0, V0)
    assert fock.projection_probability(s, fock.pair_subspace("a'", "D", "D")) == pytest.approx(0.5, abs=1e-12)


def test_projection_onto_self():
    s = fock.create_pair(D0, ModeLabel("a'", "R", 1))
    assert fock.projection_probability(s, s) == pytest.approx(1.0, abs=1e-12)


def test_projection_requires_normalized_inputs():
    s = fock.create_pair(H0, V0, normalize_result=False)
    with pytest.raises(ValueError):
        fock.projection_probability(2 * fock.create_pair(H0, V0), s)


@pytest.mark.parametrize("overlap", [0.0, 0.3, 1 / math.sqrt(2), 1.0])
def test_pair_norm_depends_on_internal_overlap(overlap):
    # phi = H in mode 0, psi = H in (overlap * mode0 + sqrt(1 - overlap^2) * mode1)
    psi = {H0: overlap, ModeLabel("a'", "H", 1): math.sqrt(1 - overlap ** 2)}
    s = fock.create(fock.create(fock.vacuum(), H0), psi)
    assert s.norm() == pytest.approx(math.sqrt(1 + overlap ** 2), abs=1e-12)


def test_first_quantized_form_of_symmetrized_state():
    psi = fock.to_first_quantized(fock.create_pair(H0, V0))
    assert psi[(H0, V0)] == pytest.approx(1 / math.sqrt(2))
    assert psi[(V0, H0)] == pytest.approx(1 / math.sqrt(2))
    assert sum(abs(a) ** 2 for a in psi.values()) == pytest.approx(1.0)


def test_compose_transforms():
    t = hv_to_da()
    back = ModeTransform((D0, A0), t.matrix.conj().T, codomain=(H0, V0))
    round_trip = t.then(back)
    assert np.allclose(round_trip.matrix, np.eye(2))


def test_delayed_pair_has_four_da_terms():
    h0, v1 = ModeLabel("a'", "H", 0), ModeLabel("a'", "V", 1)
    d1, a1 = ModeLabel("a'", "D", 1), ModeLabel("a'", "A", 1)
    s = 1 / math.sqrt(2)
    to_da = fock.block_transform([
        ModeTransform((h0, ModeLabel("a'", "V", 0)), np.array([[s, s], [s, -s]]), codomain=(D0, A0)),
        ModeTransform((ModeLabel("a'", "H", 1), v1), np.array([[s, s], [s, -s]]), codomain=(d1, a1)),
    ])
    out = fock.apply_transform(fock.create_pair(h0, v1), to_da)
    expected = {(D0, d1): 0.5, (D0, a1): -0.5, (A0, d1): 0.5, (A0, a1): -0.5}
    assert len(out.amplitudes) == 4
    for (m, n), amp in expected.items():
        assert out.amplitude({m: 1, n: 1}) == pytest.approx(amp, abs=1e-15)

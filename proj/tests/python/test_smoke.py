import math

import numpy as np
import pytest

import ssblab


def test_fock_basis():
    b = ssblab.FockBasis.create(4, 2)
    assert len(b) == 5
    assert b.index_of([4, 0]) == 4
    with pytest.raises(ssblab.ValidationError):
        b.index_of([1, 1])


def test_pure_condensate_rdm():
    s = ssblab.build_recipe("pure-condensate", 4, modes=2)
    r = ssblab.compute_rdm1(s)
    assert r.largest() == pytest.approx(4.0)
    assert ssblab.order_parameter(r, 4) == pytest.approx(1.0)
    np.testing.assert_allclose(r.matrix, np.diag([4.0, 0.0]), atol=1e-14)


def test_two_fluid_current():
    modes = ssblab.ModeSet.symmetric(2, 1.0, 64, 1)
    s = ssblab.build_recipe("pure-condensate", 4, modes=2, condensed_mode=1)
    tf = ssblab.two_fluid(s, modes)
    expected = 4.0 * 2 * math.pi
    assert np.max(np.abs(tf.superfluid_current - expected)) <= 0.01 * expected


def test_ssb_chain():
    lat = ssblab.SpinLattice.chain(4, -1.0)
    c = ssblab.classify_ssb(ssblab.build_heisenberg(lat),
                            ssblab.build_relevant_observable(lat, "total-sz"))
    assert c.verdict == "TYPE1"
    assert c.ground_degeneracy == 5


def test_coherent_and_constraint():
    ens = ssblab.CoherentEnsemble.build(9.0, "two-fraction", alpha=0.5)
    modes = ssblab.ModeSet.symmetric(2, 1.0, 8)
    assert ssblab.csa_odlro_equivalence(ens, modes, "pair", 0, 3)["equal"]
    assert ssblab.compare_field_with_macroscopic(ens, modes)["max_modulus_gap"] > 1e-3
    r = ssblab.eta_pairing_constraint(sites=2)
    assert r["identity_residual"] < 1e-10
    assert r["consistent"]


def test_overlap_scaling():
    r = ssblab.overlap_scaling([100, 1000], 200, seed=3)
    assert r["means"][0] > r["means"][1]


def test_interference_reproducible():
    a = ssblab.run_experiment(4, 4, 6, 17)
    b = ssblab.run_experiment(4, 4, 6, 17)
    assert list(a.grid_indices) == list(b.grid_indices)
    assert 0.0 <= a.fit.visibility <= 1.0
    with pytest.raises(ssblab.ValidationError):
        ssblab.phase_statistics([a] * 10)

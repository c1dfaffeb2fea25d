import numpy as np
import pytest

from entmap.base.config import Config
from entmap.base.exceptions import BadParams, DimensionMismatch, UncertifiedMap
from entmap.base.misc import random_product_mixture
from entmap.criteria.criteria import Classification, Criterion, check_ccnr, check_posmap, check_ppt, classify, \
    default_maps, pure_state_test, random_conjugation_experiment
from entmap.criteria.sweep import csv_header, csv_row, sweep
from entmap.maps.posmaps import MapDescriptor
from entmap.states.bipartite import DensityMatrix, PureState
from entmap.states.families import FamilyId, FamilyParams, build_family


rng = np.random.default_rng(17)

omega2 = PureState((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
mixed9 = DensityMatrix.maximally_mixed((3, 3))
shift4_point = build_family(FamilyId.SHIFT4, FamilyParams((1 / 7, 1 / 2, 2 / 7, 1 / 14)))


##########################
##### Testing single criteria
##########################

def test_check_ppt():
    result = check_ppt(omega2.density())
    assert result.criterion == Criterion.PPT
    assert result.detected and result.verdict == "detect"
    assert np.isclose(result.witness_value, -0.5)

    result = check_ppt(mixed9)
    assert not result.detected and result.verdict == "pass"
    assert np.isclose(result.witness_value, 1 / 9)

def test_check_ccnr():
    result = check_ccnr(omega2.density())
    assert result.detected
    assert np.isclose(result.witness_value, 1.0)
    assert not check_ccnr(mixed9).detected

def test_check_posmap():
    result = check_posmap(shift4_point, MapDescriptor.cyclic(4, 1))
    assert result.detected
    assert result.label == "cyclic-4-1"
    assert result.scale == 4
    assert np.isclose(result.witness_value, -1 / 56)
    assert np.isclose(result.scaled_witness, -1 / 14)

def test_check_posmap_embeds_small_maps():
    rho = build_family(FamilyId.SHIFT3, FamilyParams((2 / 9, 6 / 9, 1 / 9)), dims=(4, 4))
    assert check_posmap(rho, MapDescriptor.cyclic(3, 1)).detected

def test_check_posmap_errors():
    with pytest.raises(UncertifiedMap):
        check_posmap(mixed9, MapDescriptor.diagonal((2, 2, 2)))
    with pytest.raises(DimensionMismatch):
        check_posmap(mixed9, MapDescriptor.cyclic(4, 1))

def test_default_maps():
    assert default_maps(2) == [MapDescriptor.reduction2(), MapDescriptor.weighted2()]
    assert default_maps(4) == [MapDescriptor.cyclic(4, k) for k in (1, 2, 3)]
    assert default_maps(1) == []


##########################
##### Testing classification
##########################

def test_classify_npt():
    report = classify(omega2.density(), default_maps(2))
    assert report.classification == Classification.NPT_ENTANGLED
    assert report.entangled
    assert [r.label for r in report.results] == ["ppt", "ccnr", "reduction2", "weighted2"]
    assert np.isclose(report.witnesses["ppt"], -0.5)
    assert np.isclose(report.result("reduction2").witness_value, -0.5)
    with pytest.raises(KeyError):
        report.result("cyclic-4-1")

def test_classify_ppt_entangled():
    report = classify(shift4_point, default_maps(4))
    assert report.classification == Classification.PPT_ENTANGLED_DETECTED
    assert not report.result("ppt").detected
    assert not report.result("ccnr").detected
    assert report.result("cyclic-4-1").detected

def test_classify_realignment_only():
    rho = build_family(FamilyId.SHIFT4, FamilyParams((0.2, 0.15, 0.2, 0.45)))
    report = classify(rho, [MapDescriptor.cyclic(4, 1)])
    assert report.classification == Classification.PPT_ENTANGLED_REALIGNMENT

def test_classify_separable():
    for _ in range(5):
        rho = DensityMatrix((3, 3), random_product_mixture(3, 3, 4, rng))
        report = classify(rho, default_maps(3))
        assert report.classification == Classification.UNDETECTED
        assert not report.entangled

def test_classify_uniform_point():
    rho = build_family(FamilyId.SHIFT3, FamilyParams((1 / 3,) * 3))
    assert classify(rho, default_maps(3)).classification == Classification.UNDETECTED


##########################
##### Testing the pure-state test
##########################

def test_pure_state_omega2():
    report = pure_state_test(omega2)
    assert report.classification == Classification.PURE_ENTANGLED
    reduction, weighted = report.results
    assert np.isclose(reduction.witness_value, -0.5)
    assert np.isclose(weighted.witness_value, (1.5 - np.sqrt(3.25)) / 2)
    assert np.isclose(weighted.witness_value, -0.151388, atol=1e-6)
    assert reduction.label == "reduction2^UV"

def test_pure_state_unequal_weights():
    psi = PureState((2, 2), np.array([2, 0, 0, 1]) / np.sqrt(5))
    report = pure_state_test(psi)
    assert np.allclose(report.schmidt_coefficients, [2 / np.sqrt(5), 1 / np.sqrt(5)])
    assert np.isclose(report.results[0].witness_value, -0.4)

def test_pure_state_in_higher_dims():
    vec = np.zeros(9)
    vec[[0, 4, 8]] = 1 / np.sqrt(3)
    report = pure_state_test(PureState((3, 3), vec))
    assert report.classification == Classification.PURE_ENTANGLED
    assert np.isclose(report.results[0].witness_value, -1 / 3)

def test_pure_state_product():
    psi = PureState.product([1, 0], [0.6, 0.8j])
    report = pure_state_test(psi)
    assert report.classification == Classification.PURE_SEPARABLE
    assert report.results == ()
    assert not report.entangled

def test_random_conjugation_experiment():
    # the 2 x 2 reduction map commutes with unitary conjugation
    outcome = random_conjugation_experiment(omega2, 20, np.random.default_rng(1))
    assert outcome.trials == 20
    assert outcome.detected == 20
    assert np.isclose(outcome.best_witness, -0.5)


##########################
##### Testing sweeps
##########################

def test_sweep_rows():
    rows = sweep(FamilyId.SHIFT3, 10, [MapDescriptor.cyclic(3, 1)])
    assert len(rows) == 66
    assert rows[0].q == (0.0, 0.0, 1.0)
    assert rows[-1].q == (1.0, 0.0, 0.0)
    assert rows[-1].report.classification == Classification.NPT_ENTANGLED

def test_sweep_grid_one():
    rows = sweep(FamilyId.SHIFT4, 1, [])
    assert len(rows) == 1
    assert np.allclose(rows[0].q, 0.25)

def test_sweep_grid_bounds():
    with pytest.raises(BadParams):
        sweep(FamilyId.SHIFT3, 0, [])
    with pytest.raises(BadParams):
        sweep(FamilyId.SHIFT3, 201, [])

def test_sweep_is_independent_of_workers():
    maps = [MapDescriptor.cyclic(4, k) for k in (1, 2, 3)]
    serial = sweep(FamilyId.SHIFT4, 5, maps, Config(threads=1))
    parallel = sweep(FamilyId.SHIFT4, 5, maps, Config(threads=2))
    assert [csv_row(r) for r in serial] == [csv_row(r) for r in parallel]

def test_csv_layout():
    maps = [MapDescriptor.cyclic(3, 1)]
    assert csv_header(3, maps) == ["q1", "q2", "q3", "ppt", "ppt_witness", "ccnr", "ccnr_witness",
        "cyclic-3-1", "cyclic-3-1_witness", "classification"]
    row = csv_row(sweep(FamilyId.SHIFT3, 1, maps)[0])
    assert len(row) == 10
    assert row[3] == "pass" and row[-1] == Classification.UNDETECTED

def test_sweep_finds_ppt_entangled_rows():
    rows = sweep(FamilyId.SHIFT4, 20, [MapDescriptor.cyclic(4, 1)])
    assert len(rows) == 1771
    hits = [r.q for r in rows if r.report.classification == Classification.PPT_ENTANGLED_DETECTED
        and not r.report.result("ccnr").detected]
    assert any(np.allclose(q, (0.1, 0.5, 0.35, 0.05)) for q in hits)

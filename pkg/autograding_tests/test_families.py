import numpy as np
import pytest

from entmap.base.exceptions import BadDims, BadParams, Unsupported
from entmap.base.matcore import direct_sum, min_eigenvalue, trace_norm
from entmap.base.misc import compare_spectra, random_simplex
from entmap.criteria.criteria import check_ccnr, check_posmap, check_ppt
from entmap.maps.posmaps import MapDescriptor, build_map
from entmap.states.bipartite import apply_map_first, partial_transpose_first, realign
from entmap.states.families import FamilyId, FamilyKind, FamilyParams, build_family, coherent4_line, \
    coherent4_pt_blocks, map_blocks, outside_support_noise, posmap_block_minimum, ppt_closed_form, \
    ppt_entangled_point, realign_norm_formula, realign_norm_oracle, shift4_line


rng = np.random.default_rng(13)

shift4_point = FamilyParams((1 / 7, 1 / 2, 2 / 7, 1 / 14))


def numeric_ppt(rho):
    return not check_ppt(rho).detected


##########################
##### Testing family identifiers
##########################

def test_family_id():
    assert FamilyId.parse("shift4") == FamilyId.SHIFT4
    assert FamilyId.parse("Coherent3") == FamilyId.COHERENT3
    assert FamilyId.parse("shift", 6) == FamilyId.shift(6)
    assert FamilyId.parse("coherent5", 5).kind == FamilyKind.COHERENT
    assert FamilyId.SHIFT4.label == "shift4"

def test_family_id_aliases():
    assert FamilyId.parse("Ex33") == FamilyId.SHIFT3
    assert FamilyId.parse("ex42") == FamilyId.SHIFT4
    assert FamilyId.parse("EX34") == FamilyId.COHERENT3
    assert FamilyId.parse("Ex43") == FamilyId.COHERENT4
    assert FamilyId.parse("Ex54", 5) == FamilyId.shift(5)
    assert FamilyId.parse("Ex55", 6) == FamilyId.coherent(6)
    with pytest.raises(BadParams):
        FamilyId.parse("Ex54")

def test_family_id_errors():
    with pytest.raises(BadParams):
        FamilyId.parse("shift")
    with pytest.raises(BadParams):
        FamilyId.parse("shift4", 5)
    with pytest.raises(BadParams):
        FamilyId.parse("werner")
    with pytest.raises(BadParams):
        FamilyId.shift(2)

def test_family_params():
    with pytest.raises(BadParams):
        FamilyParams((0.5, 0.6, -0.1, 0.1))
    with pytest.raises(BadParams):
        FamilyParams((0.5, 0.4))
    with pytest.raises(BadParams):
        FamilyParams((0.5, 0.5), mix_t=0.2)
    with pytest.raises(BadParams):
        build_family(FamilyId.SHIFT4, FamilyParams((0.5, 0.5)))


##########################
##### Testing the family states
##########################

def test_build_shift_family():
    rho = build_family(FamilyId.SHIFT3, FamilyParams((1, 0, 0)))
    omega = np.zeros(9)
    omega[[0, 4, 8]] = 1 / np.sqrt(3)
    assert np.allclose(rho.mat, np.outer(omega, omega))

    rho = build_family(FamilyId.SHIFT3, FamilyParams((0, 1, 0)))
    # |i, i+1> for i = 0, 1, 2
    assert np.allclose(np.diag(rho.mat).real, np.array([0, 1, 0, 0, 0, 1, 1, 0, 0]) / 3)

def test_build_coherent_family():
    rho = build_family(FamilyId.COHERENT3, FamilyParams((0, 1, 0)))
    shifted = np.zeros(9)
    shifted[[1, 5, 6]] = 1 / np.sqrt(3)
    assert np.allclose(rho.mat, np.outer(shifted, shifted))

def test_build_family_in_larger_dims():
    p = FamilyParams(tuple(random_simplex(3, rng)))
    small = build_family(FamilyId.SHIFT3, p)
    large = build_family(FamilyId.SHIFT3, p, dims=(4, 5))
    assert large.mat.shape == (20, 20)
    assert np.isclose(check_ppt(large).witness_value, min(check_ppt(small).witness_value, 0))
    with pytest.raises(BadDims):
        build_family(FamilyId.SHIFT3, p, dims=(2, 3))

def test_outside_support_noise():
    noise = outside_support_noise(4, (5, 5), [1.0])
    assert noise.mat[24, 24] == 1
    with pytest.raises(BadDims):
        outside_support_noise(4, (4, 4), [])

def test_mixing_with_outside_noise():
    # the noise is invisible to the map, so the witness scales with 1 - t
    dims = (5, 5)
    noise = outside_support_noise(4, dims, [1.0])
    pure = build_family(FamilyId.SHIFT4, shift4_point)
    mixed = build_family(FamilyId.SHIFT4, FamilyParams(shift4_point.q, mix_t=0.5, noise=noise), dims=dims)
    desc = MapDescriptor.cyclic(4, 1)
    assert np.isclose(check_posmap(mixed, desc).witness_value, 0.5 * check_posmap(pure, desc).witness_value)


##########################
##### Testing the order-4 shift family
##########################

def test_shift4_point():
    rho = build_family(FamilyId.SHIFT4, shift4_point)
    assert numeric_ppt(rho)
    assert ppt_closed_form(FamilyId.SHIFT4, shift4_point)

    norm = trace_norm(realign(rho))
    assert np.isclose(norm, 0.9401627, atol=1e-6)
    assert np.isclose(realign_norm_oracle(FamilyId.SHIFT4, shift4_point), norm, atol=1e-10)
    assert np.isclose(realign_norm_formula(FamilyId.SHIFT4, shift4_point), 0.941071, atol=1e-5)
    assert not check_ccnr(rho).detected

    result = check_posmap(rho, MapDescriptor.cyclic(4, 1))
    assert result.detected
    assert np.isclose(result.scaled_witness, -1 / 14)
    assert np.isclose(posmap_block_minimum(FamilyId.SHIFT4, shift4_point, 1), -1 / 14)

def test_shift4_realignment_only():
    p = FamilyParams((0.2, 0.15, 0.2, 0.45))
    rho = build_family(FamilyId.SHIFT4, p)
    assert numeric_ppt(rho) and ppt_closed_form(FamilyId.SHIFT4, p)
    assert np.isclose(trace_norm(realign(rho)), 1.05)
    assert check_ccnr(rho).detected
    assert not check_posmap(rho, MapDescriptor.cyclic(4, 1)).detected

def test_shift4_npt_point():
    p = FamilyParams((0.15, 0.3, 0.1, 0.45))
    rho = build_family(FamilyId.SHIFT4, p)
    assert not numeric_ppt(rho) and not ppt_closed_form(FamilyId.SHIFT4, p)
    assert np.isclose(realign_norm_oracle(FamilyId.SHIFT4, p), trace_norm(realign(rho)))
    assert not check_ccnr(rho).detected

def test_shift4_map_only():
    p = FamilyParams((0.1, 0.5, 0.35, 0.05))
    rho = build_family(FamilyId.SHIFT4, p)
    assert numeric_ppt(rho)
    assert not check_ccnr(rho).detected
    assert check_posmap(rho, MapDescriptor.cyclic(4, 1)).detected

def test_shift4_line():
    for s in (1 / 7, 1 / 12, 1 / 30):
        for mirror, k in ((False, 1), (True, 3)):
            rho = build_family(FamilyId.SHIFT4, shift4_line(s, mirror))
            assert numeric_ppt(rho)
            assert not check_ccnr(rho).detected
            assert check_posmap(rho, MapDescriptor.cyclic(4, k)).detected
    with pytest.raises(BadParams):
        shift4_line(0.2)


##########################
##### Testing the coherent families
##########################

def test_coherent3_ppt_entangled():
    p = FamilyParams((1 / 12, 2 / 12, 9 / 12))
    rho = build_family(FamilyId.COHERENT3, p)
    assert numeric_ppt(rho) and ppt_closed_form(FamilyId.COHERENT3, p)
    assert np.isclose(posmap_block_minimum(FamilyId.COHERENT3, p, 1), -1 / 12)
    assert check_posmap(rho, MapDescriptor.cyclic(3, 1)).detected

def test_coherent4_ppt():
    p = FamilyParams((1 / 15, 2 / 15, 6 / 15, 6 / 15))
    assert ppt_closed_form(FamilyId.COHERENT4, p)
    assert numeric_ppt(build_family(FamilyId.COHERENT4, p))

    p = FamilyParams((1 / 11, 2 / 11, 4 / 11, 4 / 11))
    assert not ppt_closed_form(FamilyId.COHERENT4, p)
    assert not numeric_ppt(build_family(FamilyId.COHERENT4, p))

    p = FamilyParams((0.1, 0.2, 0.35, 0.35))
    assert not numeric_ppt(build_family(FamilyId.COHERENT4, p))

def test_coherent4_pt_blocks():
    for _ in range(20):
        p = FamilyParams(tuple(random_simplex(4, rng)))
        numeric = min_eigenvalue(partial_transpose_first(build_family(FamilyId.COHERENT4, p)))
        blocks = min(min_eigenvalue(b) for b in coherent4_pt_blocks(p))
        assert np.isclose(numeric, blocks, atol=1e-10)

def test_coherent4_line():
    for s in (1 / 15, 1 / 25):
        for mirror, k in ((False, 1), (True, 3)):
            rho = build_family(FamilyId.COHERENT4, coherent4_line(s, mirror))
            assert numeric_ppt(rho)
            assert not check_ccnr(rho).detected
            assert check_posmap(rho, MapDescriptor.cyclic(4, k)).detected

def test_coherent_realignment_oracle():
    for fid in (FamilyId.COHERENT3, FamilyId.COHERENT4, FamilyId.coherent(5)):
        p = FamilyParams(tuple(random_simplex(fid.n, rng)))
        assert np.isclose(realign_norm_oracle(fid, p), trace_norm(realign(build_family(fid, p))))

def test_closed_form_unsupported():
    p = FamilyParams((0.2,) * 5)
    with pytest.raises(Unsupported):
        ppt_closed_form(FamilyId.coherent(5), p)
    with pytest.raises(Unsupported):
        realign_norm_formula(FamilyId.shift(5), p)


##########################
##### Testing the positive-map blocks
##########################

def test_map_blocks_spectrum():
    for fid in (FamilyId.SHIFT4, FamilyId.COHERENT4, FamilyId.shift(5)):
        p = FamilyParams(tuple(random_simplex(fid.n, rng)))
        rho = build_family(fid, p)
        for k in range(1, fid.n):
            phi = build_map(MapDescriptor.cyclic(fid.n, k))
            scaled = fid.n * apply_map_first(phi, rho).mat
            assert compare_spectra(direct_sum(*map_blocks(fid, p, k)).real, scaled, atol=1e-10)
            assert np.isclose(posmap_block_minimum(fid, p, k), min_eigenvalue(scaled), atol=1e-10)

def test_shift_closed_form_ppt():
    for n in (3, 4, 5):
        fid = FamilyId.shift(n)
        for _ in range(50):
            p = FamilyParams(tuple(random_simplex(n, rng)))
            lo = check_ppt(build_family(fid, p)).witness_value
            if abs(lo) > 1e-7:
                assert ppt_closed_form(fid, p) == (lo > 0)

def test_ppt_entangled_point():
    assert np.allclose(ppt_entangled_point(3, 1).q, np.array([2, 6, 1]) / 9)
    for n, k in ((3, 1), (3, 2), (4, 1), (4, 3), (5, 2), (6, 1)):
        p = ppt_entangled_point(n, k)
        rho = build_family(FamilyId.shift(n), p)
        assert numeric_ppt(rho)
        assert check_posmap(rho, MapDescriptor.cyclic(n, k)).detected
    with pytest.raises(BadParams):
        ppt_entangled_point(4, 2)

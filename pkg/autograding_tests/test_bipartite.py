import numpy as np
import pytest

from entmap.base.exceptions import BadDims, DimensionMismatch, InvalidState, NotUnitary, WeightSum
from entmap.base.matcore import is_psd, matrix_unit, min_eigenvalue, trace_norm
from entmap.base.misc import compare_spectra, random_density, random_hermitian, random_product_mixture, \
    random_unit_vector, random_unitary
from entmap.maps.posmaps import MapDescriptor, build_map
from entmap.states.bipartite import BipartiteDims, DensityMatrix, PureState, apply_map_first, convex_mix, \
    local_unitary, partial_transpose_first, pt_first, realign, schmidt, second_factor_major


rng = np.random.default_rng(3)

omega2 = PureState((2, 2), np.array([1, 0, 0, 1]) / np.sqrt(2))
rho_omega2 = omega2.density()
mixed4 = DensityMatrix.maximally_mixed((2, 2))


##########################
##### Testing states
##########################

def test_dims():
    dims = BipartiteDims(2, 3)
    assert dims.dim == 6
    assert dims.index(1, 2) == 5
    with pytest.raises(BadDims):
        BipartiteDims(0, 2)

def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        DensityMatrix((2, 2), np.eye(4))
    with pytest.raises(InvalidState):
        DensityMatrix((1, 2), np.diag([1.5, -0.5]))
    with pytest.raises(DimensionMismatch):
        DensityMatrix((2, 2), np.eye(3) / 3)

    # raw mode keeps a matrix that is not a state
    raw = DensityMatrix((1, 2), np.diag([1.5, -0.5]), raw=True)
    assert raw.raw and raw.mat[1, 1] == -0.5

def test_density_matrix_is_read_only():
    with pytest.raises(ValueError):
        rho_omega2.mat[0, 0] = 0

def test_density_matrix_equality():
    assert mixed4 == DensityMatrix((2, 2), np.eye(4) / 4)
    assert hash(mixed4) == hash(DensityMatrix((2, 2), np.eye(4) / 4))
    assert mixed4 != rho_omega2

def test_product_state():
    a, b = random_density(2, rng), random_density(3, rng)
    rho = DensityMatrix.product(a, b)
    assert (rho.dA, rho.dB) == (2, 3)
    assert np.allclose(rho.mat, np.kron(a, b))

def test_pure_state_norm():
    with pytest.raises(InvalidState):
        PureState((2, 2), [1, 1, 0, 0])
    with pytest.raises(DimensionMismatch):
        PureState((2, 2), [1, 0, 0])


##########################
##### Testing Schmidt decomposition
##########################

def test_schmidt_omega2():
    sd = schmidt(omega2)
    assert sd.rank == 2
    assert np.allclose(sd.coefficients, [1 / np.sqrt(2)] * 2)
    assert np.allclose(sd.reconstruct(), omega2.vec)

def test_schmidt_product():
    psi = PureState.product(random_unit_vector(3, rng), random_unit_vector(4, rng))
    sd = schmidt(psi)
    assert sd.rank == 1
    assert np.isclose(sd.coefficients[0], 1)

def test_schmidt_random():
    psi = PureState((3, 4), random_unit_vector(12, rng))
    sd = schmidt(psi)
    assert sd.rank == 3
    assert np.isclose(np.sum(sd.coefficients ** 2), 1)
    assert np.allclose(sd.reconstruct(), psi.vec)
    assert np.allclose(sd.left_unitary.conj().T @ sd.left_unitary, np.eye(3))
    assert np.allclose(sd.right_unitary.conj().T @ sd.right_unitary, np.eye(4))


##########################
##### Testing partial transpose and realignment
##########################

def test_partial_transpose_omega2():
    # the partial transpose of the Bell projection is half the swap
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.allclose(partial_transpose_first(rho_omega2), swap / 2)
    assert np.isclose(min_eigenvalue(partial_transpose_first(rho_omega2)), -0.5)

def test_partial_transpose_is_an_involution():
    m = random_density(6, rng)
    assert np.allclose(pt_first(pt_first(m, 2, 3), 2, 3), m)

def test_partial_transpose_of_product():
    a, b = random_density(2, rng), random_density(3, rng)
    rho = DensityMatrix.product(a, b)
    assert np.allclose(partial_transpose_first(rho), np.kron(a.T, b))

def test_realign_of_product():
    a, b = random_density(2, rng), random_density(3, rng)
    rho = DensityMatrix.product(a, b)
    R = realign(rho)
    assert R.shape == (4, 9)
    assert np.allclose(R, np.outer(a.ravel(), b.ravel()))

def test_realign_norms():
    psi = PureState.product(random_unit_vector(2, rng), random_unit_vector(3, rng))
    assert np.isclose(trace_norm(realign(psi.density())), 1)
    assert np.isclose(trace_norm(realign(rho_omega2)), 2)
    assert np.isclose(trace_norm(realign(mixed4)), 0.5)

def test_realign_norm_under_local_unitaries():
    for dA, dB in ((2, 3), (3, 3), (4, 2)):
        rho = DensityMatrix((dA, dB), random_density(dA * dB, rng))
        before = trace_norm(realign(rho))
        for _ in range(5):
            out = local_unitary(rho, random_unitary(dA, rng), random_unitary(dB, rng))
            assert np.isclose(trace_norm(realign(out)), before, atol=1e-9)

def test_second_factor_major():
    a, b = random_density(2, rng), random_density(3, rng)
    assert np.allclose(second_factor_major(np.kron(a, b), 2, 3), np.kron(b, a))


##########################
##### Testing operations on states
##########################

def test_apply_identity_map():
    rho = DensityMatrix((3, 2), random_density(6, rng))
    phi = build_map(MapDescriptor.identity(3))
    assert np.allclose(apply_map_first(phi, rho).mat, rho.mat)

def test_apply_map_dimension_mismatch():
    phi = build_map(MapDescriptor.identity(3))
    with pytest.raises(DimensionMismatch):
        apply_map_first(phi, rho_omega2)

def test_apply_reduction_map_to_omega2():
    out = apply_map_first(build_map(MapDescriptor.reduction2()), rho_omega2)
    assert out.raw and (out.dA, out.dB) == (2, 2)
    assert np.isclose(min_eigenvalue(out.mat), -0.5)

def test_apply_map_is_linear():
    phi = build_map(MapDescriptor.cyclic(3, 1))
    x = random_hermitian(6, rng) + 1j * random_hermitian(6, rng)
    y = random_hermitian(6, rng)
    a, b = 0.3 - 1.2j, 2.5
    combined = apply_map_first(phi, DensityMatrix((3, 2), a * x + b * y, raw=True)).mat
    separate = a * apply_map_first(phi, DensityMatrix((3, 2), x, raw=True)).mat \
        + b * apply_map_first(phi, DensityMatrix((3, 2), y, raw=True)).mat
    assert np.allclose(combined, separate, atol=1e-10)

def test_apply_map_on_basis_expansion():
    phi = build_map(MapDescriptor.cyclic(3, 1))
    rho = DensityMatrix((3, 2), random_density(6, rng))
    expanded = sum(rho.mat[r, c] * apply_map_first(phi, DensityMatrix((3, 2), matrix_unit(r, c, 6), raw=True)).mat
        for r in range(6) for c in range(6))
    assert np.allclose(apply_map_first(phi, rho).mat, expanded, atol=1e-10)

def test_convex_mix():
    rho = convex_mix([(0.5, rho_omega2), (0.5, mixed4)])
    assert np.allclose(rho.mat, (rho_omega2.mat + mixed4.mat) / 2)
    with pytest.raises(WeightSum):
        convex_mix([(0.5, rho_omega2), (0.4, mixed4)])
    with pytest.raises(WeightSum):
        convex_mix([])
    with pytest.raises(DimensionMismatch):
        convex_mix([(0.5, rho_omega2), (0.5, DensityMatrix.maximally_mixed((1, 4)))])

def test_local_unitary():
    rho = DensityMatrix((2, 3), random_density(6, rng))
    U, V = random_unitary(2, rng), random_unitary(3, rng)
    out = local_unitary(rho, U, V)
    assert compare_spectra(out.mat, rho.mat)
    # local unitaries keep the spectrum of the partial transpose
    assert compare_spectra(partial_transpose_first(out), partial_transpose_first(rho))
    with pytest.raises(NotUnitary):
        local_unitary(rho, 2 * np.eye(2), V)


##########################
##### Testing separable mixtures
##########################

def test_separable_mixtures_pass_both_criteria():
    sep_rng = np.random.default_rng(29)
    for _ in range(100):
        dA, dB = int(sep_rng.integers(2, 5)), int(sep_rng.integers(2, 5))
        terms = int(sep_rng.integers(1, 9))
        rho = DensityMatrix((dA, dB), random_product_mixture(dA, dB, terms, sep_rng))
        assert is_psd(partial_transpose_first(rho))[0]
        assert trace_norm(realign(rho)) <= 1 + 1e-9

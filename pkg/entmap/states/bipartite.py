from dataclasses import dataclass

import numpy as np
from numpy import linalg as LA

from entmap.base.exceptions import BadDims, DimensionMismatch, InvalidState, WeightSum
from entmap.base.matcore import DEFAULT_TOLERANCE, as_matrix, check_unitary, hermitize, is_psd


# Kets are 0-indexed: |i> (x) |j'> sits at flat index i*dB + j.
TRACE_SLACK = 1e-10
NORM_SLACK = 1e-10
WEIGHT_SLACK = 1e-12


@dataclass(frozen=True)
class BipartiteDims:
    dA: int
    dB: int

    def __post_init__(self):
        if self.dA < 1 or self.dB < 1:
            raise BadDims(f"factor dimensions must be positive, got ({self.dA}, {self.dB})")

    @property
    def dim(self):
        return self.dA * self.dB

    def index(self, i, j):
        return i * self.dB + j


def as_dims(dims):
    if isinstance(dims, BipartiteDims):
        return dims
    dA, dB = dims
    return BipartiteDims(int(dA), int(dB))


class DensityMatrix:

    def __init__(self, dims, mat, tol=DEFAULT_TOLERANCE, raw=False):
        self.dims = as_dims(dims)
        mat = as_matrix(mat)
        if mat.shape != (self.dims.dim, self.dims.dim):
            raise DimensionMismatch(
                f"matrix of shape {mat.shape} does not fit dims ({self.dims.dA}, {self.dims.dB})")

        # raw mode is for inspecting files that are not valid states
        if not raw:
            mat = hermitize(mat, tol)
            trace = np.trace(mat).real
            if abs(trace - 1.0) > TRACE_SLACK:
                raise InvalidState(f"trace is {trace}, expected 1")
            psd, lo = is_psd(mat, tol)
            if not psd:
                raise InvalidState(f"state is not positive semidefinite (min eigenvalue {lo})")

        mat.setflags(write=False)
        self.mat = mat
        self.raw = raw

    @property
    def dA(self):
        return self.dims.dA

    @property
    def dB(self):
        return self.dims.dB

    @classmethod
    def maximally_mixed(cls, dims):
        dims = as_dims(dims)
        return cls(dims, np.eye(dims.dim) / dims.dim)

    @classmethod
    def product(cls, rho_a, rho_b):
        rho_a, rho_b = as_matrix(rho_a), as_matrix(rho_b)
        return cls((rho_a.shape[0], rho_b.shape[0]), np.kron(rho_a, rho_b))

    def __eq__(self, other):
        return isinstance(other, DensityMatrix) and self.dims == other.dims \
            and np.array_equal(self.mat, other.mat)

    def __hash__(self):
        return hash((self.dims, self.mat.tobytes()))

    def __repr__(self):
        return f"DensityMatrix(dims=({self.dA}, {self.dB}))"


class PureState:

    def __init__(self, dims, vec):
        self.dims = as_dims(dims)
        vec = np.array(vec, dtype=np.complex128).ravel()
        if vec.shape[0] != self.dims.dim:
            raise DimensionMismatch(
                f"vector of length {vec.shape[0]} does not fit dims ({self.dims.dA}, {self.dims.dB})")
        if abs(LA.norm(vec) - 1.0) > NORM_SLACK:
            raise InvalidState(f"state vector has norm {LA.norm(vec)}, expected 1")
        vec.setflags(write=False)
        self.vec = vec

    @classmethod
    def product(cls, u, v):
        u, v = np.asarray(u, dtype=np.complex128), np.asarray(v, dtype=np.complex128)
        return cls((len(u), len(v)), np.kron(u, v))

    def density(self):
        return DensityMatrix(self.dims, np.outer(self.vec, self.vec.conj()))

    def __repr__(self):
        return f"PureState(dims=({self.dims.dA}, {self.dims.dB}))"


@dataclass(frozen=True)
class SchmidtDecomposition:
    """
    psi = sum_k coefficients[k] * left_basis[:, k] (x) right_basis[:, k].
    left_unitary and right_unitary complete the two bases; their leading
    columns are the Schmidt vectors.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    left_unitary: np.ndarray
    right_unitary: np.ndarray

    @property
    def rank(self):
        return len(self.coefficients)

    def reconstruct(self):
        vec = np.zeros(self.left_basis.shape[0] * self.right_basis.shape[0], dtype=np.complex128)
        for k, delta in enumerate(self.coefficients):
            vec += delta * np.kron(self.left_basis[:, k], self.right_basis[:, k])
        return vec


def schmidt(psi, cutoff=1e-12):
    M = psi.vec.reshape(psi.dims.dA, psi.dims.dB)
    U, s, Vh = LA.svd(M, full_matrices=True)
    r = int(np.sum(s > cutoff))
    return SchmidtDecomposition(
        coefficients=s[:r].copy(),
        left_basis=U[:, :r].copy(),
        right_basis=Vh[:r, :].T.copy(),
        left_unitary=U,
        right_unitary=Vh.T.copy(),
    )


def pt_first(mat, dA, dB):
    """ transpose on the first factor: out[(j, k), (i, l)] = mat[(i, k), (j, l)] """
    n = dA * dB
    return np.asarray(mat).reshape(dA, dB, dA, dB).transpose(2, 1, 0, 3).reshape(n, n)


def partial_transpose_first(rho):
    return pt_first(rho.mat, rho.dA, rho.dB)


def realign_matrix(mat, dA, dB):
    """ out[(i, j), (k, l)] = mat[(i, k), (j, l)], so rho_A (x) rho_B realigns to vec(rho_A) vec(rho_B)^T """
    return np.asarray(mat).reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3).reshape(dA * dA, dB * dB)


def realign(rho):
    return realign_matrix(rho.mat, rho.dA, rho.dB)


def apply_map_first(phi, rho):
    """
    computes (phi (x) I) rho = sum_ij phi(|i><j|) (x) B_ij for rho = sum_ij |i><j| (x) B_ij.
    The result is a raw DensityMatrix on C^{phi.dim_out} (x) C^{dB}; it need not be a state.
    """
    if phi.dim_in != rho.dA:
        raise DimensionMismatch(f"map acts on dimension {phi.dim_in}, state has dA = {rho.dA}")
    eye = np.eye(rho.dB)
    n = phi.dim_out * rho.dB
    out = np.zeros((n, n), dtype=np.complex128)
    for left, right in phi.terms:
        out += np.kron(left, eye) @ rho.mat @ np.kron(right, eye)
    return DensityMatrix((phi.dim_out, rho.dB), out, raw=True)


def convex_mix(states):
    if len(states) == 0:
        raise WeightSum("cannot mix an empty list of states")
    weights = np.array([float(w) for w, _ in states])
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_SLACK:
        raise WeightSum(f"weights must be nonnegative and sum to 1, got {weights.tolist()}")
    dims = states[0][1].dims
    if any(rho.dims != dims for _, rho in states):
        raise DimensionMismatch("all mixed states must share their dimensions")
    mat = sum(w * rho.mat for w, rho in states)
    return DensityMatrix(dims, mat)


def local_unitary(rho, u, v, tol=DEFAULT_TOLERANCE):
    """ (U (x) V) rho (U (x) V)^dagger """
    W = np.kron(check_unitary(u, tol), check_unitary(v, tol))
    return DensityMatrix(rho.dims, W @ rho.mat @ W.conj().T, tol)


def second_factor_major(mat, dA, dB):
    """ reorders the basis to |i> (x) |j'> -> j*dA + i, with the second factor slowest """
    n = dA * dB
    return np.asarray(mat).reshape(dA, dB, dA, dB).transpose(1, 0, 3, 2).reshape(n, n)

from dataclasses import dataclass

import numpy as np
from numpy import linalg as LA
from scipy import linalg as SLA

from entmap.base.exceptions import BadParams, NonFinite, NonSquare, NotHermitian, NotUnitary


# Every matrix in the package is a dense numpy array of complex128.
ComplexMatrix = np.ndarray


@dataclass(frozen=True)
class Tolerance:
    """
    psd_slack bounds how negative the smallest eigenvalue of a "positive"
    matrix may be, relative to max(1, largest eigenvalue); equality_slack
    bounds relative Frobenius deviations (Hermiticity, unitarity).
    """

    psd_slack: float = 1e-9
    equality_slack: float = 1e-10

    def __post_init__(self):
        if not (self.psd_slack >= 0 and self.equality_slack >= 0):
            raise BadParams(f"tolerances must be nonnegative, got {self}")


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min(self):
        return float(self.eigenvalues[0])

    @property
    def max(self):
        return float(self.eigenvalues[-1])

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def as_matrix(m):
    """ copies m into a 2-d complex array, rejecting NaN and Inf """
    mat = np.array(m, dtype=np.complex128)
    if mat.ndim != 2:
        raise BadParams(f"expected a 2-d array, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise NonFinite("matrix has NaN or infinite entries")
    return mat


def frozen(m):
    mat = as_matrix(m)
    mat.setflags(write=False)
    return mat


def square(m):
    mat = as_matrix(m)
    if mat.shape[0] != mat.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {mat.shape}")
    return mat


def dagger(m):
    return np.conj(m).T


def hermitize(m, tol=DEFAULT_TOLERANCE):
    """ returns (m + m†)/2 after checking that m is Hermitian within equality_slack """
    mat = square(m)
    scale = max(1.0, LA.norm(mat))
    if LA.norm(mat - dagger(mat)) > tol.equality_slack * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return (mat + dagger(mat)) / 2


def is_hermitian(m, tol=DEFAULT_TOLERANCE):
    try:
        hermitize(m, tol)
    except NotHermitian:
        return False
    return True


def eig_hermitian(m, tol=DEFAULT_TOLERANCE):
    mat = hermitize(m, tol)
    vals, vecs = SLA.eigh(mat)
    return HermitianSpectrum(vals, vecs)


def eigvals_hermitian(m, tol=DEFAULT_TOLERANCE):
    """ ascending real eigenvalues """
    return SLA.eigh(hermitize(m, tol), eigvals_only=True)


def min_eigenvalue(m, tol=DEFAULT_TOLERANCE):
    return float(eigvals_hermitian(m, tol)[0])


def is_psd(m, tol=DEFAULT_TOLERANCE):
    """ returns (verdict, smallest eigenvalue) """
    vals = eigvals_hermitian(m, tol)
    lo, hi = float(vals[0]), float(vals[-1])
    return lo >= -tol.psd_slack * max(1.0, hi), lo


def singular_values(m):
    mat = as_matrix(m)
    if mat.size == 0:
        return np.zeros(0)
    return SLA.svdvals(mat)


def trace_norm(m):
    return float(np.sum(singular_values(m)))


def kron(a, b):
    return np.kron(as_matrix(a), as_matrix(b))


def det(m):
    mat = square(m)
    if mat.shape[0] == 0:
        return complex(1.0)
    # LU with partial pivoting
    return complex(SLA.det(mat))


def direct_sum(*blocks):
    return SLA.block_diag(*[as_matrix(b) for b in blocks]).astype(np.complex128)


def unitary_defect(u):
    mat = square(u)
    return LA.norm(dagger(mat) @ mat - np.eye(mat.shape[0]))


def check_unitary(u, tol=DEFAULT_TOLERANCE):
    mat = square(u)
    if unitary_defect(mat) > tol.equality_slack:
        raise NotUnitary("matrix is not unitary within tolerance")
    return mat


def matrix_unit(i, j, rows, cols=None):
    """ the matrix with a single one at (i, j) """
    cols = rows if cols is None else cols
    E = np.zeros((rows, cols), dtype=np.complex128)
    E[i, j] = 1.0
    return E


def embed(m, rows, cols):
    """ zero-pads m into the top-left corner of a rows x cols matrix """
    mat = as_matrix(m)
    if mat.shape[0] > rows or mat.shape[1] > cols:
        raise BadParams(f"cannot embed shape {mat.shape} into ({rows}, {cols})")
    out = np.zeros((rows, cols), dtype=np.complex128)
    out[:mat.shape[0], :mat.shape[1]] = mat
    return out

import numpy as np
from numpy import linalg as LA

from entmap.base.exceptions import BadParams


def compositions(total, parts, prefix=()):
    """ nonnegative integer tuples of length parts summing to total, in lexicographic order """
    if parts == 1:
        yield prefix + (total,)
        return
    for s in range(total + 1):
        yield from compositions(total - s, parts - 1, prefix + (s,))


def simplex_lattice(n, grid):
    """
    points s/grid of the probability simplex with integer s summing to grid.
    grid 1 is the degenerate sweep and returns only the uniform point.
    """
    if n < 1:
        raise BadParams(f"simplex dimension must be positive, got {n}")
    if grid < 1:
        raise BadParams(f"grid must be positive, got {grid}")
    if grid == 1:
        return [np.full(n, 1.0 / n)]
    return [np.array(s, dtype=float) / grid for s in compositions(grid, n)]


def random_simplex(n, rng):
    return rng.dirichlet(np.ones(n))


def random_unit_vector(d, rng, real=False):
    x = rng.standard_normal(d)
    if not real:
        x = x + 1j * rng.standard_normal(d)
    return x / LA.norm(x)


def random_unitary(d, rng):
    """ Haar-random unitary via QR of a complex Ginibre matrix """
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = LA.qr(Z)
    phases = np.diagonal(R) / np.abs(np.diagonal(R))
    return Q * phases


def random_hermitian(d, rng):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (G + G.conj().T) / 2


def random_density(d, rng, rank=None):
    rank = d if rank is None else rank
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_product_mixture(dA, dB, terms, rng):
    """ a random convex combination of product states, separable by construction """
    weights = random_simplex(terms, rng)
    rho = np.zeros((dA * dB, dA * dB), dtype=np.complex128)
    for w in weights:
        rank_a = int(rng.integers(1, dA + 1))
        rank_b = int(rng.integers(1, dB + 1))
        rho += w * np.kron(random_density(dA, rng, rank_a), random_density(dB, rng, rank_b))
    return rho


def compare_spectra(m1, m2, atol=1e-10) -> bool:
    """ compares two Hermitian matrices up to unitary equivalence """
    e1 = LA.eigvalsh(np.asarray(m1))
    e2 = LA.eigvalsh(np.asarray(m2))
    return e1.shape == e2.shape and np.allclose(e1, e2, atol=atol)


def compare_singular_values(m1, m2, atol=1e-10) -> bool:
    s1 = np.sort(LA.svd(np.asarray(m1), compute_uv=False))
    s2 = np.sort(LA.svd(np.asarray(m2), compute_uv=False))
    if s1.shape != s2.shape:
        # zero padding may differ in size
        k = min(len(s1), len(s2))
        return np.allclose(s1[-k:], s2[-k:], atol=atol) and \
            np.allclose(s1[:-k], 0, atol=atol) and np.allclose(s2[:-k], 0, atol=atol)
    return np.allclose(s1, s2, atol=atol)


def sig(x, digits=12):
    """ formats a real number with a fixed number of significant digits """
    return format(float(x), f".{digits}g")

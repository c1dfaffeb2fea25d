import logging
from dataclasses import dataclass
from itertools import islice
from math import comb

import numpy as np
from numpy import linalg as LA

from entmap.base.config import DEFAULT_SEED
from entmap.base.exceptions import BadParams, CertificateError
from entmap.base.misc import compositions


logger = logging.getLogger(__name__)

CHUNK = 1 << 16
RANDOM_POINTS = 10_000


@dataclass(frozen=True)
class BMatrixSpec:
	t: tuple

	def __post_init__(self):
		object.__setattr__(self, "t", tuple(float(x) for x in self.t))
		if len(self.t) < 2:
			raise BadParams(f"B matrices need n >= 2, got {len(self.t)}")

	@property
	def n(self):
		return len(self.t)


@dataclass(frozen=True)
class HPoint:
	""" a point of the nonnegative orthant; the positivity argument restricts to prod x_i = 1 """

	x: tuple

	def __post_init__(self):
		object.__setattr__(self, "x", tuple(float(v) for v in self.x))
		if len(self.x) < 1 or any(not v >= 0 for v in self.x):
			raise BadParams(f"h is evaluated on nonnegative points, got {self.x}")

	@property
	def n(self):
		return len(self.x)

	@property
	def constrained(self):
		return abs(np.prod(self.x) - 1.0) <= 1e-9


def b_matrix(spec):
	""" diagonal t, off-diagonal -1 """
	B = -np.ones((spec.n, spec.n))
	B[np.diag_indices(spec.n)] = spec.t
	return B


def f_matrix(r):
	r = np.asarray(r, dtype=float)
	n = len(r)
	M = -np.outer(r, r)
	M[np.diag_indices(n)] = (n - 2) * r ** 2 + np.roll(r, -1) ** 2
	return M


def f_eval(r):
	""" determinant of the matrix with diagonal (n-2) r_i^2 + r_{i+1}^2 and off-diagonal -r_i r_j """
	if len(r) < 3:
		raise BadParams(f"f is defined for n >= 3, got {len(r)}")
	return float(LA.det(f_matrix(r)))


def _h_det(x):
	x = np.asarray(x, dtype=float)
	n = len(x)
	H = -np.ones((n, n))
	H[np.diag_indices(n)] = n - 2 + x
	return float(LA.det(H))


def h_eval(p):
	if not isinstance(p, HPoint):
		p = HPoint(tuple(p))
	return _h_det(p.x)


def h_closed_form(x):
	""" det(D - 11^T) = prod d_i (1 - sum 1/d_i) with d_i = n - 1 + x_i """
	d = len(x) - 1 + np.asarray(x, dtype=float)
	return float(np.prod(d) * (1.0 - np.sum(1.0 / d)))


def h_from_f(r):
	""" h at x_i = r_{i+1}^2 / r_i^2, through f = (prod r_i)^2 h; needs all r_i nonzero """
	r = np.asarray(r, dtype=float)
	assert np.all(r != 0), "the factorization needs strictly positive r"
	return f_eval(r) / np.prod(r) ** 2


def ratios(r):
	r = np.asarray(r, dtype=float)
	return np.roll(r, -1) ** 2 / r ** 2


@dataclass(frozen=True)
class MCoefficients:
	"""
	h on n variables is multilinear and symmetric; mk[k-1] is the
	coefficient of every product of k distinct variables and -m0 the
	constant term.
	"""

	n: int
	m0: int
	mk: tuple

	@staticmethod
	def closed_form(n, k):
		if k == n:
			return 1
		return (k - 1) * (n - 1) ** (n - 1 - k)

	@property
	def weighted_sum(self):
		return sum(comb(self.n, k) * m for k, m in enumerate(self.mk, start=1))

	@property
	def literal_sum(self):
		return sum(self.mk)


def m_coefficients(n):
	""" extracts the coefficients of h by evaluation on {0,1}^n and inclusion-exclusion """
	if n < 3:
		raise BadParams(f"coefficient extraction needs n >= 3, got {n}")

	size = 1 << n
	c = np.array([_h_det([(mask >> i) & 1 for i in range(n)]) for mask in range(size)])
	for i in range(n):
		bit = 1 << i
		for mask in range(size):
			if mask & bit:
				c[mask] -= c[mask ^ bit]

	exact = np.rint(c)
	if np.any(np.abs(c - exact) > 1e-6 * np.maximum(1.0, np.abs(exact))):
		raise CertificateError(f"coefficients of h for n = {n} are not integers")
	exact = exact.astype(np.int64)

	by_degree = {}
	for mask in range(size):
		k = bin(mask).count("1")
		if by_degree.setdefault(k, exact[mask]) != exact[mask]:
			raise CertificateError(f"h for n = {n} is not symmetric in degree {k}")

	m = MCoefficients(n, int(-by_degree[0]), tuple(int(by_degree[k]) for k in range(1, n + 1)))

	for k in range(1, n + 1):
		expected = MCoefficients.closed_form(n, k)
		if m.mk[k - 1] != expected:
			raise CertificateError(f"M_{k} = {m.mk[k - 1]} for n = {n}, expected {expected}")
		if k < n and m.mk[k - 1] != int(round(_h_det([k] * (n - k)))):
			raise CertificateError(f"M_{k} does not match h on {n - k} variables at ({k}, ..., {k})")
	if m.m0 != (n - 1) ** (n - 1):
		raise CertificateError(f"M_0 = {m.m0} for n = {n}, expected {(n - 1) ** (n - 1)}")

	logger.debug("n = %d: M_0 = %d, M = %s", n, m.m0, m.mk)
	return m


def elementary_symmetric(x, k):
	""" the k-th elementary symmetric polynomial of x """
	x = np.asarray(x, dtype=float)
	if not 0 <= k <= len(x):
		raise BadParams(f"degree {k} out of range for {len(x)} variables")
	# prod (t + x_i) = sum_k e_k t^{n-k}
	return float(np.poly(-x)[k])


@dataclass(frozen=True)
class GridMinimum:
	value: float
	argmin: tuple
	points: int


def _batch_f(R):
	n = R.shape[1]
	M = -R[:, :, None] * R[:, None, :]
	idx = np.arange(n)
	M[:, idx, idx] = (n - 2) * R ** 2 + np.roll(R, -1, axis=1) ** 2
	return LA.det(M)


def grid_min_f(n, resolution, seed=DEFAULT_SEED, random_points=RANDOM_POINTS):
	"""
	minimum of f over the unit-sphere points r = sqrt(s / resolution) of the
	nonnegative orthant, followed by seeded random points. The first
	minimizer in scan order wins ties.
	"""
	if not 3 <= n <= 6:
		raise BadParams(f"grid minimization supports n in 3..6, got {n}")
	if not 1 <= resolution <= 60:
		raise BadParams(f"resolution must lie in 1..60, got {resolution}")

	best, where, seen = np.inf, None, 0
	lattice = compositions(resolution, n)
	while True:
		chunk = list(islice(lattice, CHUNK))
		if not chunk:
			break
		R = np.sqrt(np.array(chunk, dtype=float) / resolution)
		vals = _batch_f(R)
		i = int(np.argmin(vals))
		if vals[i] < best:
			best, where = float(vals[i]), tuple(R[i])
		seen += len(chunk)
		logger.debug("f grid n = %d: %d points, running min %.3e", n, seen, best)

	if random_points > 0:
		rng = np.random.default_rng(seed)
		R = np.sqrt(rng.dirichlet(np.ones(n), size=random_points))
		vals = _batch_f(R)
		i = int(np.argmin(vals))
		if vals[i] < best:
			best, where = float(vals[i]), tuple(R[i])
		seen += random_points

	return GridMinimum(best, where, seen)

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy import linalg as LA
from frozendict import frozendict

from entmap.base.exceptions import BadParams, DimensionMismatch, NotHermitian, NotHermiticityPreserving, ParseError
from entmap.base.matcore import DEFAULT_TOLERANCE, as_matrix, check_unitary, dagger, embed, hermitize, is_psd, matrix_unit, square
from entmap.base.misc import random_unit_vector, simplex_lattice


logger = logging.getLogger(__name__)

RANK_SLACK = 1e-10
SPAN_SLACK = 1e-8
CONTRACTION_SLACK = 1e-9


class Family:
	IDENTITY = "identity"
	REDUCTION2 = "reduction2"
	WEIGHTED2 = "weighted2"
	CYCLIC3 = "cyclic3"
	CYCLIC4 = "cyclic4"
	CYCLIC = "cyclic"
	DIAGONAL = "diagonal"
	PERMUTATION = "permutation"

	ALL = (IDENTITY, REDUCTION2, WEIGHTED2, CYCLIC3, CYCLIC4, CYCLIC, DIAGONAL, PERMUTATION)


class NcpVerdict:
	PROVED_NCP = "ProvedNCP"
	INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class MapDescriptor:
	"""
	Names a built-in map. n is the support dimension; the map acts on
	embed_in x embed_in matrices and returns embed_out x embed_out ones,
	annihilating everything outside the leading n x n corner.
	"""

	family: str
	n: int = 0
	k: int = 0
	t: tuple = ()
	pi: tuple = ()
	embed_in: int = 0
	embed_out: int = 0

	def __post_init__(self):
		set_ = lambda name, value: object.__setattr__(self, name, value)

		if self.family == Family.IDENTITY:
			if self.n < 1:
				raise BadParams(f"identity needs a positive dimension, got {self.n}")
		elif self.family in (Family.REDUCTION2, Family.WEIGHTED2):
			set_("n", 2)
		elif self.family == Family.CYCLIC3:
			if self.k not in (1, 2):
				raise BadParams(f"cyclic3 has variants 1 and 2, got {self.k}")
			set_("n", 3)
		elif self.family == Family.CYCLIC4:
			if self.k not in (1, 2, 3):
				raise BadParams(f"cyclic4 has variants 1, 2 and 3, got {self.k}")
			set_("n", 4)
		elif self.family == Family.CYCLIC:
			if self.n < 3:
				raise BadParams(f"cyclic maps need n >= 3, got {self.n}")
			if not 1 <= self.k <= self.n - 1:
				raise BadParams(f"cyclic shift k must lie in 1..{self.n - 1}, got {self.k}")
		elif self.family == Family.DIAGONAL:
			t = tuple(float(x) for x in self.t)
			if len(t) == 0 or any(not np.isfinite(x) or x <= 0 for x in t):
				raise BadParams(f"diagonal weights must be positive, got {self.t}")
			set_("t", t)
			set_("n", len(t))
		elif self.family == Family.PERMUTATION:
			pi = tuple(int(x) for x in self.pi)
			if len(pi) < 2 or sorted(pi) != list(range(len(pi))):
				raise BadParams(f"not a permutation of 0..n-1: {self.pi}")
			set_("pi", pi)
			set_("n", len(pi))
		else:
			raise BadParams(f"unknown map family {self.family!r}")

		if self.embed_in == 0:
			set_("embed_in", self.n)
		if self.embed_out == 0:
			set_("embed_out", self.n)
		if self.embed_in < self.n or self.embed_out < self.n:
			raise BadParams(f"cannot embed a map of support {self.n} into ({self.embed_in}, {self.embed_out})")

	@classmethod
	def identity(cls, n):
		return cls(Family.IDENTITY, n=n)

	@classmethod
	def reduction2(cls):
		return cls(Family.REDUCTION2)

	@classmethod
	def weighted2(cls):
		return cls(Family.WEIGHTED2)

	@classmethod
	def cyclic3(cls, variant=1):
		return cls(Family.CYCLIC3, k=variant)

	@classmethod
	def cyclic4(cls, variant=1):
		return cls(Family.CYCLIC4, k=variant)

	@classmethod
	def cyclic(cls, n, k):
		return cls(Family.CYCLIC, n=n, k=k)

	@classmethod
	def diagonal(cls, t):
		return cls(Family.DIAGONAL, t=tuple(t))

	@classmethod
	def permutation(cls, pi):
		return cls(Family.PERMUTATION, pi=tuple(pi))

	def embedded(self, dim_in, dim_out=None):
		dim_out = dim_in if dim_out is None else dim_out
		return MapDescriptor(self.family, self.n, self.k, self.t, self.pi, dim_in, dim_out)

	@property
	def shift(self):
		""" the cyclic shift i -> i + k of the off-diagonal terms, if any """
		if self.family in (Family.CYCLIC, Family.CYCLIC3, Family.CYCLIC4):
			return tuple((i + self.k) % self.n for i in range(self.n))
		if self.family == Family.PERMUTATION:
			return self.pi
		return None

	@property
	def certified(self):
		""" whether positivity of the map is established in closed form """
		if self.family == Family.DIAGONAL:
			# diag(t) - 11^T is PSD iff sum 1/t_i <= 1
			return sum(1.0 / x for x in self.t) <= 1.0 + 1e-12
		return True

	@property
	def label(self):
		if self.family in (Family.REDUCTION2, Family.WEIGHTED2):
			return self.family
		if self.family == Family.IDENTITY:
			return f"identity-{self.n}"
		if self.family == Family.CYCLIC:
			return f"cyclic-{self.n}-{self.k}"
		if self.family in (Family.CYCLIC3, Family.CYCLIC4):
			return f"{self.family}-{self.k}"
		if self.family == Family.DIAGONAL:
			return "diagonal-" + "-".join(format(x, "g") for x in self.t)
		return "permutation-" + "-".join(str(x) for x in self.pi)


@dataclass(frozen=True)
class KrausDifferenceForm:
	""" X -> sum_i C_i X C_i^dagger - sum_j D_j X D_j^dagger """

	plus: tuple
	minus: tuple = ()

	def __post_init__(self):
		plus = tuple(_frozen(C) for C in self.plus)
		minus = tuple(_frozen(D) for D in self.minus)
		shapes = {C.shape for C in plus + minus}
		if len(shapes) > 1:
			raise DimensionMismatch(f"Kraus operators disagree in shape: {sorted(shapes)}")
		object.__setattr__(self, "plus", plus)
		object.__setattr__(self, "minus", minus)

	@property
	def shape(self):
		""" (dim_out, dim_in) """
		return (self.plus + self.minus)[0].shape

	def terms(self):
		return tuple((C, dagger(C)) for C in self.plus) + tuple((-D, dagger(D)) for D in self.minus)

	def __call__(self, x):
		x = as_matrix(x)
		out = sum(C @ x @ dagger(C) for C in self.plus)
		return out - sum((D @ x @ dagger(D) for D in self.minus), np.zeros_like(out))


def _frozen(m):
	mat = as_matrix(m)
	mat.setflags(write=False)
	return mat


class ElementaryOperator:

	def __init__(self, dim_in, dim_out, terms, form=None, descriptor=None, label=None):

		# DEFINITION
		# An elementary operator is a linear map Φ : M_in → M_out
		#   Φ(X) = Σ_t A_t X B_t
		# with finitely many terms, A_t of shape out × in and B_t of shape in × out.

		self.dim_in = dim_in
		self.dim_out = dim_out

		terms = tuple((_frozen(A), _frozen(B)) for A, B in terms)
		if len(terms) == 0:
			raise BadParams("an elementary operator needs at least one term")
		for A, B in terms:
			if A.shape != (dim_out, dim_in) or B.shape != (dim_in, dim_out):
				raise DimensionMismatch(
					f"term of shapes {A.shape}, {B.shape} does not fit a map {dim_in} -> {dim_out}")
		self.terms = terms

		# the Kraus-difference form, when the map was built from one
		self.form = form
		self.descriptor = descriptor
		if label is None:
			label = descriptor.label if descriptor is not None else "map"
		self.label = label

	@classmethod
	def from_form(cls, form, descriptor=None, label=None):
		dim_out, dim_in = form.shape
		return cls(dim_in, dim_out, form.terms(), form=form, descriptor=descriptor, label=label)

	@property
	def num_terms(self):
		return len(self.terms)

	def __call__(self, x):
		return evaluate(self, x)

	def __repr__(self):
		return f"ElementaryOperator({self.label}: {self.dim_in} -> {self.dim_out}, {self.num_terms} terms)"


@dataclass(frozen=True)
class ChoiMatrix:
	mat: np.ndarray
	dim_in: int
	dim_out: int


@dataclass(frozen=True)
class NcpCheck:
	verdict: str
	min_norm: float


def _cyclic_form(n, shift):
	plus = [np.sqrt(n - 1) * matrix_unit(i, i, n) for i in range(n)]
	plus += [matrix_unit(i, shift[i], n) for i in range(n)]
	return plus, [np.eye(n)]


def build_map(desc):
	""" builds the Kraus-difference form of a built-in map, zero-padded to the descriptor's dims """
	n = desc.n
	E = lambda i, j: matrix_unit(i, j, n)

	if desc.family == Family.IDENTITY:
		plus, minus = [np.eye(n)], []
	elif desc.family == Family.REDUCTION2:
		# A -> tr(A) I - A
		plus, minus = [E(0, 0), E(1, 1), E(0, 1), E(1, 0)], [E(0, 0) + E(1, 1)]
	elif desc.family == Family.WEIGHTED2:
		plus, minus = [2 * E(0, 0) + E(1, 1), E(0, 1), E(1, 0)], [np.eye(2)]
	elif desc.family in (Family.CYCLIC, Family.CYCLIC3, Family.CYCLIC4, Family.PERMUTATION):
		plus, minus = _cyclic_form(n, desc.shift)
	elif desc.family == Family.DIAGONAL:
		plus = [np.sqrt(x) * E(i, i) for i, x in enumerate(desc.t)]
		minus = [np.eye(n)]
	else:
		raise BadParams(f"unknown map family {desc.family!r}")

	pad = lambda m: embed(m, desc.embed_out, desc.embed_in)
	form = KrausDifferenceForm(tuple(pad(C) for C in plus), tuple(pad(D) for D in minus))
	return ElementaryOperator.from_form(form, descriptor=desc)


def evaluate(phi, x):
	x = square(x)
	if x.shape[0] != phi.dim_in:
		raise DimensionMismatch(f"map acts on {phi.dim_in} x {phi.dim_in} matrices, got {x.shape}")
	out = np.zeros((phi.dim_out, phi.dim_out), dtype=np.complex128)
	for A, B in phi.terms:
		out += A @ x @ B
	return out


def evaluate_batch(phi, xs):
	""" evaluates phi on a stack of matrices of shape (batch, dim_in, dim_in) """
	out = np.zeros((xs.shape[0], phi.dim_out, phi.dim_out), dtype=np.complex128)
	for A, B in phi.terms:
		out += A @ xs @ B
	return out


def choi(phi):
	""" C = sum_ij |i><j| (x) phi(|i><j|) """
	d, e = phi.dim_in, phi.dim_out
	mat = np.zeros((d * e, d * e), dtype=np.complex128)
	for i in range(d):
		for j in range(d):
			mat[i * e:(i + 1) * e, j * e:(j + 1) * e] = evaluate(phi, matrix_unit(i, j, d))
	return ChoiMatrix(mat, d, e)


def is_hermiticity_preserving(phi, tol=DEFAULT_TOLERANCE):
	try:
		hermitize(choi(phi).mat, tol)
	except NotHermitian:
		return False
	return True


def is_completely_positive(phi, tol=DEFAULT_TOLERANCE):
	""" returns (verdict, smallest eigenvalue of the Choi matrix) """
	C = choi(phi).mat
	try:
		C = hermitize(C, tol)
	except NotHermitian:
		raise NotHermiticityPreserving(f"{phi.label} does not preserve Hermiticity")
	return is_psd(C, tol)


def ncp_quick_check(form):
	"""
	Looks for a D_j that is not a contractive linear combination of the C_i:
	such a D_j proves the map is not completely positive.
	"""
	if len(form.plus) == 0:
		raise BadParams("the quick check needs a nonempty plus-list")
	if len(form.minus) == 0:
		return NcpCheck(NcpVerdict.INCONCLUSIVE, 0.0)

	A = np.column_stack([C.ravel() for C in form.plus])
	verdict, worst = NcpVerdict.INCONCLUSIVE, 0.0
	for D in form.minus:
		d = D.ravel()
		# rcond=None gives the minimum-norm solution
		coef = LA.lstsq(A, d, rcond=None)[0]
		norm = float(LA.norm(coef))
		worst = max(worst, norm)
		if LA.norm(A @ coef - d) > SPAN_SLACK or norm > 1.0 + CONTRACTION_SLACK:
			verdict = NcpVerdict.PROVED_NCP
	return NcpCheck(verdict, worst)


def conjugate(phi, u, v, tol=DEFAULT_TOLERANCE):
	""" the map X -> V^dagger phi(U^dagger X U) V """
	u, v = check_unitary(u, tol), check_unitary(v, tol)
	if u.shape[0] != phi.dim_in or v.shape[0] != phi.dim_out:
		raise DimensionMismatch(
			f"unitaries of sizes {u.shape[0]}, {v.shape[0]} do not fit a map {phi.dim_in} -> {phi.dim_out}")

	label = f"{phi.label}^UV"
	if phi.form is not None:
		form = KrausDifferenceForm(
			tuple(dagger(v) @ C @ dagger(u) for C in phi.form.plus),
			tuple(dagger(v) @ D @ dagger(u) for D in phi.form.minus))
		return ElementaryOperator.from_form(form, label=label)

	terms = [(dagger(v) @ A @ dagger(u), u @ B @ v) for A, B in phi.terms]
	return ElementaryOperator(phi.dim_in, phi.dim_out, terms, label=label)


def order_upper_bound(phi):
	"""
	ranks of the smallest input and output projections P, Q with
	phi(X) = Q phi(P X P) Q that can be read off the terms. Exact for the
	built-in maps; an upper bound on the order in general.
	"""
	ins = np.hstack([dagger(A) for A, _ in phi.terms] + [B for _, B in phi.terms])
	outs = np.hstack([A for A, _ in phi.terms] + [dagger(B) for _, B in phi.terms])
	rank = lambda m: 0 if not np.any(m) else int(LA.matrix_rank(m, tol=RANK_SLACK))
	return rank(ins), rank(outs)


def _rank_one_min(phi, vecs):
	X = vecs[:, :, None] * vecs[:, None, :].conj()
	Y = evaluate_batch(phi, X)
	Y = (Y + np.conj(np.swapaxes(Y, 1, 2))) / 2
	return float(np.min(LA.eigvalsh(Y)[:, 0]))


def sample_min_eigenvalue(phi, probes, rng, grid=6, batch=4096):
	"""
	smallest eigenvalue of phi(|x><x|) seen over `probes` Haar-random unit
	vectors and the real vectors sqrt(s) for s on a simplex lattice.
	A negative value refutes positivity; a nonnegative one is only evidence.
	"""
	d = phi.dim_in
	lattice = np.sqrt(np.array(simplex_lattice(d, grid)))
	lo = _rank_one_min(phi, lattice.astype(np.complex128))

	done = 0
	while done < probes:
		b = min(batch, probes - done)
		vecs = np.array([random_unit_vector(d, rng) for _ in range(b)])
		lo = min(lo, _rank_one_min(phi, vecs))
		done += b
	logger.debug("sampled %s on %d probes and %d lattice points: min eigenvalue %.3e",
		phi.label, probes, len(lattice), lo)
	return lo


def ones_witness(phi):
	""" smallest eigenvalue of phi applied to the unnormalized all-ones projection """
	x = np.ones(phi.dim_in)
	return float(LA.eigvalsh(hermitize(evaluate(phi, np.outer(x, x))))[0])


def describe(phi):
	""" a JSON-ready summary of the Kraus-difference terms and the Choi spectrum """
	pair = lambda m: [[[float(z.real), float(z.imag)] for z in row] for row in m]
	_, lo = is_completely_positive(phi)
	summary = {
		"label": phi.label,
		"dim_in": phi.dim_in,
		"dim_out": phi.dim_out,
		"order": list(order_upper_bound(phi)),
		"choi_min_eigenvalue": lo,
	}
	if phi.form is not None:
		check = ncp_quick_check(phi.form)
		summary["plus"] = [pair(C) for C in phi.form.plus]
		summary["minus"] = [pair(D) for D in phi.form.minus]
		summary["ncp_quick_check"] = {"verdict": check.verdict, "min_norm": check.min_norm}
	return frozendict(summary)


MAP_ALIASES = frozendict({
	"delta": Family.DIAGONAL,
	"deltat": Family.DIAGONAL,
	"perm": Family.PERMUTATION,
	"psipi": Family.PERMUTATION,
	"phi": Family.CYCLIC,
	"phink": Family.CYCLIC,
	"phi0": Family.REDUCTION2,
	"psi0": Family.WEIGHTED2,
	"phi33": Family.CYCLIC3,
	"phi33prime": Family.CYCLIC3,
	"phi4": Family.CYCLIC4,
})

# variant picked when a cyclic3 / cyclic4 name comes without one
DEFAULT_VARIANTS = frozendict({"phi33prime": 2})


def map_family(name):
	""" canonical family and default variant of a map name; case-insensitive """
	name = name.strip().lower()
	family = MAP_ALIASES.get(name, name)
	if family not in Family.ALL:
		raise ParseError(f"unknown map family {name!r}")
	return family, DEFAULT_VARIANTS.get(name, 1)


def _ints(text, spec):
	try:
		return tuple(int(x) for x in text.split(","))
	except ValueError:
		raise ParseError(f"expected comma-separated integers in map spec {spec!r}")


def parse_map_spec(spec):
	"""
	Parses the command-line map syntax:
		identity:n | reduction2 | weighted2 | cyclic3:v | cyclic4:v | cyclic:n:k
		delta:t1,t2,... | perm:p0,p1,...
	The names of MAP_ALIASES are accepted in place of the heads, so
	phi:4:1, Phi0 or Phi33Prime parse too.
	"""
	parts = spec.strip().split(":")
	try:
		head, variant = map_family(parts[0])
	except ParseError:
		raise ParseError(f"unrecognized map spec {spec!r}")
	args = parts[1:]
	try:
		if head in (Family.REDUCTION2, Family.WEIGHTED2) and not args:
			return MapDescriptor(head)
		if head == Family.IDENTITY and len(args) == 1:
			return MapDescriptor.identity(int(args[0]))
		if head in (Family.CYCLIC3, Family.CYCLIC4) and len(args) <= 1:
			return MapDescriptor(head, k=int(args[0]) if args else variant)
		if head == Family.CYCLIC and len(args) == 2:
			return MapDescriptor.cyclic(int(args[0]), int(args[1]))
		if head == Family.DIAGONAL and len(args) == 1:
			return MapDescriptor.diagonal(float(x) for x in args[0].split(","))
		if head == Family.PERMUTATION and len(args) == 1:
			return MapDescriptor.permutation(_ints(args[0], spec))
	except ValueError:
		raise ParseError(f"malformed number in map spec {spec!r}")
	raise ParseError(f"unrecognized map spec {spec!r}")

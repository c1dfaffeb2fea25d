from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from frozendict import frozendict

from entmap.base.exceptions import DimensionMismatch, UncertifiedMap
from entmap.base.matcore import DEFAULT_TOLERANCE, min_eigenvalue, trace_norm
from entmap.base.misc import random_unitary
from entmap.maps.posmaps import Family, MapDescriptor, build_map, conjugate
from entmap.states.bipartite import apply_map_first, partial_transpose_first, realign, schmidt


logger = logging.getLogger(__name__)

PURE_CUTOFF = 1e-10


class Criterion:
	PPT = "ppt"
	CCNR = "ccnr"
	POSMAP = "posmap"


class Classification:
	NPT_ENTANGLED = "NPT_Entangled"
	PPT_ENTANGLED_DETECTED = "PPT_Entangled_Detected"
	PPT_ENTANGLED_REALIGNMENT = "PPT_Entangled_Realignment"
	UNDETECTED = "Undetected"
	PURE_SEPARABLE = "PureSeparable"
	PURE_ENTANGLED = "PureEntangled"


@dataclass(frozen=True)
class CriterionResult:
	"""
	witness_value is the smallest eigenvalue for PPT and positive maps and
	the excess trace norm over 1 for realignment. scale * witness_value is
	the value at the map's natural normalization, n (phi (x) I) rho for
	the cyclic maps.
	"""

	criterion: str
	detected: bool
	witness_value: float
	label: str
	descriptor: Optional[MapDescriptor] = None
	scale: float = 1.0

	@property
	def scaled_witness(self):
		return self.scale * self.witness_value

	@property
	def verdict(self):
		return "detect" if self.detected else "pass"


@dataclass(frozen=True)
class DetectionReport:
	results: tuple
	classification: str
	schmidt_coefficients: tuple = ()
	witnesses: frozendict = field(default_factory=frozendict)

	def __post_init__(self):
		object.__setattr__(self, "witnesses", frozendict({r.label: r.witness_value for r in self.results}))

	def result(self, label):
		for r in self.results:
			if r.label == label:
				return r
		raise KeyError(label)

	@property
	def entangled(self):
		return self.classification not in (Classification.UNDETECTED, Classification.PURE_SEPARABLE)


def default_maps(dA):
	""" the built-in positive maps that fit a first factor of dimension dA """
	if dA == 2:
		return [MapDescriptor.reduction2(), MapDescriptor.weighted2()]
	if dA >= 3:
		return [MapDescriptor.cyclic(dA, k) for k in range(1, dA)]
	return []


def check_ppt(rho, tol=DEFAULT_TOLERANCE):
	lo = min_eigenvalue(partial_transpose_first(rho), tol)
	return CriterionResult(Criterion.PPT, lo < -tol.psd_slack, lo, Criterion.PPT)


def check_ccnr(rho, tol=DEFAULT_TOLERANCE):
	excess = trace_norm(realign(rho)) - 1.0
	return CriterionResult(Criterion.CCNR, excess > tol.psd_slack, excess, Criterion.CCNR)


@lru_cache(maxsize=256)
def _embedded_map(desc, dA):
	return build_map(desc.embedded(dA))


def natural_scale(desc):
	if desc.family in (Family.CYCLIC, Family.CYCLIC3, Family.CYCLIC4, Family.PERMUTATION):
		return float(desc.n)
	return 1.0


def check_posmap(rho, desc, tol=DEFAULT_TOLERANCE):
	if not desc.certified:
		raise UncertifiedMap(f"positivity of {desc.label} is not certified; sample it with posmaps instead")
	if rho.dA < desc.n:
		raise DimensionMismatch(f"{desc.label} needs a first factor of dimension >= {desc.n}, got {rho.dA}")
	phi = _embedded_map(desc, rho.dA)
	lo = min_eigenvalue(apply_map_first(phi, rho).mat, tol)
	return CriterionResult(Criterion.POSMAP, lo < -tol.psd_slack, lo, desc.label, desc, natural_scale(desc))


def classify(rho, maps, tol=DEFAULT_TOLERANCE):
	ppt = check_ppt(rho, tol)
	ccnr = check_ccnr(rho, tol)
	posmaps = [check_posmap(rho, desc, tol) for desc in maps]

	if ppt.detected:
		classification = Classification.NPT_ENTANGLED
	elif any(r.detected for r in posmaps):
		classification = Classification.PPT_ENTANGLED_DETECTED
	elif ccnr.detected:
		classification = Classification.PPT_ENTANGLED_REALIGNMENT
	else:
		classification = Classification.UNDETECTED

	return DetectionReport((ppt, ccnr, *posmaps), classification)


def _conjugated_witness(psi, desc, u):
	dA = psi.dims.dA
	phi = conjugate(_embedded_map(desc, dA), u, np.eye(dA))
	lo = min_eigenvalue(apply_map_first(phi, psi.density()).mat)
	return CriterionResult(Criterion.POSMAP, lo < -DEFAULT_TOLERANCE.psd_slack, lo, phi.label, desc)


def pure_state_test(psi):
	"""
	A pure state is separable iff its Schmidt rank is 1. For an entangled
	state the 2 x 2 maps, rotated so that the two leading Schmidt vectors
	become the computational basis, witness it: the reduction map gives
	-delta_1 delta_2 and the weighted map (3 d1^2 - sqrt(9 d1^4 + 4 d1^2 d2^2)) / 2.
	"""
	sd = schmidt(psi, cutoff=PURE_CUTOFF)
	coefficients = tuple(float(x) for x in sd.coefficients)
	if sd.rank == 1:
		return DetectionReport((), Classification.PURE_SEPARABLE, coefficients)

	results = tuple(_conjugated_witness(psi, desc, sd.left_unitary)
		for desc in (MapDescriptor.reduction2(), MapDescriptor.weighted2()))
	return DetectionReport(results, Classification.PURE_ENTANGLED, coefficients)


@dataclass(frozen=True)
class ConjugationExperiment:
	trials: int
	detected: int
	best_witness: float


def random_conjugation_experiment(psi, trials, rng):
	""" how often the reduction map conjugated by random (U, V) detects an entangled pure state """
	dA = psi.dims.dA
	assert dA >= 2, "the reduction map needs a first factor of dimension >= 2"
	base = _embedded_map(MapDescriptor.reduction2(), dA)
	rho = psi.density()

	detected, best = 0, np.inf
	for _ in range(trials):
		phi = conjugate(base, random_unitary(dA, rng), random_unitary(dA, rng))
		lo = min_eigenvalue(apply_map_first(phi, rho).mat)
		detected += lo < -DEFAULT_TOLERANCE.psd_slack
		best = min(best, lo)
	logger.debug("random conjugations: %d of %d detect, best witness %.3e", detected, trials, best)
	return ConjugationExperiment(trials, int(detected), float(best))

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from entmap.base.config import Config
from entmap.base.exceptions import BadParams
from entmap.base.misc import sig, simplex_lattice
from entmap.criteria.criteria import Criterion, DetectionReport, classify
from entmap.states.families import FamilyParams, build_family


logger = logging.getLogger(__name__)

MAX_GRID = 200


@dataclass(frozen=True)
class SweepRow:
	q: tuple
	report: DetectionReport


def _evaluate(job):
	fid, q, maps, tol = job
	rho = build_family(fid, FamilyParams(q))
	return SweepRow(q, classify(rho, maps, tol))


def sweep(fid, grid, maps, config=None):
	"""
	classifies every lattice point q = s / grid of the family's weight
	simplex. Rows come back in lexicographic order of s whatever the
	number of workers.
	"""
	config = Config() if config is None else config
	if not 1 <= grid <= MAX_GRID:
		raise BadParams(f"grid must lie in 1..{MAX_GRID}, got {grid}")

	maps = tuple(maps)
	jobs = [(fid, tuple(float(x) for x in q), maps, config.tolerance) for q in simplex_lattice(fid.n, grid)]
	logger.info("sweeping %s on grid %d: %d points, %d maps, %d workers",
		fid.label, grid, len(jobs), len(maps), config.threads)

	if config.threads == 1 or len(jobs) < 2:
		rows = [_evaluate(job) for job in jobs]
	else:
		chunksize = max(1, len(jobs) // (8 * config.threads))
		with ProcessPoolExecutor(max_workers=config.threads) as executor:
			rows = list(executor.map(_evaluate, jobs, chunksize=chunksize))

	logger.info("swept %s: %d points", fid.label, len(rows))
	return rows


def csv_header(n, maps):
	labels = [Criterion.PPT, Criterion.CCNR] + [desc.label for desc in maps]
	columns = [f"q{i}" for i in range(1, n + 1)]
	for label in labels:
		columns += [label, f"{label}_witness"]
	return columns + ["classification"]


def csv_row(row):
	cells = [sig(x) for x in row.q]
	for result in row.report.results:
		cells += [result.verdict, sig(result.witness_value)]
	return cells + [row.report.classification]

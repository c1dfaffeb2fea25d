import csv
import json
from pathlib import Path

import numpy as np
from frozendict import frozendict

from entmap.base.exceptions import ParseError
from entmap.base.matcore import DEFAULT_TOLERANCE
from entmap.states.bipartite import DensityMatrix


DATA_DIR = Path(__file__).resolve().parent.parent / "data"


BUNDLED_ALIASES = frozendict({
    "ex42_ppt_point": "shift4_ppt_point",
})


def bundled(name):
    """ path of a bundled state file, with or without the .state.json suffix """
    stem = name[:-len(".state.json")] if name.endswith(".state.json") else name
    name = BUNDLED_ALIASES.get(stem.lower(), name)
    if not name.endswith(".json"):
        name = f"{name}.state.json"
    return DATA_DIR / name


def state_to_document(rho):
    return {
        "dims": [rho.dA, rho.dB],
        "data": [[float(z.real), float(z.imag)] for z in rho.mat.ravel()],
    }


def state_from_document(doc, tol=DEFAULT_TOLERANCE, raw=False):
    if not isinstance(doc, dict) or "dims" not in doc or "data" not in doc:
        raise ParseError("a state file needs 'dims' and 'data'")

    dims = doc["dims"]
    if not isinstance(dims, list) or len(dims) != 2 or \
            not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims):
        raise ParseError(f"'dims' must be two positive integers, got {dims!r}")
    n = dims[0] * dims[1]

    data = doc["data"]
    if not isinstance(data, list) or len(data) != n * n:
        raise ParseError(f"'data' must hold {n * n} entries for dims {dims}")
    try:
        entries = [complex(float(re), float(im)) for re, im in data]
    except (TypeError, ValueError):
        raise ParseError("every entry of 'data' must be a [re, im] pair of numbers")

    return DensityMatrix(dims, np.array(entries).reshape(n, n), tol, raw)


def read_state(path, tol=DEFAULT_TOLERANCE, raw=False):
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: not valid JSON ({e})")
    return state_from_document(doc, tol, raw)


def write_state(rho, path):
    # repr floats round-trip exactly
    with open(path, "w", encoding="utf-8") as f:
        json.dump(state_to_document(rho), f)
        f.write("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

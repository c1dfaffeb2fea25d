import os
from dataclasses import dataclass, field

from entmap.base.exceptions import BadParams
from entmap.base.matcore import DEFAULT_TOLERANCE, Tolerance


THREADS_ENV = "ENTMAP_THREADS"
DEFAULT_SEED = 7
DEFAULT_PROBES = 100_000


def default_threads():
    return os.cpu_count() or 1


def threads_from_env(environ=None):
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default_threads()
    try:
        threads = int(raw)
    except ValueError:
        raise BadParams(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if threads < 1:
        raise BadParams(f"{THREADS_ENV} must be at least 1, got {threads}")
    return threads


@dataclass(frozen=True)
class Config:
    seed: int = DEFAULT_SEED
    threads: int = field(default_factory=default_threads)
    probes: int = DEFAULT_PROBES
    tolerance: Tolerance = field(default=DEFAULT_TOLERANCE)

    @classmethod
    def from_env(cls, environ=None, **overrides):
        return cls(threads=threads_from_env(environ), **overrides)

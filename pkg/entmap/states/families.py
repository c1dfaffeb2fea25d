from dataclasses import dataclass
from typing import Optional

import numpy as np
from frozendict import frozendict

from entmap.base.exceptions import BadDims, BadParams, DimensionMismatch, Unsupported
from entmap.states.bipartite import BipartiteDims, DensityMatrix, as_dims


SUM_SLACK = 1e-12
TIE_SLACK = 1e-12


class FamilyKind:
    SHIFT = "shift"
    COHERENT = "coherent"


# ex54 and ex55 take n
FAMILY_ALIASES = frozendict({
    "ex33": "shift3",
    "ex42": "shift4",
    "ex54": "shift",
    "ex34": "coherent3",
    "ex43": "coherent4",
    "ex55": "coherent",
})


@dataclass(frozen=True)
class FamilyId:
    """
    The mixtures q_1 rho_1 + ... + q_n rho_n with rho_1 the maximally
    entangled projection and rho_{m+1} the diagonal state spread over
    |i, i+m>. The coherent kind replaces rho_2 by a projection onto the
    shifted maximally entangled vector.
    """

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (FamilyKind.SHIFT, FamilyKind.COHERENT):
            raise BadParams(f"unknown state family {self.kind!r}")
        if self.n < 3:
            raise BadParams(f"state families need n >= 3, got {self.n}")

    @classmethod
    def shift(cls, n):
        return cls(FamilyKind.SHIFT, n)

    @classmethod
    def coherent(cls, n):
        return cls(FamilyKind.COHERENT, n)

    @classmethod
    def parse(cls, name, n=None):
        """ accepts shift3, shift4, coherent3, coherent4, shift / coherent with n, or a FAMILY_ALIASES name """
        name = name.strip().lower()
        name = FAMILY_ALIASES.get(name, name)
        for kind in (FamilyKind.SHIFT, FamilyKind.COHERENT):
            if name == kind:
                if n is None:
                    raise BadParams(f"family {name!r} needs n")
                return cls(kind, int(n))
            if name.startswith(kind) and name[len(kind):].isdigit():
                fixed = int(name[len(kind):])
                if n is not None and int(n) != fixed:
                    raise BadParams(f"family {name!r} has n = {fixed}, got n = {n}")
                return cls(kind, fixed)
        raise BadParams(f"unknown state family {name!r}")

    @property
    def coherent_second(self):
        return self.kind == FamilyKind.COHERENT

    @property
    def label(self):
        return f"{self.kind}{self.n}"


FamilyId.SHIFT3 = FamilyId.shift(3)
FamilyId.SHIFT4 = FamilyId.shift(4)
FamilyId.COHERENT3 = FamilyId.coherent(3)
FamilyId.COHERENT4 = FamilyId.coherent(4)


@dataclass(frozen=True)
class FamilyParams:
    q: tuple
    mix_t: float = 0.0
    noise: Optional[DensityMatrix] = None

    def __post_init__(self):
        q = tuple(float(x) for x in self.q)
        if any(not x >= 0 for x in q):
            raise BadParams(f"weights must be nonnegative, got {q}")
        if abs(sum(q) - 1.0) > SUM_SLACK:
            raise BadParams(f"weights must sum to 1, got {sum(q)}")
        if not 0.0 <= self.mix_t <= 1.0:
            raise BadParams(f"mixing weight must lie in [0, 1], got {self.mix_t}")
        if self.mix_t > 0 and self.noise is None:
            raise BadParams("mixing needs a noise state")
        object.__setattr__(self, "q", q)


def _check(fid, params):
    if len(params.q) != fid.n:
        raise BadParams(f"{fid.label} takes {fid.n} weights, got {len(params.q)}")
    return params.q


def build_family(fid, params, dims=None):
    q = _check(fid, params)
    n = fid.n
    dims = BipartiteDims(n, n) if dims is None else as_dims(dims)
    if dims.dA < n or dims.dB < n:
        raise BadDims(f"{fid.label} needs both factors of dimension >= {n}, got ({dims.dA}, {dims.dB})")

    mat = np.zeros((dims.dim, dims.dim), dtype=np.complex128)

    # maximally entangled part
    omega = np.zeros(dims.dim)
    for i in range(n):
        omega[dims.index(i, i)] = 1.0
    mat += q[0] / n * np.outer(omega, omega)

    for m in range(1, n):
        if m == 1 and fid.coherent_second:
            shifted = np.zeros(dims.dim)
            for i in range(n):
                shifted[dims.index(i, (i + 1) % n)] = 1.0
            mat += q[1] / n * np.outer(shifted, shifted)
            continue
        for i in range(n):
            j = dims.index(i, (i + m) % n)
            mat[j, j] += q[m] / n

    if params.mix_t > 0:
        if params.noise.dims != dims:
            raise DimensionMismatch("noise state must share the family's dimensions")
        mat = (1 - params.mix_t) * mat + params.mix_t * params.noise.mat
    return DensityMatrix(dims, mat)


def outside_support_noise(n, dims, p):
    """ sum_{i >= n} p_i |ii><ii|, annihilated by every map supported on the first n kets """
    dims = as_dims(dims)
    room = min(dims.dA, dims.dB) - n
    if room < 1:
        raise BadDims(f"no room outside a support of {n} in ({dims.dA}, {dims.dB})")
    p = np.asarray(p, dtype=float)
    if len(p) != room:
        raise BadParams(f"expected {room} noise weights, got {len(p)}")
    mat = np.zeros((dims.dim, dims.dim))
    for i, w in enumerate(p):
        j = dims.index(n + i, n + i)
        mat[j, j] = w
    return DensityMatrix(dims, mat)


def _ge(a, b):
    return a >= b - TIE_SLACK


def ppt_closed_form(fid, params):
    """ the family's positive-partial-transpose condition, ties counted as satisfied """
    q = _check(fid, params)
    n = fid.n

    if fid.kind == FamilyKind.SHIFT:
        # q_i q_j >= q_1^2 whenever i + j = n + 2 (1-indexed)
        return all(_ge(q[i] * q[n - i], q[0] ** 2) for i in range(1, n))

    if n == 3:
        q1, q2, q3 = q
        return _ge(q1 * q2 * q3, q1 ** 3 + q2 ** 3)

    if n == 4:
        q1, q2, q3, q4 = q
        left = q2 ** 2 * (q1 * q3 - q2 ** 2)
        right = q1 ** 2 * (q2 * q4 - q1 ** 2)
        return _ge(q1 * (q1 * q3 ** 2 - q2 ** 2 * q3 - q1 ** 3), left) and _ge(left, 0) \
            and _ge(q2 * (q2 * q4 ** 2 - q1 ** 2 * q4 - q2 ** 3), right) and _ge(right, 0)

    raise Unsupported(f"no closed-form PPT condition for {fid.label}; use the numeric check")


def realign_norm_formula(fid, params):
    """ the stated closed form of the realigned trace norm for the order-4 families; realign_norm_oracle is exact """
    q = _check(fid, params)
    if fid.n != 4:
        raise Unsupported(f"no stated realignment formula for {fid.label}")

    q1, q2, q3, q4 = q
    squares = sum(x * x for x in q)
    ring = q1 * q2 + q2 * q3 + q3 * q4 + q1 * q4
    norm_a = 0.75 * np.sqrt(max(squares - ring, 0.0)) + 0.25 * np.sqrt(squares + 3 * ring)
    if fid.kind == FamilyKind.SHIFT:
        return float(norm_a + 3 * q1)
    return float(norm_a + 2.25 * np.sqrt(q1 ** 2 + q2 ** 2 - q1 * q2)
        + 0.75 * np.sqrt(q1 ** 2 + q2 ** 2 + 3 * q1 * q2))


def realign_norm_oracle(fid, params):
    """
    trace norm of the realigned state from circulant eigenvalues: the
    diagonal part realigns to circulant(q)/n and the coherent parts to
    n - 1 copies of q_1/n I, or of (q_1 I + q_2 S)/n for the coherent kind.
    """
    q = np.array(_check(fid, params))
    n = fid.n
    total = np.sum(np.abs(np.fft.fft(q))) / n
    if fid.kind == FamilyKind.SHIFT:
        return float(total + (n - 1) * q[0])
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    return float(total + (n - 1) * np.sum(np.abs(q[0] + q[1] * roots)) / n)


def coherent4_pt_blocks(params):
    """ four 4 x 4 blocks whose direct sum is unitarily equivalent to the partial transpose """
    q1, q2, q3, q4 = _check(FamilyId.COHERENT4, params)
    blocks = [
        [[q1, q2, 0, 0], [q2, q3, 0, q1], [0, 0, q1, q2], [0, q1, q2, q3]],
        [[q4, q1, q2, 0], [q1, q2, 0, 0], [q2, 0, q4, q1], [0, 0, q1, q2]],
        [[q3, 0, q1, q2], [0, q1, q2, 0], [q1, q2, q3, 0], [q2, 0, 0, q1]],
        [[q2, 0, 0, q1], [0, q4, q1, q2], [0, q1, q2, 0], [q1, q2, 0, q4]],
    ]
    return [np.array(b) / 4 for b in blocks]


def _flat_block(n, diagonal, off):
    return (diagonal + off) * np.eye(n) - off * np.ones((n, n))


def map_blocks(fid, params, k=1):
    """
    n x n blocks whose direct sum is permutation-equivalent to n (phi (x) I) rho
    for the cyclic map with shift k: first the block on the |ii> kets, then
    one block per shift s of the second factor.
    """
    q = _check(fid, params)
    n = fid.n
    if not 1 <= k <= n - 1:
        raise BadParams(f"cyclic shift k must lie in 1..{n - 1}, got {k}")

    blocks = [_flat_block(n, (n - 2) * q[0] + q[(n - k) % n], q[0])]
    for s in range(1, n):
        diagonal = (n - 2) * q[s] + q[(s - k) % n]
        off = q[1] if s == 1 and fid.coherent_second else 0.0
        blocks.append(_flat_block(n, diagonal, off))
    return blocks


def posmap_block_minimum(fid, params, k=1):
    """ smallest eigenvalue of n (phi (x) I) rho for the cyclic map with shift k, in closed form """
    q = _check(fid, params)
    n = fid.n
    if not 1 <= k <= n - 1:
        raise BadParams(f"cyclic shift k must lie in 1..{n - 1}, got {k}")

    # a block with diagonal a and off-diagonal -c has eigenvalues a - (n-1)c and a + c
    flat = lambda a, c: min(a - (n - 1) * c, a + c)
    values = [flat((n - 2) * q[0] + q[(n - k) % n], q[0])]
    for s in range(1, n):
        a = (n - 2) * q[s] + q[(s - k) % n]
        values.append(flat(a, q[1]) if s == 1 and fid.coherent_second else a)
    return float(min(values))


def ppt_entangled_point(n, k):
    """
    a shift-family point that is PPT and detected by the cyclic map with
    shift k: q_1 = a, q_{n+1-k} = a/2, q_{k+1} = 3a, every other weight 2a.
    """
    if n < 3 or not 1 <= k <= n - 1:
        raise BadParams(f"need n >= 3 and k in 1..n-1, got n = {n}, k = {k}")
    if 2 * k == n:
        raise BadParams("the middle shift of an even order has no such point")
    q = np.full(n, 2.0)
    q[0], q[n - k], q[k] = 1.0, 0.5, 3.0
    return FamilyParams(tuple(q / q.sum()))


def shift4_line(s, mirror=False):
    """
    PPT points of the order-4 shift family that realignment misses for
    0 < s <= 1/7. The plain line is detected by cyclic shift 1, the mirror
    (second and fourth weights swapped) by cyclic shift 3.
    """
    if not 0 < s <= 1 / 7:
        raise BadParams(f"the line is parameterized by 0 < s <= 1/7, got {s}")
    q = [s, 0.5, 0.5 - 1.5 * s, s / 2]
    if mirror:
        q[1], q[3] = q[3], q[1]
    return FamilyParams(tuple(q))


def coherent4_line(s, mirror=False):
    """
    q = (s, 2s, c, c) with c = (1 - 3s)/2, PPT and missed by realignment for
    0 < s <= 1/15; the mirror swaps the first two weights.
    """
    if not 0 < s <= 1 / 15:
        raise BadParams(f"the line is parameterized by 0 < s <= 1/15, got {s}")
    c = (1 - 3 * s) / 2
    q = (2 * s, s, c, c) if mirror else (s, 2 * s, c, c)
    return FamilyParams(q)

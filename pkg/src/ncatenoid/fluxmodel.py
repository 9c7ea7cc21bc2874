"""Flux data, the Riemann sphere, and configuration screening.

Extended complex numbers are plain Python ``complex`` values; the point at
infinity is the single value ``INF`` (test with ``is_inf``).
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidFluxData

INF = complex(math.inf, 0.0)

UNIT_TOL = 1e-12
LOAD_UNIT_TOL = 1e-6
BALANCE_RTOL = 1e-10
SPAN_RTOL = 1e-9
MATCH_TOL = 1e-9
WEIGHT_SUM_RTOL = 1e-10

TYPE_I = "TYPE_I"
TYPE_II = "TYPE_II"
TYPE_III = "TYPE_III"
_KIND_BY_DIM = {1: TYPE_I, 2: TYPE_II, 3: TYPE_III}


# --- extended complex plane -------------------------------------------------

def is_inf(z) -> bool:
    return cmath.isinf(complex(z))


def ext(z) -> complex:
    """Normalise any infinite value to ``INF``."""
    z = complex(z)
    return INF if cmath.isinf(z) else z


def chordal(a, b) -> float:
    """Chordal distance on the unit sphere between two extended points."""
    a, b = complex(a), complex(b)
    ia, ib = is_inf(a), is_inf(b)
    if ia and ib:
        return 0.0
    if ia:
        return 2.0 / math.sqrt(1.0 + abs(b) ** 2)
    if ib:
        return 2.0 / math.sqrt(1.0 + abs(a) ** 2)
    return 2.0 * abs(a - b) / math.sqrt((1.0 + abs(a) ** 2) * (1.0 + abs(b) ** 2))


def stereographic(v) -> complex:
    """Projection from the north pole; (0, 0, 1) goes to ``INF``."""
    x, y, z = (float(t) for t in v)
    w = complex(x, y)
    if z > 0:
        rho2 = x * x + y * y
        if rho2 == 0.0:
            return INF
        return w * (1.0 + z) / rho2
    return w / (1.0 - z)


def inverse_stereographic(p) -> np.ndarray:
    p = complex(p)
    if is_inf(p):
        return np.array([0.0, 0.0, 1.0])
    r2 = abs(p) ** 2
    if r2 > 1.0:
        # divide through by |p|^2 to keep large p accurate
        u = 1.0 / p
        s2 = abs(u) ** 2
        d = 1.0 + s2
        return np.array([2 * u.real / d, -2 * u.imag / d, (1.0 - s2) / d])
    d = r2 + 1.0
    return np.array([2 * p.real / d, 2 * p.imag / d, (r2 - 1.0) / d])


def normal_from_pq(P, Q):
    """Unit normal for g = P/Q without forming the quotient (arrays ok)."""
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    pq = P * np.conj(Q)
    d = np.abs(P) ** 2 + np.abs(Q) ** 2
    return np.stack([2 * pq.real / d, 2 * pq.imag / d, (np.abs(P) ** 2 - np.abs(Q) ** 2) / d], axis=-1)


# --- rotations and Moebius maps ---------------------------------------------

def rotation_about(axis, angle) -> np.ndarray:
    k = np.asarray(axis, float)
    k = k / np.linalg.norm(k)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


def rotation_to_north(v, tol: float = 1e-14) -> np.ndarray:
    """Rotation R with R @ v = (0, 0, 1)."""
    v = np.asarray(v, float)
    v = v / np.linalg.norm(v)
    north = np.array([0.0, 0.0, 1.0])
    axis = np.cross(v, north)
    s = np.linalg.norm(axis)
    c = float(v @ north)
    if s < tol:
        if c > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])
    return rotation_about(axis, math.atan2(s, c))


def random_rotation(rng) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def mobius_apply(M, z) -> complex:
    """Apply [[a, b], [c, d]] to an extended complex number."""
    (a, b), (c, d) = M
    z = complex(z)
    if is_inf(z):
        return ext(a / c) if c != 0 else INF
    den = c * z + d
    if den == 0:
        return INF
    return ext((a * z + b) / den)


def mobius_to_standard(z1, z2, z3) -> np.ndarray:
    """Moebius map sending (z1, z2, z3) to (0, 1, inf)."""
    z1, z2, z3 = complex(z1), complex(z2), complex(z3)
    if is_inf(z1):
        M = [[0, z2 - z3], [1, -z3]]
    elif is_inf(z2):
        M = [[1, -z1], [1, -z3]]
    elif is_inf(z3):
        M = [[1, -z1], [0, z2 - z1]]
    else:
        M = [[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]]
    return np.array(M, dtype=complex)


def cross_ratio(z1, z2, z3, z4) -> complex:
    """Image of z4 under the map sending (z1, z2, z3) to (0, 1, inf)."""
    return mobius_apply(mobius_to_standard(z1, z2, z3), z4)


def mobius_equivalent(qa, qb, tol: float = 1e-7) -> bool:
    """Whether one Moebius map takes every qa[k] to qb[k]."""
    n = len(qa)
    if n != len(qb):
        return False
    if n <= 3:
        return True
    Ma = mobius_to_standard(*qa[:3])
    Mb = mobius_to_standard(*qb[:3])
    return all(chordal(mobius_apply(Ma, qa[k]), mobius_apply(Mb, qb[k])) < tol for k in range(3, n))


# --- flux data --------------------------------------------------------------

@dataclass(frozen=True)
class FluxData:
    """n unit end normals ``vectors`` (n x 3) and nonzero real ``weights``."""

    vectors: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        a = np.array(self.weights, dtype=float).ravel()
        if v.ndim != 2 or v.shape[1] != 3:
            raise InvalidFluxData("vectors must be an n x 3 array")
        if len(v) < 2 or len(a) != len(v):
            raise InvalidFluxData("need n >= 2 vectors and one weight per vector")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) >= UNIT_TOL):
            raise InvalidFluxData("vectors must have unit length")
        if np.any(a == 0) or not np.all(np.isfinite(a)):
            raise InvalidFluxData("weights must be finite and nonzero")
        v.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "weights", a)

    @property
    def n(self) -> int:
        return len(self.weights)

    @classmethod
    def from_points(cls, p, weights):
        return cls(np.array([inverse_stereographic(x) for x in p]), weights)

    @classmethod
    def from_dict(cls, obj):
        try:
            v = np.array(obj["vectors"], dtype=float)
            a = np.array(obj["weights"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidFluxData(f"malformed flux JSON: {exc}") from exc
        if v.ndim != 2 or v.shape[1] != 3:
            raise InvalidFluxData("vectors must be a list of [x, y, z]")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > LOAD_UNIT_TOL):
            raise InvalidFluxData("vectors are not unit length within 1e-6")
        return cls(v / norms[:, None], a)

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {"vectors": self.vectors.tolist(), "weights": self.weights.tolist()}

    def rotated(self, R):
        v = self.vectors @ np.asarray(R, float).T
        v = v / np.linalg.norm(v, axis=1)[:, None]
        return FluxData(v, self.weights)

    def permuted(self, perm):
        perm = list(perm)
        return FluxData(self.vectors[perm], self.weights[perm])

    def points(self) -> list[complex]:
        return [stereographic(v) for v in self.vectors]


def check_balance(d: FluxData) -> float:
    """Norm of sum_j a_j v_j."""
    return float(np.linalg.norm(d.weights @ d.vectors))


def is_balanced(d: FluxData, rtol: float = BALANCE_RTOL) -> bool:
    return check_balance(d) <= rtol * float(np.sum(np.abs(d.weights)))


@dataclass(frozen=True)
class TypeClass:
    kind: str
    span_dim: int
    singular_values: tuple = ()
    D: float | None = None

    def __post_init__(self):
        if _KIND_BY_DIM.get(self.span_dim) != self.kind:
            raise ValueError("span_dim does not match kind")

    def to_dict(self):
        return {"kind": self.kind, "span_dim": self.span_dim,
                "singular_values": list(self.singular_values), "D": self.D}


def nondegeneracy_D(p1, p2, p3) -> float:
    """The TYPE III discriminant for normalised points with p4 at infinity."""
    def w(a, b):
        return a.conjugate() * b - a * b.conjugate()
    p1, p2, p3 = complex(p1), complex(p2), complex(p3)
    brace = ((abs(p1) ** 2 - 1) * w(p2, p3) + (abs(p2) ** 2 - 1) * w(p3, p1)
             + (abs(p3) ** 2 - 1) * w(p1, p2))
    return (w(p2, p3) * w(p3, p1) * w(p1, p2) * brace).real


def classify_type(d: FluxData, rtol: float = SPAN_RTOL) -> TypeClass:
    s = np.linalg.svd(d.vectors.T, compute_uv=False)
    dim = int(np.sum(s > rtol * s[0]))
    D = None
    if d.n == 4:
        R = rotation_to_north(d.vectors[3])
        p = [stereographic(R @ v) for v in d.vectors[:3]]
        if not any(is_inf(x) for x in p):
            D = nondegeneracy_D(*p)
    return TypeClass(_KIND_BY_DIM[dim], dim, tuple(float(x) for x in s), D)


# --- obstructions -----------------------------------------------------------

CONDITION_NAMES = {
    1: "all end normals equal",
    2: "two equal normals, all others opposite",
    3: "one normal opposite all others with nonzero weight product sum",
    4: "antipodal pair plus a distinct equal pair (n = 4)",
}


@dataclass(frozen=True)
class Obstruction:
    condition: int
    indices: tuple

    @property
    def name(self) -> str:
        return CONDITION_NAMES[self.condition]

    def to_dict(self):
        return {"condition": self.condition, "name": self.name, "indices": list(self.indices)}


@dataclass(frozen=True)
class ObstructionReport:
    hits: tuple = field(default_factory=tuple)

    @property
    def obstructed(self) -> bool:
        return bool(self.hits)

    def conditions(self) -> set:
        return {h.condition for h in self.hits}

    def to_dict(self):
        return {"obstructed": self.obstructed, "hits": [h.to_dict() for h in self.hits]}


def detect_obstructions(d: FluxData, tol: float = MATCH_TOL) -> ObstructionReport:
    """Match the known non-existence patterns, up to index permutation."""
    v, a, n = d.vectors, d.weights, d.n

    def same(i, j):
        return np.linalg.norm(v[i] - v[j]) < tol

    def opposite(i, j):
        return np.linalg.norm(v[i] + v[j]) < tol

    hits = []
    if all(same(0, j) for j in range(1, n)):
        hits.append(Obstruction(1, tuple(range(n))))

    if n >= 3:
        for i, j in itertools.combinations(range(n), 2):
            rest = [k for k in range(n) if k not in (i, j)]
            if same(i, j) and all(opposite(i, k) for k in rest):
                hits.append(Obstruction(2, (i, j)))

    for i in range(n):
        rest = [k for k in range(n) if k != i]
        if all(opposite(i, k) for k in rest):
            prods = [a[j] * a[k] for j, k in itertools.combinations(rest, 2)]
            if prods and abs(sum(prods)) > WEIGHT_SUM_RTOL * max(abs(x) for x in prods):
                hits.append(Obstruction(3, (i,)))

    if n == 4:
        for (i, j), (k, l) in _pairings4():
            for (x, y), (s, t) in (((i, j), (k, l)), ((k, l), (i, j))):
                if opposite(x, y) and same(s, t) and not same(s, x) and not opposite(s, x):
                    hits.append(Obstruction(4, (x, y, s, t)))
    return ObstructionReport(tuple(hits))


def _pairings4():
    return [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))]

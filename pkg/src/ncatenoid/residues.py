"""Algebraic core: the matrix A, closed-form end residues, verification of
the full equation system, and Weierstrass data built from a solution.

Conventions.  For punctures q_j, coefficients b_j and Gauss
values p_j the data are

    g = P / Q,    omega = -s (Q / R)^2 dz,

with Q = sum_j b_j R_j, P = sum_j p_j b_j R_j, R = prod (z - q_k) and
R_j = R / (z - q_j).  At most one end may sit at infinity (q_m = p_m = inf);
then R runs over the finite punctures only and P gains the term -b_m R.
Throughout, sums over k != j treat an infinite k by its limiting rule:
``b_k p_k / (q_j - q_k) -> -b_m`` and ``b_k / (q_j - q_k) -> 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CoincidentPunctures, DegenerateData, InfinityEnd
from .fluxmodel import INF, chordal, ext, inverse_stereographic, is_inf
from .polyalg import ComplexPoly, resultant, resultant_scale

DISTINCT_TOL = 1e-10
SINGLE_VALUED_TOL = 1e-9
DEGREE_RTOL = 1e-11
BRANCH_TOL = 1e-9


def _inf_index(q) -> int | None:
    idx = [j for j, x in enumerate(q) if is_inf(x)]
    if len(idx) > 1:
        raise CoincidentPunctures("more than one puncture at infinity")
    return idx[0] if idx else None


def _check_distinct(q):
    for j in range(len(q)):
        for k in range(j + 1, len(q)):
            if chordal(q[j], q[k]) <= DISTINCT_TOL:
                raise CoincidentPunctures(f"punctures {j} and {k} coincide")


@dataclass(frozen=True)
class SolutionCandidate:
    """A solution (q, b) for Gauss values p and weights a.

    ``rotation`` and ``order`` record how the data were normalised: candidate
    index i corresponds to original end ``order[i]`` and p_i is the
    projection of ``rotation @ v[order[i]]``.
    """

    q: tuple
    b: tuple
    p: tuple
    a: tuple
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    order: tuple = ()
    label: str = ""

    def __post_init__(self):
        q = tuple(ext(x) for x in self.q)
        p = tuple(ext(x) for x in self.p)
        b = tuple(complex(x) for x in self.b)
        a = tuple(float(x) for x in self.a)
        n = len(q)
        if not (len(p) == len(b) == len(a) == n) or n < 2:
            raise ValueError("q, b, p, a must have one entry per end (n >= 2)")
        for j in range(n):
            if is_inf(q[j]) != is_inf(p[j]):
                raise ValueError("an end at infinity needs both q_j and p_j infinite")
        _inf_index(q)
        _check_distinct(q)
        order = tuple(self.order) if self.order else tuple(range(n))
        R = np.array(self.rotation, dtype=float)
        R.setflags(write=False)
        for name, val in (("q", q), ("p", p), ("b", b), ("a", a), ("order", order), ("rotation", R)):
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def inf_index(self) -> int | None:
        return _inf_index(self.q)

    def with_b(self, b):
        return SolutionCandidate(self.q, b, self.p, self.a, self.rotation, self.order, self.label)

    def normals(self) -> np.ndarray:
        """Limit normals nu(p_j) in the normalised frame."""
        return np.array([inverse_stereographic(x) for x in self.p])

    def original_normals(self) -> np.ndarray:
        """Limit normals in the input frame, in input order."""
        out = np.empty((self.n, 3))
        out[list(self.order)] = self.normals() @ self.rotation
        return out

    def to_dict(self):
        return {
            "q": [encode_complex(x) for x in self.q],
            "b": [encode_complex(x) for x in self.b],
            "p": [encode_complex(x) for x in self.p],
            "a": list(self.a),
            "rotation": self.rotation.tolist(),
            "order": list(self.order),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, obj):
        return cls(
            q=[decode_complex(x) for x in obj["q"]],
            b=[decode_complex(x) for x in obj["b"]],
            p=[decode_complex(x) for x in obj["p"]],
            a=obj["a"],
            rotation=obj.get("rotation", np.eye(3).tolist()),
            order=obj.get("order", ()),
            label=obj.get("label", ""),
        )


def encode_complex(z):
    z = complex(z)
    if is_inf(z):
        return "inf"
    return [z.real, z.imag]


def decode_complex(x) -> complex:
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity"):
            return INF
        raise ValueError(f"bad complex literal {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    re, im = x
    return complex(float(re), float(im))


# --- the matrix A -----------------------------------------------------------

def build_matrix_A(p, q) -> np.ndarray:
    """A_jk = (conj(p_j) p_k + 1) / (q_k - q_j), zero diagonal.

    An infinite end m contributes conj(p_j) in column m and -p_k in row m.
    """
    p = [ext(x) for x in p]
    q = [ext(x) for x in q]
    n = len(p)
    if len(q) != n:
        raise ValueError("p and q differ in length")
    _check_distinct(q)
    m = _inf_index(q)
    if m is not None and not is_inf(p[m]):
        raise ValueError("the infinite puncture must carry p = inf")
    A = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            if k == m:
                A[j, k] = p[j].conjugate()
            elif j == m:
                A[j, k] = -p[k]
            else:
                A[j, k] = (p[j].conjugate() * p[k] + 1) / (q[k] - q[j])
    return A


# --- residues ---------------------------------------------------------------

def _sums(c: SolutionCandidate, j: int):
    """c_j = sum b_k/(q_j-q_k) and d_j = sum p_k b_k/(q_j-q_k) with their
    absolute-value companions (for residual scaling)."""
    cs = ds = 0j
    ca = da = 0.0
    for k in range(c.n):
        if k == j:
            continue
        if is_inf(c.q[k]):
            ds -= c.b[k]
            da += abs(c.b[k])
            continue
        w = c.b[k] / (c.q[j] - c.q[k])
        cs += w
        ca += abs(w)
        ds += c.p[k] * w
        da += abs(c.p[k] * w)
    return cs, ds, ca, da


def end_residue(c: SolutionCandidate, j: int):
    """(Res omega, Res g omega, Res g^2 omega) at the finite end j."""
    if is_inf(c.q[j]):
        raise InfinityEnd(f"end {j} is at infinity; use end_residues")
    cs, ds, _, _ = _sums(c, j)
    bj, pj = c.b[j], c.p[j]
    return (-2 * bj * cs, -bj * (pj * cs + ds), -2 * pj * bj * ds)


def end_residues(c: SolutionCandidate):
    """Residue triples for every end; an infinite end uses the normalised forms
    (Res omega = 0, Res g omega = -b_m sum b_k, Res g^2 omega = -2 b_m sum p_k b_k)."""
    out = []
    for j in range(c.n):
        if is_inf(c.q[j]):
            S = sum(c.b[k] for k in range(c.n) if k != j)
            T = sum(c.p[k] * c.b[k] for k in range(c.n) if k != j)
            out.append((0j, -c.b[j] * S, -2 * c.b[j] * T))
        else:
            out.append(end_residue(c, j))
    return out


def flux_from_residues(res) -> np.ndarray:
    """Flux vector -Im(2 pi i Res ((1-g^2)w, i(1+g^2)w, 2gw))."""
    r0, r1, r2 = res
    return -2 * math.pi * np.array([(r0 - r2).real, (1j * (r0 + r2)).real, (2 * r1).real])


def computed_weights(c: SolutionCandidate) -> list[complex]:
    """Leading Hopf coefficients a_j = b_j (p_j c_j - d_j)."""
    out = []
    for j in range(c.n):
        if is_inf(c.q[j]):
            out.append(c.b[j] * sum(c.b[k] for k in range(c.n) if k != j))
        else:
            cs, ds, _, _ = _sums(c, j)
            out.append(c.b[j] * (c.p[j] * cs - ds))
    return out


# --- verification -----------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    reduction2_residual: float
    red_residual: float
    weight_errors: tuple
    flux_vector_errors: tuple
    flux_sum_norm: float
    single_valued: bool
    kernel_residual: float = 0.0

    def passes(self, tol: float = SINGLE_VALUED_TOL) -> bool:
        return self.reduction2_residual < tol

    def to_dict(self):
        return {
            "reduction2_residual": self.reduction2_residual,
            "red_residual": self.red_residual,
            "weight_errors": list(self.weight_errors),
            "flux_vector_errors": list(self.flux_vector_errors),
            "flux_sum_norm": self.flux_sum_norm,
            "single_valued": self.single_valued,
            "kernel_residual": self.kernel_residual,
        }


def _rel(value, target, scale):
    den = scale + abs(target)
    if den == 0:
        return 0.0
    return abs(value - target) / den


def reduction2_rows(c: SolutionCandidate):
    """Relative residuals of the weight rows and the kernel rows."""
    wrows, krows = [], []
    for j in range(c.n):
        bj = c.b[j]
        if is_inf(c.q[j]):
            S = sum(c.b[k] for k in range(c.n) if k != j)
            Sa = sum(abs(c.b[k]) for k in range(c.n) if k != j)
            T = sum(c.p[k] * c.b[k] for k in range(c.n) if k != j)
            Ta = sum(abs(c.p[k] * c.b[k]) for k in range(c.n) if k != j)
            wrows.append(_rel(bj * S, c.a[j], abs(bj) * Sa))
            krows.append(_rel(-bj * T, 0.0, abs(bj) * Ta))
            continue
        pj = c.p[j]
        w_val = k_val = 0j
        w_abs = k_abs = 0.0
        for k in range(c.n):
            if k == j:
                continue
            if is_inf(c.q[k]):
                t1, t2 = c.b[k], pj.conjugate() * c.b[k]
            else:
                dq = c.q[k] - c.q[j]
                t1 = c.b[k] * (c.p[k] - pj) / dq
                t2 = c.b[k] * (pj.conjugate() * c.p[k] + 1) / dq
            w_val += t1
            k_val += t2
            w_abs += abs(t1)
            k_abs += abs(t2)
        wrows.append(_rel(bj * w_val, c.a[j], abs(bj) * w_abs))
        krows.append(_rel(bj * k_val, 0.0, abs(bj) * k_abs))
    return wrows, krows


def red_residual(c: SolutionCandidate) -> float:
    worst = 0.0
    for j in range(c.n):
        bj, aj = c.b[j], c.a[j]
        if is_inf(c.q[j]):
            S = sum(c.b[k] for k in range(c.n) if k != j)
            T = sum(c.p[k] * c.b[k] for k in range(c.n) if k != j)
            Sa = sum(abs(c.b[k]) for k in range(c.n) if k != j)
            Ta = sum(abs(c.p[k] * c.b[k]) for k in range(c.n) if k != j)
            worst = max(worst, _rel(bj * T, 0.0, abs(bj) * Ta), _rel(bj * S, aj, abs(bj) * Sa))
            continue
        pj = c.p[j]
        cs, ds, ca, da = _sums(c, j)
        d2 = abs(pj) ** 2 + 1
        worst = max(
            worst,
            _rel(bj * cs, aj * pj.conjugate() / d2, abs(bj) * ca),
            _rel(bj * (pj * cs + ds), aj * (abs(pj) ** 2 - 1) / d2, abs(bj) * (abs(pj) * ca + da)),
        )
    return worst


def verify_solution(c: SolutionCandidate, tol: float = SINGLE_VALUED_TOL) -> VerificationReport:
    wrows, krows = reduction2_rows(c)
    r2 = max(wrows + krows)
    weights = computed_weights(c)
    werr = tuple(abs(w - a) for w, a in zip(weights, c.a))
    fluxes = [flux_from_residues(r) for r in end_residues(c)]
    expect = [4 * math.pi * a * inverse_stereographic(p) for a, p in zip(c.a, c.p)]
    amax = max(abs(a) for a in c.a)
    scale = 4 * math.pi * amax if amax > 0 else 1.0
    ferr = tuple(float(np.linalg.norm(f - e)) / scale for f, e in zip(fluxes, expect))
    fsum = float(np.linalg.norm(np.sum(fluxes, axis=0)))
    return VerificationReport(
        reduction2_residual=float(r2),
        red_residual=float(red_residual(c)),
        weight_errors=werr,
        flux_vector_errors=ferr,
        flux_sum_norm=fsum,
        single_valued=bool(r2 < tol),
        kernel_residual=float(max(krows)),
    )


# --- Weierstrass data -------------------------------------------------------

@dataclass(frozen=True)
class WeierstrassData:
    """g = P/Q and omega = -scale (Q/R)^2 dz on the sphere minus q."""

    P: ComplexPoly
    Q: ComplexPoly
    R: ComplexPoly
    q: tuple
    scale: complex = 1.0
    gauss_degree: int = 0
    branched: bool = False
    resultant_rel: float = 0.0

    @property
    def n(self) -> int:
        return len(self.q)

    @property
    def inf_index(self) -> int | None:
        return _inf_index(self.q)

    def to_dict(self):
        return {
            "P": [encode_complex(x) for x in self.P.coeffs],
            "Q": [encode_complex(x) for x in self.Q.coeffs],
            "R": [encode_complex(x) for x in self.R.coeffs],
            "q": [encode_complex(x) for x in self.q],
            "scale": encode_complex(self.scale),
            "gauss_degree": self.gauss_degree,
            "branched": self.branched,
            "resultant_rel": self.resultant_rel,
        }


def branch_status(P: ComplexPoly, Q: ComplexPoly, n: int, tol: float = BRANCH_TOL):
    """(gauss_degree, branched, |Res(P,Q)| / Sylvester scale)."""
    if P.is_zero:
        return 0, True, 0.0
    deg = max(P.degree, Q.degree)
    if P.degree == 0 and Q.degree == 0:
        return 0, True, 0.0
    rel = abs(resultant(P, Q)) / resultant_scale(P, Q)
    return deg, bool(rel < tol or deg < n - 1), float(rel)


def weierstrass_polys(q, b, p, scale=1.0):
    """P, Q, R for the given punctures; leading noise below DEGREE_RTOL of the
    joint coefficient size is trimmed so degrees are meaningful."""
    q = [ext(x) for x in q]
    m = _inf_index(q)
    fin = [k for k in range(len(q)) if k != m]
    R = ComplexPoly.from_roots([q[k] for k in fin])
    P = ComplexPoly()
    Q = ComplexPoly()
    for j in fin:
        Rj = ComplexPoly.from_roots([q[k] for k in fin if k != j])
        Q = Q + Rj * b[j]
        P = P + Rj * (p[j] * b[j])
    if m is not None:
        P = P - R * b[m]
    big = max(P.maxnorm() if not P.is_zero else 0.0, Q.maxnorm() if not Q.is_zero else 0.0)
    if big > 0:
        P = _trim_abs(P, DEGREE_RTOL * big)
        Q = _trim_abs(Q, DEGREE_RTOL * big)
    return P, Q, R


def _trim_abs(f: ComplexPoly, cut: float) -> ComplexPoly:
    c = f.coeffs
    while len(c) and abs(c[-1]) <= cut:
        c = c[:-1]
    return ComplexPoly(c)


def weierstrass_from_solution(c: SolutionCandidate, scale=1.0) -> WeierstrassData:
    P, Q, R = weierstrass_polys(c.q, c.b, c.p)
    if Q.is_zero:
        raise DegenerateData("Q vanishes identically")
    deg, br, rel = branch_status(P, Q, c.n)
    return WeierstrassData(P, Q, R, c.q, complex(scale), deg, br, rel)


def weierstrass_from_polys(P, Q, R, q, scale=1.0) -> WeierstrassData:
    P, Q, R = ComplexPoly(P), ComplexPoly(Q), ComplexPoly(R)
    if Q.is_zero:
        raise DegenerateData("Q vanishes identically")
    q = tuple(ext(x) for x in q)
    deg, br, rel = branch_status(P, Q, len(q))
    return WeierstrassData(P, Q, R, q, complex(scale), deg, br, rel)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)

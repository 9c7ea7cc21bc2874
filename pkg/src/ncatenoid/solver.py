"""Constructing 4-end catenoids (TYPE II/III), parallel-end families
(TYPE I) and the named closed-form examples."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateConfiguration,
    NewtonFailure,
    NoSolution,
    NonConvergence,
    ObstructedInput,
    ParamOutOfRange,
    RejectedRoot,
    UnknownName,
)
from .fluxmodel import (
    INF,
    TYPE_I,
    TYPE_II,
    TYPE_III,
    FluxData,
    chordal,
    classify_type,
    detect_obstructions,
    inverse_stereographic,
    is_inf,
    mobius_equivalent,
    rotation_about,
    rotation_to_north,
    stereographic,
)
from .polyalg import ComplexPoly, poly_roots
from .residues import (
    SolutionCandidate,
    WeierstrassData,
    build_matrix_A,
    verify_solution,
    weierstrass_from_solution,
)

TOL_RESIDUAL = 1e-9
TOL_ROOT = 1e-10
REJECT_RTOL = 1e-8
DEFAULT_SEED = 20240601
NEWTON_RESTARTS = 50
EQF_TOL = 1e-10
ZETA3 = cmath.exp(2j * math.pi / 3)


# --- polynomial matrices ----------------------------------------------------

def _poly_det(M) -> ComplexPoly:
    """Determinant of a small matrix of ComplexPoly by permutation expansion."""
    n = len(M)
    total = ComplexPoly()
    for perm in itertools.permutations(range(n)):
        term = ComplexPoly([_perm_sign(perm)])
        for i, j in enumerate(perm):
            term = term * M[i][j]
            if term.is_zero:
                break
        total = total + term
    return total


def _perm_sign(perm) -> int:
    s, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def phi_matrix(p1, p2, p3):
    """The denominator-cleared 4x4 matrix whose determinant is Phi(t)."""
    p1, p2, p3 = complex(p1), complex(p2), complex(p3)
    c = np.conjugate
    P = ComplexPoly
    t_p2 = P([-p2, 1])
    t_p3 = P([-p3, 1])
    d23 = p2 - p3
    zero = P()
    return [
        [zero, t_p3 * (-(c(p1) * p2 + 1)), t_p2 * (-(c(p1) * p3 + 1)), t_p2 * t_p3 * c(p1)],
        [P([(c(p2) * p1 + 1) * d23]), zero, t_p2 * (-(c(p2) * p3 + 1)), t_p2 * (c(p2) * d23)],
        [P([(c(p3) * p1 + 1) * d23]), t_p3 * (c(p3) * p2 + 1), zero, t_p3 * (c(p3) * d23)],
        [P([-p1]), P([-p2]), P([-p3]), zero],
    ]


def phi_quartic(p1, p2, p3) -> ComplexPoly:
    """Phi(t) = (p2-p3)^2 (t-p2)^2 (t-p3)^2 det A(t) for p4 = q4 = inf."""
    for x in (p1, p2, p3):
        if is_inf(x):
            raise DegenerateConfiguration("phi_quartic needs finite p1, p2, p3")
    phi = _poly_det(phi_matrix(p1, p2, p3))
    lead = abs(p1) ** 2 * abs(np.conjugate(p2) * p3 + 1) ** 2
    scale = max(phi.maxnorm() if not phi.is_zero else 0.0, 1.0)
    if lead <= 1e-12 * scale:
        raise DegenerateConfiguration("Phi has no quartic term; data are not TYPE III")
    c = np.zeros(5, complex)
    c[: min(5, len(phi.coeffs))] = phi.coeffs[:5]
    return ComplexPoly(c)


@dataclass(frozen=True)
class KernelVector:
    B: tuple

    def __getitem__(self, i):
        return self.B[i]

    def __iter__(self):
        return iter(self.B)


def kernel_B(t, p1, p2, p3) -> KernelVector:
    t, p1, p2, p3 = complex(t), complex(p1), complex(p2), complex(p3)
    c = np.conjugate
    d = p2 - p3
    B1 = (c(p3) * p2 - c(p2) * p3) * d * (t - p2) * (t - p3)
    Ap = np.array([
        [-abs(p3) ** 2 * d, c(p2) * p3 * d, c(p3) * (c(p2) * p3 + 1) * d],
        [c(p3) * p2 * d, -abs(p2) ** 2 * d, -c(p2) * (c(p3) * p2 + 1) * d],
        [p3 * (c(p3) * p2 + 1), -p2 * (c(p2) * p3 + 1), -abs(c(p2) * p3 + 1) ** 2],
    ])
    rhs = np.array([
        (c(p2) * p1 + 1) * d * (t - p3),
        (c(p3) * p1 + 1) * d * (t - p2),
        -p1 * (t - p2) * (t - p3),
    ])
    B234 = Ap @ rhs
    return KernelVector((complex(B1),) + tuple(complex(x) for x in B234))


def assemble_b(t_root, p, a4, rtol: float = REJECT_RTOL):
    """b_j = B_j sqrt(a4 / (B4 (B1+B2+B3))), principal branch."""
    B = np.array(kernel_B(t_root, *p[:3]).B)
    S = float(np.max(np.abs(B)))
    if S == 0 or abs(B[0]) <= rtol * S:
        raise RejectedRoot("B1 vanishes at this root")
    if abs(B[1] * B[2] * B[3]) <= rtol * S ** 3:
        raise RejectedRoot("a kernel component vanishes at this root")
    sigma = B[0] + B[1] + B[2]
    if abs(sigma) <= rtol * S:
        raise RejectedRoot("B1+B2+B3 vanishes at this root")
    return list(B * cmath.sqrt(a4 / (B[3] * sigma)))


# --- Newton polishing of a candidate ----------------------------------------

def _system(q, b, p, a):
    """Residual vector of the weight and kernel rows, and its Jacobian in
    (q, b).  Every row is holomorphic in (q, b) since p is fixed."""
    n = len(q)
    m = next((k for k in range(n) if is_inf(q[k])), None)
    F = np.zeros(2 * n, complex)
    J = np.zeros((2 * n, 2 * n), complex)  # columns: q_0..q_{n-1}, b_0..b_{n-1}
    for j in range(n):
        if j == m:
            S = sum(b[k] for k in range(n) if k != j)
            T = sum(p[k] * b[k] for k in range(n) if k != j)
            F[j] = b[j] * S - a[j]
            F[n + j] = -b[j] * T
            J[j, n + j] = S
            J[n + j, n + j] = -T
            for k in range(n):
                if k != j:
                    J[j, n + k] = b[j]
                    J[n + j, n + k] = -b[j] * p[k]
            continue
        W = K = 0j
        for k in range(n):
            if k == j:
                continue
            if k == m:
                mjk, njk = 1.0, np.conjugate(p[j])
                dm = dn = 0.0
            else:
                dq = q[k] - q[j]
                mjk = (p[k] - p[j]) / dq
                njk = (np.conjugate(p[j]) * p[k] + 1) / dq
                dm, dn = -mjk / dq, -njk / dq
                J[j, k] += b[j] * b[k] * dm
                J[j, j] -= b[j] * b[k] * dm
                J[n + j, k] += b[j] * b[k] * dn
                J[n + j, j] -= b[j] * b[k] * dn
            W += b[k] * mjk
            K += b[k] * njk
            J[j, n + k] = b[j] * mjk
            J[n + j, n + k] = b[j] * njk
        F[j] = b[j] * W - a[j]
        F[n + j] = b[j] * K
        J[j, n + j] = W
        J[n + j, n + j] = K
    return F, J


def polish_candidate(c: SolutionCandidate, free_q=(), steps: int = 6) -> SolutionCandidate:
    """Gauss-Newton refinement of b and the listed punctures.  Keeps the
    input unless the residual strictly improves."""
    best, best_r = c, verify_solution(c).reduction2_residual
    q = np.array(c.q, complex)
    b = np.array(c.b, complex)
    cols = list(free_q) + [len(q) + k for k in range(len(q))]
    for _ in range(steps):
        F, J = _system(q, b, c.p, c.a)
        step, *_ = np.linalg.lstsq(J[:, cols], -F, rcond=None)
        for i, col in enumerate(cols):
            if col < len(q):
                q[col] += step[i]
            else:
                b[col - len(q)] += step[i]
        try:
            trial = SolutionCandidate(tuple(q), tuple(b), c.p, c.a, c.rotation, c.order, c.label)
        except ValueError:
            break
        r = verify_solution(trial).reduction2_residual
        if r < best_r:
            best, best_r = trial, r
        else:
            break
    return best


# --- normalisation ----------------------------------------------------------

@dataclass(frozen=True)
class NormalizedProblem:
    rotation: np.ndarray
    index_map: tuple
    p: tuple
    a: tuple


def choose_infinity_end(d: FluxData) -> int:
    best, best_val = 0, -1.0
    for i in range(d.n):
        val = min(float(np.linalg.norm(d.vectors[i] - d.vectors[k])) for k in range(d.n) if k != i)
        if val > best_val + 1e-14:
            best, best_val = i, val
    return best


def normalize_type3(d: FluxData) -> NormalizedProblem:
    m = choose_infinity_end(d)
    R = rotation_to_north(d.vectors[m])
    rest = [k for k in range(d.n) if k != m]
    pts = {k: stereographic(R @ d.vectors[k]) for k in rest}
    best = None
    for first in rest:
        others = [k for k in rest if k != first]
        p1, p2, p3 = pts[first], pts[others[0]], pts[others[1]]
        if any(is_inf(x) for x in (p1, p2, p3)):
            continue
        lead = abs(p1) ** 2 * abs(np.conjugate(p2) * p3 + 1) ** 2
        size = (1 + abs(p1) ** 2) * (1 + abs(p2) ** 2) * (1 + abs(p3) ** 2)
        score = lead / size
        if best is None or score > best[0] + 1e-14:
            best = (score, [first] + others)
    if best is None:
        raise DegenerateConfiguration("two end normals coincide with the chosen infinite end")
    order = tuple(best[1] + [m])
    p = tuple(pts[k] for k in best[1]) + (INF,)
    return NormalizedProblem(R, order, p, tuple(float(d.weights[k]) for k in order))


def _sort_key(c: SolutionCandidate):
    q1 = c.q[0]
    return (round(q1.real, 9), round(q1.imag, 9))


def _same_candidate(c1: SolutionCandidate, c2: SolutionCandidate, tol=1e-6) -> bool:
    if any(chordal(x, y) > tol for x, y in zip(c1.q, c2.q)):
        return False
    b1, b2 = np.array(c1.b), np.array(c2.b)
    s = max(np.max(np.abs(b1)), 1e-300)
    return bool(min(np.max(np.abs(b1 - b2)), np.max(np.abs(b1 + b2))) <= tol * s)


def _dedupe(cands):
    out = []
    for c in cands:
        if not any(_same_candidate(c, o) for o in out):
            out.append(c)
    return out


# --- TYPE III ---------------------------------------------------------------

def solve_type3(d: FluxData, tol_residual: float = TOL_RESIDUAL, tol_root: float = TOL_ROOT):
    """All verified 4-end solutions for TYPE III data (at most four)."""
    if d.n != 4:
        raise ValueError("solve_type3 handles n = 4 only")
    obs = detect_obstructions(d)
    if obs.obstructed:
        raise ObstructedInput("flux data match a known obstruction", obs.hits)
    prob = normalize_type3(d)
    p1, p2, p3, _ = prob.p
    phi = phi_quartic(p1, p2, p3)
    roots = poly_roots(phi, tol_root=tol_root)
    uniq = []
    for r in roots:
        if not any(abs(r - u) <= 1e-9 * (1 + abs(u)) for u in uniq):
            uniq.append(r)
    out = []
    for t in uniq:
        try:
            b = assemble_b(t, prob.p, prob.a[3])
            c = SolutionCandidate((t, p2, p3, INF), b, prob.p, prob.a, prob.rotation, prob.index_map)
        except (RejectedRoot, ValueError):
            continue
        c = _finish(c, free_q=(0,), tol=tol_residual)
        if c is not None:
            out.append(c)
    return sorted(_dedupe(out), key=_sort_key)


def _finish(c, free_q, tol):
    rep = verify_solution(c)
    if 1e-14 < rep.reduction2_residual < 1e-5:
        c = polish_candidate(c, free_q)
        rep = verify_solution(c)
    return c if rep.reduction2_residual < tol else None


# --- TYPE II ----------------------------------------------------------------

def _plane_rotation(d: FluxData) -> np.ndarray:
    """Rotation taking the span plane to the x1x3-plane, turned within that
    plane so no normal sits near the north pole."""
    _, _, vt = np.linalg.svd(d.vectors)
    normal = vt[-1]
    R0 = rotation_to_north(normal)
    R0 = rotation_about([1.0, 0.0, 0.0], -math.pi / 2) @ R0  # e3 -> e2
    V = d.vectors @ R0.T
    angles = np.arctan2(V[:, 0], V[:, 2])
    best, best_gap = 0.0, -1.0
    for th in np.linspace(0, 2 * math.pi, 721)[:-1]:
        gap = float(np.min(np.abs(np.angle(np.exp(1j * (angles + th))))))
        if gap > best_gap:
            best, best_gap = th, gap
    # rotating by th about e2 moves the angle atan2(x, z) by th
    return rotation_about([0.0, 1.0, 0.0], best) @ R0


def phi_type2(p) -> ComplexPoly:
    """Phi_II(s) for real p1..p4, with s = q1 + 1/q1."""
    p1, p2, p3, p4 = (float(np.real(x)) for x in p)
    pj = lambda x, y: x * y + 1.0  # noqa: E731
    p12, p13, p14, p23, p24, p34 = pj(p1, p2), pj(p1, p3), pj(p1, p4), pj(p2, p3), pj(p2, p4), pj(p3, p4)
    return ComplexPoly([
        8 * (p13 * p24 + p14 * p23) - 4 * p12 * p34,
        4 * (p13 * p24 - p14 * p23),
        p12 * p34,
    ])


def _pairing_score(p, order):
    x = [float(np.real(p[k])) for k in order]
    return abs((x[0] * x[1] + 1) * (x[2] * x[3] + 1) * (x[0] - x[1]) * (x[2] - x[3]))


def solve_type2(d: FluxData, tol_residual: float = TOL_RESIDUAL, tol_root: float = TOL_ROOT):
    """All verified 4-end solutions for planar (TYPE II) data."""
    if d.n != 4:
        raise ValueError("solve_type2 handles n = 4 only")
    obs = detect_obstructions(d)
    if obs.obstructed:
        raise ObstructedInput("flux data match a known obstruction", obs.hits)
    R = _plane_rotation(d)
    pts = [stereographic(R @ v) for v in d.vectors]
    if any(is_inf(x) for x in pts):
        raise DegenerateConfiguration("an end normal sits at the pole after rotation")
    pts = [complex(x.real, 0.0) for x in pts]
    orders = [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)]
    order = max(orders, key=lambda o: _pairing_score(pts, o))
    p = tuple(pts[k] for k in order)
    a = tuple(float(d.weights[k]) for k in order)
    phi = phi_type2(p)
    trimmed = phi.trimmed(1e-12)
    if trimmed.degree < 1:
        return []
    out = []
    for s in poly_roots(trimmed, tol_root=tol_root):
        x = (s + cmath.sqrt(s * s - 4)) / 2
        if abs(x * x - 1) < 1e-8 or abs(x) < 1e-8:
            continue
        q = (x, -x, 1.0, -1.0)
        out.extend(_type2_at(q, p, a, R, order, tol_residual))
    return sorted(_dedupe(out), key=_sort_key)


def _type2_at(q, p, a, R, order, tol):
    A = build_matrix_A(p, q)
    _, sv, vh = np.linalg.svd(A)
    if sv[-2] > 1e-6 * sv[0]:
        return []
    N = vh[-2:].conj().T  # 4 x 2 kernel basis
    n = 4
    M = np.zeros((n, n), complex)
    for j in range(n):
        for k in range(n):
            if j != k:
                M[j, k] = (p[k] - p[j]) / (q[k] - q[j])
    MN = M @ N
    G = [np.outer(N[j], MN[j]) for j in range(n)]
    G = [(g + g.T) / 2 for g in G]
    found = []
    for j, k in itertools.combinations(range(n), 2):
        H = a[k] * G[j] - a[j] * G[k]
        h2, h1, h0 = H[1, 1], 2 * H[0, 1], H[0, 0]
        hs = max(abs(h2), abs(h1), abs(h0))
        if hs == 0:
            continue
        dirs = []
        if abs(h2) > 1e-12 * hs:
            lam = poly_roots(ComplexPoly([h0, h1, h2])) if abs(h1) + abs(h0) > 0 else [0j, 0j]
            dirs += [np.array([1.0, l]) for l in lam]
        else:
            dirs.append(np.array([0.0, 1.0]))
            if abs(h1) > 1e-12 * hs:
                dirs.append(np.array([1.0, -h0 / h1]))
        for c0 in dirs:
            qj = c0 @ G[j] @ c0
            if abs(qj) < 1e-14 * (1 + np.abs(G[j]).max()):
                continue
            b = (N @ c0) * cmath.sqrt(a[j] / qj)
            if abs(b[0] * b[1]) < 1e-10 * float(np.max(np.abs(b))) ** 2:
                continue
            try:
                cand = SolutionCandidate(q, tuple(b), p, a, R, order)
            except ValueError:
                continue
            cand = _finish(cand, free_q=(0, 1), tol=tol)
            if cand is not None:
                found.append(cand)
    return found


# --- TYPE I -----------------------------------------------------------------

def eqf_residuals(q, a) -> np.ndarray:
    """F_j = sum_{k != j} a_k / (q_k - q_j) at the finite punctures."""
    q = np.asarray(q, complex)
    a = np.asarray(a, float)
    out = np.zeros(len(q), complex)
    for j in range(len(q)):
        for k in range(len(q)):
            if k != j:
                out[j] += a[k] / (q[k] - q[j])
    return out


def eqf_relative(q, a) -> float:
    q = np.asarray(q, complex)
    a = np.asarray(a, float)
    worst = 0.0
    for j in range(len(q)):
        terms = [a[k] / (q[k] - q[j]) for k in range(len(q)) if k != j]
        den = sum(abs(t) for t in terms)
        if den:
            worst = max(worst, abs(sum(terms)) / den)
    return worst


@dataclass(frozen=True)
class FamilySolution:
    """Punctures q (finite ones, for the weights a) and the infinite end
    carrying weight a_inf = sum(a).  g_t = -1/(t f), omega_t = -t f^2 dz with
    f = sum a_j / (z - q_j)."""

    q: tuple
    a: tuple
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    order: tuple = ()
    t_range: str = "t in C minus {0}"

    def residual(self) -> float:
        return eqf_relative(self.q, self.a)

    def candidate(self, t=1.0) -> SolutionCandidate:
        t = complex(t)
        if t == 0:
            raise ParamOutOfRange("t must be nonzero")
        rt = cmath.sqrt(t)
        n = len(self.q) + 1
        q = (INF,) + tuple(self.q)
        p = (INF,) + (0j,) * (n - 1)
        b = (1 / rt,) + tuple(x * rt for x in self.a)
        a = (float(sum(self.a)),) + tuple(self.a)
        order = self.order or tuple(range(n))
        return SolutionCandidate(q, b, p, a, self.rotation, order, label=f"t={t}")

    def weierstrass(self, t=1.0) -> WeierstrassData:
        return weierstrass_from_solution(self.candidate(t))


def _type1_pattern(d: FluxData, tol: float = 1e-9):
    """Index of the end opposite to all others, or None."""
    for i in range(d.n):
        if all(np.linalg.norm(d.vectors[i] + d.vectors[k]) < tol for k in range(d.n) if k != i):
            return i
    return None


def solve_type1_family(d: FluxData, seed: int = DEFAULT_SEED, restarts: int = NEWTON_RESTARTS) -> FamilySolution:
    obs = detect_obstructions(d)
    if obs.obstructed:
        raise ObstructedInput("flux data match a known obstruction", obs.hits)
    i = _type1_pattern(d)
    if i is None:
        raise NoSolution("only the one-opposite-end parallel pattern is supported", obs.hits)
    rest = [k for k in range(d.n) if k != i]
    a = np.array([d.weights[k] for k in rest])
    R = rotation_to_north(d.vectors[i])
    order = tuple([i] + rest)
    if len(rest) == 1:
        q = (0j,)
    elif len(rest) == 3:
        q = (0j, 1 + 0j, complex(-a[2] / a[1]))
    else:
        q = tuple(_newton_eqf(a, seed, restarts))
    fam = FamilySolution(q, tuple(float(x) for x in a), R, order)
    if fam.residual() > EQF_TOL:
        raise NewtonFailure("puncture equations not satisfied", obs.hits)
    return fam


def _newton_eqf(a, seed, restarts):
    """Damped Gauss-Newton for F(q) = 0 with q_0 = 0, q_1 = 1 fixed."""
    m = len(a)
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        x = rng.normal(size=m - 2) + 1j * rng.normal(size=m - 2)
        x *= 1.5
        q = np.concatenate([[0, 1], x]).astype(complex)
        r = np.linalg.norm(eqf_residuals(q, a))
        for _ in range(200):
            J = np.zeros((m, m - 2), complex)
            for j in range(m):
                for k in range(2, m):
                    if k == j:
                        J[j, k - 2] = sum(a[l] / (q[l] - q[j]) ** 2 for l in range(m) if l != j)
                    else:
                        J[j, k - 2] = -a[k] / (q[k] - q[j]) ** 2
            F = eqf_residuals(q, a)
            step, *_ = np.linalg.lstsq(J, -F, rcond=None)
            lam = 1.0
            while lam > 1e-6:
                trial = q.copy()
                trial[2:] += lam * step
                gaps = np.abs(trial[:, None] - trial[None, :]) + np.eye(m)
                if gaps.min() > 1e-9 and np.all(np.isfinite(trial)):
                    rt = np.linalg.norm(eqf_residuals(trial, a))
                    if rt < r:
                        q, r = trial, rt
                        break
                lam /= 2
            else:
                break
            if eqf_relative(q, a) < 1e-13:
                break
        gaps = np.abs(q[:, None] - q[None, :]) + np.eye(m)
        if eqf_relative(q, a) < EQF_TOL and gaps.min() > 1e-6 and np.max(np.abs(q)) < 1e6:
            return q
    raise NewtonFailure("no puncture configuration found within the restart budget")


# --- dispatch ---------------------------------------------------------------

def solve(d: FluxData, tol_residual: float = TOL_RESIDUAL, tol_root: float = TOL_ROOT, seed: int = DEFAULT_SEED):
    """Dispatch on TYPE.  Returns (kind, result) where result is a list of
    candidates (n = 4) or a FamilySolution (TYPE I)."""
    kind = classify_type(d).kind
    if kind == TYPE_I:
        return kind, solve_type1_family(d, seed=seed)
    if d.n != 4:
        raise NoSolution(f"{kind} solving is implemented for n = 4 only", detect_obstructions(d).hits)
    if kind == TYPE_II:
        return kind, solve_type2(d, tol_residual, tol_root)
    return kind, solve_type3(d, tol_residual, tol_root)


# --- named examples ---------------------------------------------------------

C_WINDOW = (math.sqrt(6) + math.sqrt(2)) / 2


@dataclass(frozen=True)
class NamedExample:
    name: str
    params: dict
    candidates: tuple
    flat: bool = False
    notes: tuple = ()


def tetrahedral_points():
    s = 1 / math.sqrt(2)
    return (complex(s), ZETA3 * s, ZETA3 ** 2 * s, INF)


def square_flux_roots(p: float):
    """Roots q != 0 of (p^2-1) q^4 - 4p q^3 + 4p q + (p^2-1) = 0."""
    c = ComplexPoly([p * p - 1, 4 * p, 0, -4 * p, p * p - 1])
    if c.degree < 1:
        raise ParamOutOfRange("degenerate quartic")
    roots = [r for r in poly_roots(c.trimmed(1e-14)) if abs(r) > 1e-12]
    return sorted(roots, key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def square_flux_candidate(p: float, q: complex) -> SolutionCandidate:
    q = complex(q)
    if abs(q ** 4 + 1) < 1e-12:
        raise ParamOutOfRange("q^4 = -1 is excluded")
    den = q * (p * (q ** 4 + 1) + 2 * q * (p * p * q * q + 1))
    if abs(den) < 1e-12 * (1 + abs(q) ** 5):
        raise ParamOutOfRange("r is infinite at this root (flat-end degeneration)")
    r = cmath.sqrt((q ** 4 + 1) / den)
    qs = (q, -q, 1j / q, -1j / q)
    ps = (complex(p), complex(-p), 1j / p, -1j / p)
    b = (r * q, r * q, r * p, r * p)
    return SolutionCandidate(qs, b, ps, (1.0, 1.0, 1.0, 1.0), label=f"square-flux p={p!r} q={q!r}")


def square_flux_data(p: float) -> FluxData:
    return FluxData.from_points([p, -p, 1j / p, -1j / p], [1.0] * 4)


def named_example(name: str, params: dict | None = None) -> NamedExample:
    params = dict(params or {})
    if name == "tetrahedral":
        p = tetrahedral_points()
        t = 1 / math.sqrt(2)
        b = assemble_b(t, p, 1.0)
        c = SolutionCandidate((t, p[1], p[2], INF), b, p, (1.0,) * 4, label="tetrahedral")
        return NamedExample(name, params, (c,))
    if name == "tetrahedral-flat":
        p = tetrahedral_points()
        t = -math.sqrt(2)
        B = kernel_B(t, *p[:3]).B
        c = SolutionCandidate((t, p[1], p[2], INF), B, p, (0.0,) * 4, label="tetrahedral-flat")
        return NamedExample(name, params, (c,), flat=True,
                            notes=("all weights vanish: four flat ends, not a catenoid",))
    if name in ("square-flux", "jorge-meeks"):
        p = float(params.get("p", 1.0)) if name == "square-flux" else 1.0
        if not p > 0:
            raise ParamOutOfRange("square-flux needs p > 0")
        roots = square_flux_roots(p)
        if name == "jorge-meeks":
            roots = [r for r in roots if abs(r - 1) < 1e-9]
        cands, notes = [], []
        for q in roots:
            try:
                cands.append(square_flux_candidate(p, q))
            except ParamOutOfRange as exc:
                notes.append(f"q={q!r}: {exc}")
        return NamedExample(name, {"p": p}, tuple(cands), notes=tuple(notes))
    if name == "parallel4":
        a = (float(params.get("a2", -1.0)), float(params.get("a3", 2.0)), float(params.get("a4", 2.0)))
        _require_e2_zero(a)
        t = complex(params.get("t", 1.0))
        fam = FamilySolution((0j, 1 + 0j, complex(-a[2] / a[1])), a)
        return NamedExample(name, {"a2": a[0], "a3": a[1], "a4": a[2], "t": t}, (fam.candidate(t),))
    if name == "parallel5":
        a2 = float(params.get("a2", -1.0))
        a3 = float(params.get("a3", 1.0))
        a4 = float(params.get("a4", 1.0))
        if "a5" in params:
            a5 = float(params["a5"])
        else:
            s3 = a2 + a3 + a4
            if s3 == 0:
                raise ParamOutOfRange("a2 + a3 + a4 must be nonzero")
            a5 = -(a2 * a3 + a2 * a4 + a3 * a4) / s3
        a = (a2, a3, a4, a5)
        _require_e2_zero(a)
        sign = float(params.get("sign", 1.0))
        t = complex(params.get("t", 1.0))
        fam = parallel5_family(a, sign)
        return NamedExample(name, {"a2": a2, "a3": a3, "a4": a4, "a5": a5, "sign": sign, "t": t},
                            (fam.candidate(t),))
    if name == "zm":
        m = int(params.get("m", 3))
        if m < 2:
            raise ParamOutOfRange("zm needs m >= 2")
        t = complex(params.get("t", 1.0))
        fam = zm_family(m)
        return NamedExample(name, {"m": m, "t": t}, (fam.candidate(t),))
    raise UnknownName(name)


def _require_e2_zero(a):
    e2 = sum(x * y for x, y in itertools.combinations(a, 2))
    if abs(e2) > 1e-10 * max(abs(x * y) for x, y in itertools.combinations(a, 2)):
        raise ParamOutOfRange("weights must satisfy sum_{j<k} a_j a_k = 0")
    if any(x == 0 for x in a):
        raise ParamOutOfRange("weights must be nonzero")


def parallel5_family(a, sign: float = 1.0) -> FamilySolution:
    a2, a3, a4, a5 = a
    z6 = complex(0.5, math.copysign(math.sqrt(3) / 2, sign))
    q4 = (a2 + a5 * z6) / (a2 + a3 + a5)
    q5 = (a2 + a4 * z6.conjugate()) / (a2 + a3 + a4)
    return FamilySolution((0j, 1 + 0j, q4, q5), tuple(a))


def zm_family(m: int) -> FamilySolution:
    q = (0j,) + tuple(cmath.exp(2j * math.pi * k / m) for k in range(m))
    a = (float(1 - m),) + (2.0,) * m
    return FamilySolution(q, a)


def catenoid_family() -> FamilySolution:
    return FamilySolution((0j,), (1.0,))


# --- congruence -------------------------------------------------------------

def _procrustes(X, Y, proper: bool):
    """Orthogonal O (det +1 or -1) minimising |X O^T - Y|."""
    H = X.T @ Y
    U, _, Vt = np.linalg.svd(H)
    D = np.eye(3)
    want = 1.0 if proper else -1.0
    if np.linalg.det(Vt.T @ U.T) * want < 0:
        D[2, 2] = -1.0
    return Vt.T @ D @ U.T


def _original_q(c: SolutionCandidate):
    q = [None] * c.n
    for i, k in enumerate(c.order):
        q[k] = c.q[i]
    return q


def congruent(c1: SolutionCandidate, c2: SolutionCandidate, tol: float = 1e-6) -> bool:
    """Whether two candidates give congruent surfaces: some relabelling of
    the ends matches the flux vectors under an orthogonal map and the
    punctures under a Moebius map (anti-Moebius for reflections)."""
    if c1.n != c2.n:
        return False
    F1 = 4 * math.pi * np.array(sorted_a(c1))[:, None] * c1.original_normals()
    F2 = 4 * math.pi * np.array(sorted_a(c2))[:, None] * c2.original_normals()
    q1, q2 = _original_q(c1), _original_q(c2)
    scale = max(float(np.max(np.linalg.norm(F1, axis=1))), 1e-300)
    for perm in itertools.permutations(range(c1.n)):
        Y = F2[list(perm)]
        qp = [q2[k] for k in perm]
        for proper in (True, False):
            O = _procrustes(F1, Y, proper)
            if np.max(np.linalg.norm(F1 @ O.T - Y, axis=1)) > tol * scale:
                continue
            src = q1 if proper else [x.conjugate() for x in q1]
            if mobius_equivalent(src, qp, tol):
                return True
    return False


def sorted_a(c: SolutionCandidate):
    a = [0.0] * c.n
    for i, k in enumerate(c.order):
        a[k] = c.a[i]
    return a


def flux_vectors(c: SolutionCandidate) -> np.ndarray:
    """4 pi a_j nu_j in the input frame and order."""
    return 4 * math.pi * np.array(sorted_a(c))[:, None] * c.original_normals()

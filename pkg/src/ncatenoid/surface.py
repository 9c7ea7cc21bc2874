"""Turning Weierstrass data into geometry: point evaluation, contour
oracles (flux, Hopf weight, loop closure), the induced metric, meshes and
OBJ export.

Two charts are used.  The z-chart covers the plane; the u-chart (z = 1/u)
covers a neighbourhood of infinity and is evaluated with reversed
polynomials so nothing overflows near u = 0.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from .errors import AtPuncture, PathBlocked, SinkFailure
from .fluxmodel import INF, chordal, ext, is_inf, normal_from_pq
from .residues import WeierstrassData

PUNCTURE_TOL = 1e-12
BASE_POINT_MIN_CHORDAL = 1e-3

# Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half) and weights.
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WK_FULL = np.concatenate([_WK[:-1], _WK[::-1]])
_WG_FULL = np.zeros(15)
_gauss_idx_left = [1, 3, 5]
for i, k in enumerate(_gauss_idx_left):
    _WG_FULL[k] = _WG[i]
_WG_FULL[7] = _WG[3]
for i, k in enumerate(_gauss_idx_left):
    _WG_FULL[14 - k] = _WG[i]


@dataclass(frozen=True)
class SamplingConfig:
    base_point: complex | None = None
    end_truncation: float = 1.0
    radial_steps: int = 10
    angular_steps: int = 32
    grid_steps: int = 24
    contour_samples: int = 1024
    quad_tol: float = 1e-10
    metric_growth: float = 1e4

    @classmethod
    def from_dict(cls, obj):
        obj = dict(obj)
        if obj.get("base_point") is not None:
            bp = obj["base_point"]
            obj["base_point"] = complex(*bp) if isinstance(bp, (list, tuple)) else complex(bp)
        return cls(**obj)

    def to_dict(self):
        d = dict(self.__dict__)
        if d["base_point"] is not None:
            d["base_point"] = [d["base_point"].real, d["base_point"].imag]
        return d


def choose_base_point(w: WeierstrassData) -> complex:
    """A lattice point as far (chordally) from the punctures as possible."""
    cands = [complex(x, y) for x in np.arange(-2, 2.01, 0.25) for y in np.arange(-2, 2.01, 0.25)]
    return max(cands, key=lambda z: (round(min(chordal(z, q) for q in w.q), 12), -abs(z)))


def base_point(w: WeierstrassData, cfg: SamplingConfig) -> complex:
    z0 = choose_base_point(w) if cfg.base_point is None else complex(cfg.base_point)
    if is_inf(z0) or min(chordal(z0, q) for q in w.q) <= BASE_POINT_MIN_CHORDAL:
        raise ValueError("base point too close to a puncture")
    return z0


# --- pointwise evaluation ---------------------------------------------------

def _check_not_puncture(w: WeierstrassData, z):
    for q in w.q:
        if chordal(z, q) <= PUNCTURE_TOL:
            raise AtPuncture(f"z = {z!r} is a puncture")


def eval_weierstrass(w: WeierstrassData, z):
    """(g(z), density of omega with respect to dz)."""
    z = ext(z)
    _check_not_puncture(w, z)
    if is_inf(z):
        return _g_at_infinity(w), 0j
    P, Q, R = w.P(z), w.Q(z), w.R(z)
    g = INF if Q == 0 else complex(P / Q)
    if Q == 0 and P == 0:
        g = complex(w.P.deriv()(z) / w.Q.deriv()(z))
    return g, complex(-w.scale * (Q / R) ** 2)


def _g_at_infinity(w: WeierstrassData) -> complex:
    dP, dQ = w.P.degree, w.Q.degree
    if dP > dQ:
        return INF
    if dP < dQ:
        return 0j
    return complex(w.P.lc / w.Q.lc)


def metric_density(w: WeierstrassData, z) -> float:
    """(1 + |g|^2)^2 |omega|^2 written as (|P|^2 + |Q|^2)^2 |s|^2 / |R|^4."""
    z = ext(z)
    _check_not_puncture(w, z)
    if is_inf(z):
        return 0.0
    P, Q, R = w.P(z), w.Q(z), w.R(z)
    return float((abs(P) ** 2 + abs(Q) ** 2) ** 2 * abs(w.scale) ** 2 / abs(R) ** 4)


def gauss_normal(w: WeierstrassData, z) -> np.ndarray:
    z = ext(z)
    if is_inf(z):
        dP, dQ = w.P.degree, w.Q.degree
        top = max(dP, dQ)
        Pc = w.P.lc if dP == top else 0j
        Qc = w.Q.lc if dQ == top else 0j
        return normal_from_pq(Pc, Qc)
    return normal_from_pq(w.P(z), w.Q(z))


# --- the three coordinate forms in each chart -------------------------------

def forms_z(w: WeierstrassData, z) -> np.ndarray:
    """((1-g^2) w, i(1+g^2) w, 2 g w) densities in dz, shape (..., 3)."""
    z = np.asarray(z, complex)
    P, Q, R = w.P(z), w.Q(z), w.R(z)
    f = -w.scale / R ** 2
    return np.stack([f * (Q * Q - P * P), 1j * f * (Q * Q + P * P), 2 * f * P * Q], axis=-1)


def _rev(poly):
    if poly.is_zero:
        return poly, 0
    return poly.reversed(), poly.degree


def forms_u(w: WeierstrassData, u) -> np.ndarray:
    """The same forms written in du for z = 1/u."""
    u = np.asarray(u, complex)
    Pr, dP = _rev(w.P)
    Qr, dQ = _rev(w.Q)
    Rr, dR = _rev(w.R)
    P, Q, R = Pr(u), Qr(u), Rr(u)
    base = 2 * dR - 2
    qq = _upow(u, base - 2 * dQ) * Q * Q
    pp = _upow(u, base - 2 * dP) * P * P if not w.P.is_zero else 0 * u
    pq = _upow(u, base - dP - dQ) * P * Q if not w.P.is_zero else 0 * u
    f = w.scale / R ** 2
    return np.stack([f * (qq - pp), 1j * f * (qq + pp), 2 * f * pq], axis=-1)


def _upow(u, k: int):
    if k >= 0:
        return u ** k
    return 1.0 / u ** (-k)


def hopf_z(w: WeierstrassData, z):
    z = np.asarray(z, complex)
    P, Q, R = w.P(z), w.Q(z), w.R(z)
    dP, dQ = w.P.deriv()(z), w.Q.deriv()(z)
    return -w.scale * (dP * Q - P * dQ) / R ** 2


def hopf_u(w: WeierstrassData, u):
    """Hopf density in du^2 for z = 1/u."""
    u = np.asarray(u, complex)
    Pr, dP = _rev(w.P)
    Qr, dQ = _rev(w.Q)
    Rr, dR = _rev(w.R)
    e = dQ - dP
    P, Q, R = Pr(u), Qr(u), Rr(u)
    dPr, dQr = Pr.deriv()(u), Qr.deriv()(u)
    inner = e * _upow(u, e - 1) * P * Q + _upow(u, e) * (dPr * Q - P * dQr)
    return w.scale * _upow(u, 2 * (dR - dQ) - 2) * inner / R ** 2


# --- adaptive Gauss-Kronrod over many segments at once ----------------------

def gk_segments(F, A, B, tol: float = 1e-10, rtol: float = 1e-13, max_depth: int = 40):
    """Integrals of F(z) dz along the straight segments A[i] -> B[i].

    ``F`` maps an array of points to an array with a trailing axis of 3.
    Each segment gets absolute tolerance ``tol`` shared out by length.
    """
    A = np.asarray(A, complex).ravel()
    B = np.asarray(B, complex).ravel()
    m = len(A)
    out = np.zeros((m, 3), complex)
    if m == 0:
        return out
    full = np.abs(B - A)
    full[full == 0] = 1.0
    ids = np.arange(m)
    a, b, depth = A.copy(), B.copy(), np.zeros(m, int)
    while len(ids):
        mid = (a + b) / 2
        half = (b - a) / 2
        z = mid[:, None] + half[:, None] * _NODES[None, :]
        vals = F(z)
        K = half[:, None] * np.einsum("k,nkc->nc", _WK_FULL, vals)
        G = half[:, None] * np.einsum("k,nkc->nc", _WG_FULL, vals)
        err = np.max(np.abs(K - G), axis=1)
        allow = np.maximum(tol * np.abs(b - a) / full[ids], rtol * np.max(np.abs(K), axis=1))
        ok = (err <= allow) | (depth >= max_depth) | ~np.isfinite(err)
        np.add.at(out, ids[ok], K[ok])
        bad = ~ok
        ids = np.concatenate([ids[bad], ids[bad]])
        a, b = np.concatenate([a[bad], mid[bad]]), np.concatenate([mid[bad], b[bad]])
        depth = np.concatenate([depth[bad], depth[bad]]) + 1
    return out


# --- contour oracles --------------------------------------------------------

def _finite_punctures(w):
    return [complex(q) for q in w.q if not is_inf(q)]


def contour_circle(w: WeierstrassData, j: int, cfg: SamplingConfig):
    """(centre, radius, chart) of the quadrature circle around end j."""
    q = w.q[j]
    fin = _finite_punctures(w)
    if is_inf(q):
        dist = [1.0 / abs(x) for x in fin if x != 0]
        return 0j, min(0.5 * min(dist), cfg.end_truncation) if dist else cfg.end_truncation, "u"
    others = [abs(q - x) for x in fin if x != q]
    r = min(0.5 * min(others), cfg.end_truncation) if others else cfg.end_truncation
    return q, r, "z"


def _loop_integral(w, j, cfg, samples=None):
    N = samples or cfg.contour_samples
    c, r, chart = contour_circle(w, j, cfg)
    theta = 2 * math.pi * np.arange(N) / N
    pts = c + r * np.exp(1j * theta)
    dz = 1j * (pts - c) * (2 * math.pi / N)
    vals = forms_z(w, pts) if chart == "z" else forms_u(w, pts)
    integrand = vals * dz[:, None]
    return integrand.sum(axis=0), np.abs(integrand).sum(axis=0)


def contour_flux(w: WeierstrassData, j: int, cfg: SamplingConfig = SamplingConfig()) -> np.ndarray:
    """phi_j = -Im of the loop integral of the three forms around end j."""
    total, _ = _loop_integral(w, j, cfg)
    return -total.imag


def loop_closure(w: WeierstrassData, j: int, cfg: SamplingConfig = SamplingConfig()):
    """(Re of the loop integral, L1 size of the integrand along the loop)."""
    total, size = _loop_integral(w, j, cfg)
    return total.real, float(size.max())


def hopf_weight(w: WeierstrassData, j: int, cfg: SamplingConfig = SamplingConfig()):
    """(real part, imaginary part) of the (z - q_j)^-2 Laurent coefficient of
    omega * dg; an infinite end is read off in the u-chart."""
    N = cfg.contour_samples
    c, r, chart = contour_circle(w, j, cfg)
    theta = 2 * math.pi * np.arange(N) / N
    pts = c + r * np.exp(1j * theta)
    h = hopf_z(w, pts) if chart == "z" else hopf_u(w, pts)
    dz = 1j * (pts - c) * (2 * math.pi / N)
    val = np.sum((pts - c) * h * dz) / (2j * math.pi)
    return float(val.real), float(val.imag)


# --- integrating the immersion ----------------------------------------------

def _exclusion(w):
    fin = _finite_punctures(w)
    if len(fin) < 2:
        return fin, 0.25
    dmin = min(abs(x - y) for i, x in enumerate(fin) for y in fin[i + 1:])
    return fin, 0.25 * dmin


def plan_path(w: WeierstrassData, z0: complex, z: complex, max_depth: int = 64):
    """Polyline from z0 to z staying outside the disks |z - q| < rho."""
    fin, rho = _exclusion(w)
    ring = 1.5 * rho

    def seg_dist(a, b, c):
        d = b - a
        L2 = abs(d) ** 2
        t = 0.0 if L2 == 0 else min(1.0, max(0.0, ((c - a) * d.conjugate()).real / L2))
        return abs(a + t * d - c), t

    def route(a, b, depth):
        if depth > max_depth:
            raise PathBlocked("path planning did not terminate")
        hits = []
        for c in fin:
            dist, t = seg_dist(a, b, c)
            if dist < rho:
                hits.append((t, c))
        if not hits:
            return [b]
        _, c = min(hits)
        # radially out to the detour ring, around it, radially on to b
        pa = c + ring * (a - c) / abs(a - c)
        pb = c + ring * (b - c) / abs(b - c)
        head = route(a, pa, depth + 1) if abs(a - c) != ring else []
        around = _arc(c, pa, pb, ring)
        if abs(b - c) <= ring:
            return head + around + [b]
        return head + around + route(pb, b, depth + 1)

    pts = [complex(z0)] + route(complex(z0), complex(z), 0)
    for p in pts:
        for c in fin:
            if abs(p - c) < 0.999 * rho and abs(p - z) > 0:
                raise PathBlocked("detour enters a puncture disk")
    return pts


def _arc(c, start, end, ring, step=math.pi / 8):
    a0 = np.angle(start - c)
    a1 = np.angle(end - c)
    da = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
    k = max(1, int(math.ceil(abs(da) / step)))
    return [c + ring * np.exp(1j * (a0 + da * i / k)) for i in range(1, k + 1)]


def integrate_point(w: WeierstrassData, z, cfg: SamplingConfig = SamplingConfig()) -> np.ndarray:
    """Re of the integral of the three forms from the base point to z."""
    z = complex(z)
    _check_not_puncture(w, z)
    z0 = base_point(w, cfg)
    pts = plan_path(w, z0, z)
    A, B = np.array(pts[:-1]), np.array(pts[1:])
    vals = gk_segments(lambda x: forms_z(w, x), A, B, tol=cfg.quad_tol)
    return vals.sum(axis=0).real


# --- meshing ----------------------------------------------------------------

@dataclass
class SurfaceMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    end_labels: np.ndarray
    gauss_values: np.ndarray
    domain: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    end_meta: list = field(default_factory=list)

    def validate(self):
        nv = len(self.vertices)
        if len(self.triangles) and (self.triangles.min() < 0 or self.triangles.max() >= nv):
            raise ValueError("triangle index out of range")
        return True


class _Builder:
    def __init__(self):
        self.z = []
        self.in_inf = []
        self.label = []
        self.tris = []

    def add(self, z, label, in_inf=False):
        self.z.append(complex(z))
        self.label.append(label)
        self.in_inf.append(in_inf)
        return len(self.z) - 1


def _log_polar(builder, centre, r_in, r_out, K, L, label, chart_inf, outer_ids=None, flip=False):
    """Log-polar annulus; returns the ids of the outer ring."""
    ids = np.zeros((K + 1, L), int)
    radii = r_in * (r_out / r_in) ** (np.arange(K + 1) / K)
    for k in range(K + 1):
        for l in range(L):
            if k == K and outer_ids is not None:
                ids[k, l] = outer_ids[l]
                continue
            pt = centre + radii[k] * np.exp(2j * math.pi * l / L)
            z = (1 / pt if pt != 0 else INF) if chart_inf else pt
            ids[k, l] = builder.add(z, label, chart_inf)
    for k in range(K):
        for l in range(L):
            a, b, c, d = ids[k, l], ids[k, (l + 1) % L], ids[k + 1, (l + 1) % L], ids[k + 1, l]
            t1, t2 = (a, b, c), (a, c, d)
            if flip:
                t1, t2 = (a, c, b), (a, d, c)
            builder.tris += [t1, t2]
    return list(ids[K])


def _cap(builder, r, K, L, label, outer_ids):
    """Polar disk in the u-chart around u = 0 (infinity is not a puncture)."""
    centre = builder.add(INF, label, True)
    rings = [[centre] * L]
    for k in range(1, K + 1):
        if k == K:
            rings.append(list(outer_ids))
            continue
        rk = r * k / K
        rings.append([builder.add(1 / (rk * np.exp(2j * math.pi * l / L)), label, True) for l in range(L)])
    for l in range(L):
        a, b = rings[1][l], rings[1][(l + 1) % L]
        builder.tris.append((centre, b, a))
    for k in range(1, K):
        for l in range(L):
            a, b = rings[k][l], rings[k][(l + 1) % L]
            c, d = rings[k + 1][(l + 1) % L], rings[k + 1][l]
            builder.tris += [(a, c, b), (a, d, c)]


def _inner_radius(w, centre, r_out, growth, chart):
    """Radius where the mean metric density has grown by ``growth``."""
    th = np.exp(2j * math.pi * np.arange(16) / 16)

    def dens(r):
        pts = centre + r * th
        if chart == "u":
            return float(np.mean([metric_density(w, 1 / p) / abs(p) ** 4 for p in pts]))
        return float(np.mean([metric_density(w, p) for p in pts]))

    ref = dens(r_out)
    lo, hi = math.log(r_out) - 8 * math.log(10), math.log(r_out / 2)
    if dens(math.exp(hi)) >= growth * ref:
        return math.exp(hi), ref
    if dens(math.exp(lo)) < growth * ref:
        return math.exp(lo), ref
    for _ in range(50):
        mid = (lo + hi) / 2
        if dens(math.exp(mid)) >= growth * ref:
            lo = mid
        else:
            hi = mid
    return math.exp(lo), ref


def sample_surface(w: WeierstrassData, cfg: SamplingConfig = SamplingConfig()) -> SurfaceMesh:
    z0 = base_point(w, cfg)
    fin = _finite_punctures(w)
    fin_idx = [j for j in range(w.n) if not is_inf(w.q[j])]
    K, L = cfg.radial_steps, cfg.angular_steps
    bld = _Builder()
    meta = []
    patches = []  # (centre, r_out) of z-chart holes

    for j in fin_idx:
        q = complex(w.q[j])
        others = [abs(q - x) for x in fin if x != q]
        cap = 0.4 * min(others) if others else cfg.end_truncation
        r_out = min(cap, cfg.end_truncation)
        r_in, ref = _inner_radius(w, q, r_out, cfg.metric_growth, "z")
        _log_polar(bld, q, r_in, r_out, K, L, j, False)
        patches.append((q, r_out))
        meta.append(_end_meta(w, j, q, r_in, r_out, "z"))

    # the region around infinity, in the u-chart
    far = [abs(x) for x in fin]
    r_u = min(0.4 / max(far), cfg.end_truncation) if max(far, default=0) > 0 else cfg.end_truncation
    R_bulk = 1.0 / r_u
    outer = [bld.add(R_bulk * np.exp(-2j * math.pi * l / L), -1, True) for l in range(L)]
    # u = r_u e^{i theta_l} corresponds to z = R_bulk e^{-i theta_l}
    m = w.inf_index
    if m is not None:
        r_in_u, _ = _inner_radius(w, 0j, r_u, cfg.metric_growth, "u")
        for i in outer:
            bld.label[i] = m
        _log_polar(bld, 0j, r_in_u, r_u, K, L, m, True, outer_ids=outer, flip=True)
        meta.append(_end_meta(w, m, 0j, r_in_u, r_u, "u"))
    else:
        _cap(bld, r_u, K, L, -1, outer)

    # bulk: grid plus all ring points, Delaunay, holes removed
    if cfg.grid_steps > 0:
        _bulk(bld, patches, R_bulk, cfg.grid_steps)
    meta.sort(key=lambda e: e["end"])
    return _integrate_mesh(w, bld, z0, cfg, meta)


def _end_meta(w, j, centre, r_in, r_out, chart):
    def dens(r):
        p = centre + r
        return metric_density(w, 1 / p) / abs(p) ** 4 if chart == "u" else metric_density(w, p)

    slope = (math.log(dens(r_in)) - math.log(dens(r_out))) / (math.log(r_in) - math.log(r_out))
    return {"end": j, "chart": chart, "r_inner": r_in, "r_outer": r_out, "metric_growth_exponent": slope}


def _bulk(bld, patches, R_bulk, steps):
    fixed_ids = [i for i in range(len(bld.z)) if _on_ring(bld.z[i], patches, R_bulk)]
    fixed = np.array([bld.z[i] for i in fixed_ids])
    h = 2 * R_bulk / steps
    xs = np.linspace(-R_bulk, R_bulk, steps + 1)
    grid = (xs[:, None] + 1j * xs[None, :]).ravel()
    keep = np.abs(grid) < R_bulk - 0.3 * h
    for c, r in patches:
        keep &= np.abs(grid - c) > r + 0.3 * h
    for f in fixed:
        keep &= np.abs(grid - f) > 0.3 * h
    grid = grid[keep]
    new_ids = [bld.add(z, -1) for z in grid]
    ids = np.array(fixed_ids + new_ids)
    pts = np.array([bld.z[i] for i in ids])
    tri = Delaunay(np.column_stack([pts.real, pts.imag]))
    for s in tri.simplices:
        zs = pts[s]
        cen = zs.mean()
        if abs(cen) > R_bulk:
            continue
        if any(abs(cen - c) < r for c, r in patches):
            continue
        if any(_seg_near(zs[i], zs[(i + 1) % 3], c, 0.9 * r) for c, r in patches for i in range(3)):
            continue
        a, b, c = ids[s]
        area = ((zs[1] - zs[0]).conjugate() * (zs[2] - zs[0])).imag
        bld.tris.append((a, b, c) if area > 0 else (a, c, b))


def _on_ring(z, patches, R_bulk):
    if is_inf(z):
        return False
    if abs(abs(z) - R_bulk) < 1e-9 * R_bulk:
        return True
    return any(abs(abs(z - c) - r) < 1e-9 * max(r, 1e-300) for c, r in patches)


def _seg_near(a, b, c, r):
    d = b - a
    L2 = abs(d) ** 2
    t = 0.0 if L2 == 0 else min(1.0, max(0.0, ((c - a) * d.conjugate()).real / L2))
    return abs(a + t * d - c) < r


def _integrate_mesh(w, bld, z0, cfg, meta):
    nv = len(bld.z)
    zs = np.array(bld.z, complex)
    in_inf = np.array(bld.in_inf)
    adj = [[] for _ in range(nv)]
    for t in bld.tris:
        for i in range(3):
            a, b = t[i], t[(i + 1) % 3]
            adj[a].append(b)
            adj[b].append(a)
    parent = np.full(nv, -1)
    seen = np.zeros(nv, bool)
    roots = []
    order = []
    finite = ~np.isinf(zs.real)
    dist0 = np.where(finite, np.abs(np.where(finite, zs, 0) - z0), np.inf)
    for start in np.argsort(dist0, kind="stable"):
        if seen[start] or not finite[start]:
            continue
        roots.append(int(start))
        seen[start] = True
        dq = deque([int(start)])
        while dq:
            v = dq.popleft()
            order.append(v)
            for u in sorted(set(adj[v])):
                if not seen[u]:
                    seen[u] = True
                    parent[u] = v
                    dq.append(u)
    X = np.zeros((nv, 3))
    for r in roots:
        X[r] = integrate_point(w, zs[r], cfg)
    child = [v for v in order if parent[v] >= 0]
    use_u = np.array([in_inf[v] and in_inf[parent[v]] for v in child], bool)
    incr = np.zeros((len(child), 3))
    ch = np.array(child, int)
    if len(ch):
        pa = parent[ch]
        if (~use_u).any():
            sel = ~use_u
            incr[sel] = gk_segments(lambda x: forms_z(w, x), zs[pa[sel]], zs[ch[sel]], tol=cfg.quad_tol).real
        if use_u.any():
            ua = np.array([_inv(z) for z in zs[pa[use_u]]])
            ub = np.array([_inv(z) for z in zs[ch[use_u]]])
            incr[use_u] = gk_segments(lambda x: forms_u(w, x), ua, ub, tol=cfg.quad_tol).real
    pos = dict(zip(child, incr))
    for v in order:
        if parent[v] >= 0:
            X[v] = X[parent[v]] + pos[v]
    normals = np.array([gauss_normal(w, z) for z in zs])
    mesh = SurfaceMesh(X, np.array(bld.tris, int).reshape(-1, 3), np.array(bld.label, int), normals,
                       zs, meta)
    mesh.validate()
    return mesh


def _inv(z):
    return 0j if is_inf(z) else 1 / z


# --- OBJ export -------------------------------------------------------------

def _fmt(x: float) -> str:
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def export_obj(m: SurfaceMesh, sink) -> None:
    """ASCII OBJ: v lines, vn lines, then 1-based f lines."""
    lines = []
    for v in m.vertices:
        lines.append("v " + " ".join(_fmt(x) for x in v))
    for n in m.gauss_values:
        lines.append("vn " + " ".join(_fmt(x) for x in n))
    for t in m.triangles:
        lines.append("f " + " ".join(str(int(i) + 1) for i in t))
    data = ("\n".join(lines) + "\n").encode("ascii")
    try:
        sink.write(data)
        if hasattr(sink, "flush"):
            sink.flush()
    except (OSError, ValueError, TypeError, AttributeError) as exc:
        raise SinkFailure(f"could not write mesh: {exc}") from exc

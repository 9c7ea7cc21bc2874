"""Dense complex univariate polynomials.

Coefficients are stored in ascending degree order.  The zero polynomial has
an empty coefficient array.  Everything here is a pure function of its
inputs; ``ComplexPoly`` instances are immutable.
"""

from __future__ import annotations

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import NonConvergence, ZeroPolynomial

EPS = np.finfo(float).eps

TOL_ROOT = 1e-10
ROOT_ITER_CAP = 500
ROOT_STEP_TOL = 1e-13
CLUSTER_TOL = 1e-7
RESULTANT_ZERO_TOL = 1e-9
GCD_TOL = 1e-10


class ComplexPoly:
    """Immutable polynomial with complex coefficients (ascending order)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = np.array(coeffs, dtype=complex).ravel()
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        object.__setattr__(self, "_c", c)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexPoly is immutable")

    @classmethod
    def from_roots(cls, roots, lc=1.0):
        roots = list(roots)
        if not roots:
            return cls([lc])
        return cls(lc * npoly.polyfromroots(roots))

    @classmethod
    def monomial(cls, k, c=1.0):
        return cls([0] * k + [c])

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return len(self._c) - 1

    @property
    def is_zero(self) -> bool:
        return len(self._c) == 0

    @property
    def lc(self) -> complex:
        if self.is_zero:
            return 0j
        return complex(self._c[-1])

    def maxnorm(self) -> float:
        return float(np.max(np.abs(self._c))) if len(self._c) else 0.0

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        other = _as_poly(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return ComplexPoly(npoly.polyadd(self._c, other._c))

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-self._c)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            if self.is_zero or other.is_zero:
                return ComplexPoly()
            return ComplexPoly(npoly.polymul(self._c, other._c))
        return ComplexPoly(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return ComplexPoly(self._c / complex(scalar))

    def divmod(self, other: ComplexPoly):
        if other.is_zero:
            raise ZeroPolynomial("division by the zero polynomial")
        if self.degree < other.degree:
            return ComplexPoly(), self
        q, r = npoly.polydiv(self._c, other._c)
        return ComplexPoly(q), ComplexPoly(r)

    def deriv(self, m: int = 1) -> ComplexPoly:
        if self.degree < m:
            return ComplexPoly()
        return ComplexPoly(npoly.polyder(self._c, m))

    def monic(self) -> ComplexPoly:
        if self.is_zero:
            raise ZeroPolynomial("the zero polynomial has no monic form")
        return ComplexPoly(self._c / self._c[-1])

    def reversed(self, degree: int | None = None) -> ComplexPoly:
        """Coefficients of z**degree * p(1/z)."""
        d = self.degree if degree is None else degree
        c = np.zeros(d + 1, dtype=complex)
        c[: len(self._c)] = self._c
        return ComplexPoly(c[::-1])

    def trimmed(self, rtol: float) -> ComplexPoly:
        """Drop leading coefficients smaller than rtol * maxnorm."""
        if self.is_zero:
            return self
        c = self._c.copy()
        cut = rtol * self.maxnorm()
        while len(c) and abs(c[-1]) <= cut:
            c = c[:-1]
        return ComplexPoly(c)

    def conj(self) -> ComplexPoly:
        return ComplexPoly(np.conj(self._c))

    def allclose(self, other, rtol=1e-10, atol=0.0) -> bool:
        other = _as_poly(other)
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: len(self._c)] = self._c
        b[: len(other._c)] = other._c
        scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
        return bool(np.all(np.abs(a - b) <= atol + rtol * scale))

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return len(self._c) == len(other._c) and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(tuple(self._c.tolist()))

    def __repr__(self):
        return f"ComplexPoly({self._c.tolist()!r})"


def _as_poly(x) -> ComplexPoly:
    if isinstance(x, ComplexPoly):
        return x
    return ComplexPoly([x])


def poly_eval(p: ComplexPoly, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    c = p.coeffs
    if np.ndim(z) == 0:
        acc = 0j
        for ck in c[::-1]:
            acc = acc * z + ck
        return complex(acc)
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for ck in c[::-1]:
        acc = acc * z + ck
    return acc


def _abs_eval(c: np.ndarray, z: complex) -> float:
    """sum |c_k| |z|^k, the roundoff scale of Horner at z."""
    r = abs(z)
    acc = 0.0
    for ck in c[::-1]:
        acc = acc * r + abs(ck)
    return acc


def _horner_with_deriv(c: np.ndarray, z: complex):
    b = c[-1]
    d = 0j
    for ck in c[-2::-1]:
        d = d * z + b
        b = b * z + ck
    return b, d


def poly_roots(
    p: ComplexPoly,
    tol_root: float = TOL_ROOT,
    max_iter: int = ROOT_ITER_CAP,
    cluster_tol: float = CLUSTER_TOL,
) -> list[complex]:
    """All roots of ``p`` with multiplicity, by Aberth-Ehrlich iteration.

    Near-coincident approximations of a multiple root are merged into one
    cluster and re-centred by Newton's method on the appropriate derivative,
    so exact double roots come back to full working precision.

    Raises NonConvergence if the iteration cap is hit and some root still
    fails the residual bound
    ``|p(r)| <= tol_root * max|c| * max(1, |r|)**deg``.
    """
    if p.degree < 1:
        raise ValueError("poly_roots needs degree >= 1")
    c = p.coeffs
    # exact zero roots
    k0 = 0
    while c[k0] == 0:
        k0 += 1
    zeros = [0j] * k0
    c = c[k0:]
    n = len(c) - 1
    if n == 0:
        return zeros
    if n == 1:
        return zeros + [complex(-c[0] / c[1])]

    a = c / c[-1]
    radius = 1.0 + float(np.max(np.abs(a[:-1])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.7))
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        for k in range(n):
            if done[k]:
                continue
            val, der = _horner_with_deriv(a, z[k])
            if val == 0 or abs(val) <= 8 * EPS * _abs_eval(a, z[k]):
                done[k] = True
                continue
            diff = z[k] - np.delete(z, k)
            if np.any(diff == 0):
                z[k] += 1e-8 * (1 + abs(z[k])) * np.exp(1j * k)
                continue
            ratio = val / der if der != 0 else np.inf
            if not np.isfinite(ratio):
                w = 1e-3 * (1 + abs(z[k]))
            else:
                w = ratio / (1 - ratio * np.sum(1.0 / diff))
            z[k] -= w
            if abs(w) < ROOT_STEP_TOL * (1 + abs(z[k])):
                done[k] = True
        if done.all():
            break
    else:
        scale = float(np.max(np.abs(c)))
        for r in z:
            bound = tol_root * scale * max(1.0, abs(r)) ** n
            if abs(poly_eval(ComplexPoly(c), r)) > bound:
                raise NonConvergence(f"Aberth iteration did not converge after {max_iter} steps")

    roots = _merge_clusters(ComplexPoly(a), list(z), cluster_tol)
    return zeros + roots


def _merge_clusters(p: ComplexPoly, roots: list[complex], cluster_tol: float) -> list[complex]:
    n = len(roots)
    scale = max(1.0, max(abs(r) for r in roots))
    a = p.coeffs
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            d = abs(roots[i] - roots[j])
            if d < cluster_tol * scale:
                parent[find(i)] = find(j)
            elif d < 1e-5 * scale:
                # only merge if the midpoint is numerically a root of p and p'
                c = _polish(p, 0.5 * (roots[i] + roots[j]), 1)
                if abs(c - 0.5 * (roots[i] + roots[j])) < d and abs(p(c)) <= 100 * EPS * _abs_eval(a, c):
                    parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        m = len(members)
        centre = complex(np.mean([roots[i] for i in members]))
        if m > 1:
            centre = _polish(p, centre, m - 1)
        out.extend([centre] * m)
    return sorted(out, key=lambda r: (round(r.real, 12), round(r.imag, 12)))


def _polish(p: ComplexPoly, z0: complex, order: int, steps: int = 30) -> complex:
    """Newton on the order-th derivative; keeps z0 if Newton wanders off."""
    f = p.deriv(order)
    df = f.deriv()
    z = z0
    for _ in range(steps):
        fz = f(z)
        dz = df(z)
        if dz == 0:
            break
        step = fz / dz
        z -= step
        if abs(step) < 1e-16 * (1 + abs(z)):
            break
    if not np.isfinite(z) or abs(f(z)) > abs(f(z0)):
        return z0
    return z


def sylvester_matrix(p: ComplexPoly, q: ComplexPoly) -> np.ndarray:
    if p.is_zero or q.is_zero:
        raise ZeroPolynomial("resultant of the zero polynomial")
    m, n = p.degree, q.degree
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    pd = p.coeffs[::-1]
    qd = q.coeffs[::-1]
    for i in range(n):
        S[i, i : i + m + 1] = pd
    for i in range(m):
        S[n + i, i : i + n + 1] = qd
    return S


def resultant(p: ComplexPoly, q: ComplexPoly) -> complex:
    """Determinant of the Sylvester matrix, via LU with partial pivoting."""
    S = sylvester_matrix(p, q)
    if S.size == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(S))


def resultant_scale(p: ComplexPoly, q: ComplexPoly) -> float:
    """Product of the Sylvester rows' max-norms (Hadamard-type scale)."""
    S = sylvester_matrix(p, q)
    if S.size == 0:
        return 1.0
    return float(np.prod(np.max(np.abs(S), axis=1)))


def resultant_vanishes(p: ComplexPoly, q: ComplexPoly, tol: float = RESULTANT_ZERO_TOL) -> bool:
    return abs(resultant(p, q)) < tol * resultant_scale(p, q)


def poly_gcd(p: ComplexPoly, q: ComplexPoly, tol: float = GCD_TOL) -> ComplexPoly:
    """Monic approximate gcd by Euclidean remainders.

    A remainder counts as zero once its max-norm drops below ``tol`` times
    the (unit-normalised) size of the current pair.  A degree-0 result
    certifies coprimality at that tolerance.
    """
    if p.is_zero or q.is_zero:
        raise ZeroPolynomial("gcd with the zero polynomial")
    a = p / p.maxnorm()
    b = q / q.maxnorm()
    if a.degree < b.degree:
        a, b = b, a
    while True:
        if b.degree == 0:
            return ComplexPoly([1.0])
        _, r = a.divmod(b)
        cut = tol * max(a.maxnorm(), b.maxnorm())
        c = r.coeffs
        while len(c) and abs(c[-1]) < cut:
            c = c[:-1]
        r = ComplexPoly(c)
        if r.is_zero:
            return b.monic()
        a, b = b, r / r.maxnorm()

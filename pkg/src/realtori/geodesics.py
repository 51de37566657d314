"""The product of the SPD cone with a matrix Euclidean factor.

The group of pairs (A, a) acts by (Y, V) -> (A Y tA, (V + a) tA); the
two-parameter invariant metric mixes the affine-invariant cone metric with a
Y-weighted Euclidean term.  Geodesics through the origin are exponential in
a rotated diagonal frame, and the geodesic distance has a closed form in the
generalized eigenvalues of the endpoint pencil plus a one-dimensional
integral handled by node-doubling Gauss-Legendre quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spdcone import is_minkowski_reduced, require_spd

__all__ = [
    "MinkowskiEuclidPoint",
    "GroupElementGLgh",
    "glgh_compose",
    "glgh_act",
    "metric_value",
    "volume_jacobian_check",
    "geodesic_through_origin",
    "whitening_frame",
    "distance",
    "in_fundamental_set",
]


@dataclass(frozen=True)
class MinkowskiEuclidPoint:
    """Pair (Y, V) with Y SPD of size g and V an h x g real matrix."""

    Y: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        Y = require_spd(self.Y)
        V = np.asarray(self.V, dtype=float)
        if V.ndim != 2 or V.shape[1] != Y.shape[0]:
            raise ValueError("companion matrix must have g columns")
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "V", V)

    @property
    def g(self) -> int:
        return self.Y.shape[0]

    @property
    def h(self) -> int:
        return self.V.shape[0]


@dataclass(frozen=True)
class GroupElementGLgh:
    """Group element (A, a): invertible A with an h x g translation part."""

    A: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        a = np.asarray(self.a, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("matrix part must be square")
        if abs(np.linalg.det(A)) < 1e-12:
            raise ValueError("matrix part must be invertible")
        if a.ndim != 2 or a.shape[1] != A.shape[0]:
            raise ValueError("translation part must have g columns")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "a", a)


def glgh_compose(x: GroupElementGLgh, y: GroupElementGLgh) -> GroupElementGLgh:
    """Product (A, a)(B, b) = (AB, a tB^-1 + b)."""
    return GroupElementGLgh(
        A=x.A @ y.A,
        a=x.a @ np.linalg.inv(y.A).T + y.a,
    )


def glgh_act(x: GroupElementGLgh, p: MinkowskiEuclidPoint) -> MinkowskiEuclidPoint:
    """Action (A, a) . (Y, V) = (A Y tA, (V + a) tA)."""
    Y = x.A @ p.Y @ x.A.T
    V = (p.V + x.a) @ x.A.T
    return MinkowskiEuclidPoint(Y=0.5 * (Y + Y.T), V=V)


def metric_value(p: MinkowskiEuclidPoint, dY, dV, A_c: float = 1.0,
                 B_c: float = 1.0) -> float:
    """Quadratic value A tr((Y^-1 dY)^2) + B tr(Y^-1 t(dV) dV)."""
    if A_c <= 0 or B_c <= 0:
        raise ValueError("metric constants must be positive")
    dY = np.asarray(dY, dtype=float)
    dV = np.asarray(dV, dtype=float)
    T = np.linalg.solve(p.Y, dY)
    first = float(np.trace(T @ T))
    second = float(np.trace(np.linalg.solve(p.Y, dV.T @ dV)))
    return A_c * first + B_c * second


def _pack(Y: np.ndarray, V: np.ndarray) -> np.ndarray:
    g = Y.shape[0]
    iu = np.triu_indices(g)
    return np.concatenate([Y[iu], V.ravel()])


def volume_jacobian_check(A, g: int, h: int, probe: MinkowskiEuclidPoint | None = None,
                          step: float = 1e-6) -> tuple[float, float]:
    """Numeric Jacobian determinant of the action map against |det A|^(g+h+1).

    Returns (numeric, analytic); the action is affine in the coordinates, so
    the finite-difference Jacobian is exact up to roundoff.
    """
    A = np.asarray(A, dtype=float)
    if probe is None:
        probe = MinkowskiEuclidPoint(Y=np.eye(g), V=np.zeros((h, g)))
    elem = GroupElementGLgh(A=A, a=np.zeros((h, g)))
    dim = g * (g + 1) // 2 + h * g
    iu = np.triu_indices(g)

    def unpack(vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Y = np.zeros((g, g))
        Y[iu] = vec[: len(iu[0])]
        Y = Y + Y.T - np.diag(np.diag(Y))
        V = vec[len(iu[0]):].reshape(h, g) if h > 0 else np.zeros((h, g))
        return Y, V

    base = _pack(probe.Y, probe.V)

    def image(vec: np.ndarray) -> np.ndarray:
        Y, V = unpack(vec)
        Yn = A @ Y @ A.T
        Vn = V @ A.T
        return _pack(0.5 * (Yn + Yn.T), Vn)

    J = np.zeros((dim, dim))
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = step
        J[:, k] = (image(base + e) - image(base - e)) / (2 * step)
    numeric = abs(float(np.linalg.det(J)))
    analytic = abs(float(np.linalg.det(A))) ** (g + h + 1)
    return numeric, analytic


def geodesic_through_origin(k, lambdas, Z, t: float) -> MinkowskiEuclidPoint:
    """Point at time t of the geodesic through (I, 0) with frame k.

    The SPD part is the conjugated exponential diag(exp(2 lambda_j t)); the
    Euclidean part integrates the decaying frame along the way.
    """
    k = np.asarray(k, dtype=float)
    g = k.shape[0]
    if float(np.max(np.abs(k.T @ k - np.eye(g)))) > 1e-12:
        raise ValueError("frame matrix must be orthogonal")
    lambdas = np.asarray(lambdas, dtype=float).ravel()
    if lambdas.shape[0] != g or not np.any(lambdas):
        raise ValueError("need g exponents, not all zero")
    Z = np.asarray(Z, dtype=float)
    Y = k.T @ np.diag(np.exp(2.0 * lambdas * t)) @ k
    integr = np.array([
        (np.expm1(lam * t) / lam) if lam != 0.0 else t for lam in lambdas
    ])
    V = Z @ (k.T @ np.diag(integr) @ k)
    return MinkowskiEuclidPoint(Y=0.5 * (Y + Y.T), V=V)


def whitening_frame(Y0, Y1) -> tuple[np.ndarray, np.ndarray]:
    """Matrix w with w Y0 tw = I and w Y1 tw diagonal; returns (w, eigenvalues).

    Built from the Cholesky factor of Y0 and the spectral decomposition of
    the whitened pencil; eigenvalues are sorted ascending and eigenvector
    signs fixed by the first nonzero component.
    """
    Y0 = require_spd(Y0)
    Y1 = require_spd(Y1)
    L = np.linalg.cholesky(Y0)
    Linv = np.linalg.inv(L)
    Mid = Linv @ Y1 @ Linv.T
    vals, vecs = np.linalg.eigh(0.5 * (Mid + Mid.T))
    order = np.argsort(vals)
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            vecs[:, j] = -col
    w = vecs.T @ Linv
    return w, vals


def _gauss_legendre_adaptive(f, tol: float = 1e-11, max_doublings: int = 12) -> float:
    nodes = 8
    prev = None
    while True:
        x, wts = np.polynomial.legendre.leggauss(nodes)
        # map [-1, 1] -> [0, 1]
        xm = 0.5 * (x + 1.0)
        val = 0.5 * float(np.sum(wts * f(xm)))
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
        nodes *= 2
        if nodes > 8 * 2 ** max_doublings:
            raise ArithmeticError("quadrature failed to settle")


def distance(p0: MinkowskiEuclidPoint, p1: MinkowskiEuclidPoint,
             A_c: float = 1.0, B_c: float = 1.0) -> float:
    """Geodesic distance between (Y0, V0) and (Y1, V1).

    Closed form: A sqrt(sum log^2 t_j) plus B times the integral of
    sqrt(sum Delta_j exp(-t log t_j)) over the unit interval, where t_j are
    the generalized eigenvalues of (Y1, Y0) and Delta_j the squared column
    norms of the whitened difference of the Euclidean parts.
    """
    if p0.g != p1.g or p0.h != p1.h:
        raise ValueError("points live in different spaces")
    if A_c <= 0 or B_c <= 0:
        raise ValueError("metric constants must be positive")
    w, tvals = whitening_frame(p0.Y, p1.Y)
    if np.any(tvals <= 0):
        raise ArithmeticError("pencil eigenvalues must be positive")
    logs = np.log(tvals)
    first = A_c * float(np.sqrt(np.sum(logs**2)))
    Vt = (p1.V - p0.V) @ w.T
    deltas = np.sum(Vt**2, axis=0)
    if float(np.max(deltas, initial=0.0)) == 0.0 or p0.h == 0:
        return first

    def integrand(ts: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(ts)
        for dj, lg in zip(deltas, logs):
            acc = acc + dj * np.exp(-lg * ts)
        return np.sqrt(acc)

    second = B_c * _gauss_legendre_adaptive(integrand)
    return first + second


def in_fundamental_set(p: MinkowskiEuclidPoint, tol: float = 1e-10) -> bool:
    """True iff Y is Minkowski reduced and every entry of V is within [-1, 1]."""
    if not is_minkowski_reduced(p.Y, tol=tol):
        return False
    return bool(np.max(np.abs(p.V), initial=0.0) <= 1.0 + tol)

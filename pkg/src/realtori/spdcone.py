"""The cone of symmetric positive definite matrices.

GL(g,R) acts by congruence A o Y = A Y tA.  This module provides the Jacobi
(unit-triangular LDL) decomposition, Minkowski reduction with an exact
unimodular witness, partial Iwasawa coordinates, the invariant metric and
volume densities, and numerically applied invariant differential operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .exactlinalg import complete_to_unimodular, det_int, int_matrix, is_unimodular

__all__ = [
    "require_spd",
    "is_spd",
    "random_spd",
    "gl_act",
    "JacobiFactors",
    "jacobi_decomposition",
    "IwasawaBlocks",
    "partial_iwasawa",
    "quadratic_short_vectors",
    "minkowski_reduce",
    "is_minkowski_reduced",
    "volume_density",
    "metric_norm",
    "invariant_operator_apply",
]

MAX_REDUCTION_DIM = 4
_ENUMERATION_CAP = 2_000_000


def require_spd(Y, tol: float = 1e-9) -> np.ndarray:
    """Validate and symmetrize an SPD matrix; raises on failure.

    Positivity is certified by a successful Cholesky factorization.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
        raise ValueError("SPD matrix must be square")
    scale = max(1.0, float(np.max(np.abs(Y))))
    if float(np.max(np.abs(Y - Y.T))) > tol * scale:
        raise ValueError("matrix is not symmetric")
    Y = 0.5 * (Y + Y.T)
    try:
        np.linalg.cholesky(Y)
    except np.linalg.LinAlgError as exc:
        raise ValueError("matrix is not positive definite") from exc
    return Y


def is_spd(Y, tol: float = 1e-9) -> bool:
    try:
        require_spd(Y, tol)
        return True
    except ValueError:
        return False


def random_spd(g: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random SPD matrix A tA + ridge, moderately conditioned."""
    A = rng.normal(size=(g, g))
    Y = A @ A.T + 0.1 * np.eye(g)
    return scale * 0.5 * (Y + Y.T)


def gl_act(A, Y, det_tol: float = 1e-12) -> np.ndarray:
    """Congruence action A o Y = A Y tA, symmetrized to kill roundoff."""
    A = np.asarray(A, dtype=float)
    Y = require_spd(Y)
    if abs(np.linalg.det(A)) <= det_tol:
        raise ValueError("acting matrix is singular")
    Z = A @ Y @ A.T
    return 0.5 * (Z + Z.T)


# ---------------------------------------------------------------------------
# Jacobi decomposition Y = tW D W


@dataclass(frozen=True)
class JacobiFactors:
    """Factors of Y = tW D W with W unit upper-triangular and D = diag(d) > 0."""

    W: np.ndarray
    d: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.W.T @ np.diag(self.d) @ self.W


def jacobi_decomposition(Y) -> JacobiFactors:
    Y = require_spd(Y)
    try:
        L = np.linalg.cholesky(Y)
    except np.linalg.LinAlgError as exc:
        raise ValueError("loss of positivity in Jacobi decomposition") from exc
    diag = np.diag(L).copy()
    W = (L / diag).T
    d = diag**2
    return JacobiFactors(W=W, d=d)


# ---------------------------------------------------------------------------
# partial Iwasawa coordinates


@dataclass(frozen=True)
class IwasawaBlocks:
    """Block coordinates of Y: diag(F,G) twisted by a unit triangular factor.

    lower variant: Y = t(I,0;H,I) diag(F,G) (I,0;H,I), H is s x r;
    upper variant: Y = t(I,H;0,I) diag(F,G) (I,H;0,I), H is r x s.
    """

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    variant: str

    def reconstruct(self) -> np.ndarray:
        r = self.F.shape[0]
        s = self.G.shape[0]
        g = r + s
        N = np.eye(g)
        if self.variant == "lower":
            N[r:, :r] = self.H
        else:
            N[:r, r:] = self.H
        M = np.zeros((g, g))
        M[:r, :r] = self.F
        M[r:, r:] = self.G
        return N.T @ M @ N


def partial_iwasawa(Y, r: int, variant: str = "lower") -> IwasawaBlocks:
    """Split Y into partial Iwasawa blocks at position ``r`` (0 < r < g)."""
    Y = require_spd(Y)
    g = Y.shape[0]
    if not 0 < r < g:
        raise ValueError(f"split index r={r} out of range for g={g}")
    if variant not in ("lower", "upper"):
        raise ValueError("variant must be 'lower' or 'upper'")
    Y11, Y12 = Y[:r, :r], Y[:r, r:]
    Y21, Y22 = Y[r:, :r], Y[r:, r:]
    if variant == "lower":
        G = Y22
        H = np.linalg.solve(Y22, Y21)
        F = Y11 - Y12 @ H
        return IwasawaBlocks(F=0.5 * (F + F.T), G=G, H=H, variant="lower")
    P = Y11
    R = np.linalg.solve(Y11, Y12)
    Q = Y22 - Y21 @ R
    return IwasawaBlocks(F=P, G=0.5 * (Q + Q.T), H=R, variant="upper")


# ---------------------------------------------------------------------------
# short-vector enumeration for the quadratic form x^T Y x


def quadratic_short_vectors(Y, bound: float, cap: int = _ENUMERATION_CAP) -> list[tuple[int, ...]]:
    """All nonzero integer vectors x with x^T Y x <= bound.

    Complete by the standard backtracking enumeration on the Jacobi factors;
    both x and -x are listed.  Raises if more than ``cap`` vectors would be
    produced.
    """
    Y = require_spd(Y)
    g = Y.shape[0]
    if bound <= 0:
        return []
    fac = jacobi_decomposition(Y)
    W, d = fac.W, fac.d
    out: list[tuple[int, ...]] = []
    x = [0] * g

    def descend(i: int, remaining: float) -> None:
        # level i fixes x[i] given x[i+1..]; quadratic contribution is
        # d[i] * (x[i] + sum_{j>i} W[i,j] x[j])^2
        shift = sum(W[i, j] * x[j] for j in range(i + 1, g))
        radius = (remaining / d[i]) ** 0.5 if remaining > 0 else 0.0
        lo = int(np.ceil(-radius - shift - 1e-12))
        hi = int(np.floor(radius - shift + 1e-12))
        for v in range(lo, hi + 1):
            x[i] = v
            used = d[i] * (v + shift) ** 2
            rem = remaining - used
            if rem < -1e-12:
                continue
            if i == 0:
                if any(x):
                    out.append(tuple(x))
                    if len(out) > cap:
                        raise RuntimeError("short-vector enumeration bound overflow")
            else:
                descend(i - 1, max(rem, 0.0))
        x[i] = 0

    descend(g - 1, float(bound))
    return out


def _suffix_gcds(x: tuple[int, ...]) -> list[int]:
    g = len(x)
    out = [0] * g
    acc = 0
    for k in range(g - 1, -1, -1):
        acc = gcd(acc, abs(x[k]))
        out[k] = acc
    return out


def _quad_value(Y: np.ndarray, x: tuple[int, ...]) -> float:
    v = np.array(x, dtype=float)
    return float(v @ Y @ v)


def is_minkowski_reduced(Y, tol: float = 1e-10) -> bool:
    """Reduction test: superdiagonal signs plus the finite minimality check.

    Minimality asks a Y ta >= y_kk for every integer a whose entries from
    position k on are coprime; all candidates lie in the certified finite set
    {a : a Y ta <= max_k y_kk + tol}.
    """
    Y = require_spd(Y)
    g = Y.shape[0]
    if g > MAX_REDUCTION_DIM:
        raise ValueError(f"reduction support is limited to g <= {MAX_REDUCTION_DIM}")
    diag = np.diag(Y)
    for k in range(g - 1):
        if Y[k, k + 1] < -tol:
            return False
    bound = float(np.max(diag)) + tol
    for x in quadratic_short_vectors(Y, bound):
        q = _quad_value(Y, x)
        suff = _suffix_gcds(x)
        for k in range(g):
            if suff[k] == 1 and q < diag[k] - tol:
                return False
    return True


def _sign_fix(R: np.ndarray, A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # enforce nonnegative superdiagonal by row sign flips (one forward pass)
    g = R.shape[0]
    for k in range(g - 1):
        if R[k, k + 1] < 0:
            A[k + 1, :] = -A[k + 1, :]
            R[k + 1, :] = -R[k + 1, :]
            R[:, k + 1] = -R[:, k + 1]
    return R, A


def _size_reduce(Y: np.ndarray, A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # cheap pre-conditioning pass: sort by diagonal, shear off large
    # off-diagonal multiples.  Keeps the later certified enumeration small.
    g = Y.shape[0]
    R = gl_act(A.astype(float), Y)
    for _ in range(32):
        order = np.argsort(np.diag(R), kind="stable")
        if not np.array_equal(order, np.arange(g)):
            P = np.zeros((g, g), dtype=object)
            for new, old in enumerate(order):
                P[new, old] = 1
            A = P @ A
            R = gl_act(A.astype(float), Y)
        changed = False
        for i in range(g):
            for j in range(g):
                if i == j:
                    continue
                q = int(np.round(R[i, j] / R[j, j]))
                if q != 0 and abs(R[i, j]) > 0.5 * R[j, j] * (1 + 1e-12):
                    A[i, :] = A[i, :] - q * A[j, :]
                    R = gl_act(A.astype(float), Y)
                    changed = True
        if not changed:
            break
    return R, A


def minkowski_reduce(Y) -> tuple[np.ndarray, np.ndarray]:
    """Minkowski reduction: returns (R, A) with R = A Y tA reduced, A unimodular.

    Greedy construction: row k is chosen to minimize the form over all
    integer vectors whose coordinates from k on are coprime, the preceding
    rows staying fixed; ties are broken toward the current basis vector and
    then lexicographically, so the output is deterministic.
    """
    Y = require_spd(Y)
    g = Y.shape[0]
    if g > MAX_REDUCTION_DIM:
        raise ValueError(f"reduction support is limited to g <= {MAX_REDUCTION_DIM}")
    A = int_matrix(np.eye(g, dtype=int))
    R, A = _size_reduce(Y, A)
    tie = 1e-12
    for k in range(g):
        scale = max(1.0, float(R[k, k]))
        candidates = quadratic_short_vectors(R, float(R[k, k]) * (1 + 1e-9) + tie)
        best_val = float(R[k, k])
        best_vec: tuple[int, ...] | None = None
        e_k = tuple(int(i == k) for i in range(g))
        for x in candidates:
            suff = _suffix_gcds(x)
            if suff[k] != 1:
                continue
            q = _quad_value(R, x)
            if q < best_val - tie * scale:
                best_val = q
                best_vec = x
            elif abs(q - best_val) <= tie * scale and best_vec is not None:
                if _canon_key(x) < _canon_key(best_vec):
                    best_vec = x
        if best_vec is None or best_vec == e_k or _neg(best_vec) == e_k:
            continue
        vec = _canon(best_vec)
        prefix = np.empty((k + 1, g), dtype=object)
        for i in range(k):
            for j in range(g):
                prefix[i, j] = int(i == j)
        for j in range(g):
            prefix[k, j] = int(vec[j])
        U = complete_to_unimodular(prefix)
        A = U @ A
        R = gl_act(A.astype(float), Y)
    R, A = _sign_fix(R, A)
    if not is_unimodular(A):
        raise AssertionError("reduction produced a non-unimodular witness")
    return R, A


def _neg(x: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-v for v in x)


def _canon(x: tuple[int, ...]) -> tuple[int, ...]:
    for v in x:
        if v != 0:
            return x if v > 0 else _neg(x)
    return x


def _canon_key(x: tuple[int, ...]):
    return _canon(x)


# ---------------------------------------------------------------------------
# invariant densities, metric, operators


def volume_density(Y, h: int = 0) -> float:
    """Density (det Y)^(-(g+h+1)/2) of the invariant volume element."""
    Y = require_spd(Y)
    g = Y.shape[0]
    if h < 0:
        raise ValueError("h must be nonnegative")
    return float(np.linalg.det(Y)) ** (-(g + h + 1) / 2.0)


def metric_norm(Y, U) -> float:
    """Squared length trace((Y^-1 U)^2) of a symmetric tangent vector U."""
    Y = require_spd(Y)
    U = np.asarray(U, dtype=float)
    if float(np.max(np.abs(U - U.T))) > 1e-9 * max(1.0, float(np.max(np.abs(U)))):
        raise ValueError("tangent vector must be symmetric")
    T = np.linalg.solve(Y, U)
    return float(np.trace(T @ T))


def _sym_gradient(f, Y: np.ndarray, step: float) -> np.ndarray:
    # symmetrized matrix derivative: entry (i,j) is (1+delta_ij)/2 d/dy_ij,
    # where the off-diagonal variable perturbs both mirror entries
    g = Y.shape[0]
    grad = np.zeros((g, g))
    for i in range(g):
        for j in range(i, g):
            E = np.zeros((g, g))
            E[i, j] = 1.0
            E[j, i] = 1.0
            df = (f(Y + step * E) - f(Y - step * E)) / (2.0 * step)
            if i == j:
                grad[i, i] = df
            else:
                grad[i, j] = grad[j, i] = 0.5 * df
    return grad


def invariant_operator_apply(k: int, f, Y, step: float = 1e-4) -> float:
    """Apply the invariant operator trace((Y d/dY)^k) to a scalar f at Y.

    Derivatives are nested central differences in the symmetrized convention;
    supported orders are k = 1, 2.
    """
    Y = require_spd(Y)
    if step <= 0 or step < 1e-12:
        raise ValueError("step underflow")
    if k not in (1, 2):
        raise ValueError("only operator orders 1 and 2 are supported")
    g = Y.shape[0]
    if k == 1:
        return float(np.trace(Y @ _sym_gradient(f, Y, step)))

    def op_matrix(Z: np.ndarray) -> np.ndarray:
        return Z @ _sym_gradient(f, Z, step)

    # T[p, q, :, :] = (d/dY)_{pq} applied entrywise to the matrix op_matrix
    T = np.zeros((g, g, g, g))
    for p in range(g):
        for q in range(p, g):
            E = np.zeros((g, g))
            E[p, q] = 1.0
            E[q, p] = 1.0
            dM = (op_matrix(Y + step * E) - op_matrix(Y - step * E)) / (2.0 * step)
            if p == q:
                T[p, p] = dM
            else:
                T[p, q] = T[q, p] = 0.5 * dM
    total = 0.0
    for i in range(g):
        for j in range(g):
            for p in range(g):
                total += Y[i, p] * T[p, j, j, i]
    return total

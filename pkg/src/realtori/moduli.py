"""Classification of polarized real tori and real abelian varieties.

Two layers: a discrete one (symmetric GF(2) matrices up to congruence, their
rank/parity invariants, and the integral symplectic involutions built from
the standard forms) and a continuous one (GL(g,Z)-equivalence of SPD matrices
decided by Minkowski reduction plus a certified finite witness search).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exactlinalg import (
    gf2_matrix,
    gf2_rank,
    int_matrix,
    is_unimodular,
    symplectic_form,
    unimodular_inverse,
)
from .siegel import in_script_H, require_siegel
from .spdcone import (
    MAX_REDUCTION_DIM,
    minkowski_reduce,
    quadratic_short_vectors,
    require_spd,
)

__all__ = [
    "ModuliInvariant",
    "ModuliClass",
    "mod2_invariants",
    "mod2_standard_form",
    "standard_form_matrix",
    "valid_invariants",
    "stabilizer_mod2_member",
    "sigma_M_matrix",
    "sigma_involution_image",
    "real_structure_matrix",
    "Verdict",
    "EquivalenceResult",
    "congruence_witnesses",
    "polarized_tori_equivalent",
    "real_ppav_equivalent",
    "classify_spd",
]


@dataclass(frozen=True)
class ModuliInvariant:
    """Component invariant (lambda, i): GF(2) rank and diagonal parity."""

    lam: int
    i: int

    def __post_init__(self):
        if self.i not in (0, 1):
            raise ValueError("parity invariant must be 0 or 1")
        if self.lam < 0:
            raise ValueError("rank invariant must be nonnegative")
        if self.lam % 2 == 1 and self.i != 0:
            raise ValueError("odd rank forces parity 0")
        if self.lam == 0 and self.i != 1:
            raise ValueError("rank 0 forces parity 1")


def mod2_invariants(N) -> ModuliInvariant:
    """Invariants of a symmetric GF(2) matrix: rank and product of (1 - n_kk)."""
    N = gf2_matrix(N, symmetric=True)
    lam = gf2_rank(N)
    parity = 1 if not np.any(np.diag(N)) else 0
    return ModuliInvariant(lam=lam, i=parity)


def _anti_identity(lam: int) -> np.ndarray:
    H = np.zeros((lam, lam), dtype=np.uint8)
    for k in range(lam):
        H[k, lam - 1 - k] = 1
    return H


def standard_form_matrix(g: int, inv: ModuliInvariant) -> np.ndarray:
    """The unique standard-form matrix with the given invariants."""
    if inv.lam > g:
        raise ValueError("rank exceeds size")
    S = np.zeros((g, g), dtype=np.uint8)
    if inv.i == 0:
        S[: inv.lam, : inv.lam] = np.eye(inv.lam, dtype=np.uint8)
    else:
        S[: inv.lam, : inv.lam] = _anti_identity(inv.lam)
    return S


def valid_invariants(g: int) -> list[ModuliInvariant]:
    """All invariants realizable in size g; the count is g + 1 + g//2."""
    if g < 1:
        raise ValueError("size must be positive")
    out = [ModuliInvariant(0, 1)]
    out += [ModuliInvariant(lam, 0) for lam in range(1, g + 1)]
    out += [ModuliInvariant(lam, 1) for lam in range(2, g + 1, 2)]
    out.sort(key=lambda t: (t.lam, t.i))
    return out


def _congruence(A: np.ndarray, N: np.ndarray) -> np.ndarray:
    return (A @ N @ A.T) % 2


def mod2_standard_form(N) -> tuple[np.ndarray, np.ndarray]:
    """Standard form over GF(2): returns (S, A) with A N tA = S exactly.

    Elimination strategy: split off a diagonal one when present, otherwise a
    hyperbolic pair; afterwards absorb hyperbolic pairs into the diagonal
    part (possible as soon as one diagonal one exists) and permute pairs into
    the anti-diagonal layout of the standard orthosymmetric form.
    """
    N0 = gf2_matrix(N, symmetric=True)
    g = N0.shape[0]
    A = np.eye(g, dtype=np.uint8)
    N = N0.copy()

    def swap(i, j):
        A[[i, j]] = A[[j, i]]
        N[[i, j]] = N[[j, i]]
        N[:, [i, j]] = N[:, [j, i]]

    def add(src, dst):
        # basis change e_dst += e_src
        A[dst] ^= A[src]
        N[dst] ^= N[src]
        N[:, dst] ^= N[:, src]

    pos = 0
    diag_ones = 0
    pairs = 0
    while pos < g:
        block = N[pos:, pos:]
        if not block.any():
            break
        diag_idx = next((i for i in range(pos, g) if N[i, i]), None)
        if diag_idx is not None:
            swap(pos, diag_idx)
            for r in range(pos + 1, g):
                if N[r, pos]:
                    add(pos, r)
            pos += 1
            diag_ones += 1
            continue
        # alternating block: carve out a hyperbolic pair
        found = None
        for i in range(pos, g):
            for j in range(i + 1, g):
                if N[i, j]:
                    found = (i, j)
                    break
            if found:
                break
        i, j = found
        swap(pos, i)
        swap(pos + 1, j)
        for r in range(pos + 2, g):
            if N[r, pos]:
                add(pos + 1, r)
            if N[r, pos + 1]:
                add(pos, r)
        pos += 2
        pairs += 1

    # Now N = diag(I_a, B, ..., B, 0) with a = diag_ones, pairs hyperbolic
    # blocks.  With a >= 1 each pair merges into three diagonal ones:
    # (e_k+e_p+e_q, e_k+e_q, e_k+e_p) is an orthonormal triple.
    while diag_ones >= 1 and pairs >= 1:
        k = diag_ones - 1
        p, q = diag_ones, diag_ones + 1
        add(p, k)
        add(q, k)
        add(k, p)
        add(k, q)
        sub = N[np.ix_([k, p, q], [k, p, q])]
        if not np.array_equal(sub, np.eye(3, dtype=np.uint8)):
            raise AssertionError("hyperbolic merge failed")
        diag_ones += 2
        pairs -= 1

    inv = mod2_invariants(N0)
    if inv.i == 1 and pairs > 0:
        # permute adjacent pairs (2m, 2m+1) into the anti-diagonal layout
        lam = 2 * pairs
        perm = np.zeros(g, dtype=int)
        for m in range(pairs):
            perm[m] = 2 * m
            perm[lam - 1 - m] = 2 * m + 1
        for t in range(lam, g):
            perm[t] = t
        P = np.zeros((g, g), dtype=np.uint8)
        for new, old in enumerate(perm):
            P[new, old] = 1
        A = (P @ A) % 2
        N = (P @ N @ P.T) % 2

    S = standard_form_matrix(g, inv)
    if not np.array_equal(N, S):
        raise AssertionError("classification did not reach the standard form")
    if not np.array_equal(_congruence(A, N0), S):
        raise AssertionError("witness does not certify the standard form")
    return S, A


def stabilizer_mod2_member(A, M) -> bool:
    """Exact test A M tA = M (mod 2) for unimodular integral A."""
    A = int_matrix(A)
    if not is_unimodular(A):
        raise ValueError("stabilizer elements must be unimodular")
    M = int_matrix(M)
    lhs = A @ M @ A.T
    return all((int(x) - int(y)) % 2 == 0 for x, y in zip(lhs.flat, M.flat))


@dataclass(frozen=True)
class ModuliClass:
    """Reduced representative of a class: invariants, SPD part, standard form."""

    invariant: ModuliInvariant
    reduced_Y: np.ndarray
    standard_M: np.ndarray


def classify_spd(M, Y) -> ModuliClass:
    """Bundle the discrete invariant of M with the Minkowski-reduced Y."""
    inv = mod2_invariants(M)
    R, _ = minkowski_reduce(Y)
    return ModuliClass(invariant=inv, reduced_Y=R,
                       standard_M=standard_form_matrix(np.asarray(M).shape[0], inv))


# ---------------------------------------------------------------------------
# the involution matrices


def _is_standard(M: np.ndarray) -> bool:
    g = M.shape[0]
    inv = mod2_invariants(M % 2)
    return np.array_equal(np.asarray(M, dtype=np.int64),
                          standard_form_matrix(g, inv).astype(np.int64))


def sigma_M_matrix(M) -> np.ndarray:
    """Integral symplectic involution (-M, I; -(I + M^2), M) attached to M.

    Requires M^3 = M exactly (true for the standard forms); the result is
    verified to be symplectic with inverse equal to its negative.
    """
    M = int_matrix(M)
    g = M.shape[0]
    if not np.array_equal(M, M.T):
        raise ValueError("M must be symmetric")
    M3 = M @ M @ M
    if not np.array_equal(M3, M):
        raise ValueError("M^3 = M is required")
    I = int_matrix(np.eye(g, dtype=int))
    top = np.concatenate([-M, I], axis=1)
    bot = np.concatenate([-(I + M @ M), M], axis=1)
    S = np.concatenate([top, bot], axis=0)
    J = symplectic_form(g)
    if any(v != 0 for v in (S.T @ J @ S - J).flat):
        raise AssertionError("involution matrix is not symplectic")
    n = 2 * g
    prod = S @ (-S)
    if not all(int(prod[i, j]) == int(i == j) for i in range(n) for j in range(n)):
        raise AssertionError("inverse of the involution matrix is not its negative")
    return S


def sigma_involution_image(M, Y) -> np.ndarray:
    """Closed form of the involution on the component of M: for standard M,

        (1/2) M + i D Y^-1 D   with  D = I - (1/2) M^2,

    which agrees with the fractional linear action of the involution matrix.
    """
    M = int_matrix(M)
    if not _is_standard(M):
        raise ValueError("M must be a standard-form matrix")
    Y = require_spd(Y)
    g = M.shape[0]
    Mf = M.astype(float)
    D = np.eye(g) - 0.5 * (Mf @ Mf)
    out = 0.5 * Mf + 1j * (D @ np.linalg.inv(Y) @ D)
    return require_siegel(0.5 * (out + out.T))


def real_structure_matrix(omega, tol: float = 1e-9) -> np.ndarray:
    """Integral matrix (-I, 0; 2X, I) of the real structure at a point with
    half-integral real part; verified exactly anti-symplectic."""
    om = require_siegel(omega)
    if not in_script_H(om, tol):
        raise ValueError("point must have half-integral real part")
    g = om.shape[0]
    twoX = int_matrix(np.round(2.0 * om.real).astype(int))
    Ms = np.zeros((2 * g, 2 * g), dtype=object)
    Ms[:, :] = 0
    for i in range(g):
        Ms[i, i] = -1
        Ms[g + i, g + i] = 1
    Ms[g:, :g] = twoX
    J = symplectic_form(g)
    if any(v != 0 for v in (Ms.T @ J @ Ms + J).flat):
        raise AssertionError("real-structure matrix failed the anti-symplectic identity")
    return Ms


# ---------------------------------------------------------------------------
# equivalence of polarized tori / real ppavs


class Verdict(Enum):
    EQUIVALENT = "EQUIVALENT"
    INEQUIVALENT = "INEQUIVALENT"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: Verdict
    witness: np.ndarray | None = None
    detail: str = ""
    candidates_searched: int = 0


def congruence_witnesses(Y1, Y2, tol: float = 1e-9, max_witnesses: int = 64,
                         cap: int = 200_000) -> tuple[list[np.ndarray], bool]:
    """All unimodular integral B with B Y1 tB = Y2 within ``tol``.

    Complete search: row i of B has quadratic value (Y2)_ii, hence lies in a
    finite enumerable set; cross products and the determinant filter the
    rest.  Returns (witnesses, complete) where ``complete`` is False when a
    cap was hit.
    """
    Y1 = require_spd(Y1)
    Y2 = require_spd(Y2)
    g = Y1.shape[0]
    if Y2.shape[0] != g:
        return [], True
    scale = max(1.0, float(np.max(np.abs(Y2))))
    tau = tol * scale
    rows: list[list[tuple[int, ...]]] = []
    complete = True
    for i in range(g):
        try:
            cands = quadratic_short_vectors(Y1, float(Y2[i, i]) + tau, cap=cap)
        except RuntimeError:
            return [], False
        good = [x for x in cands if abs(_quad(Y1, x) - Y2[i, i]) <= tau]
        if len(good) > cap:
            return [], False
        rows.append(good)
    found: list[np.ndarray] = []
    B_rows: list[tuple[int, ...]] = []
    nodes = 0

    def backtrack(i: int) -> bool:
        # returns True to abort the search (caps the witness count)
        nonlocal nodes
        if i == g:
            B = int_matrix(np.array(B_rows, dtype=object))
            if is_unimodular(B):
                found.append(B)
                if len(found) >= max_witnesses:
                    return True
            return False
        for cand in rows[i]:
            nodes += 1
            if nodes > cap:
                raise RuntimeError("witness search cap exceeded")
            ok = True
            cv = np.array(cand, dtype=float)
            for j in range(i):
                pv = np.array(B_rows[j], dtype=float)
                if abs(cv @ Y1 @ pv - Y2[i, j]) > tau:
                    ok = False
                    break
            if ok:
                B_rows.append(cand)
                if backtrack(i + 1):
                    return True
                B_rows.pop()
        return False

    try:
        aborted = backtrack(0)
    except RuntimeError:
        complete = False
    else:
        if aborted:
            complete = False
    return found, complete


def _quad(Y: np.ndarray, x: tuple[int, ...]) -> float:
    v = np.array(x, dtype=float)
    return float(v @ Y @ v)


def polarized_tori_equivalent(Y1, Y2, tol: float = 1e-9,
                              cap: int = 200_000) -> EquivalenceResult:
    """GL(g,Z)-equivalence of SPD matrices: Y2 = A Y1 tA for unimodular A.

    Both inputs are Minkowski reduced; matching reduced forms give an
    immediate composed witness, otherwise a certified finite search between
    the reduced forms decides the boundary-ambiguous cases.
    """
    Y1 = require_spd(Y1)
    Y2 = require_spd(Y2)
    g = Y1.shape[0]
    if Y2.shape[0] != g:
        return EquivalenceResult(Verdict.INEQUIVALENT, detail="dimension mismatch")
    if g > MAX_REDUCTION_DIM:
        raise ValueError(f"equivalence supported for g <= {MAX_REDUCTION_DIM}")
    d1, d2 = np.linalg.det(Y1), np.linalg.det(Y2)
    if abs(d1 - d2) > 1e-8 * max(1.0, abs(d1), abs(d2)):
        return EquivalenceResult(Verdict.INEQUIVALENT, detail="determinant invariant differs")
    R1, A1 = minkowski_reduce(Y1)
    R2, A2 = minkowski_reduce(Y2)
    scale = max(1.0, float(np.max(np.abs(Y2))))

    def finish(B) -> EquivalenceResult:
        A = unimodular_inverse(A2) @ B @ A1
        res = float(np.max(np.abs(A.astype(float) @ Y1 @ A.astype(float).T - Y2)))
        if res > max(tol, 1e-9) * scale:
            return EquivalenceResult(Verdict.UNDECIDED, detail="witness verification failed")
        return EquivalenceResult(Verdict.EQUIVALENT, witness=A)

    if float(np.max(np.abs(R1 - R2))) <= 1e-8 * scale:
        eye = int_matrix(np.eye(g, dtype=int))
        out = finish(eye)
        if out.verdict is Verdict.EQUIVALENT:
            return out
    witnesses, complete = congruence_witnesses(R1, R2, tol=max(tol, 1e-9),
                                               max_witnesses=8, cap=cap)
    for B in witnesses:
        out = finish(B)
        if out.verdict is Verdict.EQUIVALENT:
            return out
    if complete:
        return EquivalenceResult(Verdict.INEQUIVALENT,
                                 detail="no witness in the complete candidate set",
                                 candidates_searched=len(witnesses))
    return EquivalenceResult(Verdict.UNDECIDED, detail="candidate cap exceeded",
                             candidates_searched=len(witnesses))


def real_ppav_equivalent(omega1, omega2, bound: int = 200_000,
                         tol: float = 1e-9) -> EquivalenceResult:
    """Equivalence of two points with half-integral real part.

    A witness A must transport the imaginary parts by congruence and match
    twice-real parts mod 2; the imaginary-part witnesses form a certified
    finite set obtained from Minkowski reduction, so failure of all of them
    refutes equivalence.
    """
    om1 = require_siegel(omega1)
    om2 = require_siegel(omega2)
    if not (in_script_H(om1, tol) and in_script_H(om2, tol)):
        raise ValueError("both points must have half-integral real part")
    g = om1.shape[0]
    if om2.shape[0] != g:
        return EquivalenceResult(Verdict.INEQUIVALENT, detail="dimension mismatch")
    if g > 3:
        raise ValueError("equivalence of real ppav points supported for g <= 3")
    M1 = np.round(2.0 * om1.real).astype(int)
    M2 = np.round(2.0 * om2.real).astype(int)
    if mod2_invariants(M1 % 2) != mod2_invariants(M2 % 2):
        return EquivalenceResult(Verdict.INEQUIVALENT,
                                 detail="component invariants differ")
    Y1, Y2 = om1.imag, om2.imag
    d1, d2 = np.linalg.det(Y1), np.linalg.det(Y2)
    if abs(d1 - d2) > 1e-8 * max(1.0, abs(d1), abs(d2)):
        return EquivalenceResult(Verdict.INEQUIVALENT,
                                 detail="imaginary determinant differs")
    R1, A1 = minkowski_reduce(Y1)
    R2, A2 = minkowski_reduce(Y2)
    witnesses, complete = congruence_witnesses(R1, R2, tol=tol,
                                               max_witnesses=4096, cap=bound)
    A2inv = unimodular_inverse(A2)
    scale = max(1.0, float(np.max(np.abs(Y2))))
    checked = 0
    for B in witnesses:
        A = A2inv @ B @ A1
        checked += 1
        Af = A.astype(float)
        if float(np.max(np.abs(Af @ Y1 @ Af.T - Y2))) > max(tol, 1e-8) * scale:
            continue
        lhs = (A @ int_matrix(M1) @ A.T)
        if all((int(x) - int(y)) % 2 == 0 for x, y in zip(lhs.flat, int_matrix(M2).flat)):
            return EquivalenceResult(Verdict.EQUIVALENT, witness=A,
                                     candidates_searched=checked)
    if complete:
        return EquivalenceResult(Verdict.INEQUIVALENT,
                                 detail="all imaginary-part witnesses fail the mod-2 condition",
                                 candidates_searched=checked)
    return EquivalenceResult(Verdict.UNDECIDED, detail="witness cap exceeded",
                             candidates_searched=checked)

"""Order-two cohomology predicates on the symplectic group.

The involution flips the off-diagonal blocks; an element gamma is a cocycle
datum when gamma tau(gamma) is the identity and a coboundary when it can be
written tau(h) h^-1.  Witnesses are searched over bounded words in the
standard symplectic generators, so existence answers are constructive and
non-existence only means exhaustion of the word bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exactlinalg import (
    int_matrix,
    is_symplectic,
    symplectic_form,
    symplectic_inverse,
    unimodular_inverse,
)
from .siegel import sp_act, tau_group, tau_point

__all__ = [
    "CocycleDatum",
    "in_congruence_subgroup",
    "in_theta_level_subgroup",
    "is_cocycle",
    "coboundary_witness",
    "twisted_involution_point",
    "fixed_locus_member",
    "symplectic_generators",
]


def _is_exact(M: np.ndarray) -> bool:
    return M.dtype == object or np.issubdtype(M.dtype, np.integer)


def is_cocycle(gamma) -> bool:
    """Exact test gamma tau(gamma) = identity (tolerance 1e-12 for floats)."""
    M = np.asarray(gamma)
    if not is_symplectic(M):
        raise ValueError("matrix is not symplectic")
    P = M @ tau_group(M)
    n = P.shape[0]
    if _is_exact(M):
        return all(int(P[i, j]) == int(i == j) for i in range(n) for j in range(n))
    return float(np.max(np.abs(P - np.eye(n)))) <= 1e-12


def in_congruence_subgroup(M, N: int) -> bool:
    """Membership in the principal congruence subgroup of level N."""
    M = int_matrix(M)
    if not is_symplectic(M):
        return False
    n = M.shape[0]
    return all((int(M[i, j]) - int(i == j)) % N == 0 for i in range(n) for j in range(n))


def in_theta_level_subgroup(M, m: int) -> bool:
    """Membership test: diagonal blocks = I mod 2, off-diagonal = 0 mod 2m."""
    M = int_matrix(M)
    if not is_symplectic(M):
        return False
    g = M.shape[0] // 2
    A, B = M[:g, :g], M[:g, g:]
    C, D = M[g:, :g], M[g:, g:]
    eye_ok = all((int(A[i, j]) - int(i == j)) % 2 == 0 for i in range(g) for j in range(g))
    eye_ok = eye_ok and all((int(D[i, j]) - int(i == j)) % 2 == 0
                            for i in range(g) for j in range(g))
    off_ok = all(int(B[i, j]) % (2 * m) == 0 for i in range(g) for j in range(g))
    off_ok = off_ok and all(int(C[i, j]) % (2 * m) == 0 for i in range(g) for j in range(g))
    return eye_ok and off_ok


@dataclass(frozen=True)
class CocycleDatum:
    """A cocycle gamma together with the congruence filter it lives in.

    group tag: "full" (integral), ("congruence", N), or ("theta", m).
    """

    gamma: np.ndarray
    group: object = "full"

    def __post_init__(self):
        gamma = int_matrix(self.gamma)
        if not is_symplectic(gamma):
            raise ValueError("datum must be integral symplectic")
        if not is_cocycle(gamma):
            raise ValueError("gamma tau(gamma) must be the identity")
        tag = self.group
        if tag == "full":
            pass
        elif isinstance(tag, tuple) and len(tag) == 2 and tag[0] == "congruence":
            if not in_congruence_subgroup(gamma, int(tag[1])):
                raise ValueError(f"gamma is not in the level-{tag[1]} congruence subgroup")
        elif isinstance(tag, tuple) and len(tag) == 2 and tag[0] == "theta":
            if not in_theta_level_subgroup(gamma, int(tag[1])):
                raise ValueError("gamma is not in the declared theta-level subgroup")
        else:
            raise ValueError(f"unknown group tag {tag!r}")
        object.__setattr__(self, "gamma", gamma)


# ---------------------------------------------------------------------------
# generator words and the coboundary search


def symplectic_generators(g: int) -> list[np.ndarray]:
    """Small exact generating set: J, translations, elementary dilations."""
    gens: list[np.ndarray] = [symplectic_form(g)]
    n = 2 * g

    def embed_translation(B):
        M = np.eye(n, dtype=object)
        for i in range(n):
            for j in range(n):
                M[i, j] = int(M[i, j])
        for i in range(g):
            for j in range(g):
                M[i, g + j] = int(B[i, j])
        return M

    def embed_gl(A):
        A = int_matrix(A)
        M = np.zeros((n, n), dtype=object)
        M[:, :] = 0
        M[:g, :g] = A
        M[g:, g:] = unimodular_inverse(A).T
        return M

    for i in range(g):
        for j in range(i, g):
            B = np.zeros((g, g), dtype=int)
            B[i, j] = 1
            B[j, i] = 1
            gens.append(embed_translation(B))
            gens.append(embed_translation(-B))
    for i in range(g):
        for j in range(g):
            if i != j:
                A = np.eye(g, dtype=int)
                A[i, j] = 1
                gens.append(embed_gl(A))
                A = np.eye(g, dtype=int)
                A[i, j] = -1
                gens.append(embed_gl(A))
    if g >= 1:
        A = -np.eye(g, dtype=int)
        gens.append(embed_gl(A))
    return gens


_witness_cache: dict[tuple[int, int], dict[bytes, np.ndarray]] = {}


def _matrix_key(M: np.ndarray) -> bytes:
    return repr([[int(v) for v in row] for row in M]).encode()


def _witness_table(g: int, bound: int) -> dict[bytes, np.ndarray]:
    """Map tau(h) h^-1 -> h over all generator words of length <= bound."""
    key = (g, bound)
    if key in _witness_cache:
        return _witness_cache[key]
    gens = symplectic_generators(g)
    n = 2 * g
    eye = np.eye(n, dtype=object)
    for i in range(n):
        for j in range(n):
            eye[i, j] = int(eye[i, j])
    table: dict[bytes, np.ndarray] = {}
    frontier = [eye]
    seen = {_matrix_key(eye)}

    def record(h: np.ndarray) -> None:
        quot = tau_group(h) @ symplectic_inverse(h)
        k = _matrix_key(quot)
        if k not in table:
            table[k] = h

    record(eye)
    for _ in range(bound):
        new_frontier = []
        for h in frontier:
            for gen in gens:
                cand = h @ gen
                k = _matrix_key(cand)
                if k in seen:
                    continue
                seen.add(k)
                if max(abs(int(v)) for v in cand.flat) > 64:
                    continue
                record(cand)
                new_frontier.append(cand)
        frontier = new_frontier
    _witness_cache[key] = table
    return table


def coboundary_witness(gamma, bound: int = 4) -> np.ndarray | None:
    """Search h with tau(h) h^-1 = gamma over generator words of length <= bound.

    Returns an exact verified witness or None when the word bound is
    exhausted (which does not refute the coboundary property).
    """
    gamma = int_matrix(gamma)
    if not is_cocycle(gamma):
        raise ValueError("not a cocycle: gamma tau(gamma) differs from the identity")
    g = gamma.shape[0] // 2
    table = _witness_table(g, bound)
    h = table.get(_matrix_key(gamma))
    if h is None:
        return None
    check = tau_group(h) @ symplectic_inverse(h)
    if _matrix_key(check) != _matrix_key(gamma):
        raise AssertionError("witness verification failed")
    return h


def twisted_involution_point(gamma, omega) -> np.ndarray:
    """Point map of the twisted involution: Omega -> tau(gamma . Omega)."""
    return tau_point(sp_act(gamma, omega))


def fixed_locus_member(gamma, omega, tol: float = 1e-10) -> bool:
    """True iff gamma . Omega = -conj(Omega) within ``tol``."""
    om = np.asarray(omega, dtype=complex)
    moved = sp_act(gamma, om)
    return float(np.max(np.abs(moved + np.conj(om)))) <= tol

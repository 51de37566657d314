import itertools

import numpy as np
import pytest

from realtori.exactlinalg import (
    int_matrix,
    is_symplectic,
    random_unimodular,
    symplectic_form,
    unimodular_inverse,
)
from realtori.moduli import (
    ModuliInvariant,
    Verdict,
    classify_spd,
    congruence_witnesses,
    mod2_invariants,
    mod2_standard_form,
    polarized_tori_equivalent,
    real_ppav_equivalent,
    real_structure_matrix,
    sigma_M_matrix,
    sigma_involution_image,
    stabilizer_mod2_member,
    standard_form_matrix,
    valid_invariants,
)
from realtori.siegel import sp_act
from realtori.spdcone import gl_act, random_spd


# ---------------------------------------------------------------------------
# independent GF(2) oracle: full orbit enumeration under GL(g, F2)


def all_gl_f2(g):
    """All invertible g x g matrices over GF(2), by brute force."""
    out = []
    for bits in itertools.product([0, 1], repeat=g * g):
        A = np.array(bits, dtype=np.uint8).reshape(g, g)
        # rank over GF(2) via elimination
        M = A.copy()
        rank = 0
        for c in range(g):
            piv = next((r for r in range(rank, g) if M[r, c]), None)
            if piv is None:
                continue
            M[[rank, piv]] = M[[piv, rank]]
            for r in range(g):
                if r != rank and M[r, c]:
                    M[r] ^= M[rank]
            rank += 1
        if rank == g:
            out.append(A)
    return out


def all_symmetric_f2(g):
    out = []
    idx = [(i, j) for i in range(g) for j in range(i, g)]
    for bits in itertools.product([0, 1], repeat=len(idx)):
        N = np.zeros((g, g), dtype=np.uint8)
        for (i, j), b in zip(idx, bits):
            N[i, j] = N[j, i] = b
        out.append(N)
    return out


def orbit_of(N, group):
    key = lambda M: M.tobytes()
    return {key((A @ N @ A.T) % 2) for A in group}


class TestMod2Invariants:
    def test_zero(self):
        assert mod2_invariants(np.zeros((3, 3), dtype=int)) == ModuliInvariant(0, 1)

    def test_identity(self):
        assert mod2_invariants(np.eye(3, dtype=int)) == ModuliInvariant(3, 0)

    def test_hyperbolic(self):
        assert mod2_invariants([[0, 1], [1, 0]]) == ModuliInvariant(2, 1)

    def test_orbit_invariance_exhaustive(self):
        for g in (1, 2, 3):
            group = all_gl_f2(g)
            for N in all_symmetric_f2(g):
                inv = mod2_invariants(N)
                for A in group[:: max(1, len(group) // 20)]:
                    assert mod2_invariants((A @ N @ A.T) % 2) == inv


class TestStandardForm:
    def test_examples(self):
        S, A = mod2_standard_form(np.diag([1, 0]).astype(int))
        assert np.array_equal(S, np.diag([1, 0]).astype(np.uint8))
        S, A = mod2_standard_form([[1, 1], [1, 1]])
        assert np.array_equal(S, np.diag([1, 0]).astype(np.uint8))
        S, A = mod2_standard_form([[0, 1], [1, 0]])
        assert np.array_equal(S, np.array([[0, 1], [1, 0]], dtype=np.uint8))

    def test_witness_certifies(self):
        rng = np.random.default_rng(0)
        for g in (1, 2, 3, 4):
            for _ in range(30):
                N = rng.integers(0, 2, size=(g, g)).astype(np.uint8)
                N = ((N + N.T) % 2).astype(np.uint8)
                S, A = mod2_standard_form(N)
                assert np.array_equal((A @ N @ A.T) % 2, S)
                assert mod2_invariants(N) == mod2_invariants(S)

    def test_matches_orbit_enumeration(self):
        # oracle: compare against exhaustive orbit classification
        for g in (1, 2, 3):
            group = all_gl_f2(g)
            if g == 3:
                assert len(group) == 168
            forms = {}
            for N in all_symmetric_f2(g):
                S, A = mod2_standard_form(N)
                assert np.array_equal((A @ N @ A.T) % 2, S)
                orb = orbit_of(N, group)
                # standard form lies in the orbit, and orbits are matched
                assert S.tobytes() in orb
                inv = mod2_invariants(N)
                prev = forms.setdefault((inv.lam, inv.i), (S.tobytes(), frozenset(orb)))
                assert prev[0] == S.tobytes()
                assert prev[1] == frozenset(orb)
            assert len(forms) == len(valid_invariants(g))


class TestValidInvariants:
    def test_g1(self):
        assert {(iv.lam, iv.i) for iv in valid_invariants(1)} == {(0, 1), (1, 0)}

    def test_g2(self):
        assert {(iv.lam, iv.i) for iv in valid_invariants(2)} == {
            (0, 1), (1, 0), (2, 0), (2, 1)}

    def test_count_formula(self):
        for g in range(1, 9):
            assert len(valid_invariants(g)) == g + 1 + g // 2

    def test_restriction_enforced(self):
        with pytest.raises(ValueError):
            ModuliInvariant(1, 1)
        with pytest.raises(ValueError):
            ModuliInvariant(0, 0)


class TestStabilizer:
    def test_identity(self):
        assert stabilizer_mod2_member(np.eye(2, dtype=int), np.diag([1, 0]))

    def test_zero_form(self):
        A = random_unimodular(3, np.random.default_rng(1))
        assert stabilizer_mod2_member(A, np.zeros((3, 3), dtype=int))

    def test_explicit(self):
        assert stabilizer_mod2_member([[1, 1], [0, 1]], np.diag([1, 0]))

    def test_non_member(self):
        assert not stabilizer_mod2_member([[0, 1], [1, 0]], np.diag([1, 0]))

    def test_requires_unimodular(self):
        with pytest.raises(ValueError):
            stabilizer_mod2_member(np.diag([2, 1]), np.zeros((2, 2), dtype=int))


class TestSigmaMatrix:
    def test_zero_gives_j(self):
        S = sigma_M_matrix(np.zeros((2, 2), dtype=int))
        assert np.array_equal(S.astype(int), symplectic_form(2).astype(int))

    def test_all_standard_forms(self):
        for g in (1, 2, 3, 4):
            for inv in valid_invariants(g):
                M = standard_form_matrix(g, inv).astype(int)
                S = sigma_M_matrix(M)
                assert is_symplectic(S)
                neg = S @ (-S)
                n = 2 * g
                assert all(int(neg[i, j]) == int(i == j)
                           for i in range(n) for j in range(n))

    def test_conjugation_relation(self):
        # (tS)^-1 (-I,0;M,I) tS = (I,0;-M,-I) exactly for standard M
        for g in (1, 2, 3, 4):
            for inv in valid_invariants(g):
                M = int_matrix(standard_form_matrix(g, inv).astype(int))
                S = sigma_M_matrix(M)
                I = int_matrix(np.eye(g, dtype=int))
                Z = np.zeros((g, g), dtype=object)
                Z[:, :] = 0
                lhs_mid = np.block([[-I, Z], [M, I]])
                rhs = np.block([[I, Z], [-M, -I]])
                St = S.T
                St_inv = unimodular_inverse(St)
                out = St_inv @ lhs_mid @ St
                assert all(int(x) == int(y) for x, y in zip(out.flat, rhs.flat))

    def test_requires_m_cubed(self):
        with pytest.raises(ValueError):
            sigma_M_matrix(2 * np.eye(2, dtype=int))


class TestSigmaInvolutionImage:
    def test_zero_form_inversion(self):
        Y = random_spd(2, np.random.default_rng(2))
        out = sigma_involution_image(np.zeros((2, 2), dtype=int), Y)
        assert np.max(np.abs(out - 1j * np.linalg.inv(Y))) < 1e-12

    def test_fixed_point(self):
        out = sigma_involution_image(np.zeros((2, 2), dtype=int), np.eye(2))
        assert np.max(np.abs(out - 1j * np.eye(2))) < 1e-14

    def test_agrees_with_action(self):
        rng = np.random.default_rng(3)
        for g in (2, 3):
            for inv in valid_invariants(g):
                M = standard_form_matrix(g, inv).astype(int)
                S = sigma_M_matrix(M)
                for _ in range(5):
                    Y = random_spd(g, rng)
                    om = 0.5 * M.astype(float) + 1j * Y
                    closed = sigma_involution_image(M, Y)
                    acted = sp_act(S, om)
                    assert np.max(np.abs(closed - acted)) < 1e-10

    def test_involution_up_to_class(self):
        # applying twice gives a point equivalent to the original
        rng = np.random.default_rng(4)
        M = standard_form_matrix(2, ModuliInvariant(1, 0)).astype(int)
        Y = random_spd(2, rng)
        om1 = sigma_involution_image(M, Y)
        om2 = sigma_involution_image(M, om1.imag)
        res = real_ppav_equivalent(0.5 * M.astype(float) + 1j * Y, om2)
        assert res.verdict is Verdict.EQUIVALENT


class TestRealStructureMatrix:
    def test_pure_imaginary(self):
        Y = random_spd(2, np.random.default_rng(5))
        Ms = real_structure_matrix(1j * Y)
        expected = np.block([[-np.eye(2, dtype=int), np.zeros((2, 2), dtype=int)],
                             [np.zeros((2, 2), dtype=int), np.eye(2, dtype=int)]])
        assert np.array_equal(Ms.astype(int), expected)

    def test_half_shift(self):
        om = np.array([[0.5]]) + 1j * np.eye(1)
        Ms = real_structure_matrix(om)
        assert np.array_equal(Ms.astype(int), np.array([[-1, 0], [1, 1]]))

    def test_anti_symplectic_random(self):
        rng = np.random.default_rng(6)
        J = symplectic_form(2)
        for _ in range(100):
            Xint = rng.integers(-3, 4, size=(2, 2))
            Xint = Xint + Xint.T
            om = 0.5 * Xint.astype(float) + 1j * random_spd(2, rng)
            Ms = real_structure_matrix(om)
            R = Ms.T @ J @ Ms + J
            assert all(int(v) == 0 for v in R.flat)

    def test_rejects_generic_point(self):
        with pytest.raises(ValueError):
            real_structure_matrix(np.array([[0.3]]) + 1j * np.eye(1))


class TestCongruenceWitnesses:
    def test_identity_pair(self):
        Y = random_spd(2, np.random.default_rng(7))
        ws, complete = congruence_witnesses(Y, Y)
        assert complete
        assert any(np.array_equal(w.astype(int), np.eye(2, dtype=int)) for w in ws)

    def test_transported(self):
        rng = np.random.default_rng(8)
        Y = random_spd(2, rng)
        U = random_unimodular(2, rng, max_entry=2)
        Y2 = gl_act(U.astype(float), Y)
        ws, complete = congruence_witnesses(Y, Y2)
        assert complete and ws
        for w in ws:
            assert np.max(np.abs(gl_act(w.astype(float), Y) - Y2)) < 1e-8


class TestPolarizedToriEquivalence:
    def test_same_matrix(self):
        Y = random_spd(2, np.random.default_rng(9))
        res = polarized_tori_equivalent(Y, Y)
        assert res.verdict is Verdict.EQUIVALENT

    def test_transported_pairs(self):
        rng = np.random.default_rng(10)
        for g in (2, 3):
            for _ in range(20):
                Y = random_spd(g, rng)
                U = random_unimodular(g, rng, max_entry=3)
                Y2 = gl_act(U.astype(float), Y)
                res = polarized_tori_equivalent(Y, Y2)
                assert res.verdict is Verdict.EQUIVALENT
                A = res.witness.astype(float)
                assert np.max(np.abs(A @ Y @ A.T - Y2)) < 1e-9 * max(1.0, np.max(np.abs(Y2)))

    def test_determinant_obstruction(self):
        res = polarized_tori_equivalent(np.eye(2), np.diag([1.0, 2.0]))
        assert res.verdict is Verdict.INEQUIVALENT

    def test_same_det_inequivalent(self):
        # diag(2, 1/2) and I have equal determinant but different minima
        res = polarized_tori_equivalent(np.diag([2.0, 0.5]), np.eye(2))
        assert res.verdict is Verdict.INEQUIVALENT


class TestRealPpavEquivalence:
    def test_reflexive(self):
        om = 0.5 * np.eye(2) + 1j * random_spd(2, np.random.default_rng(11))
        res = real_ppav_equivalent(om, om)
        assert res.verdict is Verdict.EQUIVALENT

    def test_transported(self):
        rng = np.random.default_rng(12)
        from realtori.siegel import gamma_star_act

        for _ in range(10):
            Y = random_spd(2, rng)
            Xint = rng.integers(-1, 2, size=(2, 2))
            Xint = Xint + Xint.T
            om = 0.5 * Xint.astype(float) + 1j * Y
            A = random_unimodular(2, rng, max_entry=2)
            S = rng.integers(-1, 2, size=(2, 2))
            S = S + S.T
            B = int_matrix((np.array([[int(v) for v in r] for r in A.astype(int)]) @ S))
            M = np.zeros((4, 4), dtype=object)
            M[:, :] = 0
            M[:2, :2] = A
            M[:2, 2:] = B
            M[2:, 2:] = unimodular_inverse(A).T
            om2 = gamma_star_act(M, om)
            res = real_ppav_equivalent(om, om2)
            assert res.verdict is Verdict.EQUIVALENT

    def test_invariant_obstruction(self):
        om1 = 1j * np.eye(2)
        om2 = 0.5 * np.eye(2) + 1j * np.eye(2)
        res = real_ppav_equivalent(om1, om2)
        assert res.verdict is Verdict.INEQUIVALENT

    def test_never_equivalent_without_witness(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            om1 = 0.5 * np.eye(2) + 1j * random_spd(2, rng)
            om2 = 0.5 * np.eye(2) + 1j * random_spd(2, rng)
            res = real_ppav_equivalent(om1, om2)
            if res.verdict is Verdict.EQUIVALENT:
                A = res.witness.astype(float)
                assert np.max(np.abs(A @ om1.imag @ A.T - om2.imag)) < 1e-7


class TestClassifySpd:
    def test_bundles(self):
        Y = random_spd(2, np.random.default_rng(14))
        cls = classify_spd(np.zeros((2, 2), dtype=int), Y)
        assert cls.invariant == ModuliInvariant(0, 1)
        assert np.array_equal(cls.standard_M, np.zeros((2, 2), dtype=np.uint8))

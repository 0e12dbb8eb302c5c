import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatesplit.gates import CNOT, PAULI, SWAP
from gatesplit.linalg import (
    Cut,
    GateSplitError,
    ShapeError,
    SizeLimitError,
    TensorSpace,
    commutator,
    hermitian_eig,
    kron,
    kron_all,
    matrix_exp_i,
    norm,
    partial_trace,
    permute_subsystems,
    reshuffle,
    symmetrize,
)

from .conftest import random_hermitian, random_unitary

I2, X, Y, Z = (PAULI[k] for k in "IXYZ")
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def brute_kron(a, b):
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=complex)
    for ia, ja, ib, jb in itertools.product(
        range(a.shape[0]), range(a.shape[1]), range(b.shape[0]), range(b.shape[1])
    ):
        out[ia * b.shape[0] + ib, ja * b.shape[1] + jb] = a[ia, ja] * b[ib, jb]
    return out


def brute_partial_trace(m, dims, keep):
    """Index-sum oracle: sum over all traced-out multi-indices."""
    n = len(dims)
    k = keep - 1
    others = [range(d) for i, d in enumerate(dims) if i != k]

    def flat(idx):
        f = 0
        for i, d in zip(idx, dims):
            f = f * d + i
        return f

    out = np.zeros((dims[k], dims[k]), dtype=complex)
    for a in range(dims[k]):
        for b in range(dims[k]):
            for rest in itertools.product(*others):
                ia = list(rest[:k]) + [a] + list(rest[k:])
                ib = list(rest[:k]) + [b] + list(rest[k:])
                out[a, b] += m[flat(ia), flat(ib)]
    return out


def brute_reshuffle_2x2(u):
    """R[(i1,j1),(i2,j2)] = U[(i1,i2),(j1,j2)] for two qubits."""
    r = np.zeros((4, 4), dtype=complex)
    for i1, j1, i2, j2 in itertools.product(range(2), repeat=4):
        r[2 * i1 + j1, 2 * i2 + j2] = u[2 * i1 + i2, 2 * j1 + j2]
    return r


class TestTensorSpace:
    def test_total(self):
        assert TensorSpace((2, 3, 2)).total == 12

    @pytest.mark.parametrize("dims", [(), (1, 2), (2, 0)])
    def test_rejects_bad_dims(self, dims):
        with pytest.raises(GateSplitError):
            TensorSpace(dims)

    def test_size_cap(self, monkeypatch):
        with pytest.raises(SizeLimitError):
            TensorSpace.qubits(13)
        monkeypatch.setenv("GATESPLIT_MAX_DIM", "16")
        with pytest.raises(SizeLimitError):
            TensorSpace.qubits(5)
        monkeypatch.setenv("GATESPLIT_MAX_DIM", "8192")
        assert TensorSpace.qubits(13).total == 8192

    def test_infer(self):
        assert TensorSpace.infer(8).dims == (2, 2, 2)
        with pytest.raises(GateSplitError):
            TensorSpace.infer(6)


class TestCut:
    def test_sorted_and_validated(self):
        cut = Cut((3, 1), (2,))
        assert cut.left == (1, 3)
        cut.validate(TensorSpace((2, 2, 2)))
        with pytest.raises(GateSplitError):
            cut.validate(TensorSpace((2, 2, 2, 2)))

    @pytest.mark.parametrize("left,right", [((), (1,)), ((1,), ()), ((1, 2), (2,))])
    def test_invalid(self, left, right):
        with pytest.raises(GateSplitError):
            Cut(left, right)


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(I2, I2), np.eye(4))

    def test_diagonal(self):
        np.testing.assert_array_equal(kron(Z, Z), np.diag([1, -1, -1, 1]))

    def test_block_swap_matches_index_formula(self):
        expected = brute_kron(X, I2)
        np.testing.assert_array_equal(kron(X, I2), expected)
        # X ⊗ I swaps the two 2x2 blocks
        np.testing.assert_array_equal(expected[:2, 2:], np.eye(2))
        np.testing.assert_array_equal(expected[2:, :2], np.eye(2))

    def test_rectangular(self, rng):
        a = rng.normal(size=(2, 3))
        b = rng.normal(size=(3, 2))
        np.testing.assert_allclose(kron(a, b), brute_kron(a, b))

    def test_size_limit(self, monkeypatch):
        monkeypatch.setenv("GATESPLIT_MAX_DIM", "4")
        with pytest.raises(SizeLimitError):
            kron(np.eye(4), np.eye(2))

    def test_kron_all(self):
        np.testing.assert_array_equal(kron_all([I2]), I2)
        np.testing.assert_array_equal(kron_all([X, Z]), kron(X, Z))
        z1 = kron_all([Z, I2, I2])
        np.testing.assert_array_equal(np.diag(z1), [1, 1, 1, 1, -1, -1, -1, -1])
        with pytest.raises(GateSplitError):
            kron_all([])


class TestPartialTrace:
    def test_identity(self):
        np.testing.assert_array_equal(partial_trace(np.eye(4), TensorSpace((2, 2)), 1), 2 * I2)

    def test_cnot_against_index_sum(self):
        space = TensorSpace((2, 2))
        # frozen from brute_partial_trace
        np.testing.assert_array_equal(brute_partial_trace(CNOT, (2, 2), 1), [[2, 0], [0, 0]])
        np.testing.assert_array_equal(brute_partial_trace(CNOT, (2, 2), 2), [[1, 1], [1, 1]])
        np.testing.assert_array_equal(partial_trace(CNOT, space, 1), [[2, 0], [0, 0]])
        np.testing.assert_array_equal(partial_trace(CNOT, space, 2), [[1, 1], [1, 1]])

    @pytest.mark.parametrize("dims", [(2, 3), (3, 2, 2), (2, 2, 2)])
    def test_random_against_index_sum(self, rng, dims):
        space = TensorSpace(dims)
        m = rng.normal(size=(space.total,) * 2) + 1j * rng.normal(size=(space.total,) * 2)
        for keep in range(1, len(dims) + 1):
            got = partial_trace(m, space, keep)
            np.testing.assert_allclose(got, brute_partial_trace(m, dims, keep), atol=1e-12)
            assert abs(np.trace(got) - np.trace(m)) < 1e-12

    @given(seeds)
    @settings(max_examples=40, deadline=None)
    def test_product_rule_and_linearity(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_hermitian(rng, 3), random_hermitian(rng, 2)
        c, d = random_hermitian(rng, 3), random_hermitian(rng, 2)
        space = TensorSpace((3, 2))
        np.testing.assert_allclose(partial_trace(kron(a, b), space, 1), np.trace(b) * a, atol=1e-12)
        np.testing.assert_allclose(partial_trace(kron(a, b), space, 2), np.trace(a) * b, atol=1e-12)
        m1, m2 = kron(a, b), kron(c, d)
        np.testing.assert_allclose(
            partial_trace(2 * m1 - 3j * m2, space, 1),
            2 * partial_trace(m1, space, 1) - 3j * partial_trace(m2, space, 1),
            atol=1e-12,
        )

    def test_keep_out_of_range(self):
        with pytest.raises(GateSplitError):
            partial_trace(np.eye(4), TensorSpace((2, 2)), 3)

    def test_size_mismatch(self):
        with pytest.raises(ShapeError):
            partial_trace(np.eye(3), TensorSpace((2, 2)), 1)


class TestSpectral:
    def test_pauli_spectrum(self):
        w, _ = hermitian_eig(Z)
        np.testing.assert_allclose(w, [-1, 1])

    def test_identity(self):
        w, v = hermitian_eig(I2)
        np.testing.assert_allclose(w, [1, 1])
        np.testing.assert_allclose(v @ v.conj().T, I2, atol=1e-15)

    def test_hadamard_like(self):
        # characteristic polynomial of (X+Z)/sqrt2 is λ^2 - 1
        w, _ = hermitian_eig((X + Z) / np.sqrt(2))
        np.testing.assert_allclose(w, [-1, 1], atol=1e-15)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ShapeError):
            hermitian_eig(np.array([[0, 1], [0, 0]]))

    def test_symmetrizes_within_tolerance(self):
        m = Z + 1e-12 * np.array([[0, 1], [0, 0]])
        s = symmetrize(m)
        np.testing.assert_array_equal(s, s.conj().T)

    @given(seeds, st.sampled_from([2, 3, 4, 8]))
    @settings(max_examples=50, deadline=None)
    def test_reconstruction(self, seed, d):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, d, scale=rng.uniform(0.1, 50))
        w, v = hermitian_eig(h)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm((v * w) @ v.conj().T - h) <= 1e-10 * max(1, np.linalg.norm(h))
        assert np.linalg.norm(v.conj().T @ v - np.eye(d), 2) <= 1e-10


class TestMatrixExpI:
    def test_zero(self):
        np.testing.assert_allclose(matrix_exp_i(np.zeros((4, 4))), np.eye(4))

    def test_pi_z(self):
        np.testing.assert_allclose(matrix_exp_i(np.pi * Z), -I2, atol=1e-15)

    def test_diagonal_zz(self):
        p = np.exp(1j * np.pi / 4)
        expected = np.diag([p, p.conjugate(), p.conjugate(), p])
        np.testing.assert_allclose(matrix_exp_i(np.pi / 4 * kron(Z, Z)), expected, atol=1e-15)

    @given(seeds, st.sampled_from([2, 3, 4, 8]))
    @settings(max_examples=50, deadline=None)
    def test_unitary(self, seed, d):
        rng = np.random.default_rng(seed)
        e = matrix_exp_i(random_hermitian(rng, d, scale=rng.uniform(0, 10)))
        assert np.linalg.norm(e.conj().T @ e - np.eye(d), 2) <= 1e-10


class TestNorm:
    def test_examples(self):
        assert norm(np.eye(4), "operator") == pytest.approx(1)
        assert norm(kron(Z, Z), "frobenius") == pytest.approx(2)
        assert norm(np.diag([3, 1]), "trace") == pytest.approx(4)
        assert norm(np.diag([3, 4]), "schatten", p=2) == pytest.approx(5)
        assert norm(np.diag([3, 4]), "schatten", p=np.inf) == pytest.approx(4)

    def test_aliases(self):
        m = np.diag([3, 1])
        assert norm(m, "op") == norm(m, "operator")
        assert norm(m, "fro") == norm(m, "frobenius")

    @pytest.mark.parametrize("p", [None, 0.5])
    def test_bad_p(self, p):
        with pytest.raises(GateSplitError):
            norm(np.eye(2), "schatten", p=p)

    def test_unknown(self):
        with pytest.raises(GateSplitError):
            norm(np.eye(2), "max")

    @given(seeds, st.sampled_from([("operator", None), ("frobenius", None), ("trace", None),
                                   ("schatten", 1.5), ("schatten", 3.0)]))
    @settings(max_examples=60, deadline=None)
    def test_cross_norm_multiplicative(self, seed, kind):
        rng = np.random.default_rng(seed)
        da, db = rng.integers(2, 4, size=2)
        a = rng.normal(size=(da, da)) + 1j * rng.normal(size=(da, da))
        b = rng.normal(size=(db, db)) + 1j * rng.normal(size=(db, db))
        k, p = kind
        lhs = norm(kron(a, b), k, p)
        assert abs(lhs - norm(a, k, p) * norm(b, k, p)) <= 1e-10 * max(1, lhs)

    def test_unitarily_invariant(self, rng):
        m = rng.normal(size=(4, 4))
        u, v = random_unitary(rng, 4), random_unitary(rng, 4)
        for kind in ("operator", "frobenius", "trace"):
            assert norm(u @ m @ v, kind) == pytest.approx(norm(m, kind), rel=1e-12)


class TestReshuffle:
    def test_product_is_rank_one(self, rng):
        a, b = rng.normal(size=(2, 2)), rng.normal(size=(2, 2))
        r = reshuffle(kron(a, b), TensorSpace((2, 2)), Cut((1,), (2,)))
        np.testing.assert_allclose(r, np.outer(a.ravel(), b.ravel()), atol=1e-14)

    def test_matches_index_oracle(self, rng):
        u = random_unitary(rng, 4)
        r = reshuffle(u, TensorSpace((2, 2)), Cut((1,), (2,)))
        np.testing.assert_allclose(r, brute_reshuffle_2x2(u))

    def test_cnot_coefficients(self):
        oracle = np.linalg.svd(brute_reshuffle_2x2(CNOT), compute_uv=False)
        np.testing.assert_allclose(oracle, [np.sqrt(2), np.sqrt(2), 0, 0], atol=1e-14)
        got = np.linalg.svd(reshuffle(CNOT, TensorSpace((2, 2)), Cut((1,), (2,))), compute_uv=False)
        np.testing.assert_allclose(got, oracle, atol=1e-14)

    def test_swap_coefficients(self):
        # SWAP = (1/2) Σ_P P ⊗ P over the Pauli basis
        pauli_sum = sum(kron(p, p) for p in PAULI.values()) / 2
        np.testing.assert_allclose(pauli_sum, SWAP)
        got = np.linalg.svd(reshuffle(SWAP, TensorSpace((2, 2)), Cut((1,), (2,))), compute_uv=False)
        np.testing.assert_allclose(got, [1, 1, 1, 1], atol=1e-14)

    def test_non_contiguous_cut(self, rng):
        a, b, c = (random_unitary(rng, d) for d in (2, 3, 2))
        u = kron_all([a, b, c])
        space = TensorSpace((2, 3, 2))
        r = reshuffle(u, space, Cut((1, 3), (2,)))
        assert r.shape == (16, 9)
        np.testing.assert_allclose(r, np.outer(kron(a, c).ravel(), b.ravel()), atol=1e-13)

    @given(seeds, st.sampled_from([((2, 2), (1,)), ((2, 3), (2,)), ((2, 2, 2), (1, 3)), ((3, 2, 2), (2, 3))]))
    @settings(max_examples=40, deadline=None)
    def test_isometry(self, seed, case):
        dims, left = case
        rng = np.random.default_rng(seed)
        space = TensorSpace(dims)
        u = random_unitary(rng, space.total)
        right = tuple(i for i in range(1, len(dims) + 1) if i not in left)
        r = reshuffle(u, space, Cut(left, right))
        assert abs(np.linalg.norm(r) - np.linalg.norm(u)) <= 1e-10

    def test_invalid_cut(self):
        with pytest.raises(GateSplitError):
            reshuffle(np.eye(8), TensorSpace((2, 2, 2)), Cut((1,), (2,)))


class TestCommutator:
    def test_examples(self):
        np.testing.assert_array_equal(commutator(Z, Z), np.zeros((2, 2)))
        np.testing.assert_array_equal(commutator(X, Z), -2j * Y)
        np.testing.assert_array_equal(commutator(kron(Z, I2), kron(I2, Z)), np.zeros((4, 4)))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            commutator(np.eye(2), np.eye(3))


def test_permute_subsystems_roundtrip(rng):
    a, b, c = (random_unitary(rng, d) for d in (2, 3, 4))
    space = TensorSpace((2, 3, 4))
    m = kron_all([a, b, c])
    moved = permute_subsystems(m, space, (3, 1, 2))
    np.testing.assert_allclose(moved, kron_all([c, a, b]), atol=1e-14)
    back = permute_subsystems(moved, TensorSpace((4, 2, 3)), (2, 3, 1))
    np.testing.assert_allclose(back, m, atol=1e-14)

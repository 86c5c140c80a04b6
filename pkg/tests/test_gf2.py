import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qedet import gf2

matrices = st.integers(0, 2**32 - 1).map(
    lambda seed: np.random.default_rng(seed).integers(
        0, 2, size=np.random.default_rng(seed ^ 0xA5A5).integers(1, 8, size=2)
    ).astype(np.uint8)
)


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_rref_matches_dense_oracle(mat):
    red, rank, pivots = gf2.rref(mat)
    oracle_red, oracle_rank, oracle_pivots = oracles.gf2_rref_dense(mat)
    assert rank == oracle_rank
    assert pivots == oracle_pivots
    assert np.array_equal(red, oracle_red)


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_nullspace_annihilates_and_has_full_dimension(mat):
    ns = gf2.nullspace(mat)
    assert len(ns) == mat.shape[1] - gf2.rank(mat)
    if len(ns):
        assert not ((mat @ ns.T) % 2).any()
        assert gf2.rank(ns) == len(ns)


@given(matrices, st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_solve_finds_solutions_iff_in_rowspace_of_transpose(mat, seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 2, size=mat.shape[1]).astype(np.uint8)
    rhs = (mat @ x) % 2
    sol = gf2.solve(mat, rhs)
    assert sol is not None
    assert np.array_equal((mat @ sol) % 2, rhs)


def test_solve_returns_none_when_inconsistent():
    mat = np.array([[1, 0], [1, 0]], dtype=np.uint8)
    rhs = np.array([0, 1], dtype=np.uint8)
    assert gf2.solve(mat, rhs) is None


def test_in_rowspace():
    mat = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    assert gf2.in_rowspace(mat, np.array([1, 0, 1], np.uint8))
    assert not gf2.in_rowspace(mat, np.array([1, 0, 0], np.uint8))


def test_span_enumerates_exactly():
    mat = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    got = {tuple(v) for v in gf2.span(mat)}
    assert got == {(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)}


def test_span_of_dependent_rows_deduplicates():
    mat = np.array([[1, 1], [1, 1]], dtype=np.uint8)
    assert len(gf2.span(mat)) == 2


def test_empty_matrix_conventions():
    empty = np.zeros((0, 4), dtype=np.uint8)
    assert gf2.rank(empty) == 0
    assert len(gf2.nullspace(empty)) == 4
    assert len(gf2.span(empty)) == 1  # only the zero vector

from hypothesis import given, strategies as st

from clonework.finite_core import FinOp, FinRel
from clonework.matrices import (EvMatrix, apply_rop, enumerate_matrices, enumerate_row_matrices,
                                from_columns, row_injective, substitute_columns)
from clonework.omega_ops import ROp, proj_e, top_ext
from clonework.textio import format_matrix, parse_matrix
from clonework.threads import EvThread

AND = FinOp(2, 2, (0, 0, 0, 1))
LEQ = FinRel.from_tuples(2, 2, [(0, 0), (0, 1), (1, 1)])

threads = st.builds(EvThread, st.lists(st.integers(0, 1), max_size=4), st.integers(0, 1))
finite_matrices = st.lists(threads, min_size=1, max_size=4).map(EvMatrix)
omega_matrices = st.builds(EvMatrix, st.lists(threads, max_size=4), threads)
matrices = st.one_of(finite_matrices, omega_matrices)


@given(matrices, st.integers(0, 6))
def test_projection_returns_column(m, j):
    assert apply_rop(proj_e(j, 2), m) == m.column(j)


@given(matrices, st.integers(0, 6))
def test_columns_past_width_are_eventual(m, j):
    assert m.column(m.width() + j) == m.eventual_column()


@given(omega_matrices)
def test_from_columns_roundtrip(m):
    w = m.width()
    cols = [m.column(j) for j in range(w)]
    assert from_columns(cols, m.eventual_column()) == m


def test_apply_example():
    m = EvMatrix([EvThread((0,), 1), EvThread((1, 0), 1)])
    assert apply_rop(top_ext(AND), m) == (0, 0)


@given(omega_matrices, st.lists(threads, max_size=3), st.lists(threads, max_size=5))
def test_longer_substitution_wins(m, s, r):
    if len(r) < len(s):
        s, r = r, s
    assert substitute_columns(substitute_columns(m, s), r) == substitute_columns(m, r)


@given(finite_matrices, st.data())
def test_substitution_sets_columns(m, data):
    cols = data.draw(st.lists(st.tuples(*[st.integers(0, 1)] * m.alpha), max_size=3))
    mm = substitute_columns(m, cols)
    for j, c in enumerate(cols):
        assert mm.column(j) == c


def test_row_injective():
    zeros, ones = EvThread((), 0), EvThread((), 1)
    assert row_injective(EvMatrix([zeros, ones]))
    assert not row_injective(EvMatrix([zeros, zeros]))
    assert not row_injective(EvMatrix([zeros], ones))


def test_enumeration_counts():
    unary = FinRel.from_tuples(2, 1, [(0,), (1,)])
    assert len(list(enumerate_matrices(unary, 1))) == 2
    assert len(list(enumerate_matrices(LEQ, 2))) == 9
    assert list(enumerate_matrices(FinRel.empty(2, 2), 3)) == []


@given(st.sets(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1), st.integers(1, 3))
def test_enumeration_is_duplicate_free_and_in_pool(pool, budget):
    pool = sorted(pool)
    ms = list(enumerate_matrices(pool, budget))
    assert len(ms) == len(set(ms))
    for m in ms:
        assert all(m.column(j) in pool for j in range(m.width() + 1))
        assert m.width() < budget


def test_row_matrices():
    rows = [EvThread((), 0), EvThread((), 1), EvThread((1,), 0)]
    ms = list(enumerate_row_matrices(rows, 2))
    assert len(ms) == 3 + 6
    assert all(row_injective(m) for m in ms)
    assert len(list(enumerate_row_matrices(rows, 2, injective=False))) == 3 + 9


@given(matrices)
def test_literal_roundtrip(m):
    assert parse_matrix(format_matrix(m)) == m


def test_width_one_rop_on_matrix():
    xor_tail = ROp(2, 1, (0, 1, 1, 0))
    m = EvMatrix([EvThread((1,), 0)], EvThread((), 1))
    assert apply_rop(xor_tail, m) == EvThread((1,), 0)

import pytest
from hypothesis import given, settings, strategies as st

from clonework.errors import DecreasingViolation, NotFiniteSupport
from clonework.finite_core import FinRel, pad
from clonework.omega_relations import (CertifiedIn, CertifiedOut, DecSeq, Explicit, InUpToDepth,
                                       Pattern, PatternFamily, Permutation, dec_exists, dec_intersect,
                                       dec_join, dec_permute, diagonal, exists_cut, from_finitary,
                                       lim_membership, local_closure)
from clonework.textio import parse_patterns
from clonework.threads import EvThread, all_threads

threads = st.builds(EvThread, st.lists(st.integers(0, 1), max_size=5), st.integers(0, 1))
perms = st.permutations(range(4)).map(Permutation)
S01 = FinRel.from_tuples(2, 2, [(0, 1)])
S0 = FinRel.from_tuples(2, 1, [(0,)])


def zeros_then_ones():
    return PatternFamily(2, parse_patterns("0* | 1"))


def test_top_extension_cuts():
    R = from_finitary(S01)
    assert set(R.cut(1).tuples) == {(0,)}
    assert set(R.cut(3).tuples) == {(0, 1, 0), (0, 1, 1)}
    for c in (0, 1):
        assert lim_membership(EvThread((0, 1), c), R, 4) == CertifiedIn()
    assert lim_membership(EvThread((), 1), from_finitary(S0), 4) == CertifiedOut(1)
    for k in range(2, 6):
        assert R.cut(k) == pad(S01, k)


def test_pattern_family_cuts():
    R = zeros_then_ones()
    assert {"".join(map(str, t)) for t in R.cut(3).tuples} == {"000", "001", "011", "111"}
    assert set(local_closure(R).cut(2).tuples) == {(0, 0), (0, 1), (1, 1)}
    assert lim_membership(EvThread((), 0), local_closure(R), 10) == InUpToDepth(10)
    assert not R.contains(EvThread((), 0))


@given(threads)
def test_pattern_membership_matches_definition(s):
    R = PatternFamily(2, parse_patterns("(0 1)* 1 | 0, 1 0* | 1"))
    # written out as raw sequences; 14 coordinates cover every member with n <= 6
    seqs = [[0, 1] * n + [1] + [0] * 20 for n in range(7)]
    seqs += [[1] + [0] * n + [1] * 20 for n in range(7)]
    heads = {tuple(q[:14]) for q in seqs}
    assert R.contains(s) == (s.head(14) in heads)


def test_explicit_members_certified():
    members = [EvThread((0, 1), 0), EvThread((), 1)]
    R = local_closure(Explicit(2, members))
    for s in members:
        assert lim_membership(s, R, 3) == CertifiedIn()
    assert isinstance(lim_membership(EvThread((1,), 0), R, 3), CertifiedOut)


def test_diagonal():
    D = diagonal(2)
    assert lim_membership(EvThread((), 1), D, 5) == CertifiedIn()
    assert lim_membership(EvThread((0,), 1), D, 5) == CertifiedOut(2)


def test_decreasing_violation():
    bad = DecSeq(2, lambda k: FinRel.full(2, k) if k != 2 else FinRel.from_tuples(2, 2, [(1, 1)]))
    bad.cut(2)  # fine: the 1-cut is full
    worse = DecSeq(2, lambda k: FinRel.empty(2, k) if k == 1 else FinRel.full(2, k))
    with pytest.raises(DecreasingViolation):
        worse.cut(3)


def test_spec_operations():
    R = dec_intersect(from_finitary(S01), from_finitary(S0))
    assert set(R.cut(2).tuples) == {(0, 1)}
    E = dec_exists(from_finitary(S01), {0})
    assert set(E.cut(1).tuples) == {(0,)}
    assert set(E.cut(2).tuples) == {(0, 0), (0, 1)}
    P = dec_permute(from_finitary(S01), Permutation((1, 0)))
    assert set(P.cut(2).tuples) == {(1, 0)}
    ident = dec_permute(from_finitary(S01), Permutation(()))
    for k in range(5):
        assert ident.cut(k) == from_finitary(S01).cut(k)


@given(st.sets(st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))),
       st.sets(st.integers(0, 3)))
def test_exists_cut_definition(tuples_, keep):
    S = FinRel.from_tuples(2, 3, tuples_)
    got = set(exists_cut(S, keep).tuples)
    idx = [i for i in sorted(keep) if i < 3]
    allowed = {tuple(t[i] for i in idx) for t in tuples_}
    expected = {t for t in all_threads_tuples(3) if tuple(t[i] for i in idx) in allowed}
    assert got == expected


def all_threads_tuples(n):
    from itertools import product
    return list(product(range(2), repeat=n))


@given(perms)
def test_permutation_inverse(sigma):
    tau = sigma.inverse()
    for s in all_threads(2, 3):
        assert tau.act(sigma.act(s)) == s
    for i in range(6):
        assert tau(sigma(i)) == i


def test_permutation_needs_finite_support():
    with pytest.raises(NotFiniteSupport):
        Permutation((0, 0))
    with pytest.raises(NotFiniteSupport):
        Permutation.from_mapping({0: 1})
    assert Permutation.from_mapping({0: 1, 1: 0}) == Permutation((1, 0))


@settings(max_examples=30)
@given(perms, threads)
def test_permuted_membership(sigma, s):
    R = local_closure(zeros_then_ones())
    P = dec_permute(R, sigma)
    for d in range(6):
        here = all(s.head(i) in P.cut(i) for i in range(d + 1))
        there = all(sigma.act(s).head(i) in R.cut(i) for i in range(d + 4 + 1))
        if there:
            assert here


@given(threads, st.integers(0, 6))
def test_join_membership(s, d):
    R = local_closure(zeros_then_ones())
    T = from_finitary(S01)
    J = dec_join(R, T)
    inside = lambda X: all(s.head(i) in X.cut(i) for i in range(d + 1))
    assert inside(J) == (inside(R) or inside(T))


def test_lim_cut_needs_horizon_without_tightness():
    R = dec_intersect(local_closure(zeros_then_ones()), local_closure(zeros_then_ones()))
    with pytest.raises(ValueError):
        R.lim_cut(2)
    assert set(R.lim_cut(2, horizon=2).tuples) == {(0, 0), (0, 1), (1, 1)}


def test_pattern_literals():
    (p,) = parse_patterns("1 (0 1)* 0 | 1")
    assert p == Pattern((1,), (0, 1), (0,), 1)
    assert p.member(2) == EvThread((1, 0, 1, 0, 1, 0), 1)

import pytest
from hypothesis import given, settings, strategies as st

from clonework.errors import CapExceeded, DomainMismatch
from clonework.finite_core import CloneCaps, FinOp, generate_clone, projection
from clonework.omega_ops import (OpSeq, ROp, SampleSpec, all_rops, axiom_suite, const_rop, eval_rop,
                                 fin_of, finitary_approximation, generate_omega_clone, proj_e, q_inf,
                                 q_n, rop_equal, separation_index, tail_op, top_ext)
from clonework.threads import EvThread, all_threads

from oracles import apply, naive_eval, tuples

AND = FinOp(2, 2, (0, 0, 0, 1))
OR = FinOp(2, 2, (0, 1, 1, 1))

threads2 = st.builds(EvThread, st.lists(st.integers(0, 1), max_size=7), st.integers(0, 1))


def rops(size=2, max_width=2):
    return st.integers(0, max_width).flatmap(
        lambda w: st.lists(st.integers(0, size - 1), min_size=size ** (w + 1), max_size=size ** (w + 1))
        .map(lambda h: ROp(size, w, h)))


@given(rops(), threads2)
def test_eval_matches_head_lookup(phi, s):
    assert eval_rop(phi, s) == naive_eval(phi.size, phi.width, phi.head, s) == phi(s)


@given(st.integers(1, 3), st.data())
def test_top_extension_reads_first_coordinates(k, data):
    table = data.draw(st.lists(st.integers(0, 1), min_size=2 ** k, max_size=2 ** k))
    f = FinOp(2, k, tuple(table))
    s = data.draw(threads2)
    assert eval_rop(top_ext(f), s) == f(*s.head(k))


@given(st.integers(0, 4), threads2)
def test_projection_reads_coordinate(n, s):
    assert eval_rop(proj_e(n, 2), s) == s[n]


def test_examples():
    s = EvThread((0,), 1)
    assert eval_rop(top_ext(AND), s) == 0
    assert eval_rop(proj_e(2, 2), s) == 1
    assert rop_equal(proj_e(1, 2), top_ext(projection(2, 2, 1)))
    assert rop_equal(top_ext(projection(2, 2, 0)), proj_e(0, 2))
    assert not rop_equal(top_ext(AND), top_ext(OR))
    seq = OpSeq((const_rop(2, 0),), const_rop(2, 1))
    assert q_inf(top_ext(AND), seq) == const_rop(2, 0)


@given(rops(), st.integers(0, 3))
def test_padding_keeps_the_operation(phi, extra):
    wider = phi.padded(phi.width + extra)
    assert wider == phi and hash(wider) == hash(phi)
    assert phi.reduced() == phi
    for s in all_threads(2, 4):
        assert wider(s) == phi(s)


@given(rops(max_width=1), st.lists(rops(max_width=2), max_size=3), threads2)
def test_q_n_substitutes_the_first_coordinates(phi, psis, s):
    vals = [psi(s) for psi in psis]
    expected = phi(EvThread(vals + [s[i] for i in range(len(vals), len(vals) + 9)], s.tail))
    assert q_n(phi, psis)(s) == expected


@given(rops(max_width=2), st.lists(rops(max_width=1), max_size=2), rops(max_width=1), threads2)
def test_q_inf_builds_the_thread_of_values(phi, prefix, tail, s):
    seq = OpSeq(tuple(prefix), tail)
    t = EvThread([op(s) for op in prefix], tail(s))
    assert q_inf(phi, seq)(s) == phi(t)


def test_q_n_rejects_mixed_domains():
    with pytest.raises(DomainMismatch):
        q_n(proj_e(0, 2), [proj_e(0, 3)])


@pytest.mark.parametrize("kind", ["C1", "C2", "C3", "C4"])
def test_axioms_exhaustive_width_one(kind):
    rep = axiom_suite(kind, SampleSpec(width=1, max_n=2))
    assert rep.passed and rep.checked > 0


def test_axiom_counterexample_for_unknown_kind():
    with pytest.raises(ValueError):
        axiom_suite("C9")


def test_fin_of():
    assert fin_of([proj_e(0, 2)], 2) == {projection(2, 1, 0), projection(2, 2, 0)}
    assert fin_of([], 2) == set()
    assert fin_of([tail_op(2)], 2) == set()
    F = generate_clone([AND], CloneCaps(2, 3))
    tops = [top_ext(f) for fs in F.values() for f in fs]
    for fs in F.values():
        assert set(fs) <= fin_of(tops, 2)


def test_projection_clone_is_projections():
    assert generate_omega_clone([], 3, size=2) == sorted(proj_e(i, 2) for i in range(3))


def _naive_omega_clone(gens, size):
    """Width-1 closure: q_0(phi) = phi and q_1(phi, psi) computed through threads."""
    def q1(phi, psi):
        head = []
        for x0, c in tuples(size, 2):
            s = EvThread((x0,), c)
            head.append(naive_eval(size, phi.width, phi.head, EvThread((psi(s),), c)))
        return ROp(size, 1, head).reduced()
    members = {proj_e(0, size).reduced()} | {g.reduced() for g in gens}
    while True:
        new = {q1(a, b) for a in members for b in members} - members
        if not new:
            return members
        members |= new


@settings(max_examples=30)
@given(st.lists(rops(max_width=1), max_size=2))
def test_generate_omega_clone_width_one_matches_naive(gens):
    assert set(generate_omega_clone(gens, 1, size=2)) == _naive_omega_clone(gens, 2)


def test_omega_clone_of_and_matches_finitary_clone():
    got = generate_omega_clone([top_ext(AND)], 2)
    tops = {top_ext(f) for fs in generate_clone([AND], CloneCaps(2, 3)).values() for f in fs}
    finitary = {phi for phi in got if phi.tail_independent}
    assert finitary == tops


def test_omega_clone_limit():
    with pytest.raises(CapExceeded):
        generate_omega_clone([ROp(2, 1, (0, 1, 1, 0))], 3, limit=4)


@given(rops(max_width=2), st.sets(threads2, max_size=5))
def test_finitary_approximation_agrees_on_d(phi, d):
    f = finitary_approximation(phi, d)
    for s in d:
        assert eval_rop(top_ext(f), s) == phi(s)


def test_finitary_approximation_examples():
    assert finitary_approximation(tail_op(2), []) == FinOp(2, 0, (0,))
    f = finitary_approximation(tail_op(2), [EvThread((), 0), EvThread((), 1)])
    assert f == FinOp(2, 1, (0, 1))
    assert separation_index([EvThread((0, 1), 0), EvThread((0,), 1)]) == 3


def test_all_rops_count_and_validation():
    assert len(list(all_rops(2, 1))) == 16
    with pytest.raises(DomainMismatch):
        ROp(2, 1, (0, 1, 2, 0))
    assert const_rop(2, 1).tail_independent and not tail_op(2).tail_independent
    assert apply(tail_op(2).head, 2, (1,)) == 1

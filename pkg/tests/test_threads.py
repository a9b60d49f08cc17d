from hypothesis import given, strategies as st

from clonework.threads import (EvThread, TraceDescriptor, all_threads, eq_omega, in_trace, restrict,
                               substitute)
from clonework.textio import format_thread, parse_thread

from oracles import thread_value

threads = st.builds(EvThread, st.lists(st.integers(0, 2), max_size=6), st.integers(0, 2))


def test_canonical_form_strips_tail_values():
    s = EvThread((0, 1, 1), 1)
    assert s.prefix == (0,)
    assert s == EvThread((0,), 1)
    assert EvThread((1, 1), 1) == EvThread.constant(1)


@given(threads, threads)
def test_equality_is_sequence_equality(s, r):
    same = all(s[i] == r[i] for i in range(8))
    assert (s == r) == same


@given(threads, st.integers(0, 10))
def test_head_reads_tail_past_prefix(s, n):
    assert s.head(n) == tuple(thread_value(s, i) for i in range(n))


@given(threads, st.lists(st.integers(0, 2), max_size=8))
def test_substitute_overwrites_prefix(s, a):
    r = substitute(s, a)
    for i in range(12):
        assert r[i] == (a[i] if i < len(a) else s[i])


def test_substitute_examples():
    assert substitute(EvThread((), 0), (1,)) == EvThread((1,), 0)
    s = EvThread((0,), 1)
    assert substitute(s, ()) == s
    assert substitute(s, (1, 0)) == EvThread((1, 0), 1)


@given(threads, threads)
def test_eq_omega_is_tail_equality(s, r):
    # eventually-constant threads differ finitely iff their tails agree
    assert eq_omega(s, r) == all(s[i] == r[i] for i in range(20, 24))


def test_restrict_and_traces():
    s = EvThread((0,), 1)
    assert restrict(s, set()) == {}
    assert restrict(s, {0, 5}) == {0: 0, 5: 1}
    assert restrict(EvThread((), 2), {3}) == {3: 2}
    assert in_trace(EvThread((), 0), TraceDescriptor({0}))
    assert not in_trace(EvThread((0, 0), 1), TraceDescriptor({0}))
    assert TraceDescriptor({0}).basic and not TraceDescriptor({0, 1}).basic


@given(threads, st.sets(st.integers(0, 2), min_size=1))
def test_full_trace_contains_everything(s, extra):
    assert in_trace(s, TraceDescriptor(set(range(3)) | extra))


def test_all_threads_counts():
    ts = all_threads(2, 6)
    assert len(ts) == len(set(ts)) == 2 + sum(2 ** n for n in range(1, 7))
    assert all(len(t.prefix) <= 6 for t in ts)
    assert len(all_threads(3, 2)) == 3 + 6 + 18


@given(threads)
def test_literal_roundtrip(s):
    assert parse_thread(format_thread(s)) == s

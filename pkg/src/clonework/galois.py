"""Polymorphism checks between representable operations and omega-relations,
closure membership against explicit test families, and the clone-level
verification harnesses."""

from dataclasses import dataclass, field, asdict
from itertools import product

import numpy as np

from .errors import CapExceeded, ColumnNotInRelation, DomainMismatch
from .finite_core import (CloneCaps, FinRel, _index_combos, _powers, check_cap, inv, pol,
                          relation_clone_generate, all_relations)
from .matrices import (EvMatrix, apply_rop, enumerate_matrices, enumerate_row_matrices,
                       from_columns, substitute_columns)
from .omega_ops import all_rops, generate_omega_clone, proj_e
from .omega_relations import (CertifiedIn, CertifiedOut, DecSeq, EvSet, Explicit,
                              lim_membership, local_closure)
from .threads import EvThread, all_threads


@dataclass(frozen=True)
class Bounds:
    depth: int = 8
    column_budget: int = 2
    prefix: int = 3
    max_rows: int = 3
    substitutions: int = 2

    def echo(self):
        return " ".join(f"{k}={v}" for k, v in asdict(self).items())


@dataclass(frozen=True)
class Holds:
    reason: str = "exact"


@dataclass(frozen=True)
class FailsWith:
    matrix: EvMatrix
    image: object


@dataclass(frozen=True)
class HoldsUpToBounds:
    bounds: Bounds
    checked: int = 0
    unresolved: int = 0


def is_projection(phi):
    w, _ = phi.canonical
    return w > 0 and phi == proj_e(w - 1, phi.size)


# ------------------------------------------------------- finitary relations

def _fin_failures(phi, S):
    """Boolean mask over S^(w+1) column choices whose image leaves S, with the choices."""
    w, _ = phi.canonical
    op = phi.reduced()
    n = S.arity
    check_cap("column choices", len(S) ** (w + 1))
    combos = _index_combos(len(S), w + 1)
    vals = S.array[combos]                                  # (M, w+1, n)
    ranks = np.einsum("mkn,k->mn", vals, _powers(S.size, w + 1))
    out = op.array[ranks]
    bad = ~S.mask[out @ _powers(S.size, n)]
    return bad, combos


def is_g_polymorphism_fin(phi, S):
    if phi.size != S.size:
        raise DomainMismatch("operation and relation over different domains")
    if len(S) == 0:
        return True
    bad, _ = _fin_failures(phi, S)
    return not bad.any()


def fin_choice(phi, S):
    """Columns (w prefix columns, then the repeated one) from S whose image
    leaves S, or None."""
    if len(S) == 0:
        return None
    bad, combos = _fin_failures(phi, S)
    hits = np.flatnonzero(bad)
    if not len(hits):
        return None
    return [S.tuples[i] for i in combos[hits[0]]]


def fin_witness(phi, S):
    """A matrix with columns in S whose image leaves S, or None."""
    cols = fin_choice(phi, S)
    return None if cols is None else from_columns(cols[:-1], cols[-1])


def pol_omega(relations, width_cap, size=None):
    relations = list(relations)
    if size is None:
        if not relations:
            raise DomainMismatch("domain size cannot be inferred from an empty family")
        size = relations[0].size
    out = set()
    for phi in all_rops(size, width_cap):
        if all(is_g_polymorphism_fin(phi, S) for S in relations):
            out.add(phi.reduced())
    return sorted(out)


def inv_finitary(C, arity_cap, size=None):
    C = list(C)
    if size is None:
        if not C:
            raise DomainMismatch("domain size cannot be inferred from an empty family")
        size = C[0].size
    return {n: tuple(S for S in all_relations(size, n) if all(is_g_polymorphism_fin(phi, S) for phi in C))
            for n in range(arity_cap + 1)}


# --------------------------------------------------------- omega-relations

def _member_pool(R, bounds):
    """(thread, certified) pairs for columns drawn from R."""
    if isinstance(R, EvSet):
        return [(s, True) for s in R.members(bounds.prefix)]
    pool = []
    for s in all_threads(R.size, bounds.prefix):
        v = lim_membership(s, R, bounds.depth)
        if not isinstance(v, CertifiedOut):
            pool.append((s, isinstance(v, CertifiedIn)))
    return pool


def _image_out(img, R, bounds):
    if isinstance(R, EvSet):
        return not R.contains(img)
    return isinstance(lim_membership(img, R, bounds.depth), CertifiedOut)


def _finite_members(R):
    if isinstance(R, Explicit):
        return R.threads
    if isinstance(R, DecSeq):
        return R.finite_members
    return None


def is_g_polymorphism_decseq(phi, R, bounds=Bounds()):
    if phi.size != R.size:
        raise DomainMismatch("operation and relation over different domains")
    if is_projection(phi):
        return Holds("projection")
    w, _ = phi.canonical
    finite = _finite_members(R)
    if finite is not None:
        members = sorted(finite)
        check_cap("column choices", len(members) ** (w + 1))
        for cols in product(members, repeat=w + 1):
            m = from_columns(cols[:-1], cols[-1])
            img = apply_rop(phi, m)
            if img not in finite:
                return FailsWith(m, img)
        return Holds("finite relation")
    if isinstance(R, DecSeq) and R.bound is not None:
        chosen = fin_choice(phi, R.cut(R.bound))
        if chosen is None:
            return Holds("stabilised relation")
        # each column becomes a thread: the finite column, then any tail
        cols = [EvThread(c, 0) for c in chosen]
        m = from_columns(cols[:-1], cols[-1])
        return FailsWith(m, apply_rop(phi, m))
    pool = _member_pool(R, bounds)
    certified = {s for s, ok in pool if ok}
    checked = unresolved = 0
    for m in enumerate_matrices([s for s, _ in pool], bounds.column_budget):
        checked += 1
        img = apply_rop(phi, m)
        if _image_out(img, R, bounds):
            if all(m.column(j) in certified for j in range(m.width() + 1)):
                return FailsWith(m, img)
            unresolved += 1
    return HoldsUpToBounds(bounds, checked, unresolved)


def is_bot_polymorphism(phi, R, bounds=Bounds()):
    return is_g_polymorphism_decseq(phi, local_closure(R), bounds)


# ------------------------------------------------------ closure machinery

@dataclass(frozen=True, order=True)
class TestSet:
    """threads together with every thread whose tail lies in `tails`."""
    __test__ = False
    threads: frozenset = frozenset()
    tails: frozenset = frozenset()

    def __or__(self, other):
        return TestSet(self.threads | other.threads, self.tails | other.tails)


def _sort_key(t):
    return (len(t.threads) + len(t.tails), sorted(t.threads), sorted(t.tails))


@dataclass(frozen=True)
class IdealSpec:
    tests: tuple

    def __init__(self, tests, limit=1 << 16):
        tests = set(tests)
        if not tests:
            raise ValueError("an ideal specification needs at least one test set")
        frontier = set(tests)
        while frontier:
            fresh = {a | b for a in frontier for b in tests} - tests
            tests |= fresh
            frontier = fresh
            if len(tests) > limit:
                raise CapExceeded("union closure of test sets", len(tests), limit)
        object.__setattr__(self, "tests", tuple(sorted(tests, key=_sort_key)))


def local_spec(size, max_prefix):
    """Every finite set of threads with prefix <= max_prefix."""
    return IdealSpec(TestSet(frozenset([s])) for s in all_threads(size, max_prefix))


def trace_spec(size):
    return IdealSpec(TestSet(tails=frozenset([c])) for c in range(size))


def global_spec(size):
    return IdealSpec([TestSet(tails=frozenset(range(size)))])


uniform_spec = local_spec


def agree_on(phi, psi, test):
    if any(phi(s) != psi(s) for s in test.threads):
        return False
    if test.tails:
        W = max(phi.width, psi.width)
        a, b = phi.padded_array(W), psi.padded_array(W)
        lasts = np.arange(len(a)) % phi.size
        sel = np.isin(lasts, sorted(test.tails))
        if not np.array_equal(a[sel], b[sel]):
            return False
    return True


def cl_membership(phi, C, X):
    C = list(C)
    return all(any(agree_on(phi, psi, d) for psi in C) for d in X.tests)


def r_mc(m, C):
    if m.infinite:
        raise ValueError("R_{m,C} is formed for matrices with finitely many rows")
    return frozenset(apply_rop(phi, m) for phi in C)


def duedue2_condition4_check(phi, C_generators, bounds=Bounds(), width=None):
    """phi[m] in R_{m,C} for every finite row-injective m within bounds, C the
    omega-clone generated by C_generators up to `width` (default prefix + 1,
    which already realises every column of such matrices)."""
    size = phi.size
    width = bounds.prefix + 1 if width is None else width
    C = generate_omega_clone(C_generators, max(width, phi.canonical[0]), size=size)
    if phi in set(C):
        return Holds("member of the generated clone")
    checked = 0
    for m in enumerate_row_matrices(all_threads(size, bounds.prefix), bounds.max_rows):
        checked += 1
        img = apply_rop(phi, m)
        if img not in r_mc(m, C):
            return FailsWith(m, img)
    return HoldsUpToBounds(bounds, checked)


def matrical_polymorphism(phi, R, m, bounds=Bounds()):
    """phi[m[r]] in the local closure of R for every substitution r from R."""
    w, _ = phi.canonical
    if isinstance(R, FinRel):
        if m.infinite or m.alpha != R.arity:
            raise ColumnNotInRelation(f"matrix needs {R.arity} rows")
        cols = [m.column(j) for j in range(m.width())] + [m.eventual_column()]
        if any(c not in R for c in cols):
            raise ColumnNotInRelation("a column of the matrix is not in the relation")
        pool, exact = list(R.tuples), True
        member = lambda img: img in R
    else:
        if not m.infinite:
            raise ColumnNotInRelation("matrix needs omega many rows")
        cols = [m.column(j) for j in range(m.width())] + [m.eventual_column()]
        if any(not R.contains(c) for c in cols):
            raise ColumnNotInRelation("a column of the matrix is not in the relation")
        closure = local_closure(R)
        pool = R.members(bounds.prefix)
        exact = isinstance(R, Explicit)
        member = lambda img: not isinstance(lim_membership(img, closure, bounds.depth), CertifiedOut)
    if is_projection(phi):
        return Holds("projection")
    top = w if exact else bounds.substitutions
    checked = 0
    for n in range(top + 1):
        for rs in product(pool, repeat=n):
            mm = substitute_columns(m, rs)
            img = apply_rop(phi, mm)
            checked += 1
            if not member(img):
                return FailsWith(mm, img)
    return Holds("every relevant substitution") if exact else HoldsUpToBounds(bounds, checked)


# ---------------------------------------------------- inclusion harness

@dataclass
class InclusionReport:
    caps: CloneCaps
    width: int
    left: dict
    right: dict
    generated: dict
    inclusion: bool
    equality: bool
    witness: object = None
    notes: list = field(default_factory=list)


def theorem_clone_inclusion_check(family, caps=CloneCaps(2, 3), width=2):
    """Relations preserved by the capped omega-polymorphisms of the family's
    cuts, against the finitary Inv Pol of the same cuts, arity by arity."""
    family = list(family)
    size = family[0].size
    cap = caps.relation_arity_cap
    cuts = [R.cut(k) for R in family for k in range(1, cap + 1)]
    left = inv_finitary(pol_omega(cuts, width, size), cap, size)
    # nullary constants would exclude the empty relation, which both other sides contain
    ops = sorted({f for k, fs in pol(cuts, caps, size).items() if k > 0 for f in fs})
    right = inv(ops, caps, size)
    generated = relation_clone_generate(cuts, caps, size)
    witness = None
    inclusion = equality = True
    for n in range(cap + 1):
        L, Rt, G = set(left[n]), set(right[n]), set(generated[n])
        if not L <= Rt:
            inclusion = False
            witness = witness or ("left-not-in-right", min(L - Rt))
        if not (L == Rt == G):
            equality = False
            witness = witness or ("mismatch", n, sorted(L ^ Rt) + sorted(Rt ^ G))
    return InclusionReport(caps, width, left, right, generated, inclusion, equality, witness)

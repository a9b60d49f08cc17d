"""Omega-relations as decreasing sequences of finitary cuts.

A DecSeq S presents Lim(S), the set of threads whose k-prefix lies in S_k for
every k. Alongside the producer each sequence may carry:

* bound: an index b with S_k = S_b x A^(k-b) for k >= b, so Lim(S) = S_b^T;
* tight_from: an index t with S_k equal to the k-cut of Lim(S) for k >= t;
* decide: an exact membership test for Lim(S);
* finite_members: the whole of Lim(S) when it is a known finite thread set;
* certify: a sound but incomplete test; certify(s) true means s is in Lim(S).
"""

from dataclasses import dataclass, field
from itertools import count

import numpy as np

from .errors import DecreasingViolation, DomainMismatch, NotFiniteSupport
from .finite_core import FinRel, diagonal as fin_diagonal, pad, reindex, tuple_array, _powers
from .threads import EvThread


# ------------------------------------------------------------------ EvSets

class EvSet:
    size: int

    def contains(self, s):
        raise NotImplementedError

    def cut(self, k):
        raise NotImplementedError

    def members(self, max_prefix):
        """Members whose canonical prefix has length <= max_prefix."""
        raise NotImplementedError

    def __contains__(self, s):
        return self.contains(s)


@dataclass(frozen=True)
class Explicit(EvSet):
    size: int
    threads: frozenset

    def __init__(self, size, threads):
        threads = frozenset(threads)
        for s in threads:
            s.check_domain(size)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "threads", threads)

    def contains(self, s):
        return s in self.threads

    def cut(self, k):
        return FinRel.from_tuples(self.size, k, {s.head(k) for s in self.threads})

    def members(self, max_prefix):
        return sorted(s for s in self.threads if len(s.prefix) <= max_prefix)


@dataclass(frozen=True)
class Pattern:
    """before . block^n . after, then the tail value forever, for every n >= 0."""
    before: tuple
    block: tuple
    after: tuple
    tail: int

    def member(self, n):
        return EvThread(self.before + self.block * n + self.after, self.tail)

    def members_up_to(self, n_max):
        seen = []
        for n in range(n_max + 1):
            s = self.member(n)
            if s not in seen:
                seen.append(s)
            if not self.block:
                break
        return seen


@dataclass(frozen=True)
class PatternFamily(EvSet):
    size: int
    patterns: tuple

    def __init__(self, size, patterns):
        patterns = tuple(patterns)
        for p in patterns:
            if any(not 0 <= v < size for v in p.before + p.block + p.after + (p.tail,)):
                raise DomainMismatch(f"pattern {p} has values outside domain {size}")
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "patterns", patterns)

    def contains(self, s):
        # a member equal to s cannot have a longer repeat count than |prefix(s)| + 1
        return any(s in p.members_up_to(len(s.prefix) + 1) for p in self.patterns)

    def cut(self, k):
        heads = {m.head(k) for p in self.patterns for m in p.members_up_to(k + 1)}
        return FinRel.from_tuples(self.size, k, heads)

    def members(self, max_prefix):
        out = set()
        for p in self.patterns:
            for m in p.members_up_to(max_prefix + 1):
                if len(m.prefix) <= max_prefix:
                    out.add(m)
        return sorted(out, key=lambda s: (len(s.prefix), s))


# ----------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class CertifiedIn:
    def __str__(self):
        return "in"


@dataclass(frozen=True)
class CertifiedOut:
    index: int

    def __str__(self):
        return f"out@{self.index}"


@dataclass(frozen=True)
class InUpToDepth:
    depth: int

    def __str__(self):
        return f"in-up-to-depth@{self.depth}"


# ------------------------------------------------------------------- DecSeq

@dataclass(eq=False)
class DecSeq:
    size: int
    producer: object
    bound: int = None
    tight_from: int = None
    decide: object = None
    finite_members: frozenset = None
    certify: object = None
    label: str = "decseq"
    _cache: dict = field(default_factory=dict, repr=False)

    def _raw(self, k):
        if self.bound is not None and k > self.bound:
            return pad(self._raw(self.bound), k)
        if k not in self._cache:
            S = self.producer(k)
            if S.arity != k or S.size != self.size:
                raise DomainMismatch(f"producer returned arity {S.arity} for cut {k}")
            self._cache[k] = S
        return self._cache[k]

    def cut(self, k):
        """The arity-k member, checked against every earlier cut."""
        if k < 0:
            raise ValueError("cut index must be >= 0")
        top = k if self.bound is None else min(k, self.bound + 1)
        for i in range(1, top + 1):
            if ("ok", i) in self._cache:
                continue
            if not reindex(self._raw(i), range(i - 1)).issubset(self._raw(i - 1)):
                raise DecreasingViolation(i)
            self._cache[("ok", i)] = True
        return self._raw(k)

    def lim_cut(self, k, horizon=None):
        """The k-cut of Lim. Exact when a bound or a tight index is known;
        otherwise the projection of cut(k + horizon), an over-approximation."""
        if self.bound is None and self.tight_from is None and self.finite_members is not None:
            return FinRel.from_tuples(self.size, k, {s.head(k) for s in self.finite_members})
        start = self.bound if self.bound is not None else self.tight_from
        if start is None:
            if horizon is None:
                raise ValueError(f"{self.label}: limit cut not exactly computable, pass a horizon")
            start = k + horizon
        return reindex(self.cut(max(k, start)), range(k))


def lim_membership(s, R, depth):
    s.check_domain(R.size)
    if R.bound is not None:
        for i in range(R.bound + 1):
            if s.head(i) not in R.cut(i):
                return CertifiedOut(i)
        return CertifiedIn()
    if R.certify is not None and R.certify(s):
        return CertifiedIn()
    if R.decide is not None:
        if R.decide(s):
            return CertifiedIn()
        for i in count():
            if s.head(i) not in R.cut(i):
                return CertifiedOut(i)
    for i in range(depth + 1):
        if s.head(i) not in R.cut(i):
            return CertifiedOut(i)
    return InUpToDepth(depth)


# ------------------------------------------------------------- constructors

def from_finitary(S):
    return DecSeq(S.size, lambda i: pad(S, i), bound=S.arity, tight_from=S.arity,
                  decide=lambda s: s.head(S.arity) in S, label="topext")


def local_closure(R):
    finite = frozenset(R.threads) if isinstance(R, Explicit) else None
    return DecSeq(R.size, R.cut, tight_from=0,
                  decide=(lambda s: s in finite) if finite is not None else None,
                  finite_members=finite, certify=R.contains, label="closure")


def diagonal(size):
    members = frozenset(EvThread((), a) for a in range(size))
    return DecSeq(size, lambda i: fin_diagonal(size, i) if i else FinRel.full(size, 0),
                  tight_from=0, decide=lambda s: not s.prefix, finite_members=members,
                  label="diagonal")


def _both(a, b, how):
    return None if a is None or b is None else how(a, b)


def dec_intersect(R, T):
    _same_size(R, T)
    if R.bound is not None and T.bound is not None:
        tight = max(R.bound, T.bound)
    elif R.bound is not None and T.tight_from is not None:
        tight = max(R.bound, T.tight_from)
    elif T.bound is not None and R.tight_from is not None:
        tight = max(T.bound, R.tight_from)
    else:
        tight = None
    return DecSeq(R.size, lambda i: R.cut(i) & T.cut(i),
                  bound=_both(R.bound, T.bound, max), tight_from=tight,
                  decide=_both(R.decide, T.decide, lambda f, g: lambda s: f(s) and g(s)),
                  finite_members=_finite(R, T, lambda a, b: a & b), label="intersect")


def dec_join(R, T):
    _same_size(R, T)
    return DecSeq(R.size, lambda i: R.cut(i) | T.cut(i),
                  bound=_both(R.bound, T.bound, max),
                  tight_from=_both(R.tight_from, T.tight_from, max),
                  decide=_both(R.decide, T.decide, lambda f, g: lambda s: f(s) or g(s)),
                  finite_members=_both(R.finite_members, T.finite_members, lambda a, b: a | b),
                  label="join")


def _finite(R, T, how):
    if R.finite_members is not None and T.finite_members is not None:
        return how(R.finite_members, T.finite_members)
    if R.finite_members is not None and T.decide is not None:
        return frozenset(s for s in R.finite_members if T.decide(s))
    if T.finite_members is not None and R.decide is not None:
        return frozenset(s for s in T.finite_members if R.decide(s))
    return None


def _same_size(R, T):
    if R.size != T.size:
        raise DomainMismatch(f"domains differ: {R.size} vs {T.size}")


def exists_cut(S, constrained):
    """Tuples t of arity(S) agreeing with some s in S on the constrained positions."""
    n = S.arity
    keep = sorted(i for i in constrained if i < n)
    grid = tuple_array(S.size, n)
    pw = _powers(S.size, len(keep))
    allowed = np.unique(S.array[:, keep] @ pw) if len(S) else np.zeros(0, dtype=np.int64)
    mask = np.isin(grid[:, keep] @ pw, allowed)
    bits = sum(1 << int(r) for r in np.flatnonzero(mask))
    return FinRel(S.size, n, bits)


def dec_exists(R, constrained):
    """Exists over the cofinite set Gamma whose complement is `constrained`."""
    constrained = frozenset(constrained)
    return DecSeq(R.size, lambda n: exists_cut(R.cut(n), constrained),
                  bound=R.bound, tight_from=R.tight_from, label="exists")


@dataclass(frozen=True)
class Permutation:
    """A permutation of omega that moves finitely many points; images[i] = sigma(i)."""
    images: tuple

    def __init__(self, images):
        images = tuple(int(v) for v in images)
        if sorted(images) != list(range(len(images))):
            raise NotFiniteSupport(f"{images} is not a permutation of range({len(images)})")
        while images and images[-1] == len(images) - 1:
            images = images[:-1]
        object.__setattr__(self, "images", images)

    @classmethod
    def from_mapping(cls, mapping):
        mapping = {int(k): int(v) for k, v in mapping.items() if int(k) != int(v)}
        if sorted(mapping) != sorted(mapping.values()):
            raise NotFiniteSupport(f"{mapping} is not a bijection with finite support")
        n = max(mapping, default=-1) + 1
        return cls(mapping.get(i, i) for i in range(n))

    def __call__(self, i):
        return self.images[i] if i < len(self.images) else i

    def inverse(self):
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Permutation(inv)

    def act(self, s):
        """sigma(s) = (s_sigma(0), s_sigma(1), ...)."""
        n = max(len(s.prefix), len(self.images))
        return EvThread([s[self(j)] for j in range(n)], s.tail)


def dec_permute(R, sigma):
    """R(sigma) = { r : sigma(r) in R }."""
    if not isinstance(sigma, Permutation):
        sigma = Permutation.from_mapping(sigma) if isinstance(sigma, dict) else Permutation(sigma)
    tau = sigma.inverse()

    def producer(k):
        f = 1 + max((tau(i) for i in range(k)), default=-1)
        return reindex(R.cut(f), [tau(i) for i in range(k)])

    bound = None
    if R.bound is not None:
        bound = 1 + max((sigma(j) for j in range(R.bound)), default=-1)
    decide = None
    if R.decide is not None:
        decide = lambda s: R.decide(sigma.act(s))
    finite = None
    if R.finite_members is not None:
        finite = frozenset(tau.act(s) for s in R.finite_members)
    return DecSeq(R.size, producer, bound=bound, tight_from=R.tight_from, decide=decide,
                  finite_members=finite, label="permute")

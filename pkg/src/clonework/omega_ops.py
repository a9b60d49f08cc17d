"""Representable operations on eventually-constant threads.

An ROp of width w reads the first w coordinates of a thread and its tail
value: phi(s) = head(s_0, ..., s_{w-1}, tail(s)). The head table is indexed
by the lexicographic rank of (x_0, ..., x_{w-1}, c) with the tail last.
"""

import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .errors import ArityMismatch, CapExceeded, DomainMismatch
from .finite_core import FinOp, all_tuples, check_cap, tuple_array, tuple_rank, _powers
from .threads import EvThread


class ROp:
    __slots__ = ("size", "width", "head", "__dict__")

    def __init__(self, size, width, head):
        head = tuple(int(v) for v in head)
        if width < 0:
            raise ArityMismatch("negative width")
        if len(head) != size ** (width + 1):
            raise DomainMismatch(f"width-{width} head needs {size ** (width + 1)} entries, got {len(head)}")
        if any(not 0 <= v < size for v in head):
            raise DomainMismatch(f"head value out of range for domain {size}")
        self.size = size
        self.width = width
        self.head = head

    @classmethod
    def from_function(cls, size, width, fn):
        """fn receives (x_0, ..., x_{w-1}, c)."""
        return cls(size, width, [fn(*a) for a in all_tuples(size, width + 1)])

    @cached_property
    def canonical(self):
        """(width, head) after dropping trailing prefix coordinates the head ignores."""
        w, head, k = self.width, self.head, self.size
        while w:
            # index = (x_{<w-1}, x_{w-1}, c); drop x_{w-1} when every slice agrees
            block = k * k
            rows = [head[i:i + block] for i in range(0, len(head), block)]
            if all(r[v * k:(v + 1) * k] == r[:k] for r in rows for v in range(k)):
                head = tuple(v for r in rows for v in r[:k])
                w -= 1
            else:
                break
        return w, head

    def __eq__(self, other):
        return isinstance(other, ROp) and self.size == other.size and self.canonical == other.canonical

    def __hash__(self):
        return hash((self.size, self.canonical))

    def __lt__(self, other):
        return (self.size, self.canonical) < (other.size, other.canonical)

    def reduced(self):
        w, head = self.canonical
        return ROp(self.size, w, head)

    def padded(self, width):
        """Same operation presented at a larger width."""
        if width < self.width:
            w, _ = self.canonical
            if width < w:
                raise ArityMismatch(f"operation depends on coordinate {w - 1}, cannot shrink to width {width}")
            return self.reduced().padded(width)
        return ROp(self.size, width, self.padded_array(width))

    def padded_array(self, width):
        grid = tuple_array(self.size, width + 1)
        cols = list(range(self.width)) + [width]
        return self.array[grid[:, cols] @ _powers(self.size, self.width + 1)]

    @cached_property
    def array(self):
        return np.array(self.head, dtype=np.int64)

    def at(self, xs, c):
        return self.head[tuple_rank(tuple(xs[:self.width]) + (c,), self.size)]

    def __call__(self, s):
        return eval_rop(self, s)

    @property
    def tail_independent(self):
        k = self.size
        return all(len(set(self.head[i:i + k])) == 1 for i in range(0, len(self.head), k))

    def __repr__(self):
        return f"ROp({self.size}, w={self.width}, {''.join(map(str, self.head))})"


@dataclass(frozen=True)
class OpSeq:
    """(psi_0, ..., psi_{m-1}, psi, psi, ...)"""
    prefix: tuple
    tail_op: ROp

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        for op in self.prefix:
            if op.size != self.tail_op.size:
                raise DomainMismatch("operation sequence mixes domains")

    def __getitem__(self, i):
        return self.prefix[i] if i < len(self.prefix) else self.tail_op

    @property
    def size(self):
        return self.tail_op.size

    @property
    def width(self):
        return max([op.width for op in self.prefix] + [self.tail_op.width])


def eval_rop(phi, s):
    if not isinstance(s, EvThread):
        raise TypeError("ROps evaluate on EvThreads")
    return phi.at(s.head(phi.width), s.tail)


def top_ext(f):
    k = f.size
    return ROp(k, f.arity, [v for v in f.table for _ in range(k)])


def proj_e(n, size):
    return ROp.from_function(size, n + 1, lambda *a: a[n])


def tail_op(size):
    return ROp(size, 0, range(size))


def const_rop(size, c):
    return ROp(size, 0, [c] * size)


def rop_equal(phi, psi):
    if phi.size != psi.size:
        raise DomainMismatch("operations over different domains")
    return phi == psi


def _same_domain(ops):
    sizes = {op.size for op in ops}
    if len(sizes) > 1:
        raise DomainMismatch(f"mixed domains {sorted(sizes)}")
    return sizes.pop()


def q_n(phi, psis):
    """q_n(phi, psi_0..psi_{n-1})(s) = phi(s[psi_0(s), ..., psi_{n-1}(s)])."""
    psis = tuple(psis)
    n = len(psis)
    size = _same_domain((phi,) + psis)
    W = max([phi.width, n] + [p.width for p in psis])
    head = []
    for a in all_tuples(size, W + 1):
        x, c = a[:W], a[W]
        t = tuple(p.at(x, c) for p in psis)
        head.append(phi.at(t + x[n:], c))
    return ROp(size, W, head)


def q_inf(phi, seq):
    """q(phi, psi_0, psi_1, ...) for an eventually-constant operation sequence."""
    size = _same_domain((phi, seq.tail_op) + seq.prefix)
    W = seq.width
    m = len(seq.prefix)
    head = []
    for a in all_tuples(size, W + 1):
        x, c = a[:W], a[W]
        pre = [p.at(x, c) for p in seq.prefix]
        t = seq.tail_op.at(x, c)
        args = [pre[i] if i < m else t for i in range(phi.width)]
        head.append(phi.at(args, t))
    return ROp(size, W, head)


def all_rops(size, width):
    n = size ** (width + 1)
    check_cap(f"heads of width {width} on {size} elements", size ** n)
    for head in product(range(size), repeat=n):
        yield ROp(size, width, head)


# ------------------------------------------------------------ clone layer

def fin_of(C, arity_cap):
    """Finitary operations up to arity_cap whose top extension lies in C."""
    out = set()
    for phi in C:
        if not phi.tail_independent:
            continue
        w, head = phi.canonical
        base = head[::phi.size]
        for k in range(w, arity_cap + 1):
            table = tuple(base[r // phi.size ** (k - w)] for r in range(phi.size ** k))
            out.add(FinOp(phi.size, k, table))
    return out


def generate_omega_clone(generators, width_cap, size=None, limit=1 << 16):
    """Least width-capped set holding e_0..e_{cap-1} and the generators, closed
    under q_n for n <= cap. Tables are handled padded to width cap; more than
    `limit` members raises CapExceeded."""
    generators = list(generators)
    if size is None:
        if not generators:
            raise DomainMismatch("domain size cannot be inferred from an empty family")
        size = generators[0].size
    _same_domain(generators + [tail_op(size)])
    W = width_cap
    projections = [proj_e(i, size) for i in range(W)]
    if all(g in projections for g in generators):
        # q_n of projections is again a projection
        return sorted(projections)
    P = size ** (W + 1)
    full = size ** P
    grid = tuple_array(size, W + 1)
    code_pow = _powers(size, P)
    seen = set()
    order = []

    def add(tabs):
        added = 0
        for row in np.unique(tabs.reshape(-1, P), axis=0):
            code = int(row @ code_pow) if P < 62 else tuple(row.tolist())
            if code not in seen:
                seen.add(code)
                order.append(row)
                added += 1
                if len(order) > limit:
                    raise CapExceeded(f"omega-clone of width {W}", len(order), limit)
        return added

    start = [proj_e(i, size).padded_array(W) for i in range(W)]
    start += [g.padded_array(W) for g in generators]
    added = add(np.array(start, dtype=np.int64).reshape(-1, P)) if start else 0
    gpow = _powers(size, W + 1)
    while added and len(order) < full:
        tabs = np.array(order, dtype=np.int64)
        fresh_from = len(order) - added
        added = 0
        for n in range(1, W + 1):
            fixed = grid[:, n:] @ gpow[n:]
            # argument slots: phi, psi_0..psi_{n-1}; one slot drawn from the frontier
            for j in range(n + 1):
                slots = [tabs[:fresh_from]] * j + [tabs[fresh_from:]] + [tabs] * (n - j)
                if any(s.shape[0] == 0 for s in slots):
                    continue
                phis, psis = slots[0], slots[1:]
                idx = fixed
                for i, ps in enumerate(psis):
                    idx = idx[..., None, :] if i else idx[None, :]
                    idx = idx + ps.reshape((1,) * i + (ps.shape[0], P)) * gpow[i]
                idx = idx.reshape(-1, P)
                step = max(1, (1 << 20) // idx.size)
                for lo in range(0, phis.shape[0], step):
                    added += add(phis[lo:lo + step][:, idx])
                    if len(order) == full:
                        return sorted(ROp(size, W, row).reduced() for row in order)
    return sorted(ROp(size, W, row).reduced() for row in order)


# ------------------------------------------------------------ axiom suites

@dataclass
class SampleSpec:
    width: int = 1
    exhaustive: bool = True
    samples: int = 1000
    seed: int = 0
    max_n: int = 2
    max_prefix: int = 2
    size: int = 2


@dataclass
class AxiomReport:
    kind: str
    spec: SampleSpec
    checked: int = 0
    counterexample: object = None
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.counterexample is None


def _e(i, size):
    return proj_e(i, size)


def _check_c(kind, x, ys, zs, extra, size):
    n = len(ys)
    if kind == "C1":
        i = extra
        return q_n(_e(i, size), ys) == ys[i]
    if kind == "C2":
        i = extra
        return q_n(_e(i, size), ys) == _e(i, size)
    if kind == "C3":
        return q_n(x, [_e(i, size) for i in range(n)]) == x
    if kind == "C4":
        k = extra
        return q_n(x, ys) == q_n(x, list(ys) + [_e(i, size) for i in range(n, k)])
    if kind == "C5":
        return q_n(q_n(x, ys), zs) == q_n(x, [q_n(y, zs) for y in ys])
    raise ValueError(kind)


def _c_instances(kind, ops, n_max, rng=None, count=None):
    """Operand tuples for a C-identity: (x, ys, zs, extra)."""
    size = ops[0].size

    def tuples():
        for n in range(0, n_max + 1):
            if kind == "C1" and n == 0:
                continue
            for ys in product(ops, repeat=n) if kind != "C3" else [()]:
                ys = ys if kind != "C3" else tuple(_e(i, size) for i in range(n))
                if kind in ("C1", "C2"):
                    idxs = range(n) if kind == "C1" else range(n, n + 2)
                    for i in idxs:
                        yield None, ys, (), i
                elif kind == "C3":
                    for x in ops:
                        yield x, ys, (), None
                elif kind == "C4":
                    for x in ops:
                        for k in range(n, n_max + 2):
                            yield x, ys, (), k
                else:
                    for x in ops:
                        for zs in product(ops, repeat=n):
                            yield x, ys, zs, None

    if rng is None:
        yield from tuples()
        return
    for _ in range(count):
        n = rng.randint(1 if kind == "C1" else 0, n_max)
        ys = tuple(rng.choice(ops) for _ in range(n))
        x = rng.choice(ops)
        zs = tuple(rng.choice(ops) for _ in range(n))
        if kind == "C1":
            extra = rng.randrange(n)
        elif kind == "C2":
            extra = n + rng.randrange(2)
        elif kind == "C4":
            extra = rng.randint(n, n_max + 1)
        else:
            extra = None
        yield x, ys, zs, extra


def _random_seq(rng, ops, max_prefix):
    return OpSeq(tuple(rng.choice(ops) for _ in range(rng.randint(0, max_prefix))), rng.choice(ops))


def _seq_map(seq, zs):
    return OpSeq(tuple(q_inf(y, zs) for y in seq.prefix), q_inf(seq.tail_op, zs))


def axiom_suite(kind, spec=None):
    """Check one identity of the clone-algebra (C1..C5) or infinitary (N1..N3)
    presentation on enumerated or sampled operands."""
    spec = spec or SampleSpec()
    report = AxiomReport(kind, spec)
    ops = list(all_rops(spec.size, spec.width))
    size = spec.size
    if kind in ("C1", "C2", "C3", "C4", "C5"):
        rng = None if spec.exhaustive else random.Random(spec.seed)
        for x, ys, zs, extra in _c_instances(kind, ops, spec.max_n, rng, spec.samples):
            report.checked += 1
            if not _check_c(kind, x, ys, zs, extra, size):
                report.counterexample = (x, ys, zs, extra)
                break
        return report
    if kind == "N2":
        report.notes.append("checked through its finite surrogate C3")
        sub = axiom_suite("C3", spec)
        report.checked, report.counterexample = sub.checked, sub.counterexample
        return report
    if kind not in ("N1", "N3"):
        raise ValueError(f"unknown axiom {kind!r}")
    rng = random.Random(spec.seed)
    for _ in range(spec.samples):
        ys = _random_seq(rng, ops, spec.max_prefix)
        report.checked += 1
        if kind == "N1":
            n = rng.randint(0, spec.max_prefix + 1)
            ok = q_inf(_e(n, size), ys) == ys[n]
            inst = (n, ys)
        else:
            x = rng.choice(ops)
            zs = _random_seq(rng, ops, spec.max_prefix)
            ok = q_inf(q_inf(x, ys), zs) == q_inf(x, _seq_map(ys, zs))
            inst = (x, ys, zs)
        if not ok:
            report.counterexample = inst
            break
    return report


# ------------------------------------------------- finitary approximation

def separation_index(threads):
    """Least n such that distinct threads already differ within n coordinates."""
    threads = sorted(set(threads))
    n = 0
    while len({s.head(n) for s in threads}) < len(threads):
        n += 1
    return n


def finitary_approximation(phi, d, fallback=0):
    d = sorted(set(d))
    n = separation_index(d)
    table = [fallback] * phi.size ** n
    for s in d:
        table[tuple_rank(s.head(n), phi.size)] = eval_rop(phi, s)
    return FinOp(phi.size, n, tuple(table))

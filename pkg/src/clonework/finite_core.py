"""Finitary clone theory over a finite domain {0, ..., size-1}.

Operation tables are stored in lexicographic input order with the leftmost
argument most significant. Relations are bitsets over the same tuple rank,
held in a Python int.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, product

import numpy as np

from .errors import ArityMismatch, CapExceeded, DomainMismatch, IndexOutOfRange

ENUMERATION_LIMIT = 1 << 20


def tuple_rank(values, size):
    r = 0
    for v in values:
        r = r * size + v
    return r


def tuple_unrank(rank, size, n):
    out = [0] * n
    for i in range(n - 1, -1, -1):
        rank, out[i] = divmod(rank, size)
    return tuple(out)


@lru_cache(maxsize=None)
def all_tuples(size, n):
    return tuple(product(range(size), repeat=n))


@lru_cache(maxsize=None)
def tuple_array(size, n):
    arr = np.array(all_tuples(size, n), dtype=np.int64).reshape(size ** n, n)
    arr.setflags(write=False)
    return arr


def _powers(size, n):
    return size ** np.arange(n - 1, -1, -1, dtype=np.int64)


def _index_combos(m, r):
    """All r-tuples over range(m) in lexicographic order, as an (m**r, r) array."""
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((m,) * r, dtype=np.int64).reshape(r, -1).T


def check_cap(what, estimate, limit=ENUMERATION_LIMIT):
    if estimate > limit:
        raise CapExceeded(what, estimate, limit)


@dataclass(frozen=True)
class CloneCaps:
    arity_cap: int = 2
    relation_arity_cap: int = 3

    def __post_init__(self):
        if self.arity_cap < 1 or self.relation_arity_cap < 1:
            raise ValueError("caps must be >= 1")


@dataclass(frozen=True, order=True)
class FinOp:
    size: int
    arity: int
    table: tuple

    def __post_init__(self):
        if self.size < 1:
            raise DomainMismatch("domain size must be >= 1")
        if self.arity < 0:
            raise ArityMismatch("negative arity")
        if len(self.table) != self.size ** self.arity:
            raise DomainMismatch(
                f"table of a {self.arity}-ary operation needs {self.size ** self.arity} entries, "
                f"got {len(self.table)}")
        if any(not 0 <= v < self.size for v in self.table):
            raise DomainMismatch(f"table value out of range for domain {self.size}")

    @classmethod
    def from_function(cls, size, arity, fn):
        return cls(size, arity, tuple(fn(*a) for a in all_tuples(size, arity)))

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ArityMismatch(f"expected {self.arity} arguments, got {len(args)}")
        return self.table[tuple_rank(args, self.size)]

    @cached_property
    def array(self):
        return np.array(self.table, dtype=np.int64)

    def __repr__(self):
        return f"FinOp({self.size}, {self.arity}, {''.join(map(str, self.table)) if self.size <= 10 else self.table})"


@dataclass(frozen=True, order=True)
class FinRel:
    size: int
    arity: int
    bits: int

    def __post_init__(self):
        if self.size < 1:
            raise DomainMismatch("domain size must be >= 1")
        if self.arity < 0:
            raise ArityMismatch("negative arity")
        if self.bits < 0 or self.bits >> (self.size ** self.arity):
            raise DomainMismatch("relation bitset has bits outside A^n")

    @classmethod
    def from_tuples(cls, size, arity, tuples):
        bits = 0
        for t in tuples:
            t = tuple(t)
            if len(t) != arity:
                raise ArityMismatch(f"tuple {t} does not have arity {arity}")
            if any(not 0 <= v < size for v in t):
                raise DomainMismatch(f"tuple {t} has values outside domain {size}")
            bits |= 1 << tuple_rank(t, size)
        return cls(size, arity, bits)

    @classmethod
    def full(cls, size, arity):
        return cls(size, arity, (1 << size ** arity) - 1)

    @classmethod
    def empty(cls, size, arity):
        return cls(size, arity, 0)

    @cached_property
    def tuples(self):
        return tuple(tuple_unrank(r, self.size, self.arity) for r in self._ranks)

    @cached_property
    def _ranks(self):
        bits, out, r = self.bits, [], 0
        while bits:
            if bits & 1:
                out.append(r)
            bits >>= 1
            r += 1
        return tuple(out)

    @cached_property
    def array(self):
        return tuple_array(self.size, self.arity)[list(self._ranks)] if self._ranks else \
            np.zeros((0, self.arity), dtype=np.int64)

    @cached_property
    def mask(self):
        m = np.zeros(self.size ** self.arity, dtype=bool)
        m[list(self._ranks)] = True
        return m

    def __contains__(self, t):
        t = tuple(t)
        return len(t) == self.arity and all(0 <= v < self.size for v in t) and \
            bool(self.bits >> tuple_rank(t, self.size) & 1)

    def __len__(self):
        return len(self._ranks)

    def __iter__(self):
        return iter(self.tuples)

    def __and__(self, other):
        return intersect([self, other])

    def __or__(self, other):
        return union([self, other])

    def issubset(self, other):
        _same(self, other)
        return self.bits & ~other.bits == 0

    def __repr__(self):
        if self.arity == 0:
            body = "()" if self.bits else ""
        else:
            body = " ".join("".join(map(str, t)) for t in self.tuples) if self.size <= 10 else self.tuples
        return f"FinRel({self.size}, {self.arity}, {{{body}}})"


def _same(a, b):
    if a.size != b.size:
        raise DomainMismatch(f"domains differ: {a.size} vs {b.size}")
    if a.arity != b.arity:
        raise ArityMismatch(f"arities differ: {a.arity} vs {b.arity}")


# ---------------------------------------------------------------- operations

def projection(size, n, i):
    if not 0 <= i < n:
        raise IndexOutOfRange(f"projection index {i} not below arity {n}")
    return FinOp(size, n, tuple(a[i] for a in all_tuples(size, n)))


def constant_op(size, value, arity=0):
    return FinOp(size, arity, (value,) * size ** arity)


def compose(f, gs):
    gs = tuple(gs)
    if len(gs) != f.arity:
        raise ArityMismatch(f"{f.arity}-ary operation composed with {len(gs)} operations")
    if not gs:
        raise ArityMismatch("composition of a nullary operation needs an explicit target arity")
    k = gs[0].arity
    for g in gs:
        if g.arity != k:
            raise ArityMismatch("inner operations disagree in arity")
        if g.size != f.size:
            raise DomainMismatch("operations over different domains")
    size = f.size
    table = tuple(f.table[tuple_rank([g.table[r] for g in gs], size)] for r in range(size ** k))
    return FinOp(size, k, table)


def all_operations(size, arity):
    check_cap(f"operations of arity {arity} on {size} elements", size ** size ** arity)
    for table in product(range(size), repeat=size ** arity):
        yield FinOp(size, arity, table)


def _domain_of(items, size):
    for x in items:
        if size is None:
            size = x.size
        elif x.size != size:
            raise DomainMismatch(f"mixed domains {size} and {x.size}")
    if size is None:
        raise DomainMismatch("domain size cannot be inferred from an empty family")
    return size


def _subalgebra(size, generators, start, universe_size):
    """Close the rows of `start` (value vectors over `universe_size` points)
    under pointwise application of `generators`. Semi-naive: every round only
    evaluates argument tuples touching the previous frontier; each product
    chunk is deduplicated as soon as it is produced."""
    powers = _powers(size, universe_size)
    full = size ** universe_size
    bitmap = np.zeros(full, dtype=bool) if full <= 1 << 26 else None
    seen = set()
    order = []

    def add(rows):
        if rows.shape[0] == 0:
            return 0
        codes, idx = np.unique(rows @ powers, return_index=True)
        if bitmap is not None:
            fresh = ~bitmap[codes]
            bitmap[codes[fresh]] = True
            picked = idx[fresh]
        else:
            picked = [i for c, i in zip(codes.tolist(), idx.tolist()) if c not in seen]
            seen.update(codes.tolist())
        order.extend(rows[i] for i in picked)
        return len(picked)

    added = add(start)
    for g in generators:
        if g.arity == 0:
            added += add(np.full((1, universe_size), g.table[0], dtype=np.int64))
    ops = [g for g in generators if g.arity > 0]
    while added and len(order) < full:
        everything = np.array(order, dtype=np.int64).reshape(-1, universe_size)
        frontier = everything[len(order) - added:]
        old = everything[:len(order) - added]
        added = 0
        for g in ops:
            n = g.arity
            for j in range(n):
                # positions < j from old rows, j from frontier, > j from all rows
                parts = [old] * j + [frontier] + [everything] * (n - j - 1)
                if any(p.shape[0] == 0 for p in parts):
                    continue
                for chunk in _apply_product(g.array, _powers(size, n), parts, universe_size):
                    added += add(chunk)
                    if len(order) == full:
                        return order
    return order


def _apply_product(table, gpow, parts, width, budget=1 << 21):
    """Yield the images of an n-ary table over every combination of rows drawn
    from parts, in chunks."""
    n = len(parts)
    counts = [p.shape[0] for p in parts]
    rest = int(np.prod(counts[1:], dtype=np.int64)) if n > 1 else 1
    step = max(1, budget // max(1, rest * width))
    for lo in range(0, counts[0], step):
        first = parts[0][lo:lo + step]
        idx = first.reshape((first.shape[0],) + (1,) * (n - 1) + (width,)) * gpow[0]
        for j in range(1, n):
            shape = [1] * n + [width]
            shape[j] = counts[j]
            idx = idx + parts[j].reshape(shape) * gpow[j]
        yield table[idx].reshape(-1, width)


def generate_clone(generators, caps, size=None):
    """Arity slices 0..caps.arity_cap of the clone generated by `generators`.

    Generators of arity above the cap still act on the lower slices, so each
    slice is exactly the corresponding slice of the generated clone.

    The k-ary slice is the subuniverse of A^(A^k) generated by the k
    projections under the generators acting pointwise.
    """
    generators = list(generators)
    size = _domain_of(generators, size)
    gens = sorted(set(generators))
    out = {}
    for k in range(caps.arity_cap + 1):
        points = size ** k
        check_cap(f"clone slice of arity {k}", size ** points)
        pts = tuple_array(size, k)
        start = pts.T.copy() if k else np.zeros((0, 1), dtype=np.int64)
        rows = _subalgebra(size, gens, start, points)
        out[k] = tuple(sorted(FinOp(size, k, tuple(int(v) for v in r)) for r in rows))
    return out


def resaturate(slices, generators, size=None):
    """Run the saturation again starting from `slices`; a closed family comes
    back unchanged."""
    generators = list(generators)
    size = _domain_of(generators + [op for ops in slices.values() for op in ops], size)
    gens = sorted(set(generators))
    out = {}
    for k, ops in slices.items():
        points = size ** k
        start = np.array([op.table for op in ops], dtype=np.int64).reshape(-1, points)
        rows = _subalgebra(size, gens, start, points)
        out[k] = tuple(sorted(FinOp(size, k, tuple(int(v) for v in r)) for r in rows))
    return out


def is_clone_closed(slices, size):
    """True iff composing members (all arities within the slices) never leaves the slices."""
    members = {op for ops in slices.values() for op in ops}
    for f in members:
        if f.arity == 0:
            continue
        for k, ops in slices.items():
            for gs in product(ops, repeat=f.arity):
                if compose(f, gs) not in members:
                    return False
    return True


# ----------------------------------------------------------- Pol / Inv

def is_polymorphism(f, S):
    if f.size != S.size:
        raise DomainMismatch("operation and relation over different domains")
    k, n, size = f.arity, S.arity, f.size
    if k == 0:
        return (f.table[0],) * n in S
    if len(S) == 0:
        return True
    check_cap("polymorphism column choices", len(S) ** k)
    combos = _index_combos(len(S), k)
    vals = S.array[combos]                       # (M, k, n)
    ranks = np.einsum("mkn,k->mn", vals, _powers(size, k))
    out = f.array[ranks]                         # (M, n)
    return bool(S.mask[out @ _powers(size, n)].all())


def pol(relations, caps, size=None):
    relations = list(relations)
    size = _domain_of(relations, size)
    out = {}
    for k in range(caps.arity_cap + 1):
        out[k] = tuple(f for f in all_operations(size, k)
                       if all(is_polymorphism(f, S) for S in relations))
    return out


def all_relations(size, arity):
    check_cap(f"relations of arity {arity} on {size} elements", 2 ** size ** arity)
    for bits in range(2 ** size ** arity):
        yield FinRel(size, arity, bits)


def inv(ops, caps, size=None):
    ops = list(ops)
    size = _domain_of(ops, size)
    out = {}
    for n in range(caps.relation_arity_cap + 1):
        out[n] = tuple(S for S in all_relations(size, n) if all(is_polymorphism(f, S) for f in ops))
    return out


# ------------------------------------------------ relation clone operators

def diagonal(size, n):
    return FinRel.from_tuples(size, n, [(a,) * n for a in range(size)])


def product_rel(S, U):
    if S.size != U.size:
        raise DomainMismatch("relations over different domains")
    return FinRel.from_tuples(S.size, S.arity + U.arity, [s + u for s in S for u in U])


def reindex(S, f):
    """pi_f(S) = { s o f : s in S } for f : m -> arity(S) given as a tuple of indices."""
    f = tuple(f)
    if any(not 0 <= j < S.arity for j in f):
        raise ArityMismatch(f"reindexing map {f} leaves range({S.arity})")
    return FinRel.from_tuples(S.size, len(f), [tuple(s[j] for j in f) for s in S])


def intersect(family):
    family = list(family)
    if not family:
        raise ArityMismatch("intersection of an empty family has no arity")
    bits = family[0].bits
    for S in family[1:]:
        _same(family[0], S)
        bits &= S.bits
    return FinRel(family[0].size, family[0].arity, bits)


def union(family):
    family = list(family)
    if not family:
        raise ArityMismatch("union of an empty family has no arity")
    bits = 0
    for S in family:
        _same(family[0], S)
        bits |= S.bits
    return FinRel(family[0].size, family[0].arity, bits)


def finrel_transform(kind, *args):
    if kind == "diagonal":
        return diagonal(*args)
    if kind == "product":
        return product_rel(*args)
    if kind == "reindex":
        return reindex(*args)
    if kind == "intersect":
        return intersect(*args)
    if kind == "union":
        return union(*args)
    raise ValueError(f"unknown transform {kind!r}")


def pad(S, n):
    """S x A^(n - arity) for n >= arity, the first-n-coordinate cut otherwise."""
    if n >= S.arity:
        return product_rel(S, FinRel.full(S.size, n - S.arity))
    return reindex(S, range(n))


def relation_clone_generate(generators, caps, size=None):
    """Arity-capped relation clone generated by `generators`.

    Contains the diagonals and the empty relation of every arity up to the
    cap (the empty relation is invariant under every operation), and is closed
    under products, reindexing and intersection within the cap.
    """
    generators = list(generators)
    size = _domain_of(generators, size)
    cap = caps.relation_arity_cap
    slices = {n: set() for n in range(cap + 1)}
    for n in range(cap + 1):
        slices[n].add(FinRel.empty(size, n))
        if n:
            slices[n].add(diagonal(size, n))
    for S in generators:
        if S.arity <= cap:
            slices[S.arity].add(S)
    maps = {(m, n): list(product(range(n), repeat=m)) for m in range(cap + 1) for n in range(1, cap + 1)}
    frontier = {n: set(v) for n, v in slices.items()}
    while any(frontier.values()):
        fresh = {n: set() for n in slices}

        def offer(R):
            if R not in slices[R.arity] and R not in fresh[R.arity]:
                fresh[R.arity].add(R)

        for n, new in frontier.items():
            for S in new:
                for m in range(cap + 1):
                    if n == 0:
                        continue
                    for f in maps[(m, n)]:
                        offer(reindex(S, f))
                for b in range(cap + 1 - n):
                    for U in slices[b]:
                        offer(product_rel(S, U))
                        offer(product_rel(U, S))
                for U in slices[n]:
                    offer(S & U)
        for n in slices:
            slices[n] |= fresh[n]
        frontier = fresh
    return {n: tuple(sorted(v)) for n, v in slices.items()}


def cut_of_intersection(family, n, size=None):
    """(intersection of the top extensions of `family`) cut at arity n.

    All constraints live in the first J = max(n, arities) coordinates, so the
    intersection of the J-padded relations, projected to the first n
    coordinates, is exact.
    """
    family = list(family)
    size = _domain_of(family, size)
    J = max([n] + [S.arity for S in family])
    bits = (1 << size ** J) - 1
    for S in family:
        bits &= pad(S, J).bits
    return reindex(FinRel(size, J, bits), range(n))


# ----------------------------------------------------------------- Geiger

@dataclass
class GeigerReport:
    caps: CloneCaps
    route: str
    clone: dict
    invariants: dict
    pol_of_inv: dict
    equal: bool
    witness: object = None


def pol_inv_local(clone_slices, caps, size):
    """Pol(Inv_{<=relcap} F) slices without listing Inv.

    f (k-ary) preserves every invariant of arity <= n iff on every set D of at
    most n points of A^k it agrees with some k-ary member of the clone, since
    the least invariant containing the columns of a matrix is the set of
    images of those columns under the k-ary members.
    """
    n = caps.relation_arity_cap
    out = {}
    for k in range(caps.arity_cap + 1):
        points = size ** k
        check_cap(f"candidate operations of arity {k}", size ** points)
        members = np.array([op.table for op in clone_slices.get(k, ())], dtype=np.int64).reshape(-1, points)
        cand = _index_combos(size, points) if points else np.zeros((1, 0), dtype=np.int64)
        keep = np.ones(cand.shape[0], dtype=bool)
        if members.shape[0] == 0:
            keep[:] = False
        else:
            for D in combinations(range(points), min(n, points)):
                D = list(D)
                pw = _powers(size, len(D))
                allowed = np.unique(members[:, D] @ pw)
                keep &= np.isin(cand[:, D] @ pw, allowed)
        out[k] = tuple(FinOp(size, k, tuple(int(v) for v in row)) for row in cand[keep])
    return out


def geiger_roundtrip(generators, caps, size=None, route="enumerate"):
    generators = list(generators)
    size = _domain_of(generators, size)
    clone = generate_clone(generators, caps, size)
    if route == "enumerate":
        members = sorted({op for ops in clone.values() for op in ops} | set(generators))
        invariants = inv(members, caps, size)
        relations = [S for rels in invariants.values() for S in rels]
        back = pol(relations, caps, size)
    elif route == "local":
        invariants = {}
        back = pol_inv_local(clone, caps, size)
    else:
        raise ValueError(f"unknown route {route!r}")
    witness = None
    for k in range(caps.arity_cap + 1):
        extra = sorted(set(back[k]) ^ set(clone[k]))
        if extra:
            witness = extra[0]
            break
    return GeigerReport(caps, route, clone, invariants, back, witness is None, witness)

"""Eventually-constant threads over a finite domain.

A thread is stored as a finite prefix followed by a constant tail. The
canonical form never lets the prefix end with the tail value, so two threads
are equal as sequences iff their canonical forms are equal.
"""

from dataclasses import dataclass
from itertools import product

from .errors import DomainMismatch


def _strip(prefix, tail):
    end = len(prefix)
    while end and prefix[end - 1] == tail:
        end -= 1
    return tuple(prefix[:end])


@dataclass(frozen=True, order=True)
class EvThread:
    prefix: tuple
    tail: int

    def __init__(self, prefix, tail):
        object.__setattr__(self, "prefix", _strip(tuple(int(v) for v in prefix), int(tail)))
        object.__setattr__(self, "tail", int(tail))

    @classmethod
    def constant(cls, a):
        return cls((), a)

    def __getitem__(self, i):
        if i < 0:
            raise IndexError("threads have no negative indices")
        return self.prefix[i] if i < len(self.prefix) else self.tail

    def head(self, n):
        """The first n coordinates as a tuple."""
        return tuple(self[i] for i in range(n))

    def values(self):
        """set(s): the values the thread takes."""
        return frozenset(self.prefix) | {self.tail}

    def check_domain(self, size):
        if any(not 0 <= v < size for v in self.prefix + (self.tail,)):
            raise DomainMismatch(f"{self} has values outside domain {size}")
        return self

    def __repr__(self):
        return f"EvThread({format_thread(self)!r})"


def format_thread(s):
    body = " ".join(map(str, s.prefix))
    return f"{body} | {s.tail}" if body else f"|{s.tail}"


def substitute(s, a):
    """s[a_0, ..., a_{n-1}]: overwrite the first len(a) coordinates."""
    a = tuple(a)
    rest = s.prefix[len(a):]
    return EvThread(a + rest, s.tail)


def eq_omega(s, r):
    """Finite difference. For eventually-constant threads this is tail equality."""
    return s.tail == r.tail


def restrict(s, d):
    return {i: s[i] for i in sorted(d)}


@dataclass(frozen=True)
class TraceDescriptor:
    """The compact trace of all threads whose tail lies in `tails`."""
    tails: frozenset

    def __init__(self, tails):
        tails = frozenset(int(t) for t in tails)
        if not tails:
            raise ValueError("a trace needs at least one tail value")
        object.__setattr__(self, "tails", tails)

    @property
    def basic(self):
        return len(self.tails) == 1


def in_trace(s, t):
    return s.tail in t.tails


def all_threads(size, max_prefix):
    """Every canonical thread whose prefix has length <= max_prefix, each once."""
    out = []
    for n in range(max_prefix + 1):
        for pre in product(range(size), repeat=n):
            for c in range(size):
                if n and pre[-1] == c:
                    continue
                out.append(EvThread(pre, c))
    return out

"""Finitely-describable matrices: rows are EvThreads, the row count is finite
or omega with an eventually repeated row."""

from dataclasses import dataclass
from itertools import product

from .errors import ShapeMismatch
from .finite_core import FinRel
from .omega_ops import eval_rop
from .threads import EvThread, substitute

OMEGA = "omega"


@dataclass(frozen=True)
class EvMatrix:
    rows: tuple
    tail_row: object = None
    alpha: object = None

    def __init__(self, rows, tail_row=None, alpha=None):
        rows = tuple(rows)
        if tail_row is None:
            if alpha not in (None, len(rows)):
                raise ShapeMismatch(f"{len(rows)} explicit rows but alpha = {alpha}")
            alpha = len(rows)
        else:
            if alpha not in (None, OMEGA):
                raise ShapeMismatch("a tail row implies omega many rows")
            alpha = OMEGA
            while rows and rows[-1] == tail_row:
                rows = rows[:-1]
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "tail_row", tail_row)
        object.__setattr__(self, "alpha", alpha)

    @property
    def infinite(self):
        return self.alpha == OMEGA

    def row(self, i):
        if i < len(self.rows):
            return self.rows[i]
        if self.infinite:
            return self.tail_row
        raise IndexError(f"row {i} of a matrix with {self.alpha} rows")

    def column(self, j):
        """Column j: a tuple for finite alpha, an EvThread otherwise."""
        vals = tuple(r[j] for r in self.rows)
        if self.infinite:
            return EvThread(vals, self.tail_row[j])
        return vals

    def width(self):
        """Index of the first column from which all columns coincide."""
        rows = self.rows + ((self.tail_row,) if self.infinite else ())
        return max((len(r.prefix) for r in rows), default=0)

    def eventual_column(self):
        vals = tuple(r.tail for r in self.rows)
        if self.infinite:
            return EvThread(vals, self.tail_row.tail)
        return vals


def from_columns(prefix_columns, tail_column):
    """Matrix whose column j is prefix_columns[j] for j < P and tail_column after."""
    cols = list(prefix_columns) + [tail_column]
    if isinstance(tail_column, EvThread):
        depth = max(len(c.prefix) for c in cols)
        rows = [EvThread([c[i] for c in cols[:-1]], tail_column[i]) for i in range(depth)]
        tail = EvThread([c.tail for c in cols[:-1]], tail_column.tail)
        return EvMatrix(rows, tail)
    n = len(tail_column)
    if any(len(c) != n for c in cols):
        raise ShapeMismatch("columns of different lengths")
    return EvMatrix([EvThread([c[i] for c in cols[:-1]], tail_column[i]) for i in range(n)])


def apply_rop(phi, m):
    vals = tuple(eval_rop(phi, r) for r in m.rows)
    if m.infinite:
        return EvThread(vals, eval_rop(phi, m.tail_row))
    return vals


def substitute_columns(m, cols):
    """m[s_0, ..., s_{k-1}]: replace the first k columns."""
    cols = tuple(cols)
    if not cols:
        return m
    if m.infinite:
        if not all(isinstance(c, EvThread) for c in cols):
            raise ShapeMismatch("columns of an omega-row matrix are threads")
        depth = max([len(m.rows)] + [len(c.prefix) for c in cols])
        rows = [substitute(m.row(i), [c[i] for c in cols]) for i in range(depth)]
        return EvMatrix(rows, substitute(m.tail_row, [c.tail for c in cols]))
    if any(isinstance(c, EvThread) or len(c) != m.alpha for c in cols):
        raise ShapeMismatch(f"columns must be tuples of length {m.alpha}")
    return EvMatrix([substitute(r, [c[i] for c in cols]) for i, r in enumerate(m.rows)])


def row_injective(m):
    if m.infinite:
        return False
    return len(set(m.rows)) == len(m.rows)


def _pool_members(pool):
    if isinstance(pool, FinRel):
        return list(pool.tuples)
    return list(pool)


def enumerate_matrices(pool, column_budget):
    """Every matrix whose columns lie in `pool` and which is described by at
    most `column_budget` column positions (P prefix columns, then one column
    repeated forever). Each matrix appears once, ordered by P and then
    lexicographically in pool order."""
    members = _pool_members(pool)
    if not members:
        return
    for P in range(column_budget):
        for pre in product(members, repeat=P):
            for t in members:
                if P and pre[-1] == t:
                    continue
                yield from_columns(pre, t)


def enumerate_row_matrices(row_pool, max_rows, injective=True):
    """Finite-row matrices with rows from row_pool, 0 < rows <= max_rows."""
    rows = list(row_pool)
    for a in range(1, max_rows + 1):
        for choice in product(rows, repeat=a):
            if injective and len(set(choice)) < a:
                continue
            yield EvMatrix(choice)

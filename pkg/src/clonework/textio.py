"""Literal syntax shared by definition files and reports.

Values below 10 are written as single digits and tuples as digit strings
(`00 01 11`); larger domains separate values with commas (`0,12 3,4`).
"""

import re

from .errors import DomainMismatch
from .finite_core import FinOp, FinRel, all_tuples
from .matrices import EvMatrix
from .omega_ops import ROp
from .omega_relations import Pattern
from .threads import EvThread, format_thread

__all__ = ["parse_values", "format_values", "parse_table", "format_table", "parse_tuples",
           "format_relation", "parse_thread", "format_thread", "parse_matrix", "format_matrix",
           "parse_rop_entries", "format_rop", "parse_patterns", "format_pattern", "quote"]


def parse_values(token, size):
    """One tuple token: digits, or comma-separated numbers."""
    if token in ("()", "-"):
        vals = ()
    elif "," in token or size > 10:
        vals = tuple(int(v) for v in token.split(",") if v != "")
    else:
        vals = tuple(int(ch) for ch in token)
    if any(not 0 <= v < size for v in vals):
        raise DomainMismatch(f"{token!r} has values outside domain {size}")
    return vals


def format_values(vals, size):
    if not vals:
        return "()"
    if size <= 10:
        return "".join(map(str, vals))
    return ",".join(map(str, vals))


def parse_table(text, size, arity):
    if size <= 10:
        vals = [int(ch) for ch in re.sub(r"\s+", "", text)]
    else:
        vals = [int(v) for v in re.split(r"[\s,]+", text.strip()) if v]
    return FinOp(size, arity, tuple(vals))


def format_table(op):
    sep = "" if op.size <= 10 else ","
    return sep.join(map(str, op.table))


def parse_tuples(text, size, arity):
    tuples = [parse_values(tok, size) for tok in text.split()]
    return FinRel.from_tuples(size, arity, tuples)


def format_relation(S):
    if not len(S):
        return "{}"
    return " ".join(format_values(t, S.size) for t in S.tuples)


def parse_thread(text):
    text = text.strip()
    if "|" not in text:
        raise ValueError(f"thread literal {text!r} needs '| tail'")
    pre, tail = text.split("|", 1)
    tail = tail.split()
    if len(tail) != 1:
        raise ValueError(f"thread literal {text!r} needs exactly one tail value")
    return EvThread([int(v) for v in pre.split()], int(tail[0]))


def parse_matrix(text):
    """Rows separated by ';'. A final `tailrow: <thread>` makes the row count omega."""
    text = text.strip()
    if text in ("", "empty"):
        return EvMatrix(())
    rows, tail = [], None
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if part.startswith("tailrow:"):
            tail = parse_thread(part[len("tailrow:"):])
        elif tail is not None:
            raise ValueError("the tail row must come last")
        else:
            rows.append(parse_thread(part))
    return EvMatrix(rows, tail)


def format_matrix(m):
    parts = [format_thread(r) for r in m.rows]
    if m.infinite:
        parts.append("tailrow: " + format_thread(m.tail_row))
    return "; ".join(parts) if parts else "empty"


def parse_rop_entries(text, size, width):
    """`00->0 01->1 ...` keyed by (prefix values, tail value); every key once."""
    head = {}
    for tok in text.split():
        key, _, val = tok.partition("->")
        if not _:
            raise ValueError(f"bad head entry {tok!r}")
        key = parse_values(key, size)
        if len(key) != width + 1:
            raise ValueError(f"head entry {tok!r} needs {width + 1} key values")
        if key in head:
            raise ValueError(f"head entry {tok!r} given twice")
        head[key] = int(val)
    missing = [k for k in all_tuples(size, width + 1) if k not in head]
    if missing:
        raise ValueError(f"head entries missing for {format_values(missing[0], size)}")
    return ROp(size, width, [head[k] for k in all_tuples(size, width + 1)])


def format_rop(phi):
    entries = " ".join(f"{format_values(k, phi.size)}->{v}"
                       for k, v in zip(all_tuples(phi.size, phi.width + 1), phi.head))
    return f"w={phi.width} : {entries}"


_STAR = re.compile(r"^\((.*)\)\*$|^(\d+)\*$")


def parse_patterns(text):
    """`0* | 1` or `(0 1)* 1 | 0`; several patterns separated by ','."""
    out = []
    for part in text.split(","):
        if "|" not in part:
            raise ValueError(f"pattern {part!r} needs '| tail'")
        body, tail = part.split("|", 1)
        tokens = re.findall(r"\([^)]*\)\*|\S+", body)
        before, block, after, seen = [], (), [], False
        for tok in tokens:
            m = _STAR.match(tok)
            if m:
                if seen:
                    raise ValueError(f"pattern {part!r} has more than one repeated block")
                seen = True
                block = tuple(map(int, m.group(1).split())) if m.group(1) is not None else (int(m.group(2)),)
            elif seen:
                after.append(int(tok))
            else:
                before.append(int(tok))
        out.append(Pattern(tuple(before), block, tuple(after), int(tail.strip())))
    return out


def format_pattern(p):
    parts = list(map(str, p.before))
    if p.block:
        parts.append(f"{p.block[0]}*" if len(p.block) == 1 else f"({' '.join(map(str, p.block))})*")
    parts += list(map(str, p.after))
    return f"{' '.join(parts)} | {p.tail}".strip()


def quote(value):
    """Render a report value so that `shlex.split` gives it back."""
    value = str(value)
    if value and not re.search(r"[\s\"'\\#]", value):
        return value
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'

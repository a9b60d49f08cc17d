"""Definition files, task dispatch and report emission."""

import shlex
import time
from dataclasses import dataclass, field

from . import finite_core as fc
from . import galois as gl
from . import omega_ops as oo
from . import omega_relations as orl
from .errors import CapExceeded, DomainMismatch, ParseError, UnknownName, WorkbenchError
from .matrices import EvMatrix, apply_rop
from .threads import EvThread, format_thread
from .textio import (format_matrix, format_relation, format_table, format_values, parse_matrix,
                     parse_patterns, parse_rop_entries, parse_table, parse_thread, parse_tuples, quote)

KINDS = ("op", "rel", "thread", "rop", "matrix", "evset", "decseq")


@dataclass
class Task:
    name: str
    kind: str
    params: dict
    expect: str = None
    line: int = 0


@dataclass
class WorkbenchSpec:
    domain: int = None
    objects: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)

    def get(self, name, kinds, line=0):
        kinds = (kinds,) if isinstance(kinds, str) else kinds
        if name not in self.objects:
            raise UnknownName(line, f"unknown name {name!r}")
        kind, value = self.objects[name]
        if kind not in kinds:
            raise UnknownName(line, f"{name!r} is a {kind}, expected {' or '.join(kinds)}")
        return value


def _strip_comment(line):
    quote_char = None
    for i, ch in enumerate(line):
        if quote_char:
            if ch == quote_char:
                quote_char = None
        elif ch in "\"'":
            quote_char = ch
        elif ch == "#":
            return line[:i]
    return line


def _split_def(rest, lineno):
    if "=" not in rest:
        raise ParseError(lineno, "definition needs '='")
    left, body = rest.split("=", 1)
    return left.split(), body.strip()


def _keyvals(tokens, lineno):
    out = {}
    for tok in tokens:
        key, eq, val = tok.partition("=")
        if not eq:
            raise ParseError(lineno, f"expected key=value, got {tok!r}")
        out[key] = val
    return out


def parse_spec(text):
    spec = WorkbenchSpec()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "domain":
                if spec.domain is not None:
                    raise ParseError(lineno, "domain declared twice")
                spec.domain = int(rest)
                if spec.domain < 1:
                    raise ParseError(lineno, "domain size must be >= 1")
            elif word == "task":
                _parse_task(spec, rest, lineno)
            elif word in KINDS:
                if spec.domain is None:
                    raise ParseError(lineno, "domain must be declared before any definition")
                name, value = _parse_def(spec, word, rest, lineno)
                if name in spec.objects:
                    raise ParseError(lineno, f"name {name!r} defined twice")
                spec.objects[name] = (word, value)
            else:
                raise ParseError(lineno, f"unknown statement {word!r}")
        except ParseError:
            raise
        except DomainMismatch as exc:
            raise DomainMismatch(f"line {lineno}: {exc}") from exc
        except (ValueError, WorkbenchError) as exc:
            raise ParseError(lineno, str(exc)) from exc
    return spec


def _parse_task(spec, rest, lineno):
    tokens = shlex.split(rest)
    if len(tokens) < 2:
        raise ParseError(lineno, "task needs a name and a kind")
    name, kind = tokens[0], tokens[1]
    if kind not in TASKS:
        raise ParseError(lineno, f"unknown task kind {kind!r}")
    if any(t.name == name for t in spec.tasks):
        raise ParseError(lineno, f"task {name!r} defined twice")
    params = _keyvals(tokens[2:], lineno)
    expect = params.pop("expect", None)
    task = Task(name, kind, params, expect, lineno)
    for key in REFS.get(kind, ()):
        for ref in _names(params.get(key[0], "")):
            spec.get(ref, key[1], lineno)
    spec.tasks.append(task)


def _parse_def(spec, word, rest, lineno):
    size = spec.domain
    if word == "rop" and ":" in rest and "=" not in rest.split(":", 1)[0].replace("w=", ""):
        left, body = rest.split(":", 1)
        parts = left.split()
        if len(parts) != 2 or not parts[1].startswith("w="):
            raise ParseError(lineno, "expected `rop NAME w=W : entries`")
        return parts[0], parse_rop_entries(body, size, int(parts[1][2:]))
    left, body = _split_def(rest, lineno)
    if not left:
        raise ParseError(lineno, "definition needs a name")
    name = left[0]
    if word == "op":
        return name, parse_table(body, size, int(left[1]))
    if word == "rel":
        return name, parse_tuples(body, size, int(left[1]))
    if word == "thread":
        return name, parse_thread(body).check_domain(size)
    if word == "matrix":
        m = parse_matrix(body)
        for r in m.rows + ((m.tail_row,) if m.infinite else ()):
            r.check_domain(size)
        return name, m
    tokens = shlex.split(body)
    if word == "rop":
        return name, _parse_rop_expr(spec, tokens, lineno)
    if word == "evset":
        if tokens and tokens[0] == "pattern":
            return name, orl.PatternFamily(size, parse_patterns(" ".join(tokens[1:])))
        if tokens and tokens[0] == "threads":
            lits = body.split(None, 1)[1] if len(tokens) > 1 else ""
            return name, orl.Explicit(size, [parse_thread(t) for t in lits.split(";") if t.strip()])
        raise ParseError(lineno, "evset needs `pattern \"...\"` or `threads ...`")
    return name, _parse_decseq(spec, tokens, lineno)


def _parse_rop_expr(spec, tokens, lineno):
    size = spec.domain
    if not tokens:
        raise ParseError(lineno, "empty rop expression")
    head, args = tokens[0], tokens[1:]
    if head == "topext" and len(args) == 1:
        return oo.top_ext(spec.get(args[0], "op", lineno))
    if head == "proj" and len(args) == 1:
        return oo.proj_e(int(args[0]), size)
    if head == "tail" and not args:
        return oo.tail_op(size)
    if head == "const" and len(args) == 1:
        return oo.const_rop(size, int(args[0]))
    raise ParseError(lineno, f"unknown rop expression {' '.join(tokens)!r}")


def _parse_decseq(spec, tokens, lineno):
    size = spec.domain
    if not tokens:
        raise ParseError(lineno, "empty decseq expression")
    head = tokens[0]
    if head == "diagonal":
        return orl.diagonal(size)
    if head == "topext":
        kv = _keyvals(tokens[1:], lineno)
        return orl.from_finitary(spec.get(kv.get("rel", ""), "rel", lineno))
    if head == "closure":
        kv = _keyvals(tokens[1:], lineno)
        if "pattern" in kv:
            return orl.local_closure(orl.PatternFamily(size, parse_patterns(kv["pattern"])))
        return orl.local_closure(spec.get(kv.get("evset", ""), "evset", lineno))
    if head == "op" and len(tokens) >= 3:
        which, first = tokens[1], spec.get(tokens[2], "decseq", lineno)
        rest = tokens[3:]
        if which in ("intersect", "join") and len(rest) == 1:
            other = spec.get(rest[0], "decseq", lineno)
            return orl.dec_intersect(first, other) if which == "intersect" else orl.dec_join(first, other)
        kv = _keyvals(rest, lineno)
        if which == "exists":
            return orl.dec_exists(first, [int(v) for v in _names(kv.get("keep", ""))])
        if which == "permute":
            return orl.dec_permute(first, [int(v) for v in _names(kv.get("sigma", ""))])
    raise ParseError(lineno, f"unknown decseq expression {' '.join(tokens)!r}")


def _names(value):
    return [v for v in value.split(",") if v and v != "-"]


# ------------------------------------------------------------------- tasks

@dataclass
class TaskResult:
    name: str
    kind: str
    status: str
    outcome: str
    expect: str = None
    caps: list = field(default_factory=list)
    details: list = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class Report:
    domain: int
    results: list = field(default_factory=list)

    @property
    def passed(self):
        return sum(r.status == "pass" for r in self.results)

    @property
    def ok(self):
        return all(r.status == "pass" for r in self.results)


class _Params:
    def __init__(self, spec, task):
        self.spec, self.task, self.used = spec, task, []

    def raw(self, key, default=None):
        return self.task.params.get(key, default)

    def int(self, key, default):
        value = int(self.task.params.get(key, default))
        self.used.append((key, value))
        return value

    def word(self, key, default):
        value = self.task.params.get(key, default)
        self.used.append((key, value))
        return value

    def obj(self, key, kinds):
        if key not in self.task.params:
            raise ParseError(self.task.line, f"task {self.task.name!r} needs {key}=")
        return self.spec.get(self.task.params[key], kinds, self.task.line)

    def objs(self, key, kinds):
        return [self.spec.get(n, kinds, self.task.line) for n in _names(self.task.params.get(key, ""))]

    def which(self, *keys):
        present = [k for k in keys if k in self.task.params]
        if len(present) != 1:
            raise ParseError(self.task.line, f"task {self.task.name!r} needs exactly one of {', '.join(keys)}")
        return present[0]


def _counts(slices):
    return ",".join(f"{k}:{len(v)}" for k, v in sorted(slices.items()))


def _show(x):
    if isinstance(x, EvThread):
        return format_thread(x)
    if isinstance(x, tuple):
        return format_values(x, 10)
    if isinstance(x, EvMatrix):
        return format_matrix(x)
    return str(x)


def _verdict(v):
    if isinstance(v, gl.Holds):
        return "holds", [("reason", v.reason)]
    if isinstance(v, gl.FailsWith):
        return "fails", [("witness", format_matrix(v.matrix)), ("image", _show(v.image))]
    return "holds-up-to-bounds", [("checked", v.checked), ("unresolved", v.unresolved)]


def _bounds(p):
    return gl.Bounds(depth=p.int("depth", 8), column_budget=p.int("budget", 2), prefix=p.int("prefix", 3),
                     max_rows=p.int("rows", 3), substitutions=p.int("subs", 2))


def _t_geiger(p, size):
    caps = fc.CloneCaps(p.int("opcap", 2), p.int("relcap", 3))
    rep = fc.geiger_roundtrip(p.objs("ops", "op"), caps, size, route=p.word("route", "enumerate"))
    details = [("clone", _counts(rep.clone)), ("pol_inv", _counts(rep.pol_of_inv))]
    if rep.invariants:
        details.append(("inv", _counts(rep.invariants)))
    if rep.witness is not None:
        details.append(("witness", f"{rep.witness.arity}:{format_table(rep.witness)}"))
    return ("equal" if rep.equal else "unequal"), details


def _t_clone(p, size):
    caps = fc.CloneCaps(p.int("opcap", 2), 1)
    gens = p.objs("ops", "op")
    slices = fc.generate_clone(gens, caps, size)
    again = fc.resaturate(slices, gens, size)
    return _counts(slices), [("fixed_point", "yes" if again == slices else "no")]


def _t_poly(p, size):
    return str(fc.is_polymorphism(p.obj("op", "op"), p.obj("rel", "rel"))).lower(), []


def _t_pol(p, size):
    return _counts(fc.pol(p.objs("rels", "rel"), fc.CloneCaps(p.int("opcap", 2), 1), size)), []


def _t_inv(p, size):
    return _counts(fc.inv(p.objs("ops", "op"), fc.CloneCaps(1, p.int("relcap", 3)), size)), []


def _t_relclone(p, size):
    caps = fc.CloneCaps(1, p.int("relcap", 3))
    return _counts(fc.relation_clone_generate(p.objs("rels", "rel"), caps, size)), []


def _t_cutint(p, size):
    return format_relation(fc.cut_of_intersection(p.objs("rels", "rel"), p.int("n", 1), size)), []


def _t_axioms(p, size):
    spec = oo.SampleSpec(width=p.int("width", 1), exhaustive=p.word("exhaustive", "yes") == "yes",
                         samples=p.int("samples", 1000), seed=p.int("seed", 0), max_n=p.int("maxn", 2),
                         max_prefix=p.int("maxprefix", 2), size=size)
    details, ok = [], True
    for kind in _names(p.word("axiom", "C1,C2,C3,C4,C5")):
        rep = oo.axiom_suite(kind, spec)
        details.append((kind, rep.checked))
        if not rep.passed:
            ok = False
            details.append((f"{kind}_counterexample", repr(rep.counterexample)))
    return ("pass" if ok else "fail"), details


def _t_eval(p, size):
    return str(oo.eval_rop(p.obj("rop", "rop"), p.obj("thread", "thread"))), []


def _t_approx(p, size):
    f = oo.finitary_approximation(p.obj("rop", "rop"), p.objs("threads", "thread"), p.int("fallback", 0))
    return f"{f.arity}:{format_table(f)}", []


def _t_cut(p, size):
    return format_relation(p.obj("decseq", "decseq").cut(p.int("k", 1))), []


def _t_member(p, size):
    s = p.obj("thread", "thread")
    key = p.which("decseq", "evset")
    if key == "evset":
        return ("in" if p.obj("evset", "evset").contains(s) else "out"), []
    return str(orl.lim_membership(s, p.obj("decseq", "decseq"), p.int("depth", 8))), []


def _t_gpoly(p, size):
    phi = p.obj("rop", "rop")
    key = p.which("rel", "evset", "decseq")
    if key == "rel":
        S = p.obj("rel", "rel")
        m = gl.fin_witness(phi, S)
        if m is None:
            return "holds", [("reason", "column reduction")]
        return "fails", [("witness", format_matrix(m)), ("image", _show(apply_rop(phi, m)))]
    R = p.obj(key, key)
    return _verdict(gl.is_g_polymorphism_decseq(phi, R, _bounds(p)))


def _t_botpoly(p, size):
    return _verdict(gl.is_bot_polymorphism(p.obj("rop", "rop"), p.obj("evset", "evset"), _bounds(p)))


def _t_polomega(p, size):
    return str(len(gl.pol_omega(p.objs("rels", "rel"), p.int("width", 1), size))), []


def _t_invfin(p, size):
    return _counts(gl.inv_finitary(p.objs("rops", "rop"), p.int("relcap", 2), size)), []


_IDEALS = {"local": lambda size, k: gl.local_spec(size, k), "uniform": lambda size, k: gl.uniform_spec(size, k),
           "trace": lambda size, k: gl.trace_spec(size), "global": lambda size, k: gl.global_spec(size)}


def _t_cl(p, size):
    ideal = p.word("ideal", "local")
    if ideal not in _IDEALS:
        raise ParseError(p.task.line, f"unknown ideal {ideal!r}")
    X = _IDEALS[ideal](size, p.int("prefix", 2))
    C = oo.generate_omega_clone(p.objs("gens", "rop"), p.int("width", 4), size=size)
    return ("member" if gl.cl_membership(p.obj("rop", "rop"), C, X) else "nonmember"), [("clone", len(C))]


def _t_matcond(p, size):
    bounds = _bounds(p)
    width = p.int("width", bounds.prefix + 1)
    return _verdict(gl.duedue2_condition4_check(p.obj("rop", "rop"), p.objs("gens", "rop"), bounds, width))


def _t_matrical(p, size):
    key = p.which("rel", "evset")
    return _verdict(gl.matrical_polymorphism(p.obj("rop", "rop"), p.obj(key, key), p.obj("matrix", "matrix"),
                                             _bounds(p)))


def _t_inclusion(p, size):
    caps = fc.CloneCaps(p.int("opcap", 2), p.int("relcap", 3))
    rep = gl.theorem_clone_inclusion_check(p.objs("decseqs", "decseq"), caps, p.int("width", 2))
    outcome = "equal" if rep.equality else "included" if rep.inclusion else "violated"
    details = [("left", _counts(rep.left)), ("right", _counts(rep.right)), ("generated", _counts(rep.generated))]
    if rep.witness is not None:
        details.append(("witness", repr(rep.witness)))
    return outcome, details


def _t_image(p, size):
    phi, m = p.obj("rop", "rop"), p.obj("matrix", "matrix")
    img = apply_rop(phi, m)
    key = p.which("rel", "evset", "decseq")
    target = p.obj(key, key)
    if key == "rel":
        return ("in" if img in target else "out"), [("image", _show(img))]
    if key == "evset":
        return ("in" if target.contains(img) else "out"), [("image", _show(img))]
    return str(orl.lim_membership(img, target, p.int("depth", 8))), [("image", _show(img))]


def _t_rmc(p, size):
    m = p.obj("matrix", "matrix")
    C = oo.generate_omega_clone(p.objs("gens", "rop"), p.int("width", 2), size=size)
    vals = sorted(gl.r_mc(m, C))
    return (" ".join(format_values(v, size) for v in vals) or "{}"), [("clone", len(C))]


TASKS = {
    "geiger": _t_geiger, "clone": _t_clone, "poly": _t_poly, "pol": _t_pol, "inv": _t_inv,
    "relclone": _t_relclone, "cutint": _t_cutint, "axioms": _t_axioms, "eval": _t_eval,
    "approx": _t_approx, "cut": _t_cut, "member": _t_member, "gpoly": _t_gpoly,
    "botpoly": _t_botpoly, "polomega": _t_polomega, "invfin": _t_invfin, "cl": _t_cl,
    "matcond": _t_matcond, "matrical": _t_matrical, "inclusion": _t_inclusion,
    "image": _t_image, "rmc": _t_rmc,
}

# parameters that name objects, checked when the task is parsed
REFS = {
    "geiger": [("ops", "op")], "clone": [("ops", "op")], "poly": [("op", "op"), ("rel", "rel")],
    "pol": [("rels", "rel")], "inv": [("ops", "op")], "relclone": [("rels", "rel")],
    "cutint": [("rels", "rel")], "eval": [("rop", "rop"), ("thread", "thread")],
    "approx": [("rop", "rop"), ("threads", "thread")], "cut": [("decseq", "decseq")],
    "member": [("thread", "thread"), ("decseq", "decseq"), ("evset", "evset")],
    "gpoly": [("rop", "rop"), ("rel", "rel"), ("evset", "evset"), ("decseq", "decseq")],
    "botpoly": [("rop", "rop"), ("evset", "evset")], "polomega": [("rels", "rel")],
    "invfin": [("rops", "rop")], "cl": [("rop", "rop"), ("gens", "rop")],
    "matcond": [("rop", "rop"), ("gens", "rop")],
    "matrical": [("rop", "rop"), ("rel", "rel"), ("evset", "evset"), ("matrix", "matrix")],
    "inclusion": [("decseqs", "decseq")],
    "image": [("rop", "rop"), ("matrix", "matrix"), ("rel", "rel"), ("evset", "evset"), ("decseq", "decseq")],
    "rmc": [("matrix", "matrix"), ("gens", "rop")],
}


def run_task(spec, task):
    p = _Params(spec, task)
    start = time.perf_counter()
    try:
        outcome, details = TASKS[task.kind](p, spec.domain)
        status = "pass" if task.expect is None or outcome == task.expect else "fail"
    except CapExceeded as exc:
        outcome, status = "cap-exceeded", "error"
        details = [("what", exc.what), ("estimate", exc.estimate), ("limit", exc.limit)]
    except (WorkbenchError, ValueError) as exc:
        outcome, status, details = "error", "error", [("message", str(exc))]
    return TaskResult(task.name, task.kind, status, outcome, task.expect, p.used, details,
                      time.perf_counter() - start)


def run_spec(spec, only=None):
    tasks = spec.tasks
    if only is not None:
        tasks = [t for t in tasks if t.name == only]
        if not tasks:
            raise UnknownName(0, f"no task named {only!r}")
    return Report(spec.domain, [run_task(spec, t) for t in tasks])


def emit_report(report, fmt="text"):
    if fmt == "lines":
        out = [f"report domain={report.domain} tasks={len(report.results)} "
               f"passed={report.passed} failed={len(report.results) - report.passed}"]
        for r in report.results:
            fields = [("task", r.name), ("kind", r.kind), ("status", r.status), ("outcome", r.outcome)]
            if r.expect is not None:
                fields.append(("expect", r.expect))
            fields += [(f"cap.{k}", v) for k, v in r.caps] + list(r.details)
            out.append(" ".join(f"{k}={quote(v)}" for k, v in fields))
        return "\n".join(out) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    out = [f"workbench report: domain {report.domain}, {len(report.results)} tasks, {report.passed} passed"]
    for r in report.results:
        line = f"[{r.status}] {r.name} ({r.kind}) -> {r.outcome}"
        if r.expect is not None and r.status != "pass":
            line += f" (expected {r.expect})"
        out.append(f"{line}  [{r.seconds:.3f}s]")
        if r.caps:
            out.append("    caps: " + " ".join(f"{k}={v}" for k, v in r.caps))
        for k, v in r.details:
            out.append(f"    {k}: {v}")
    return "\n".join(out) + "\n"

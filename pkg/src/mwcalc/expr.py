"""S-expression language: parsing, canonical printing and evaluation.

Every value the evaluator can print is printed as an expression that
evaluates back to an equal value, e.g. ``(over (fp 5) (gw (cls 2) :offset 0))``.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import corr as C
from . import gw as G
from . import mwk as M
from . import places as PL
from . import poly as P
from . import rost_schmid as RS
from . import twist as T
from .errors import (MWCalcError, ParseError, SchemeMismatch, TypeMismatch, UnboundName, Unknown,
                     UnknownSymbol)
from .etale import EtaleScheme, EPoint, Twisted0
from .factor import factor
from .fields import ExtensionField, Field, FieldElem, FunctionField, PrimeField, RationalField, finite_field
from .gw import GWForm
from .mwk import MWElement, TwistedMW, TwistFactor
from .snf import AbelianGroup

# ===========================================================================
# Syntax tree
# ===========================================================================


@dataclass(frozen=True)
class Node:
    """kind is one of "int", "sym", "kw", "str", "list"."""
    kind: str
    value: object
    start: int = field(default=0, compare=False)
    end: int = field(default=0, compare=False)
    line: int = field(default=1, compare=False)
    column: int = field(default=1, compare=False)

    @property
    def head(self):
        if self.kind == "list" and self.value and self.value[0].kind == "sym":
            return self.value[0].value
        return None

    @property
    def args(self):
        return self.value[1:]


_HEAD_KINDS = {
    "field": {"fp", "q", "qreal", "gf", "ext", "fnfield"},
    "form": {"gw", "cls", "h"},
    "mw-monomial": {"mw", "sym", "eta", "brk", "eps", "term"},
    "twist-word": {"diagram", "swap", "assoc", "sigma", "unit", "cancel", "insert", "iso", "check-commutes",
                   "four-diagram"},
    "complex-request": {"rs-complex", "cohomology", "rs-element", "differential"},
    "correspondence": {"corr-mw", "cycle", "scheme0", "compose", "exterior", "identity", "graph"},
}


def node_kind(node: Node) -> str:
    """Semantic class of a node: a literal kind or the family of its head."""
    if node.kind == "int":
        return "integer"
    if node.kind in ("sym", "kw", "str"):
        return {"sym": "name", "kw": "keyword", "str": "string"}[node.kind]
    for kind, heads in _HEAD_KINDS.items():
        if node.head in heads:
            return kind
    return "application"


_INT = re.compile(r"[+-]?[0-9]+\Z")
_DELIMS = set("()\";")


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def parse_all(text) -> list:
    """Parse every top-level form; raises ParseError with line and column."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raw = bytes(text)[:exc.start].decode("utf-8", "replace")
            line, col = _position(raw, len(raw))
            raise ParseError("invalid UTF-8", line, col) from None
    parser = _Parser(text)
    try:
        return parser.forms()
    except RecursionError:
        raise parser.error("nesting too deep", parser.i, (")",)) from None


def parse(text) -> Node:
    """Parse exactly one form."""
    forms = parse_all(text)
    if not forms:
        raise ParseError("empty input", 1, 1, ("(",))
    if len(forms) > 1:
        f = forms[1]
        raise ParseError("more than one form", f.line, f.column, ("end of input",))
    return forms[0]


class _Parser:
    def __init__(self, text):
        self.text = text
        self.i = 0

    def error(self, msg, offset, expected=()):
        line, col = _position(self.text, offset)
        return ParseError(msg, line, col, expected)

    def skip(self):
        t = self.text
        while self.i < len(t):
            c = t[self.i]
            if c.isspace():
                self.i += 1
            elif c == ";":
                nl = t.find("\n", self.i)
                self.i = len(t) if nl < 0 else nl + 1
            else:
                break

    def forms(self):
        out = []
        while True:
            self.skip()
            if self.i >= len(self.text):
                return out
            line, _ = _position(self.text, self.i)
            try:
                out.append(self.form())
            except ParseError as exc:
                exc.form_line = line
                raise

    def form(self):
        self.skip()
        t = self.text
        start = self.i
        line, col = _position(t, start)
        if start >= len(t):
            raise self.error("unexpected end of input", start, ("(", "atom"))
        c = t[start]
        if c == "(":
            self.i += 1
            items = []
            while True:
                self.skip()
                if self.i >= len(t):
                    raise self.error("unexpected end of input", self.i, (")",))
                if t[self.i] == ")":
                    self.i += 1
                    return Node("list", tuple(items), start, self.i, line, col)
                items.append(self.form())
        if c == ")":
            raise self.error("unexpected ')'", start, ("(", "atom"))
        if c == '"':
            self.i += 1
            buf = []
            while True:
                if self.i >= len(t):
                    raise self.error("unterminated string", self.i, ('"',))
                ch = t[self.i]
                if ch == "\\":
                    if self.i + 1 >= len(t):
                        raise self.error("unterminated string", self.i + 1, ('"',))
                    buf.append(t[self.i + 1])
                    self.i += 2
                    continue
                self.i += 1
                if ch == '"':
                    return Node("str", "".join(buf), start, self.i, line, col)
                buf.append(ch)
        while self.i < len(t) and not t[self.i].isspace() and t[self.i] not in _DELIMS:
            self.i += 1
        tok = t[start:self.i]
        if _INT.match(tok):
            return Node("int", int(tok), start, self.i, line, col)
        if tok.startswith(":"):
            return Node("kw", tok[1:], start, self.i, line, col)
        return Node("sym", tok, start, self.i, line, col)


def print_node(node: Node) -> str:
    """Canonical text of a syntax tree; parse(print_node(n)) == n."""
    if node.kind == "int":
        return str(node.value)
    if node.kind == "sym":
        return node.value
    if node.kind == "kw":
        return ":" + node.value
    if node.kind == "str":
        return '"' + node.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return "(" + " ".join(print_node(c) for c in node.value) + ")"


# ===========================================================================
# Values that are not module objects
# ===========================================================================


@dataclass(frozen=True)
class Report:
    """An ordered record printed as ``key = value, ...``."""
    items: tuple

    def line(self):
        return ", ".join(f"{k} = {v}" for k, v in self.items)


@dataclass(frozen=True)
class PointScheme:
    """Wrapper used only for printing labels of point schemes."""
    scheme: RS.Scheme


# ===========================================================================
# Printing values
# ===========================================================================


def show_elem(F: Field, raw) -> str:
    return F.fmt(raw)


def show_place(z: PL.Place) -> str:
    B = z.field.base
    if z.is_infinite:
        return f"(place {B.desc()} inf)"
    return f"(place {B.desc()} (poly {' '.join(B.fmt(c) for c in z.poly)}))"


def _show_label(lab) -> str:
    if isinstance(lab, PL.Place):
        return show_place(lab)
    if lab == RS.GENERIC:
        return "(generic)"
    if isinstance(lab, int):
        return str(lab)
    return str(lab)


def show_scheme(X) -> str:
    if isinstance(X, EtaleScheme):
        F = X.base
        parts = []
        for name, atom in zip(X.names, X.atoms):
            fs = " ".join("(poly " + " ".join(F.fmt(c) for c in f) + ")" for f in atom)
            parts.append(f"(etale :name {name} {fs})")
        return f"(scheme0 {F.desc()} " + " ".join(parts) + ")"
    if X.kind == "point":
        comps = " ".join(f"(comp {_show_label(l)} {k.desc()})" for l, k in zip(X.labels, X.factors))
        return f"(point-scheme {X.base.desc()} {comps})"
    return f"({X.kind} {X.base.desc()})"


def show_line(l: RS.Line) -> str:
    return f"(line {l.label} {l.kind} {l.n} {l.parity})"


def show_twisted(v: TwistedMW) -> str:
    F = v.field
    lines = "".join(f" (tw {f.label} {f.parity} {F.fmt(f.scale)})" for f in v.twist)
    return f"(twisted {v.element.to_expr()}{lines})"


def _residue_field_at(X, pt):
    return X.residue_field_at(pt)


def show(v) -> str:
    """Canonical expression text of a value."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is Unknown() or isinstance(v, Unknown):
        return "unknown"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"(frac {v.numerator} {v.denominator})"
    if isinstance(v, Field):
        return v.desc()
    if isinstance(v, FieldElem):
        return f"(in {v.field.desc()} {v.field.fmt(v.raw)})"
    if isinstance(v, GWForm):
        return f"(over {v.field.desc()} {v.to_expr()})"
    if isinstance(v, MWElement):
        return f"(over {v.field.desc()} {v.to_expr()})"
    if isinstance(v, TwistedMW):
        return f"(over {v.field.desc()} {show_twisted(v)})"
    if isinstance(v, PL.Place):
        return show_place(v)
    if isinstance(v, (RS.Scheme, EtaleScheme)):
        return show_scheme(v)
    if isinstance(v, RS.Line):
        return show_line(v)
    if isinstance(v, C.Cycle):
        supp = " ".join(_show_label(p) for p in sorted(v.support, key=C._key))
        body = "".join(f" (at {_show_label(p)} {n})" for p, n in v.coeffs)
        return f"(cycle {show_scheme(v.scheme)} :codim {v.codim} :support ({supp}){body})"
    if isinstance(v, C.CorrMW):
        W = v.source * v.target
        body = []
        for w, val in v.values:
            K = W.residue_field(w)
            roots = " ".join(K.fmt(r) for r in w.roots)
            body.append(f" (at (pt {' '.join(map(str, w.choice))} :degree {w.degree} :roots ({roots})) "
                        f"{val.form.to_expr()})")
        return f"(corr-mw {show_scheme(v.source)} {show_scheme(v.target)}{''.join(body)})"
    if isinstance(v, RS.RSElement):
        lines = " ".join(show_line(l) for l in v.lines)
        body = "".join(f" (at {_show_label(p)} {show_twisted(t)})" for p, t in v.components)
        return (f"(rs-element {show_scheme(v.scheme)} :codim {v.codim} :lines ({lines}) "
                f":sign {v.sign}{body})")
    if isinstance(v, AbelianGroup):
        return f'(group "{v}")'
    if isinstance(v, Report):
        return v.line()
    if isinstance(v, (list, tuple)):
        return "(list" + "".join(" " + show(x) for x in v) + ")"
    if isinstance(v, RS.RSComplexFG):
        lines = " ".join(show_line(l) for l in v.lines)
        return (f"(rs-complex {show_scheme(v.scheme)} :kmw {v.m} :twist ({lines}) "
                f":degree {v.max_degree} :sign {v.sign})")
    if isinstance(v, T.Diagram):
        return f"(diagram-value {v.name or 'anonymous'})"
    raise TypeMismatch(f"no printed form for {type(v).__name__}")


def result_line(v) -> str:
    if isinstance(v, Report):
        return v.line()
    if isinstance(v, T.CommuteReport):
        return str(v)
    return f"value = {show(v)}"


# ===========================================================================
# Evaluation
# ===========================================================================


@dataclass
class Session:
    bindings: dict = field(default_factory=dict)
    field: Field = None
    seed: int = 0

    def __post_init__(self):
        if self.field is None:
            self.field = RationalField()
        self.rng = random.Random(self.seed)

    def run(self, text) -> list:
        """Evaluate every top-level form; returns the values."""
        return [self.eval(n) for n in parse_all(text)]

    def eval_text(self, text):
        return self.eval(parse(text))

    def eval(self, node: Node):
        return Evaluator(self).eval(node, self.field)


BUILTINS: dict = {}


def builtin(*names):
    def deco(fn):
        for n in names:
            BUILTINS[n] = fn
        return fn
    return deco


class Evaluator:
    def __init__(self, session: Session):
        self.s = session

    # helpers -----------------------------------------------------------
    def eval(self, node: Node, F):
        try:
            return self._eval(node, F)
        except ParseError:
            raise
        except MWCalcError as exc:
            if not getattr(exc, "line", None):
                exc.line = node.line
            raise

    def _eval(self, node, F):
        if node.kind == "int":
            return node.value
        if node.kind == "str":
            return node.value
        if node.kind == "kw":
            raise TypeMismatch(f"keyword :{node.value} outside an argument list")
        if node.kind == "sym":
            name = node.value
            if name in self.s.bindings:
                return self.s.bindings[name]
            if name in ("true", "false"):
                return name == "true"
            if name == "unknown":
                return Unknown()
            if name == "t" and isinstance(F, FunctionField):
                return FieldElem(F, F.make((F.base.zero, F.base.one)))
            raise UnboundName(f"unbound name {name!r}")
        head = node.head
        if head is None:
            raise TypeMismatch("the head of an application must be a name")
        fn = BUILTINS.get(head)
        if fn is None:
            raise UnknownSymbol(f"unknown operator {head!r}")
        return fn(self, node, F)

    def split(self, node):
        """Positional arguments and keyword arguments (keyword -> node or True)."""
        pos, kw = [], {}
        items = list(node.args)
        i = 0
        while i < len(items):
            it = items[i]
            if it.kind == "kw":
                if i + 1 < len(items) and items[i + 1].kind != "kw":
                    kw[it.value] = items[i + 1]
                    i += 2
                else:
                    kw[it.value] = True
                    i += 1
            else:
                pos.append(it)
                i += 1
        return pos, kw

    def need_field(self, F):
        if F is None:
            raise TypeMismatch("no active field; wrap the form in (over FIELD ...)")
        return F

    def field_of(self, node, F):
        v = self.eval(node, F)
        if not isinstance(v, Field):
            raise TypeMismatch(f"expected a field, got {show_type(v)}")
        return v

    def elem(self, node, F):
        """Raw element of F described by a node."""
        F = self.need_field(F)
        if node.kind == "int":
            return F.from_int(node.value)
        if node.kind == "sym" and node.value == "t" and isinstance(F, FunctionField) \
                and "t" not in self.s.bindings:
            return F.make((F.base.zero, F.base.one))
        if node.kind == "list":
            h = node.head
            if h == "frac":
                a, b = (self.int_arg(x) for x in node.args)
                return F.coerce(Fraction(a, b))
            if h == "elt" and isinstance(F, ExtensionField):
                return F.from_poly(tuple(self.elem(x, F.base) for x in node.args))
            if h == "poly" and isinstance(F, FunctionField):
                return F.make(self.poly(node, F.base))
            if h == "rf" and isinstance(F, FunctionField):
                num, den = node.args
                return F.make(self.poly(num, F.base), self.poly(den, F.base))
        v = self.eval(node, F)
        if isinstance(v, FieldElem):
            return F.coerce(v)
        if isinstance(v, (int, Fraction)):
            return F.coerce(v)
        raise TypeMismatch(f"expected an element of {F.desc()}, got {show_type(v)}")

    def poly(self, node, B):
        if node.head != "poly":
            raise TypeMismatch("expected (poly c0 c1 ...)")
        return P.trim(B, tuple(self.elem(x, B) for x in node.args))

    def int_arg(self, node):
        if node.kind != "int":
            v = self.eval(node, None)
            if not isinstance(v, int) or isinstance(v, bool):
                raise TypeMismatch(f"expected an integer, got {show_type(v)}")
            return v
        return node.value

    def typed(self, node, F, *types):
        v = self.eval(node, F)
        if not isinstance(v, types):
            raise TypeMismatch(f"expected {' or '.join(t.__name__ for t in types)}, got {show_type(v)}")
        return v

    def arity(self, node, n, m=None):
        k = len(node.args)
        if k < n or (m is not None and k > m):
            want = str(n) if m == n else f"{n}..{'' if m is None else m}"
            raise TypeMismatch(f"{node.head} takes {want} arguments, got {k}")


def show_type(v):
    return type(v).__name__


# ---------------------------------------------------------------------------
# Session control
# ---------------------------------------------------------------------------


@builtin("let")
def _let(ev, node, F):
    ev.arity(node, 2, 2)
    name = node.args[0]
    if name.kind != "sym":
        raise TypeMismatch("let binds a name")
    v = ev.eval(node.args[1], F)
    ev.s.bindings[name.value] = v
    return v


@builtin("over")
def _over(ev, node, F):
    ev.arity(node, 2)
    K = ev.field_of(node.args[0], F)
    out = None
    for x in node.args[1:]:
        out = ev.eval(x, K)
    return out


@builtin("field")
def _field(ev, node, F):
    ev.arity(node, 1, 1)
    ev.s.field = ev.field_of(node.args[0], F)
    return ev.s.field


@builtin("list")
def _list(ev, node, F):
    return tuple(ev.eval(x, F) for x in node.args)


@builtin("group")
def _group(ev, node, F):
    ev.arity(node, 1, 1)
    text = ev.typed(node.args[0], F, str)
    free, tors = 0, []
    if text != "0":
        for part in text.split(" + "):
            if part == "Z":
                free += 1
            elif part.startswith("Z/"):
                tors.append(int(part[2:]))
            else:
                raise TypeMismatch(f"bad group {text!r}")
    return AbelianGroup(free, tuple(tors))


# ---------------------------------------------------------------------------
# Fields and elements
# ---------------------------------------------------------------------------


@builtin("fp")
def _fp(ev, node, F):
    ev.arity(node, 1, 1)
    return PrimeField(ev.int_arg(node.args[0]))


@builtin("gf")
def _gf(ev, node, F):
    ev.arity(node, 2, 2)
    p, n = (ev.int_arg(x) for x in node.args)
    PrimeField(p)
    return finite_field(p, n)


@builtin("q")
def _q(ev, node, F):
    if not node.args:
        return RationalField()
    # (q a): the unit a of the active field as a one-term form
    ev.arity(node, 1, 1)
    F = ev.need_field(F)
    return GWForm.bracket(F, ev.elem(node.args[0], F))


@builtin("qreal")
def _qreal(ev, node, F):
    ev.arity(node, 0, 0)
    return RationalField(real=True)


@builtin("ext")
def _ext(ev, node, F):
    ev.arity(node, 2, 2)
    B = ev.field_of(node.args[0], F)
    return ExtensionField(B, ev.poly(node.args[1], B))


@builtin("fnfield")
def _fnfield(ev, node, F):
    ev.arity(node, 1, 1)
    return RS._function_field(ev.field_of(node.args[0], F))


@builtin("in")
def _in(ev, node, F):
    ev.arity(node, 2, 2)
    K = ev.field_of(node.args[0], F)
    return FieldElem(K, ev.elem(node.args[1], K))


@builtin("frac")
def _frac(ev, node, F):
    ev.arity(node, 2, 2)
    a, b = (ev.int_arg(x) for x in node.args)
    if F is None:
        return Fraction(a, b)
    return FieldElem(F, F.coerce(Fraction(a, b)))


@builtin("elt", "rf")
def _elt(ev, node, F):
    F = ev.need_field(F)
    return FieldElem(F, ev.elem(node, F))


@builtin("square-class")
def _square_class(ev, node, F):
    ev.arity(node, 1, 1)
    F = ev.need_field(F)
    return FieldElem(F, F.square_class(ev.elem(node.args[0], F)))


@builtin("factor")
def _factor(ev, node, F):
    ev.arity(node, 1, 1)
    F = ev.need_field(F)
    lead, pairs = factor(F, ev.poly(node.args[0], F))
    parts = " ".join(f"(pow (poly {' '.join(F.fmt(c) for c in g)}) {e})" for g, e in pairs)
    return Report((("lead", F.fmt(lead)), ("factors", f"({parts})")))


@builtin("place")
def _place(ev, node, F):
    ev.arity(node, 2, 2)
    B = ev.field_of(node.args[0], F)
    if isinstance(B, FunctionField):
        B = B.base
    K = RS._function_field(B)
    arg = node.args[1]
    if arg.kind == "sym" and arg.value == "inf":
        return PL.infinite_place(K)
    return PL.Place(K, ev.poly(arg, B))


@builtin("valuation")
def _valuation(ev, node, F):
    ev.arity(node, 2, 2)
    z = ev.typed(node.args[1], F, PL.Place)
    K = z.field
    return PL.valuation(K, ev.elem(node.args[0], K), z)


@builtin("residue-field")
def _residue_field(ev, node, F):
    ev.arity(node, 1, 1)
    return PL.residue_field(ev.typed(node.args[0], F, PL.Place))


# ---------------------------------------------------------------------------
# Grothendieck-Witt
# ---------------------------------------------------------------------------


def _gw_item(ev, item, F):
    if item.head in ("cls", "q"):
        ev.arity(item, 1, 1)
        return GWForm.bracket(F, ev.elem(item.args[0], F))
    if item.head == "neg":
        ev.arity(item, 1, 1)
        return -_gw_item(ev, item.args[0], F)
    if item.kind == "int":
        return GWForm.bracket(F, F.from_int(item.value))
    v = ev.eval(item, F)
    if isinstance(v, GWForm):
        return v
    if isinstance(v, FieldElem):
        return GWForm.bracket(F, F.coerce(v))
    raise TypeMismatch(f"expected a form term, got {show_type(v)}")


@builtin("gw")
def _gw(ev, node, F):
    F = ev.need_field(F)
    pos, kw = ev.split(node)
    x = GWForm.zero(F)
    for item in pos:
        x = x + _gw_item(ev, item, F)
    if "offset" in kw:
        x = x - GWForm.integer(F, ev.int_arg(kw["offset"]))
    return x


@builtin("cls")
def _cls(ev, node, F):
    F = ev.need_field(F)
    return _gw_item(ev, node, F)


@builtin("h")
def _h(ev, node, F):
    ev.arity(node, 0, 0)
    return GWForm.hyperbolic(ev.need_field(F))


def _arith(ev, node, F, op):
    vals = [ev.eval(x, F) for x in node.args]
    if not vals:
        raise TypeMismatch(f"{node.head} needs arguments")
    vals = [_lift_int(v, vals, F) for v in vals]
    acc = vals[0]
    for v in vals[1:]:
        if type(v) is not type(acc):
            raise TypeMismatch(f"cannot combine {show_type(acc)} with {show_type(v)}")
        acc = op(acc, v)
    if isinstance(acc, MWElement):
        acc = M.mw_reduce(acc)
    return acc


def _lift_int(v, vals, F):
    if not isinstance(v, int):
        return v
    for w in vals:
        if isinstance(w, GWForm):
            return GWForm.integer(w.field, v)
        if isinstance(w, MWElement):
            return MWElement.integer(w.field, v)
    return v


@builtin("+", "gw-add", "mw-add")
def _plus(ev, node, F):
    return _arith(ev, node, F, lambda a, b: a + b)


@builtin("*", "gw-mul", "mw-mul")
def _times(ev, node, F):
    return _arith(ev, node, F, lambda a, b: a * b)


@builtin("-")
def _minus(ev, node, F):
    if len(node.args) == 1:
        v = ev.eval(node.args[0], F)
        return -v
    return _arith(ev, node, F, lambda a, b: a - b)


@builtin("rank")
def _rank(ev, node, F):
    ev.arity(node, 1, 1)
    return ev.typed(node.args[0], F, GWForm).rank


@builtin("disc")
def _disc(ev, node, F):
    ev.arity(node, 1, 1)
    x = ev.typed(node.args[0], F, GWForm)
    return FieldElem(x.field, x.disc)


@builtin("signature")
def _signature(ev, node, F):
    ev.arity(node, 1, 1)
    x = ev.typed(node.args[0], F, GWForm)
    if x.signature is None:
        raise TypeMismatch(f"no signature over {x.field.desc()}")
    return x.signature


@builtin("normalize")
def _normalize(ev, node, F):
    ev.arity(node, 1, 1)
    x = ev.typed(node.args[0], F, GWForm, MWElement)
    if isinstance(x, MWElement):
        return M.mw_reduce(x)
    y = G.normalize(x)
    items = [("rank", str(y.rank)), ("disc", y.field.fmt(y.disc))]
    if y.signature is not None:
        items.append(("signature", str(y.signature)))
    items.append(("form", show(y)))
    return Report(tuple(items))


def _verdict(v):
    return v if isinstance(v, bool) else Unknown()


@builtin("gw-eq")
def _gw_eq(ev, node, F):
    ev.arity(node, 2, 2)
    a, b = (ev.typed(x, F, GWForm) for x in node.args)
    return _verdict(G.gw_eq(a, b))


@builtin("witt-eq")
def _witt_eq(ev, node, F):
    ev.arity(node, 2, 2)
    a, b = (ev.typed(x, F, GWForm) for x in node.args)
    return _verdict(G.witt_eq(a, b))


@builtin("transfer")
def _transfer(ev, node, F):
    ev.arity(node, 1, 1)
    x = ev.typed(node.args[0], F, GWForm, MWElement)
    if isinstance(x, GWForm):
        return G.transfer(x)
    return M.mw_transfer(x)


@builtin("base-change")
def _base_change(ev, node, F):
    ev.arity(node, 2, 2)
    x = ev.eval(node.args[0], F)
    E = ev.field_of(node.args[1], F)
    if isinstance(x, GWForm):
        return G.base_change(x, E)
    if isinstance(x, C.CorrMW):
        return C.base_change_corr(x, E)
    raise TypeMismatch(f"cannot base change {show_type(x)}")


# ---------------------------------------------------------------------------
# Milnor-Witt K-theory
# ---------------------------------------------------------------------------


@builtin("mw")
def _mw(ev, node, F):
    F = ev.need_field(F)
    pos, kw = ev.split(node)
    x = MWElement.zero(F)
    for item in pos:
        x = x + _mw_value(ev, item, F)
    if "deg" in kw and not x.is_zero() and x.degrees() != [ev.int_arg(kw["deg"])]:
        raise TypeMismatch("terms do not have the declared degree")
    return x


def _mw_value(ev, node, F):
    v = ev.eval(node, F)
    if isinstance(v, MWElement):
        return v
    if isinstance(v, int):
        return MWElement.integer(F, v)
    if isinstance(v, GWForm):
        return MWElement.from_gw(v)
    raise TypeMismatch(f"expected an MW element, got {show_type(v)}")


@builtin("term")
def _term(ev, node, F):
    F = ev.need_field(F)
    pos, kw = ev.split(node)
    if not pos or pos[0].kind != "int":
        raise TypeMismatch("(term COEFF [:eta m] (sym a) ...)")
    m = ev.int_arg(kw["eta"]) if "eta" in kw else 0
    syms = []
    for s in pos[1:]:
        if s.head != "sym":
            raise TypeMismatch("term factors are (sym a)")
        syms.append(ev.elem(s.args[0], F))
    return MWElement.monomial(F, m, syms, pos[0].value)


@builtin("sym")
def _sym(ev, node, F):
    ev.arity(node, 1, 1)
    F = ev.need_field(F)
    return MWElement.sym(F, ev.elem(node.args[0], F))


@builtin("eta")
def _eta(ev, node, F):
    F = ev.need_field(F)
    args = list(node.args)
    m = 1
    if args and args[0].kind == "int":
        m = args.pop(0).value
    x = MWElement.eta(F, m)
    for a in args:
        x = x * _mw_value(ev, a, F)
    return x


@builtin("brk")
def _brk(ev, node, F):
    ev.arity(node, 1, 1)
    F = ev.need_field(F)
    return MWElement.bracket(F, ev.elem(node.args[0], F))


@builtin("eps")
def _eps(ev, node, F):
    ev.arity(node, 0, 0)
    return MWElement.epsilon(ev.need_field(F))


@builtin("mw-h")
def _mwh(ev, node, F):
    ev.arity(node, 0, 0)
    return MWElement.hyperbolic(ev.need_field(F))


@builtin("mw-reduce")
def _mw_reduce(ev, node, F):
    ev.arity(node, 1, 1)
    return M.mw_reduce(ev.typed(node.args[0], F, MWElement))


@builtin("mw-eq")
def _mw_eq(ev, node, F):
    ev.arity(node, 2, 2)
    a, b = (ev.typed(x, F, MWElement) for x in node.args)
    return _verdict(M.mw_eq(a, b))


@builtin("gw-image")
def _gw_image(ev, node, F):
    ev.arity(node, 1, 1)
    return M.gw_image(ev.typed(node.args[0], F, MWElement))


@builtin("residue")
def _residue(ev, node, F):
    pos, kw = ev.split(node)
    if len(pos) != 2:
        raise TypeMismatch("(residue X PLACE [:uniformizer u])")
    z = ev.typed(pos[1], F, PL.Place)
    K = z.field
    x = ev.typed(pos[0], K, MWElement)
    u = ev.elem(kw["uniformizer"], K) if "uniformizer" in kw else None
    return M.residue(x, z, u)


@builtin("twisted")
def _twisted(ev, node, F):
    F = ev.need_field(F)
    if not node.args:
        raise TypeMismatch("(twisted ELEMENT (tw LABEL PARITY SCALE) ...)")
    x = _mw_value(ev, node.args[0], F)
    factors = []
    for t in node.args[1:]:
        if t.head != "tw" or len(t.args) != 3 or t.args[0].kind != "sym":
            raise TypeMismatch("twist factors are (tw LABEL PARITY SCALE)")
        factors.append(TwistFactor(t.args[0].value, ev.int_arg(t.args[1]) % 2, ev.elem(t.args[2], F)))
    return TwistedMW(x, tuple(factors))


# ---------------------------------------------------------------------------
# Twists
# ---------------------------------------------------------------------------


def _diagram(ev, node):
    bundles, seqs, isos = {}, {}, {}
    source, path1, path2 = (), None, None
    name = ""
    for part in node.args:
        h = part.head
        if h == "decl":
            for d in part.args:
                _declare(ev, d, bundles, seqs, isos)
        elif h == "source":
            source = T.expr(*(_entry(ev, e, bundles) for e in part.args))
        elif h in ("path1", "path2"):
            word = tuple(_generator(ev, g, bundles, seqs, isos) for g in part.args)
            if h == "path1":
                path1 = word
            else:
                path2 = word
        elif h == "name":
            name = part.args[0].value
        else:
            raise TypeMismatch(f"unexpected diagram part {print_node(part)}")
    if path1 is None or path2 is None:
        raise TypeMismatch("a diagram needs (path1 ...) and (path2 ...)")
    return T.Diagram(source, path1, path2, name)


def _declare(ev, d, bundles, seqs, isos):
    h = d.head
    a = d.args
    if h == "bundle":
        bundles[a[0].value] = T.BundleSym(a[0].value, ev.int_arg(a[1]))
    elif h == "seq":
        sub, tot, quo = (bundles[x.value] for x in a[1:4])
        seqs[a[0].value] = T.ExactSeq(sub, tot, quo, a[0].value)
    elif h == "iso":
        isos[a[0].value] = T.DeclaredIso(bundles[a[1].value], bundles[a[2].value], a[0].value)
    else:
        raise UnknownSymbol(f"unknown declaration {h!r}")


def _entry(ev, e, bundles):
    if e.head == "neg":
        return (-1, _bundle(e.args[0], bundles))
    return (1, _bundle(e, bundles))


def _bundle(n, bundles):
    if n.kind == "int" and n.value == 0:
        return T.ZERO
    if n.kind != "sym" or n.value not in bundles:
        raise UnboundName(f"undeclared bundle {print_node(n)}")
    return bundles[n.value]


def _generator(ev, g, bundles, seqs, isos):
    h = g.head
    pos, kw = ev.split(g)
    ints = [ev.int_arg(x) for x in pos if x.kind == "int"]
    if h == "swap":
        return T.Swap(*ints)
    if h == "assoc":
        return T.Assoc(*ints)
    if h == "unit":
        return T.Unit(ints[0], remove="remove" in kw)
    if h == "cancel":
        return T.Cancel(ints[0])
    if h == "sigma":
        return T.Sigma(seqs[pos[0].value], ev.int_arg(pos[1]), negative="neg" in kw, inverse="inv" in kw)
    if h == "insert":
        return T.Insert(ev.int_arg(pos[0]), _bundle(pos[1], bundles), negative_first="neg-first" in kw)
    if h == "iso":
        return T.Iso(isos[pos[0].value], ev.int_arg(pos[1]), inverse="inv" in kw)
    raise UnknownSymbol(f"unknown generator {h!r}")


@builtin("diagram")
def _diagram_b(ev, node, F):
    return _diagram(ev, node)


@builtin("four-diagram")
def _four(ev, node, F):
    if not node.args:
        raise TypeMismatch("(four-diagram CASE RANK ...)")
    case = ev.int_arg(node.args[0])
    ranks = [ev.int_arg(x) for x in node.args[1:]]
    return T.four_diagram(case, ranks, ev.s.rng)


@builtin("check-commutes")
def _check_commutes(ev, node, F):
    ev.arity(node, 1, 1)
    d = ev.typed(node.args[0], F, T.Diagram)
    r = T.check_commutes(d)
    sign = f"{r.sign:+d}" if isinstance(r.sign, int) else str(r.sign)
    return Report((("commutes", str(r.commutes).lower()), ("sign", sign)))


# ---------------------------------------------------------------------------
# Schemes and Rost-Schmid complexes
# ---------------------------------------------------------------------------


@builtin("affine-line", "gm", "proj-line")
def _curve(ev, node, F):
    ev.arity(node, 1, 1)
    return RS.Scheme(node.head, ev.field_of(node.args[0], F))


@builtin("point")
def _point(ev, node, F):
    ev.arity(node, 1)
    B = ev.field_of(node.args[0], F)
    fields = tuple(ev.field_of(x, F) for x in node.args[1:])
    return RS.point(B, *fields)


def _label(ev, n, F):
    if n.kind == "int":
        return n.value
    if n.kind == "sym":
        return n.value
    if n.head == "generic":
        return RS.GENERIC
    return ev.typed(n, F, PL.Place)


@builtin("point-scheme")
def _point_scheme(ev, node, F):
    ev.arity(node, 1)
    B = ev.field_of(node.args[0], F)
    labels, fields = [], []
    for c in node.args[1:]:
        if c.head != "comp" or len(c.args) != 2:
            raise TypeMismatch("components are (comp LABEL FIELD)")
        labels.append(_label(ev, c.args[0], F))
        fields.append(ev.field_of(c.args[1], F))
    return RS.Scheme("point", B, tuple(fields), tuple(labels))


@builtin("line")
def _line(ev, node, F):
    ev.arity(node, 4, 4)
    label, kind = node.args[0].value, node.args[1].value
    return RS.Line(str(label), kind, ev.int_arg(node.args[2]), ev.int_arg(node.args[3]))


@builtin("O")
def _O(ev, node, F):
    ev.arity(node, 1, 1)
    return RS.O(ev.int_arg(node.args[0]))


@builtin("omega")
def _omega(ev, node, F):
    ev.arity(node, 0, 0)
    return RS.omega()


@builtin("trivial")
def _trivial(ev, node, F):
    ev.arity(node, 0, 1)
    label = node.args[0].value if node.args else "L"
    return RS.Line(str(label), "trivial")


def _lines(ev, n, F):
    if n.kind == "list" and (n.head is None or n.head not in ("O", "omega", "trivial", "line")):
        return tuple(ev.typed(x, F, RS.Line) for x in n.value)
    v = ev.eval(n, F)
    if isinstance(v, RS.Line):
        return (v,)
    if isinstance(v, tuple) and all(isinstance(x, RS.Line) for x in v):
        return v
    raise TypeMismatch(f"expected twist lines, got {show_type(v)}")


@builtin("rs-complex")
def _rs_complex(ev, node, F):
    pos, kw = ev.split(node)
    if len(pos) != 1 or "kmw" not in kw:
        raise TypeMismatch("(rs-complex SCHEME :kmw m [:twist LINES] [:degree d] [:sign s])")
    X = ev.typed(pos[0], F, RS.Scheme)
    lines = _lines(ev, kw["twist"], F) if "twist" in kw else ()
    d = ev.int_arg(kw["degree"]) if "degree" in kw else 1
    sign = ev.int_arg(kw["sign"]) if "sign" in kw else 1
    return RS.rs_complex(X, ev.int_arg(kw["kmw"]), lines, d, sign)


@builtin("cohomology")
def _cohomology(ev, node, F):
    ev.arity(node, 1, 1)
    cx = ev.typed(node.args[0], F, RS.RSComplexFG)
    return Report(tuple((f"H{i}", str(g)) for i, g in enumerate(cx.cohomology())))


@builtin("rs-element")
def _rs_element(ev, node, F):
    pos, kw = ev.split(node)
    X = ev.typed(pos[0], F, RS.Scheme)
    codim = ev.int_arg(kw.get("codim")) if "codim" in kw else 0
    lines = _lines(ev, kw["lines"], F) if "lines" in kw else ()
    sign = ev.int_arg(kw["sign"]) if "sign" in kw else 1
    comps = []
    for c in pos[1:]:
        if c.head != "at" or len(c.args) != 2:
            raise TypeMismatch("components are (at POINT VALUE)")
        pt = _label(ev, c.args[0], F)
        k = X.residue_field_at(pt)
        val = ev.eval(c.args[1], k)
        if isinstance(val, MWElement):
            val = TwistedMW(val, ())
        if not isinstance(val, TwistedMW):
            raise TypeMismatch("component values are MW elements")
        comps.append((pt, val))
    return RS.RSElement.make(X, codim, comps, lines, sign)


@builtin("differential")
def _differential(ev, node, F):
    ev.arity(node, 1, 1)
    return RS.differential(ev.typed(node.args[0], F, RS.RSElement))


@builtin("reciprocity")
def _reciprocity(ev, node, F):
    ev.arity(node, 1, 1)
    return RS.reciprocity_sum(ev.typed(node.args[0], F, RS.RSElement))


# ---------------------------------------------------------------------------
# Correspondences
# ---------------------------------------------------------------------------


@builtin("scheme0")
def _scheme0(ev, node, F):
    ev.arity(node, 1)
    B = ev.field_of(node.args[0], F)
    atoms, names = [], []
    for a in node.args[1:]:
        if a.head != "etale":
            raise TypeMismatch("atoms are (etale [:name N] (poly ...) ...)")
        pos, kw = ev.split(a)
        names.append(kw["name"].value if "name" in kw else f"X{len(names)}")
        atoms.append(tuple(ev.poly(p, B) for p in pos))
    return EtaleScheme(B, tuple(atoms), tuple(names))


@builtin("spec-degrees")
def _spec_degrees(ev, node, F):
    from .etale import spec_of_degrees

    ev.arity(node, 2)
    B = ev.field_of(node.args[0], F)
    return spec_of_degrees(B, [ev.int_arg(x) for x in node.args[1:]])


@builtin("corr-mw")
def _corr_mw(ev, node, F):
    ev.arity(node, 2)
    X = ev.typed(node.args[0], F, EtaleScheme)
    Y = ev.typed(node.args[1], F, EtaleScheme)
    W = X * Y
    vals = {}
    for c in node.args[2:]:
        if c.head != "at" or len(c.args) != 2 or c.args[0].head != "pt":
            raise TypeMismatch("values are (at (pt CHOICE ... :degree d :roots (r ...)) FORM)")
        pos, kw = ev.split(c.args[0])
        choice = tuple(ev.int_arg(x) for x in pos)
        K = finite_field(X.p, ev.int_arg(kw["degree"]))
        roots = tuple(ev.elem(r, K) for r in kw["roots"].value)
        w = EPoint(choice, roots, K.degree)
        if w not in W.points:
            raise TypeMismatch("not a point of the product (roots must be the orbit representative)")
        form = ev.typed(c.args[1], K, GWForm)
        vals[w] = Twisted0(form)
    return C.CorrMW.make(X, Y, vals)


@builtin("identity")
def _identity(ev, node, F):
    ev.arity(node, 1, 1)
    return C.identity_corr(ev.typed(node.args[0], F, EtaleScheme))


@builtin("compose")
def _compose(ev, node, F):
    ev.arity(node, 2, 2)
    a = ev.typed(node.args[0], F, C.CorrMW)
    b = ev.typed(node.args[1], F, C.CorrMW)
    try:
        return C.compose(a, b)
    except SchemeMismatch as exc:
        raise TypeMismatch(f"cannot compose: {exc}") from None


@builtin("exterior")
def _exterior(ev, node, F):
    ev.arity(node, 2, 2)
    a, b = (ev.typed(x, F, C.CorrMW) for x in node.args)
    return C.exterior(a, b)


@builtin("transpose")
def _transpose(ev, node, F):
    ev.arity(node, 1, 1)
    return C.transpose(ev.typed(node.args[0], F, C.CorrMW))


@builtin("corr-eq")
def _corr_eq(ev, node, F):
    ev.arity(node, 2, 2)
    a, b = (ev.typed(x, F, C.CorrMW) for x in node.args)
    return C.corr_eq(a, b)


@builtin("cycle")
def _cycle(ev, node, F):
    pos, kw = ev.split(node)
    X = ev.typed(pos[0], F, RS.Scheme)
    codim = ev.int_arg(kw["codim"]) if "codim" in kw else 0
    coeffs = {}
    for c in pos[1:]:
        if c.head != "at" or len(c.args) != 2:
            raise TypeMismatch("cycle entries are (at POINT n)")
        coeffs[_label(ev, c.args[0], F)] = ev.int_arg(c.args[1])
    support = None
    if "support" in kw:
        support = {_label(ev, x, F) for x in kw["support"].value}
    return C.Cycle.make(X, codim, coeffs, support)


@builtin("ch-product")
def _ch_product(ev, node, F):
    ev.arity(node, 2, 2)
    a, b = (ev.typed(x, F, C.Cycle) for x in node.args)
    return C.ch_product(a, b)


@builtin("fundamental")
def _fundamental(ev, node, F):
    ev.arity(node, 1, 1)
    return C.fundamental(ev.typed(node.args[0], F, RS.Scheme))


@builtin("laws")
def _laws(ev, node, F):
    from .laws import run_laws

    pos, kw = ev.split(node)
    if len(pos) != 1:
        raise TypeMismatch('(laws "SUITE" [:seed n] [:cases n])')
    suite = pos[0].value
    seed = ev.int_arg(kw["seed"]) if "seed" in kw else ev.s.seed
    cases = ev.int_arg(kw["cases"]) if "cases" in kw else 300
    r = run_laws(str(suite), seed, cases)
    bad = sum(b for _, _, b in r.laws)
    return Report((("suite", r.suite), ("cases", str(cases)), ("failures", str(bad)),
                   ("status", "pass" if r.passed else "fail")))


# ===========================================================================
# Convenience
# ===========================================================================


def evaluate(text: str, field_: Field = None, seed: int = 0):
    """Evaluate one form in a fresh session."""
    return Session(field=field_, seed=seed).eval_text(text)

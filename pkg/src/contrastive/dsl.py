"""Bundle files: models, contexts, epistemic states, hypotheses and queries.

A bundle looks like::

    model M {
      exogenous U : {0, 1};
      var R : {0, 1};
      fn R(U) = table { (0) -> 0; default -> 1; };
      var S : bool;
      fn S(R) = R == 0;
    }
    context u of M { U = 1; }
    query q = cause in (M, u) event S=false;

`print_bundle` writes the canonical form; parsing its output gives back an
equal bundle.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .formula import TRUE, And, Atom, Intervene, Not, Or, Top, bind
from .model import (CausalModel, Context, ModelError, StructuralFunction, Variable,
                    override_functions, validate_model)

KEYWORDS = {"model", "extends", "exogenous", "var", "fn", "table", "default", "context", "of",
            "state", "where", "situations", "hypotheses", "function", "query", "bool", "true",
            "false", "if", "then", "else", "and", "or", "not", "max", "min"}

CLAUSES = ("in", "vs", "fact", "foil", "surrogate", "event", "events", "state", "contrast-state",
           "actual", "contrast-actual", "hypotheses", "route")
FORMULA_CLAUSES = {"fact", "foil", "surrogate", "event", "events"}
SITUATION_CLAUSES = {"in", "vs"}

QUERY_KINDS = ("eval", "cause", "sufficient", "restricted", "alt-cause", "cong-cause",
               "cong-cause-general", "presupposed", "explain", "alt-explain", "cong-explain",
               "general-explain", "general-alt-explain", "general-cong-explain")

MAX_TABLE_ROWS = 10 ** 6


class DSLError(ValueError):
    def __init__(self, message, line=None, col=None):
        loc = f"{line}:{col}: " if line is not None else ""
        super().__init__(loc + message)
        self.line, self.col = line, col


# tokens ----------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*|\#[^\n]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<op>\.\.|<-|->|==|!=|<=|>=|[{}()\[\],;:=<>&|!^+\-])
  | (?P<name>[A-Za-z_'][A-Za-z0-9_'.]*(?:-[A-Za-z][A-Za-z0-9_'.]*)*|[0-9][A-Za-z0-9_'.]*)
""", re.X)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        s = m.group()
        if kind == "name" and ".." in s:
            # split ranges such as 0..8
            head = s[:s.index("..")]
            toks.append(Tok("name", head, line, pos - start + 1))
            pos += len(head)
            continue
        if kind != "ws":
            if kind == "str":
                s = re.sub(r"\\(.)", r"\1", s[1:-1])
            toks.append(Tok(kind, s, line, pos - start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - start + 1))
    return toks


# bundle ------------------------------------------------------------------------------

@dataclass(frozen=True)
class ContextDecl:
    model: str
    context: Context


@dataclass(frozen=True)
class StateDecl:
    """``kind`` is contexts (names), where (formula) or situations (items)."""

    kind: str
    model: str | None = None
    contexts: tuple = ()
    formula: object = None
    items: tuple = ()  # ((model, context-name) | (model, formula))


@dataclass(frozen=True)
class HypothesisDecl:
    formula: object = None
    label: str | None = None
    function: tuple | None = None  # (variable, model)


@dataclass(frozen=True)
class Query:
    kind: str
    clauses: tuple  # ((clause, value), ...) in canonical clause order


@dataclass
class Bundle:
    models: dict = field(default_factory=dict)
    contexts: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)
    queries: dict = field(default_factory=dict)

    def __eq__(self, other):
        return isinstance(other, Bundle) and all(
            getattr(self, k) == getattr(other, k)
            for k in ("models", "contexts", "states", "hypotheses", "queries"))


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0
        self.bundle = Bundle()
        self.domains = None   # variable -> domain while parsing an fn body

    # token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        t = tok or self.tok
        return DSLError(msg, t.line, t.col)

    def at(self, text):
        return self.tok.kind in ("op", "name") and self.tok.text == text

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        t = self.tok
        self.i += 1
        return t

    def name(self, what="name"):
        t = self.tok
        if t.kind not in ("name", "str"):
            raise self.error(f"expected {what}, got {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def value(self):
        t = self.tok
        if t.kind == "op" and t.text == "-" and self.peek().kind == "name":
            self.i += 2
            return "-" + self.toks[self.i - 1].text
        return self.name("value")

    # top level
    def parse(self):
        while self.tok.kind != "eof":
            t = self.tok
            if self.accept("model"):
                self.model(t)
            elif self.accept("context"):
                self.context(t)
            elif self.accept("state"):
                self.state(t)
            elif self.accept("hypotheses"):
                self.hypotheses(t)
            elif self.accept("query"):
                self.query(t)
            else:
                raise self.error(f"expected a declaration, got {t.text!r}")
        return self.bundle

    def _fresh(self, table, name, t, kind):
        if name in table:
            raise self.error(f"duplicate {kind} {name!r}", t)

    # models
    def domain(self):
        if self.accept("bool"):
            return ("false", "true")
        self.expect("{")
        vals = [self.value()]
        if self.accept(".."):
            lo_t = self.toks[self.i - 2]
            hi = self.value()
            try:
                lo_i, hi_i = int(vals[0]), int(hi)
            except ValueError:
                raise self.error("range bounds must be integers", lo_t) from None
            if hi_i < lo_i:
                raise self.error("empty range", lo_t)
            vals = [str(v) for v in range(lo_i, hi_i + 1)]
        else:
            while self.accept(","):
                vals.append(self.value())
        self.expect("}")
        if len(set(vals)) != len(vals):
            raise self.error("duplicate value in domain")
        return tuple(vals)

    def model(self, start):
        name_t = self.tok
        name = self.name("model name")
        self._fresh(self.bundle.models, name, name_t, "model")
        base = None
        if self.accept("extends"):
            bt = self.tok
            bname = self.name("model name")
            if bname not in self.bundle.models:
                raise self.error(f"unknown model {bname!r}", bt)
            base = self.bundle.models[bname]
        self.expect("{")
        variables, fns, fn_toks = {}, {}, {}
        var_toks = {}
        if base is not None:
            variables = {v.name: v for v in base.variables}
        pending = []
        while not self.accept("}"):
            t = self.tok
            if self.accept("exogenous") or self.accept("var"):
                exo = t.text == "exogenous"
                vt = self.tok
                vname = self.name("variable name")
                if vname in var_toks:
                    raise self.error(f"duplicate variable {vname!r}", vt)
                self.expect(":")
                dom = self.domain()
                self.expect(";")
                variables[vname] = Variable(vname, dom, exo)
                var_toks[vname] = vt
            elif self.accept("fn"):
                pending.append(self.fn_header())
            else:
                raise self.error(f"expected exogenous, var or fn, got {t.text!r}")
        for target, parents, body, t in pending:
            fns[target] = self.compile_fn(target, parents, body, variables, t)
            fn_toks[target] = t
        if base is None:
            model = CausalModel(variables.values(), fns.values())
        else:
            try:
                keep = {f.target: f for f in base.functions if variables[f.target] == base.var(f.target)}
                keep.update(fns)
                model = CausalModel(variables.values(), keep.values())
            except ModelError as e:
                raise self.error(str(e), start) from None
        report = validate_model(model)
        if not report.ok:
            raise self.error(f"invalid model {name}: " + "; ".join(report.errors), name_t)
        self.bundle.models[name] = model

    def fn_header(self):
        t = self.tok
        target = self.name("variable name")
        self.expect("(")
        parents = []
        if not self.at(")"):
            parents.append(self.name("parent"))
            while self.accept(","):
                parents.append(self.name("parent"))
        self.expect(")")
        self.expect("=")
        if self.accept("table"):
            body = ("table", self.table_body())
        else:
            et = self.tok
            body = ("expr", self.expr(), et)
        self.expect(";")
        return target, tuple(parents), body, t

    def table_body(self):
        self.expect("{")
        rows, default = [], None
        while not self.accept("}"):
            rt = self.tok
            if self.accept("default"):
                self.expect("->")
                if default is not None:
                    raise self.error("duplicate default row", rt)
                default = self.value()
            else:
                self.expect("(")
                key = []
                if not self.at(")"):
                    key.append(self.value())
                    while self.accept(","):
                        key.append(self.value())
                self.expect(")")
                self.expect("->")
                rows.append((tuple(key), self.value(), rt))
            self.expect(";")
        return rows, default

    def compile_fn(self, target, parents, body, variables, t):
        if target not in variables:
            raise self.error(f"fn for undeclared variable {target!r}", t)
        if variables[target].exogenous:
            raise self.error(f"exogenous variable {target!r} cannot have a function", t)
        for p in parents:
            if p not in variables:
                raise self.error(f"F_{target}: unknown parent {p!r}", t)
        if body[0] == "table":
            rows, default = body[1]
            seen = {}
            for key, val, rt in rows:
                if len(key) != len(parents):
                    raise self.error(f"F_{target}: row has {len(key)} values, expected {len(parents)}", rt)
                if key in seen:
                    raise self.error(f"F_{target}: duplicate row {key}", rt)
                for k, p in zip(key, parents):
                    if k not in variables[p].domain:
                        raise self.error(f"F_{target}: row value {k} outside domain of {p}", rt)
                if val not in variables[target].domain:
                    raise self.error(f"F_{target}: row {key} -> {val} outside domain of {target}", rt)
                seen[key] = val
            return StructuralFunction(target, parents, seen, default)
        expr, et = body[1], body[2]
        doms = [variables[p].domain for p in parents]
        size = 1
        for d in doms:
            size *= len(d)
        if size > MAX_TABLE_ROWS:
            raise self.error(f"F_{target}: expression expands to {size} rows (limit {MAX_TABLE_ROWS})", et)
        rows = {}
        out_dom = variables[target].domain
        for key in itertools.product(*doms):
            env = {p: _lit(v) for p, v in zip(parents, key)}
            try:
                val = _render(_evaluate(expr, env))
            except (TypeError, ValueError) as e:
                raise self.error(f"F_{target}: cannot evaluate at {key}: {e}", et) from None
            if val not in out_dom:
                raise self.error(f"F_{target}: value {val!r} at {key} outside domain {out_dom}", et)
            rows[key] = val
        return StructuralFunction(target, parents, rows, None, print_expr(expr))

    # expressions (function bodies)
    def expr(self):
        if self.accept("if"):
            c = self.expr()
            self.expect("then")
            a = self.expr()
            self.expect("else")
            b = self.expr()
            return ("if", c, a, b)
        return self.e_or()

    def e_or(self):
        left = self.e_and()
        while self.at("or") or self.at("|"):
            self.i += 1
            left = ("or", left, self.e_and())
        return left

    def e_and(self):
        left = self.e_not()
        while self.at("and") or self.at("&"):
            self.i += 1
            left = ("and", left, self.e_not())
        return left

    def e_not(self):
        if self.accept("not") or self.accept("!"):
            return ("not", self.e_not())
        return self.e_cmp()

    def e_cmp(self):
        left = self.e_add()
        for op in ("==", "!=", "<=", ">=", "<", ">", "="):
            if self.at(op):
                self.i += 1
                return ("==" if op == "=" else op, left, self.e_add())
        return left

    def e_add(self):
        left = self.e_atom()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = (op, left, self.e_atom())
        return left

    def e_atom(self):
        t = self.tok
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.at("max") or self.at("min"):
            fn = t.text
            self.i += 1
            self.expect("(")
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self.expect(")")
            return (fn, *args)
        if t.kind == "str":
            self.i += 1
            return ("lit", t.text)
        if t.kind == "name":
            self.i += 1
            return ("ref", t.text)
        raise self.error(f"expected an expression, got {t.text or 'end of input'!r}")

    # contexts, states, hypotheses
    def context(self, start):
        t = self.tok
        name = self.name("context name")
        self._fresh(self.bundle.contexts, name, t, "context")
        self.expect("of")
        mname = self.model_ref()
        model = self.bundle.models[mname]
        self.expect("{")
        assign = {}
        while not self.accept("}"):
            vt = self.tok
            var = self.name("variable")
            self.expect("=")
            val = self.value()
            self.expect(";")
            if not model.has(var) or not model.var(var).exogenous:
                raise self.error(f"{var!r} is not an exogenous variable of {mname}", vt)
            if val not in model.domain(var):
                raise self.error(f"{var}={val} outside domain {model.domain(var)}", vt)
            if var in assign:
                raise self.error(f"{var} assigned twice", vt)
            assign[var] = val
        missing = set(model.exogenous) - set(assign)
        if missing:
            raise self.error(f"context {name} leaves {sorted(missing)} unassigned", t)
        self.bundle.contexts[name] = ContextDecl(mname, Context(assign))

    def model_ref(self):
        t = self.tok
        name = self.name("model name")
        if name not in self.bundle.models:
            raise self.error(f"unknown model {name!r}", t)
        return name

    def context_ref(self, model=None):
        t = self.tok
        name = self.name("context name")
        if name not in self.bundle.contexts:
            raise self.error(f"unknown context {name!r}", t)
        if model is not None and self.bundle.contexts[name].model != model:
            raise self.error(f"context {name!r} is not a context of {model}", t)
        return name

    def state(self, start):
        t = self.tok
        name = self.name("state name")
        self._fresh(self.bundle.states, name, t, "state")
        if self.accept("of"):
            mname = self.model_ref()
            if self.accept("where"):
                ft = self.tok
                f = self.formula()
                self._bind(self.bundle.models[mname], f, ft)
                decl = StateDecl("where", mname, formula=f)
            else:
                self.expect("=")
                self.expect("{")
                names = [self.context_ref(mname)]
                while self.accept(","):
                    names.append(self.context_ref(mname))
                self.expect("}")
                decl = StateDecl("contexts", mname, contexts=tuple(names))
        else:
            self.expect("=")
            self.expect("situations")
            self.expect("{")
            items = []
            while True:
                if self.accept("("):
                    mname = self.model_ref()
                    self.expect(",")
                    items.append((mname, self.context_ref(mname)))
                    self.expect(")")
                else:
                    mname = self.model_ref()
                    self.expect("where")
                    ft = self.tok
                    f = self.formula()
                    self._bind(self.bundle.models[mname], f, ft)
                    items.append((mname, f))
                if not self.accept(","):
                    break
            self.expect("}")
            decl = StateDecl("situations", items=tuple(items))
        self.expect(";")
        self.bundle.states[name] = decl

    def hypotheses(self, start):
        t = self.tok
        name = self.name("hypothesis set name")
        self._fresh(self.bundle.hypotheses, name, t, "hypothesis set")
        self.expect("=")
        self.expect("{")
        items = []
        while not self.accept("}"):
            if self.accept("function"):
                vt = self.tok
                var = self.name("variable")
                self.expect("of")
                mname = self.model_ref()
                if not self.bundle.models[mname].has(var) or self.bundle.models[mname].var(var).exogenous:
                    raise self.error(f"{var!r} has no function in {mname}", vt)
                label = None
                if self.accept(":"):
                    label = self.name("label")
                items.append(HypothesisDecl(function=(var, mname), label=label))
            else:
                label = None
                if self.tok.kind == "str" and self.peek().text == ":":
                    label = self.tok.text
                    self.i += 2
                items.append(HypothesisDecl(formula=self.formula(), label=label))
            self.expect(";")
        self.expect(";")
        self.bundle.hypotheses[name] = tuple(items)

    # queries
    def query(self, start):
        t = self.tok
        name = self.name("query name")
        self._fresh(self.bundle.queries, name, t, "query")
        self.expect("=")
        kt = self.tok
        kind = self.name("query kind")
        if kind not in QUERY_KINDS:
            raise self.error(f"unknown query kind {kind!r}", kt)
        clauses = {}
        while not self.accept(";"):
            ct = self.tok
            clause = self.name("clause")
            if clause not in CLAUSES:
                raise self.error(f"unknown clause {clause!r}", ct)
            if clause in clauses:
                raise self.error(f"duplicate clause {clause!r}", ct)
            if clause in SITUATION_CLAUSES:
                self.expect("(")
                m = self.model_ref()
                self.expect(",")
                c = self.context_ref(m)
                self.expect(")")
                clauses[clause] = (m, c)
            elif clause in FORMULA_CLAUSES:
                clauses[clause] = self.formula()
            elif clause in ("state", "contrast-state"):
                st = self.tok
                s = self.name("state name")
                if s not in self.bundle.states:
                    raise self.error(f"unknown state {s!r}", st)
                clauses[clause] = s
            elif clause in ("actual", "contrast-actual"):
                if self.accept("("):
                    m = self.model_ref()
                    self.expect(",")
                    c = self.context_ref(m)
                    self.expect(")")
                    clauses[clause] = (m, c)
                else:
                    clauses[clause] = self.context_ref()
            elif clause == "hypotheses":
                ht = self.tok
                h = self.name("hypothesis set")
                if h not in self.bundle.hypotheses and h != "default":
                    raise self.error(f"unknown hypothesis set {h!r}", ht)
                clauses[clause] = h
            else:
                clauses[clause] = self.name("route")
        q = Query(kind, tuple((c, clauses[c]) for c in CLAUSES if c in clauses))
        check_query(self.bundle, q, kt)
        try:
            bind_query(self.bundle, q)
        except ModelError as e:
            raise self.error(f"query {name}: {e}", kt) from None
        self.bundle.queries[name] = q

    def _bind(self, model, f, t):
        try:
            bind(model, f)
        except ModelError as e:
            raise self.error(str(e), t) from None

    # causal formulas
    def formula(self):
        return self.f_imp()

    def f_imp(self):
        left = self.f_xor()
        if self.accept("->"):
            return Or(Not(left), self.f_imp())
        return left

    def f_xor(self):
        left = self.f_or()
        while self.accept("^"):
            right = self.f_or()
            left = Or(And(left, Not(right)), And(Not(left), right))
        return left

    def f_or(self):
        left = self.f_and()
        while self.accept("|"):
            left = Or(left, self.f_and())
        return left

    def f_and(self):
        left = self.f_unary()
        while self.accept("&"):
            left = And(left, self.f_unary())
        return left

    def f_unary(self):
        if self.accept("!"):
            t = self.tok
            if t.kind == "name" and self.peek().text != "=" and t.text not in ("true", "false") \
                    and not self._clause_word(t):
                self.i += 1
                return Atom(t.text, "false")
            return Not(self.f_unary())
        if self.accept("["):
            assigns = []
            while True:
                var = self.name("variable")
                self.expect("<-")
                assigns.append((var, self.value()))
                if not self.accept(","):
                    break
            self.expect("]")
            return Intervene(tuple(assigns), self.f_unary())
        return self.f_primary()

    def _clause_word(self, t):
        return t.text in CLAUSES and self.peek().text != "="

    def f_primary(self):
        t = self.tok
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if self.at("true") and self.peek().text != "=":
            self.i += 1
            return TRUE
        if self.at("false") and self.peek().text != "=":
            self.i += 1
            return Not(TRUE)
        if t.kind in ("name", "str") and not self._clause_word(t):
            self.i += 1
            if self.accept("="):
                return Atom(t.text, self.value())
            if self.accept("!="):
                return Not(Atom(t.text, self.value()))
            return Atom(t.text, "true")
        raise self.error(f"expected a formula, got {t.text or 'end of input'!r}")


def _lit(v):
    if v in ("true", "false"):
        return v == "true"
    try:
        return int(v)
    except ValueError:
        return v


def _render(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _evaluate(e, env):
    op = e[0]
    if op == "ref":
        if e[1] in env:
            return env[e[1]]
        return _lit(e[1])
    if op == "lit":
        return e[1]
    if op == "if":
        return _evaluate(e[2], env) if _truthy(_evaluate(e[1], env)) else _evaluate(e[3], env)
    if op == "or":
        return _truthy(_evaluate(e[1], env)) or _truthy(_evaluate(e[2], env))
    if op == "and":
        return _truthy(_evaluate(e[1], env)) and _truthy(_evaluate(e[2], env))
    if op == "not":
        return not _truthy(_evaluate(e[1], env))
    if op in ("max", "min"):
        vals = [_evaluate(a, env) for a in e[1:]]
        return max(vals) if op == "max" else min(vals)
    a, b = _evaluate(e[1], env), _evaluate(e[2], env)
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op in ("+", "-"):
        if isinstance(a, bool) or isinstance(b, bool) or not isinstance(a, int) or not isinstance(b, int):
            raise TypeError(f"arithmetic needs integers, got {a!r} and {b!r}")
        return a + b if op == "+" else a - b
    if not (isinstance(a, int) and isinstance(b, int)):
        raise TypeError(f"ordering needs integers, got {a!r} and {b!r}")
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _truthy(v):
    if isinstance(v, bool):
        return v
    raise TypeError(f"expected a Boolean, got {v!r}")


_EPREC = {"if": 0, "or": 1, "and": 2, "not": 3, "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4,
          ">=": 4, "+": 5, "-": 5}


def print_expr(e, prec=0) -> str:
    op = e[0]
    if op == "ref":
        return e[1]
    if op == "lit":
        return _quote(e[1])
    if op in ("max", "min"):
        return f"{op}(" + ", ".join(print_expr(a) for a in e[1:]) + ")"
    if op == "if":
        s = f"if {print_expr(e[1])} then {print_expr(e[2])} else {print_expr(e[3])}"
    elif op == "not":
        s = "not " + print_expr(e[1], 3)
    elif op in ("or", "and"):
        p = _EPREC[op]
        s = f"{print_expr(e[1], p)} {op} {print_expr(e[2], p + 1)}"
    elif op in ("+", "-"):
        s = f"{print_expr(e[1], 5)} {op} {print_expr(e[2], 6)}"
    else:
        s = f"{print_expr(e[1], 5)} {op} {print_expr(e[2], 5)}"
    return f"({s})" if _EPREC[op] < prec else s


def check_query(bundle, q: Query, tok=None):
    """Operand arity per query kind."""
    need = {
        "eval": {"in", "event"},
        "cause": {"in", "event"},
        "sufficient": {"in", "event", "events"},
        "restricted": {"in", "event"},
        "alt-cause": {"in", "fact", "foil"},
        "cong-cause": {"in", "vs", "fact", "surrogate"},
        "cong-cause-general": {"in", "vs", "fact", "surrogate"},
        "presupposed": {"in", "fact", "foil"},
        "explain": {"state", "event"},
        "alt-explain": {"state", "fact", "foil"},
        "cong-explain": {"state", "contrast-state", "fact", "surrogate"},
        "general-explain": {"state", "event"},
        "general-alt-explain": {"state", "fact", "foil"},
        "general-cong-explain": {"state", "contrast-state", "fact", "surrogate"},
    }[q.kind]
    have = {c for c, _ in q.clauses}
    missing = need - have
    if missing:
        line, col = (tok.line, tok.col) if tok else (None, None)
        raise DSLError(f"query kind {q.kind} needs clause(s) {', '.join(sorted(missing))}", line, col)


def bind_query(bundle, q: Query):
    """Check every formula clause against the model it will be evaluated in."""
    cl = dict(q.clauses)

    def models_of(ref):
        if ref is None:
            return []
        if isinstance(ref, tuple):
            return [bundle.models[ref[0]]]
        s = bundle.states[ref]
        if s.kind == "situations":
            return [bundle.models[m] for m, _ in s.items]
        return [bundle.models[s.model]]

    first = models_of(cl.get("in")) or models_of(cl.get("state"))
    second = models_of(cl.get("vs")) or models_of(cl.get("contrast-state"))
    for c in ("fact", "foil", "event"):
        if c in cl:
            for m in first:
                bind(m, cl[c])
    if "surrogate" in cl:
        for m in second:
            bind(m, cl["surrogate"])


def parse_bundle(text: str) -> Bundle:
    return _Parser(text).parse()


def parse_formula(text: str):
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after formula")
    return f


# printing ------------------------------------------------------------------------------

_IDENT = re.compile(r"(?:[A-Za-z_'][A-Za-z0-9_'.]*(?:-[A-Za-z][A-Za-z0-9_'.]*)*|[0-9][A-Za-z0-9_'.]*)\Z")


def _quote_force(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _quote(s: str) -> str:
    return s if _IDENT.match(s) and ".." not in s else _quote_force(s)


_value = _name = _quote


def print_formula(f, prec=0) -> str:
    """Canonical surface syntax; precedence ! > & > | > ->."""
    t = type(f)
    if t is Top:
        return "true"
    if t is Atom:
        return f"{_name(f.var)}={_value(f.value)}"
    if t is Not:
        if type(f.arg) is Top:
            return "false"
        return "!" + print_formula(f.arg, 4)
    if t is Intervene:
        inner = ", ".join(f"{_name(k)}<-{_value(v)}" for k, v in f.assignments)
        return f"[{inner}] " + print_formula(f.body, 4)
    if t is And:
        s = f"{print_formula(f.left, 3)} & {print_formula(f.right, 4)}"
        return f"({s})" if prec > 3 else s
    if t is Or:
        if type(f.left) is Not and type(f.left.arg) is not Top:
            s = f"{print_formula(f.left.arg, 2)} -> {print_formula(f.right, 1)}"
            return f"({s})" if prec > 1 else s
        s = f"{print_formula(f.left, 2)} | {print_formula(f.right, 3)}"
        return f"({s})" if prec > 2 else s
    raise TypeError(f"not a formula: {f!r}")


def _print_domain(dom):
    if dom == ("false", "true"):
        return "bool"
    try:
        ints = [int(v) for v in dom]
    except ValueError:
        ints = None
    if ints and len(ints) > 2 and ints == list(range(ints[0], ints[0] + len(ints))) \
            and all(str(i) == v for i, v in zip(ints, dom)):
        return f"{{{ints[0]}..{ints[-1]}}}"
    return "{" + ", ".join(_value(v) for v in dom) + "}"


def print_model(name, model: CausalModel) -> str:
    lines = [f"model {_name(name)} {{"]
    for v in model.variables:
        kw = "exogenous" if v.exogenous else "var"
        lines.append(f"  {kw} {_name(v.name)} : {_print_domain(v.domain)};")
    for f in model.functions:
        head = f"  fn {_name(f.target)}({', '.join(_name(p) for p in f.parents)}) = "
        if f.expr is not None:
            lines.append(head + f.expr + ";")
            continue
        doms = [model.domain(p) for p in f.parents]

        def rowkey(row):
            return tuple(d.index(x) if x in d else len(d) for d, x in zip(doms, row[0]))
        body = [f"({', '.join(_value(x) for x in k)}) -> {_value(v)};" for k, v in sorted(f.rows, key=rowkey)]
        if f.default is not None:
            body.append(f"default -> {_value(f.default)};")
        lines.append(head + "table { " + " ".join(body) + " };")
    lines.append("}")
    return "\n".join(lines)


def _print_clause(c, v):
    if c in FORMULA_CLAUSES:
        return f"{c} {print_formula(v)}"
    if isinstance(v, tuple):
        return f"{c} ({_name(v[0])}, {_name(v[1])})"
    return f"{c} {_name(v)}"


def print_bundle(bundle: Bundle) -> str:
    out = []
    for name, m in bundle.models.items():
        out.append(print_model(name, m))
    for name, c in bundle.contexts.items():
        body = " ".join(f"{_name(k)} = {_value(v)};" for k, v in c.context.assignment)
        out.append(f"context {_name(name)} of {_name(c.model)} {{ {body} }}")
    for name, s in bundle.states.items():
        if s.kind == "where":
            out.append(f"state {_name(name)} of {_name(s.model)} where {print_formula(s.formula)};")
        elif s.kind == "contexts":
            out.append(f"state {_name(name)} of {_name(s.model)} = {{ {', '.join(map(_name, s.contexts))} }};")
        else:
            items = []
            for m, x in s.items:
                if isinstance(x, str):
                    items.append(f"({_name(m)}, {_name(x)})")
                else:
                    items.append(f"{_name(m)} where {print_formula(x)}")
            out.append(f"state {_name(name)} = situations {{ {', '.join(items)} }};")
    for name, hs in bundle.hypotheses.items():
        body = []
        for h in hs:
            if h.function is not None:
                lab = f" : {_quote_force(h.label)}" if h.label is not None else ""
                body.append(f"  function {_name(h.function[0])} of {_name(h.function[1])}{lab};")
            else:
                lab = f"{_quote_force(h.label)} : " if h.label is not None else ""
                body.append(f"  {lab}{print_formula(h.formula)};")
        out.append(f"hypotheses {_name(name)} = {{\n" + "\n".join(body) + ("\n" if body else "") + "};")
    for name, q in bundle.queries.items():
        clauses = " ".join(_print_clause(c, v) for c, v in q.clauses)
        out.append(f"query {_name(name)} = {q.kind} {clauses};")
    return "\n\n".join(out) + ("\n" if out else "")

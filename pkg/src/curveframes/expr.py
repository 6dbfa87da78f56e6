"""Scalar expression DSL: parsing, evaluation, exact symbolic differentiation.

Expressions are immutable, hash-consed DAG nodes.  Smart constructors apply
light simplification (constant folding, 0/1 identities) so that repeated
differentiation stays tractable; no general rewriting is attempted.  All
numerics are 64-bit floats.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass


class ParseError(ValueError):
    """Malformed expression source; ``position`` is the offending index."""

    def __init__(self, position: int, message: str):
        super().__init__(f"{message} (at position {position})")
        self.position = position
        self.message = message


class DomainError(ArithmeticError):
    """Evaluation left the real domain (zero division, sqrt of negative, ...)."""


class UnboundVariable(KeyError):
    """A free variable had no binding at evaluation time."""


_UNARY_OPS = ("neg", "sin", "cos", "tan", "exp", "ln", "sqrt", "abs")
_BINARY_OPS = ("add", "sub", "mul", "div", "pow")
FUNCTION_NAMES = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs")


@dataclass(frozen=True, eq=False, repr=False)
class Expr:
    """One node of an expression DAG.

    ``op`` is "const", "var", a unary function name, or a binary operator
    name.  Nodes are interned: structurally equal trees are the same object,
    so identity comparison is structural comparison.
    """

    op: str
    args: tuple["Expr", ...] = ()
    value: float = 0.0  # payload when op == "const"
    name: str = ""      # payload when op == "var"

    def __repr__(self) -> str:
        return f"<expr {to_string(self)}>"

    # Operator sugar so client code reads like the formulas it encodes.
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __pow__(self, other):
        return power(self, _coerce(other))

    def __neg__(self):
        return neg(self)


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)):
        return const(float(x))
    raise TypeError(f"cannot use {type(x).__name__} in an expression")


# Interning pool.  Children are interned before parents, so identity of the
# child tuple determines structural identity of the parent.
_POOL: dict[tuple, Expr] = {}


def _intern(op: str, args: tuple = (), value: float = 0.0, name: str = "") -> Expr:
    key = (op, value, name) + tuple(id(a) for a in args)
    node = _POOL.get(key)
    if node is None:
        node = Expr(op, args, value, name)
        _POOL[key] = node
    return node


def const(c: float) -> Expr:
    c = float(c)
    if c == 0.0:
        c = 0.0  # collapse -0.0 so printing round-trips
    return _intern("const", value=c)


def var(name: str) -> Expr:
    return _intern("var", name=name)


_ZERO = const(0.0)
_ONE = const(1.0)


def _is_const(e: Expr, c: float | None = None) -> bool:
    return e.op == "const" and (c is None or e.value == c)


def _fold(v: float, op: str, *args: Expr) -> Expr:
    # Fold only finite results; otherwise keep the node and let evaluate()
    # raise a DomainError with context.
    if math.isfinite(v):
        return const(v)
    return _intern(op, args)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return _fold(a.value + b.value, "add", a, b)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return _intern("add", (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return _fold(a.value - b.value, "sub", a, b)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    if a is b:
        return _ZERO
    return _intern("sub", (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return _fold(a.value * b.value, "mul", a, b)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return _intern("mul", (a, b))


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return _fold(a.value / b.value, "div", a, b)
    if _is_const(b, 1.0):
        return a
    return _intern("div", (a, b))


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return const(-a.value)
    if a.op == "neg":
        return a.args[0]
    return _intern("neg", (a,))


def power(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return _ONE
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 1.0):
        return _ONE
    if _is_const(a) and _is_const(b):
        try:
            v = math.pow(a.value, b.value)
        except (ValueError, OverflowError):
            return _intern("pow", (a, b))
        return _fold(v, "pow", a, b)
    return _intern("pow", (a, b))


def _unary(op: str, fn, a: Expr) -> Expr:
    if _is_const(a):
        try:
            v = fn(a.value)
        except (ValueError, OverflowError):
            return _intern(op, (a,))
        return _fold(v, op, a)
    return _intern(op, (a,))


def sin(a: Expr) -> Expr:
    return _unary("sin", math.sin, a)


def cos(a: Expr) -> Expr:
    return _unary("cos", math.cos, a)


def tan(a: Expr) -> Expr:
    return _unary("tan", math.tan, a)


def exp(a: Expr) -> Expr:
    return _unary("exp", math.exp, a)


def ln(a: Expr) -> Expr:
    return _unary("ln", math.log, a)


def sqrt(a: Expr) -> Expr:
    return _unary("sqrt", math.sqrt, a)


def absval(a: Expr) -> Expr:
    return _unary("abs", math.fabs, a)


_FUNC_CONSTRUCTORS = {
    "sin": sin, "cos": cos, "tan": tan, "exp": exp,
    "ln": ln, "sqrt": sqrt, "abs": absval,
}


def topo_order(e: Expr) -> list[Expr]:
    """All nodes reachable from ``e``, children before parents, each once."""
    order: list[Expr] = []
    seen: set[int] = set()
    stack: list[tuple[Expr, bool]] = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for a in node.args:
            stack.append((a, False))
    return order


def evaluate(e: Expr, bindings: dict[str, float]) -> float:
    """Evaluate ``e`` with every free variable bound.

    Raises DomainError when the computation leaves the finite reals and
    UnboundVariable for missing bindings.
    """
    val: dict[int, float] = {}
    for node in topo_order(e):
        op = node.op
        if op == "const":
            r = node.value
        elif op == "var":
            try:
                r = float(bindings[node.name])
            except KeyError:
                raise UnboundVariable(node.name) from None
        else:
            a = val[id(node.args[0])]
            if op == "add":
                r = a + val[id(node.args[1])]
            elif op == "sub":
                r = a - val[id(node.args[1])]
            elif op == "mul":
                r = a * val[id(node.args[1])]
            elif op == "div":
                b = val[id(node.args[1])]
                if b == 0.0:
                    raise DomainError("division by zero")
                r = a / b
            elif op == "pow":
                b = val[id(node.args[1])]
                try:
                    r = math.pow(a, b)
                except (ValueError, OverflowError) as exc:
                    raise DomainError(f"pow({a!r}, {b!r}) is undefined") from exc
            elif op == "neg":
                r = -a
            elif op == "sin":
                r = math.sin(a)
            elif op == "cos":
                r = math.cos(a)
            elif op == "tan":
                r = math.tan(a)
            elif op == "exp":
                try:
                    r = math.exp(a)
                except OverflowError as exc:
                    raise DomainError(f"exp({a!r}) overflows") from exc
            elif op == "ln":
                if a <= 0.0:
                    raise DomainError(f"ln of non-positive value {a!r}")
                r = math.log(a)
            elif op == "sqrt":
                if a < 0.0:
                    raise DomainError(f"sqrt of negative value {a!r}")
                r = math.sqrt(a)
            elif op == "abs":
                r = math.fabs(a)
            else:  # pragma: no cover - exhaustive ops
                raise AssertionError(f"unknown op {op}")
        if not math.isfinite(r):
            raise DomainError(f"non-finite intermediate in {op!r}")
        val[id(node)] = r
    return val[id(e)]


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables by expressions, rebuilding through the constructors."""
    out: dict[int, Expr] = {}
    for node in topo_order(e):
        op = node.op
        if op == "const":
            r = node
        elif op == "var":
            r = mapping.get(node.name, node)
        else:
            args = tuple(out[id(a)] for a in node.args)
            if args == node.args:
                r = node
            elif op == "add":
                r = add(*args)
            elif op == "sub":
                r = sub(*args)
            elif op == "mul":
                r = mul(*args)
            elif op == "div":
                r = div(*args)
            elif op == "pow":
                r = power(*args)
            elif op == "neg":
                r = neg(args[0])
            else:
                r = _FUNC_CONSTRUCTORS[op](args[0])
        out[id(node)] = r
    return out[id(e)]


def differentiate(e: Expr, name: str, order: int = 1) -> Expr:
    """Exact partial derivative of ``e`` of the given order with respect to
    the variable ``name``.

    The result is valid wherever the original expression is smooth; abs
    contributes a removable singularity at zero (DomainError there).
    """
    if order < 1:
        raise ValueError("order must be a positive integer")
    for _ in range(order):
        e = _derivative(e, name)
    return e


def _derivative(e: Expr, name: str) -> Expr:
    d: dict[int, Expr] = {}
    for node in topo_order(e):
        op = node.op
        if op == "const":
            r = _ZERO
        elif op == "var":
            r = _ONE if node.name == name else _ZERO
        else:
            a = node.args[0]
            da = d[id(a)]
            if op == "add":
                r = add(da, d[id(node.args[1])])
            elif op == "sub":
                r = sub(da, d[id(node.args[1])])
            elif op == "mul":
                b = node.args[1]
                r = add(mul(da, b), mul(a, d[id(b)]))
            elif op == "div":
                b = node.args[1]
                r = div(sub(mul(da, b), mul(a, d[id(b)])), mul(b, b))
            elif op == "pow":
                b = node.args[1]
                db = d[id(b)]
                if b.op == "const":
                    r = mul(mul(b, power(a, const(b.value - 1.0))), da)
                elif a.op == "const":
                    r = mul(mul(node, ln(a)), db)
                else:
                    r = mul(node, add(mul(db, ln(a)), div(mul(b, da), a)))
            elif op == "neg":
                r = neg(da)
            elif op == "sin":
                r = mul(cos(a), da)
            elif op == "cos":
                r = neg(mul(sin(a), da))
            elif op == "tan":
                r = mul(add(_ONE, mul(node, node)), da)
            elif op == "exp":
                r = mul(node, da)
            elif op == "ln":
                r = div(da, a)
            elif op == "sqrt":
                r = div(da, mul(const(2.0), node))
            elif op == "abs":
                r = div(mul(a, da), node)
            else:  # pragma: no cover - exhaustive ops
                raise AssertionError(f"unknown op {op}")
        d[id(node)] = r
    return d[id(e)]


# Printing.  Levels: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5.  A child is
# parenthesized when its own level is below the level its slot requires, which
# makes to_string a left inverse of parse on interned nodes.
_LEVEL = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def to_string(e: Expr) -> str:
    """Render ``e`` so that parse(to_string(e)) returns ``e`` itself."""
    rendered: dict[int, tuple[str, int]] = {}

    def piece(child: Expr, need: int) -> str:
        text, level = rendered[id(child)]
        return f"({text})" if level < need else text

    for node in topo_order(e):
        op = node.op
        if op == "const":
            text = repr(node.value)
            level = 3 if node.value < 0 else 5
        elif op == "var":
            text, level = node.name, 5
        elif op == "add":
            text, level = f"{piece(node.args[0], 1)} + {piece(node.args[1], 2)}", 1
        elif op == "sub":
            text, level = f"{piece(node.args[0], 1)} - {piece(node.args[1], 2)}", 1
        elif op == "mul":
            text, level = f"{piece(node.args[0], 2)} * {piece(node.args[1], 3)}", 2
        elif op == "div":
            text, level = f"{piece(node.args[0], 2)} / {piece(node.args[1], 3)}", 2
        elif op == "neg":
            text, level = f"-{piece(node.args[0], 3)}", 3
        elif op == "pow":
            text, level = f"{piece(node.args[0], 5)}^{piece(node.args[1], 3)}", 4
        else:
            text, level = f"{op}({rendered[id(node.args[0])][0]})", 5
        rendered[id(node)] = (text, level)
    return rendered[id(e)][0]


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.lastgroup is None:
            at = pos + len(source[pos:]) - len(source[pos:].lstrip())
            if at >= n:
                break
            raise ParseError(at, f"unexpected character {source[at]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    """Recursive descent over: expr := term (('+'|'-') term)*;
    term := unary (('*'|'/') unary)*; unary := '-' unary | power;
    power := atom ('^' unary)?; atom := number | var | fn '(' expr ')'
    | '(' expr ')'."""

    def __init__(self, source: str, allowed_vars: frozenset[str]):
        self.tokens = _tokenize(source)
        self.i = 0
        self.vars = allowed_vars

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, text: str):
        kind, value, pos = self.peek()
        if kind == "op" and value == text:
            self.i += 1
            return
        raise ParseError(pos, f"expected {text!r}")

    def parse_expr(self) -> Expr:
        e = self.parse_term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.i += 1
                rhs = self.parse_term()
                e = add(e, rhs) if value == "+" else sub(e, rhs)
            else:
                return e

    def parse_term(self) -> Expr:
        e = self.parse_unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.i += 1
                rhs = self.parse_unary()
                e = mul(e, rhs) if value == "*" else div(e, rhs)
            else:
                return e

    def parse_unary(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.i += 1
            return neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.i += 1
            return power(base, self.parse_unary())
        return base

    def parse_atom(self) -> Expr:
        kind, value, pos = self.next()
        if kind == "num":
            return const(float(value))
        if kind == "ident":
            if value in _FUNC_CONSTRUCTORS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return _FUNC_CONSTRUCTORS[value](arg)
            if value in self.vars:
                return var(value)
            raise ParseError(pos, f"unknown identifier {value!r}")
        if kind == "op" and value == "(":
            e = self.parse_expr()
            self.expect_op(")")
            return e
        if kind == "end":
            raise ParseError(pos, "unexpected end of input")
        raise ParseError(pos, f"unexpected token {value!r}")


def parse(source: str, allowed_vars) -> Expr:
    """Parse ``source`` over the given variable names into an Expr.

    Function names (sin, cos, tan, exp, ln, sqrt, abs) are reserved and may
    not be used as variables.  Raises ParseError with the character position
    on malformed input or unknown identifiers.
    """
    vars_ = frozenset(allowed_vars)
    reserved = vars_ & set(FUNCTION_NAMES)
    if reserved:
        raise ValueError(f"variable names shadow functions: {sorted(reserved)}")
    if not source.strip():
        raise ParseError(0, "empty expression")
    p = _Parser(source, vars_)
    e = p.parse_expr()
    kind, value, pos = p.peek()
    if kind != "end":
        raise ParseError(pos, f"unexpected trailing input {value!r}")
    return e


def free_variables(e: Expr) -> frozenset[str]:
    return frozenset(n.name for n in topo_order(e) if n.op == "var")


_NUMPY_CALLS = {
    "sin": "np.sin", "cos": "np.cos", "tan": "np.tan", "exp": "np.exp",
    "ln": "np.log", "sqrt": "np.sqrt", "abs": "np.abs",
}


def topo_order_many(roots) -> list[Expr]:
    """Topological order over the union of several root DAGs."""
    order: list[Expr] = []
    seen: set[int] = set()
    stack: list[tuple[Expr, bool]] = [(r, False) for r in reversed(list(roots))]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for a in node.args:
            stack.append((a, False))
    return order


def compile_vectorized(e: Expr, arg_names) -> "callable":
    """Compile the DAG to a numpy-vectorized function of the named arrays.

    One assignment per distinct node, so shared subexpressions are computed
    once.  Invalid points produce nan/inf silently (numpy semantics); callers
    check finiteness where it matters.  Used for grid evaluation; the scalar
    path is evaluate().
    """
    import numpy as np

    arg_names = list(arg_names)
    if not arg_names:
        raise ValueError("need at least one argument name")
    unknown = free_variables(e) - set(arg_names)
    if unknown:
        raise UnboundVariable(sorted(unknown)[0])

    order = topo_order(e)
    slot = {id(n): f"v{i}" for i, n in enumerate(order)}
    lines = []
    for node in order:
        name = slot[id(node)]
        op = node.op
        if op == "const":
            rhs = repr(node.value)
        elif op == "var":
            rhs = node.name
        elif op == "add":
            rhs = f"{slot[id(node.args[0])]} + {slot[id(node.args[1])]}"
        elif op == "sub":
            rhs = f"{slot[id(node.args[0])]} - {slot[id(node.args[1])]}"
        elif op == "mul":
            rhs = f"{slot[id(node.args[0])]} * {slot[id(node.args[1])]}"
        elif op == "div":
            rhs = f"{slot[id(node.args[0])]} / {slot[id(node.args[1])]}"
        elif op == "pow":
            rhs = f"{slot[id(node.args[0])]} ** {slot[id(node.args[1])]}"
        elif op == "neg":
            rhs = f"-{slot[id(node.args[0])]}"
        else:
            rhs = f"{_NUMPY_CALLS[op]}({slot[id(node.args[0])]})"
        lines.append(f"    {name} = {rhs}")
    lines.append(f"    return {slot[id(e)]}")
    src = f"def _compiled({', '.join(arg_names)}):\n" + "\n".join(lines)
    namespace = {"np": np}
    exec(src, namespace)
    raw = namespace["_compiled"]
    first = arg_names[0]

    def wrapper(*arrays):
        with np.errstate(all="ignore"):
            out = raw(*arrays)
        out = np.asarray(out, dtype=float)
        if out.ndim == 0:
            out = np.full(np.shape(arrays[0]), float(out))
        return out

    wrapper.__name__ = f"compiled_{first}"
    return wrapper


def compile_vectorized_many(roots, arg_names) -> "callable":
    """Compile several expressions into one vectorized function returning a
    list of arrays, sharing every common subexpression across all of them."""
    import numpy as np

    roots = list(roots)
    arg_names = list(arg_names)
    if not arg_names:
        raise ValueError("need at least one argument name")
    for r in roots:
        unknown = free_variables(r) - set(arg_names)
        if unknown:
            raise UnboundVariable(sorted(unknown)[0])

    order = topo_order_many(roots)
    slot = {id(n): f"v{i}" for i, n in enumerate(order)}
    lines = []
    for node in order:
        name = slot[id(node)]
        op = node.op
        if op == "const":
            rhs = repr(node.value)
        elif op == "var":
            rhs = node.name
        elif op in ("add", "sub", "mul", "div", "pow"):
            sym = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "**"}[op]
            rhs = f"{slot[id(node.args[0])]} {sym} {slot[id(node.args[1])]}"
        elif op == "neg":
            rhs = f"-{slot[id(node.args[0])]}"
        else:
            rhs = f"{_NUMPY_CALLS[op]}({slot[id(node.args[0])]})"
        lines.append(f"    {name} = {rhs}")
    result = ", ".join(slot[id(r)] for r in roots)
    lines.append(f"    return [{result}]")
    src = f"def _compiled({', '.join(arg_names)}):\n" + "\n".join(lines)
    namespace = {"np": np}
    exec(src, namespace)
    raw = namespace["_compiled"]

    def wrapper(*arrays):
        with np.errstate(all="ignore"):
            outs = raw(*arrays)
        shape = np.shape(arrays[0])
        fixed = []
        for out in outs:
            out = np.asarray(out, dtype=float)
            if out.ndim == 0:
                out = np.full(shape, float(out))
            fixed.append(out)
        return fixed

    return wrapper

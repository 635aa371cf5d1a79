"""Abstract syntax, lexer, parser, and printer for the hybrid imperative language.

Concrete surface syntax::

    // optional declarations, then the program body
    qubits q0, q1;
    gate G = [[0, 1], [1, 0]];
    meas N = { [[1, 0], [0, 0]] -> 0, [[0, 0], [0, 1]] -> 1 };
    main {
      q0 := |0>;
      H[q0];
      x := N[q0];
      if x = 1 then { X[q0] } else { skip };
      while x <= 2 do { x := x + 1 }
    }

Gates H, X, Z, I, CNOT and the one-qubit computational-basis measurement M
are built in.  Only classical variables may appear in arithmetic and boolean
expressions.  ``nil`` marks successful termination; it is produced by the
stepper and rejected in user source unless explicitly allowed.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .errors import ParseError, ValidationError
from .state import INT_MAX, INT_MIN


# ---------------------------------------------------------------------------
# abstract syntax


class AExp:
    pass


@dataclass(eq=False)
class IntLit(AExp):
    value: int


@dataclass(eq=False)
class Var(AExp):
    name: str


@dataclass(eq=False)
class Add(AExp):
    left: AExp
    right: AExp


@dataclass(eq=False)
class Sub(AExp):
    left: AExp
    right: AExp


@dataclass(eq=False)
class Mul(AExp):
    left: AExp
    right: AExp


class BExp:
    pass


@dataclass(eq=False)
class BoolLit(BExp):
    value: bool


@dataclass(eq=False)
class Eq(BExp):
    left: AExp
    right: AExp


@dataclass(eq=False)
class Leq(BExp):
    left: AExp
    right: AExp


@dataclass(eq=False)
class Not(BExp):
    arg: BExp


@dataclass(eq=False)
class And(BExp):
    left: BExp
    right: BExp


@dataclass(eq=False)
class Or(BExp):
    left: BExp
    right: BExp


class Com:
    pos: tuple[int, int] | None


@dataclass(eq=False)
class Skip(Com):
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class Abort(Com):
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class Nil(Com):
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class Assign(Com):
    name: str
    expr: AExp
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class Seq(Com):
    first: Com
    second: Com
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class If(Com):
    guard: BExp
    then_branch: Com
    else_branch: Com
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class While(Com):
    guard: BExp
    body: Com
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class QInit(Com):
    qubit: str
    qpos: int
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class QUnit(Com):
    gate_name: str
    targets: tuple[str, ...]
    matrix: np.ndarray  # already lifted to the full program space
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class QMeas(Com):
    name: str
    meas_name: str
    targets: tuple[str, ...]
    measurement: qmath.GeneralMeasurement  # already lifted to the full space
    pos: tuple[int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class Program:
    qubits: tuple[str, ...]
    gates: dict
    measurements: dict
    body: Com


BUILTIN_MEASUREMENTS = {"M": qmath.computational_measurement(1, "M")}


# ---------------------------------------------------------------------------
# structural comparison (matrices compared numerically, positions ignored)


def ast_equal(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, np.ndarray):
        return qmath.mat_eq(a, b)
    if isinstance(a, qmath.GeneralMeasurement):
        return (
            a.labels == b.labels
            and len(a.ops) == len(b.ops)
            and all(qmath.mat_eq(x, y) for x, y in zip(a.ops, b.ops))
        )
    if isinstance(a, qmath.UnitaryGate):
        return a.name == b.name and qmath.mat_eq(a.matrix, b.matrix)
    if dataclasses.is_dataclass(a) and not isinstance(a, type):
        for f in dataclasses.fields(a):
            if f.name == "pos":
                continue
            if not ast_equal(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(ast_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        return set(a) == set(b) and all(ast_equal(a[k], b[k]) for k in a)
    return a == b


# ---------------------------------------------------------------------------
# lexer


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, FLOAT, SYM, MATRIX, KET0, EOF
    text: str
    line: int
    col: int


_SYMBOLS = [":=", "<=", "(+)", "->", "..", "~", ";", ",", "{", "}", "(", ")",
            "[", "]", "=", "<", "+", "-", "*", "."]


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                advance(1)
            continue
        if text.startswith("|0>", i):
            tokens.append(Token("KET0", "|0>", line, col))
            advance(3)
            continue
        if text.startswith("[[", i):
            # a two-level bracketed matrix literal, captured whole
            start_line, start_col = line, col
            depth = 0
            j = i
            while j < n:
                if text[j] == "[":
                    depth += 1
                elif text[j] == "]":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if depth != 0:
                raise ParseError("unterminated matrix literal", start_line, start_col)
            raw = text[i : j + 1]
            tokens.append(Token("MATRIX", raw, start_line, start_col))
            advance(j + 1 - i)
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            start_line, start_col = line, col
            j = i
            is_float = False
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and not text.startswith("..", j):
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            raw = text[i:j]
            tokens.append(Token("FLOAT" if is_float else "INT", raw, start_line, start_col))
            advance(j - i)
            continue
        if ch.isalpha() or ch == "_":
            start_line, start_col = line, col
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], start_line, start_col))
            advance(j - i)
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("SYM", sym, line, col))
                advance(len(sym))
                break
        else:
            raise ParseError(f"unsupported character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def save(self) -> int:
        return self.pos

    def restore(self, mark: int):
        self.pos = mark

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect_sym(self, sym: str) -> Token:
        tok = self.peek()
        if tok.kind != "SYM" or tok.text != sym:
            raise self.error(f"expected {sym!r}, found {tok.text!r}")
        return self.next()

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != "IDENT":
            raise self.error(f"expected {what}, found {tok.text!r}")
        return self.next()

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYM" and tok.text == sym

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == word

    def eat_word(self, word: str) -> bool:
        if self.at_word(word):
            self.next()
            return True
        return False


_KEYWORDS = {
    "qubits", "gate", "meas", "main", "skip", "abort", "nil", "if", "then",
    "else", "while", "do", "true", "false", "not", "and", "or",
}


# ---------------------------------------------------------------------------
# expression parsing (shared by programs and assertions)


def parse_int_token(ts: TokenStream) -> int:
    tok = ts.peek()
    if tok.kind != "INT":
        raise ts.error(f"expected integer, found {tok.text!r}")
    ts.next()
    value = int(tok.text)
    if value > INT_MAX:
        raise ParseError(f"integer literal {value} exceeds the 64-bit range", tok.line, tok.col)
    return value


def parse_aexp(ts: TokenStream, qubits: tuple[str, ...] = ()) -> AExp:
    return _parse_additive(ts, qubits)


def _parse_additive(ts: TokenStream, qubits) -> AExp:
    left = _parse_multiplicative(ts, qubits)
    while ts.at_sym("+") or ts.at_sym("-"):
        op = ts.next().text
        right = _parse_multiplicative(ts, qubits)
        left = Add(left, right) if op == "+" else Sub(left, right)
    return left


def _parse_multiplicative(ts: TokenStream, qubits) -> AExp:
    left = _parse_atom(ts, qubits)
    while ts.at_sym("*"):
        ts.next()
        left = Mul(left, _parse_atom(ts, qubits))
    return left


def _parse_atom(ts: TokenStream, qubits) -> AExp:
    tok = ts.peek()
    if tok.kind == "INT":
        return IntLit(parse_int_token(ts))
    if ts.at_sym("-"):
        ts.next()
        inner = _parse_atom(ts, qubits)
        if isinstance(inner, IntLit):
            if -inner.value < INT_MIN:
                raise ts.error("integer literal below the 64-bit range")
            return IntLit(-inner.value)
        return Sub(IntLit(0), inner)
    if ts.at_sym("("):
        ts.next()
        inner = _parse_additive(ts, qubits)
        ts.expect_sym(")")
        return inner
    if tok.kind == "IDENT":
        if tok.text in _KEYWORDS:
            raise ts.error(f"unexpected keyword {tok.text!r} in arithmetic expression")
        if tok.text in qubits:
            raise ParseError(
                f"quantum variable {tok.text!r} cannot appear in a classical expression",
                tok.line, tok.col,
            )
        ts.next()
        return Var(tok.text)
    raise ts.error(f"expected arithmetic expression, found {tok.text!r}")


def parse_bexp(ts: TokenStream, qubits: tuple[str, ...] = ()) -> BExp:
    return _parse_or(ts, qubits)


def _parse_or(ts: TokenStream, qubits) -> BExp:
    left = _parse_and(ts, qubits)
    while ts.at_word("or"):
        ts.next()
        left = Or(left, _parse_and(ts, qubits))
    return left


def _parse_and(ts: TokenStream, qubits) -> BExp:
    left = _parse_not(ts, qubits)
    while ts.at_word("and"):
        ts.next()
        left = And(left, _parse_not(ts, qubits))
    return left


def _parse_not(ts: TokenStream, qubits) -> BExp:
    if ts.at_word("not"):
        ts.next()
        return Not(_parse_not(ts, qubits))
    return _parse_bool_atom(ts, qubits)


def _parse_bool_atom(ts: TokenStream, qubits) -> BExp:
    if ts.eat_word("true"):
        return BoolLit(True)
    if ts.eat_word("false"):
        return BoolLit(False)
    mark = ts.save()
    try:
        left = _parse_additive(ts, qubits)
        if ts.at_sym("="):
            ts.next()
            return Eq(left, _parse_additive(ts, qubits))
        if ts.at_sym("<="):
            ts.next()
            return Leq(left, _parse_additive(ts, qubits))
        raise ts.error("expected '=' or '<=' after arithmetic expression")
    except ParseError:
        ts.restore(mark)
    if ts.at_sym("("):
        ts.next()
        inner = _parse_or(ts, qubits)
        ts.expect_sym(")")
        return inner
    raise ts.error(f"expected boolean expression, found {ts.peek().text!r}")


# ---------------------------------------------------------------------------
# program parsing


def parse_program(text: str, allow_nil: bool = False) -> Program:
    ts = TokenStream(tokenize(text))
    qubits: list[str] = []
    gates = dict(qmath.BUILTIN_GATES)
    measurements = dict(BUILTIN_MEASUREMENTS)
    seen_qubits = False
    while not ts.at_word("main"):
        tok = ts.peek()
        if ts.eat_word("qubits"):
            if seen_qubits:
                raise ParseError("duplicate qubits declaration", tok.line, tok.col)
            seen_qubits = True
            qubits.append(ts.expect_ident("qubit name").text)
            while ts.at_sym(","):
                ts.next()
                qubits.append(ts.expect_ident("qubit name").text)
            ts.expect_sym(";")
            if len(set(qubits)) != len(qubits):
                raise ParseError("duplicate qubit name", tok.line, tok.col)
        elif ts.eat_word("gate"):
            name_tok = ts.expect_ident("gate name")
            if name_tok.text in gates:
                raise ParseError(f"gate {name_tok.text!r} already defined",
                                 name_tok.line, name_tok.col)
            ts.expect_sym("=")
            matrix = _parse_matrix_token(ts)
            ts.expect_sym(";")
            arity = _arity_of(matrix, name_tok)
            try:
                gates[name_tok.text] = qmath.UnitaryGate(name_tok.text, arity, matrix)
            except ValidationError as exc:
                raise ParseError(str(exc), name_tok.line, name_tok.col)
        elif ts.eat_word("meas"):
            name_tok = ts.expect_ident("measurement name")
            if name_tok.text in measurements:
                raise ParseError(f"measurement {name_tok.text!r} already defined",
                                 name_tok.line, name_tok.col)
            ts.expect_sym("=")
            ts.expect_sym("{")
            ops: list[np.ndarray] = []
            labels: list[tuple[int, ...]] = []
            while True:
                op = _parse_matrix_token(ts)
                ts.expect_sym("->")
                labels.append((parse_int_token(ts),))
                ops.append(op)
                if ts.at_sym(","):
                    ts.next()
                    continue
                break
            ts.expect_sym("}")
            ts.expect_sym(";")
            arity = _arity_of(ops[0], name_tok)
            try:
                measurements[name_tok.text] = qmath.GeneralMeasurement(
                    tuple(ops), tuple(labels), arity, name_tok.text
                )
            except ValidationError as exc:
                raise ParseError(str(exc), name_tok.line, name_tok.col)
        else:
            raise ts.error(f"expected declaration or 'main', found {tok.text!r}")
    ts.next()  # main
    qtuple = tuple(qubits)
    body = _parse_block(ts, qtuple, gates, measurements, allow_nil)
    if ts.peek().kind != "EOF":
        raise ts.error(f"unexpected trailing input {ts.peek().text!r}")
    return Program(qtuple, gates, measurements, body)


def _arity_of(matrix: np.ndarray, tok: Token) -> int:
    dim = matrix.shape[0]
    if matrix.shape[0] != matrix.shape[1] or dim & (dim - 1) or dim < 2:
        raise ParseError("matrix dimension must be a power of two", tok.line, tok.col)
    return dim.bit_length() - 1


def _parse_matrix_token(ts: TokenStream) -> np.ndarray:
    tok = ts.peek()
    if tok.kind != "MATRIX":
        raise ts.error(f"expected matrix literal, found {tok.text!r}")
    ts.next()
    try:
        return qmath.parse_matrix(tok.text)
    except ValidationError as exc:
        raise ParseError(str(exc), tok.line, tok.col)


def _parse_block(ts, qubits, gates, measurements, allow_nil) -> Com:
    ts.expect_sym("{")
    if ts.at_sym("}"):
        ts.next()
        return Skip()
    stmts = [_parse_stmt(ts, qubits, gates, measurements, allow_nil)]
    while ts.at_sym(";"):
        ts.next()
        if ts.at_sym("}"):
            break
        stmts.append(_parse_stmt(ts, qubits, gates, measurements, allow_nil))
    ts.expect_sym("}")
    out = stmts[-1]
    for stmt in reversed(stmts[:-1]):
        out = Seq(stmt, out, pos=stmt.pos)
    return out


def _parse_qubit_list(ts, qubits) -> tuple[str, ...]:
    ts.expect_sym("[")
    names = [ts.expect_ident("qubit name").text]
    while ts.at_sym(","):
        ts.next()
        names.append(ts.expect_ident("qubit name").text)
    ts.expect_sym("]")
    for name in names:
        if name not in qubits:
            raise ts.error(f"undeclared quantum variable {name!r}")
    if len(set(names)) != len(names):
        raise ts.error("quantum arguments must be distinct")
    return tuple(names)


def _parse_stmt(ts, qubits, gates, measurements, allow_nil) -> Com:
    tok = ts.peek()
    pos = (tok.line, tok.col)
    if ts.eat_word("skip"):
        return Skip(pos=pos)
    if ts.eat_word("abort"):
        return Abort(pos=pos)
    if ts.at_word("nil"):
        if not allow_nil:
            raise ts.error("'nil' cannot appear in source programs")
        ts.next()
        return Nil(pos=pos)
    if ts.eat_word("if"):
        guard = parse_bexp(ts, qubits)
        if not ts.eat_word("then"):
            raise ts.error("expected 'then'")
        then_branch = _parse_block(ts, qubits, gates, measurements, allow_nil)
        if ts.eat_word("else"):
            else_branch = _parse_block(ts, qubits, gates, measurements, allow_nil)
        else:
            else_branch = Skip(pos=pos)
        return If(guard, then_branch, else_branch, pos=pos)
    if ts.eat_word("while"):
        guard = parse_bexp(ts, qubits)
        if not ts.eat_word("do"):
            raise ts.error("expected 'do'")
        body = _parse_block(ts, qubits, gates, measurements, allow_nil)
        return While(guard, body, pos=pos)
    if tok.kind == "IDENT" and tok.text not in _KEYWORDS:
        name = tok.text
        nxt = ts.peek(1)
        if nxt.kind == "SYM" and nxt.text == "[":
            # unitary application
            ts.next()
            if name not in gates:
                raise ParseError(f"unknown gate {name!r}", tok.line, tok.col)
            gate = gates[name]
            targets = _parse_qubit_list(ts, qubits)
            if gate.arity != len(targets):
                raise ParseError(
                    f"gate {name!r} acts on {gate.arity} qubit(s), got {len(targets)}",
                    tok.line, tok.col,
                )
            positions = [qubits.index(q) for q in targets]
            full = qmath.embed(gate.matrix, positions, len(qubits))
            return QUnit(name, targets, full, pos=pos)
        if nxt.kind == "SYM" and nxt.text == ":=":
            ts.next()
            ts.next()
            if name in qubits:
                if ts.peek().kind != "KET0":
                    raise ts.error(f"quantum variable {name!r} can only be reset to |0>")
                ts.next()
                return QInit(name, qubits.index(name), pos=pos)
            if ts.peek().kind == "KET0":
                raise ts.error(f"{name!r} is not a declared quantum variable")
            after = ts.peek(1)
            if (ts.peek().kind == "IDENT" and ts.peek().text in measurements
                    and after.kind == "SYM" and after.text == "["):
                mname = ts.next().text
                m = measurements[mname]
                targets = _parse_qubit_list(ts, qubits)
                if m.arity != len(targets):
                    raise ParseError(
                        f"measurement {mname!r} acts on {m.arity} qubit(s), got {len(targets)}",
                        tok.line, tok.col,
                    )
                if m.label_width != 1:
                    raise ParseError(
                        f"measurement {mname!r} must carry single-integer labels",
                        tok.line, tok.col,
                    )
                positions = [qubits.index(q) for q in targets]
                full = qmath.embed_measurement(m, positions, len(qubits))
                return QMeas(name, mname, targets, full, pos=pos)
            expr = parse_aexp(ts, qubits)
            return Assign(name, expr, pos=pos)
    raise ts.error(f"expected statement, found {tok.text!r}")


# ---------------------------------------------------------------------------
# printing


def pretty_aexp(a: AExp, level: int = 0) -> str:
    if isinstance(a, IntLit):
        return str(a.value)
    if isinstance(a, Var):
        return a.name
    if isinstance(a, (Add, Sub)):
        op = "+" if isinstance(a, Add) else "-"
        text = f"{pretty_aexp(a.left, 1)} {op} {pretty_aexp(a.right, 2)}"
        return f"({text})" if level > 1 else text
    if isinstance(a, Mul):
        text = f"{pretty_aexp(a.left, 2)} * {pretty_aexp(a.right, 3)}"
        return f"({text})" if level > 2 else text
    raise TypeError(f"not an arithmetic expression: {a!r}")


def pretty_bexp(b: BExp, level: int = 0) -> str:
    if isinstance(b, BoolLit):
        return "true" if b.value else "false"
    if isinstance(b, Eq):
        return f"{pretty_aexp(b.left)} = {pretty_aexp(b.right)}"
    if isinstance(b, Leq):
        return f"{pretty_aexp(b.left)} <= {pretty_aexp(b.right)}"
    if isinstance(b, Not):
        arg = pretty_bexp(b.arg, 3)
        if isinstance(b.arg, (Eq, Leq)):
            arg = f"({arg})"
        return f"not {arg}"
    if isinstance(b, And):
        text = f"{pretty_bexp(b.left, 2)} and {pretty_bexp(b.right, 3)}"
        return f"({text})" if level > 2 else text
    if isinstance(b, Or):
        text = f"{pretty_bexp(b.left, 1)} or {pretty_bexp(b.right, 2)}"
        return f"({text})" if level > 1 else text
    raise TypeError(f"not a boolean expression: {b!r}")


def _pretty_com_lines(c: Com, indent: str) -> list[str]:
    if isinstance(c, Seq):
        first = _pretty_com_lines(c.first, indent)
        second = _pretty_com_lines(c.second, indent)
        return first[:-1] + [first[-1] + ";"] + second
    if isinstance(c, Skip):
        return [indent + "skip"]
    if isinstance(c, Abort):
        return [indent + "abort"]
    if isinstance(c, Nil):
        return [indent + "nil"]
    if isinstance(c, Assign):
        return [indent + f"{c.name} := {pretty_aexp(c.expr)}"]
    if isinstance(c, QInit):
        return [indent + f"{c.qubit} := |0>"]
    if isinstance(c, QUnit):
        return [indent + f"{c.gate_name}[{', '.join(c.targets)}]"]
    if isinstance(c, QMeas):
        return [indent + f"{c.name} := {c.meas_name}[{', '.join(c.targets)}]"]
    if isinstance(c, If):
        lines = [indent + f"if {pretty_bexp(c.guard)} then {{"]
        lines += _pretty_com_lines(c.then_branch, indent + "  ")
        if isinstance(c.else_branch, Skip):
            lines.append(indent + "}")
        else:
            lines.append(indent + "} else {")
            lines += _pretty_com_lines(c.else_branch, indent + "  ")
            lines.append(indent + "}")
        return lines
    if isinstance(c, While):
        lines = [indent + f"while {pretty_bexp(c.guard)} do {{"]
        lines += _pretty_com_lines(c.body, indent + "  ")
        lines.append(indent + "}")
        return lines
    raise TypeError(f"not a command: {c!r}")


def pretty_com(c: Com, indent: str = "") -> str:
    return "\n".join(_pretty_com_lines(c, indent))


def pretty(p: Program) -> str:
    lines = []
    if p.qubits:
        lines.append("qubits " + ", ".join(p.qubits) + ";")
    for name, gate in p.gates.items():
        if name not in qmath.BUILTIN_GATES:
            lines.append(f"gate {name} = {qmath.format_matrix(gate.matrix, 17)};")
    for name, m in p.measurements.items():
        if name not in BUILTIN_MEASUREMENTS:
            parts = ", ".join(
                f"{qmath.format_matrix(op, 17)} -> {label[0]}"
                for op, label in zip(m.ops, m.labels)
            )
            lines.append(f"meas {name} = {{ {parts} }};")
    lines.append("main {")
    lines += _pretty_com_lines(p.body, "  ")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# variable accounting and substitution


def aexp_vars(a: AExp) -> set[str]:
    if isinstance(a, IntLit):
        return set()
    if isinstance(a, Var):
        return {a.name}
    return aexp_vars(a.left) | aexp_vars(a.right)


def bexp_vars(b: BExp) -> set[str]:
    if isinstance(b, BoolLit):
        return set()
    if isinstance(b, (Eq, Leq)):
        return aexp_vars(b.left) | aexp_vars(b.right)
    if isinstance(b, Not):
        return bexp_vars(b.arg)
    return bexp_vars(b.left) | bexp_vars(b.right)


def com_classical_vars(c: Com) -> set[str]:
    if isinstance(c, (Skip, Abort, Nil, QInit, QUnit)):
        return set()
    if isinstance(c, Assign):
        return {c.name} | aexp_vars(c.expr)
    if isinstance(c, Seq):
        return com_classical_vars(c.first) | com_classical_vars(c.second)
    if isinstance(c, If):
        return bexp_vars(c.guard) | com_classical_vars(c.then_branch) | com_classical_vars(c.else_branch)
    if isinstance(c, While):
        return bexp_vars(c.guard) | com_classical_vars(c.body)
    if isinstance(c, QMeas):
        return {c.name}
    raise TypeError(f"not a command: {c!r}")


def classical_vars(p: Program) -> set[str]:
    return com_classical_vars(p.body)


def quantum_vars(p: Program) -> tuple[str, ...]:
    return p.qubits


def has_while(c: Com):
    """Position of the first loop in the command, or None."""
    if isinstance(c, While):
        return c.pos or (0, 0)
    if isinstance(c, Seq):
        return has_while(c.first) or has_while(c.second)
    if isinstance(c, If):
        return has_while(c.then_branch) or has_while(c.else_branch)
    return None


def subst_aexp(a: AExp, replacement: AExp, name: str) -> AExp:
    if isinstance(a, IntLit):
        return a
    if isinstance(a, Var):
        return replacement if a.name == name else a
    cls = type(a)
    return cls(subst_aexp(a.left, replacement, name), subst_aexp(a.right, replacement, name))


def subst_bexp(b: BExp, replacement: AExp, name: str) -> BExp:
    if isinstance(b, BoolLit):
        return b
    if isinstance(b, (Eq, Leq)):
        cls = type(b)
        return cls(subst_aexp(b.left, replacement, name), subst_aexp(b.right, replacement, name))
    if isinstance(b, Not):
        return Not(subst_bexp(b.arg, replacement, name))
    cls = type(b)
    return cls(subst_bexp(b.left, replacement, name), subst_bexp(b.right, replacement, name))

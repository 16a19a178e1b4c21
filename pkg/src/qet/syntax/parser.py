"""Recursive-descent parser and type checker for ``.qps`` programs.

Grammar (the README has the full reference)::

    program  := decl* stmts
    decl     := ("bool" | "nat" | "qubit") IDENT ("," IDENT)* ";"
    stmts    := stmt (";" stmt)* ";"?
    stmt     := "skip"
              | IDENT ":=" rhs
              | IDENT ("," IDENT)* "*=" GATE
              | "if" expr "then" block ("else" block)?
              | "while" expr "do" block
              | "{" stmts "}"
    rhs      := "meas" IDENT | "|0>" | "|+>" | "cointoss" "(" ")" | "geo" "(" ")" | expr
    block    := "{" stmts "}"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    Assign, BinOp, BoolLit, CoinToss, Expr, GateApp, Geo, If, InitPlus, Measure, NatLit, Not,
    Program, Reset, Skip, Stmt, Var, While, seq,
)
from .gates import ARITY, GATE_NAMES


class SyntaxProblem(Exception):
    """Base class for all front-end diagnostics."""

    kind = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0) -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.kind}: {self.message}"


class LexError(SyntaxProblem):
    kind = "lexical error"


class ParseError(SyntaxProblem):
    kind = "parse error"


class TypeCheckError(SyntaxProblem):
    kind = "type error"


class ArityError(SyntaxProblem):
    kind = "arity error"


KEYWORDS = {
    "bool", "nat", "qubit", "skip", "if", "then", "else", "while", "do", "meas",
    "tt", "ff", "not", "and", "or", "cointoss", "geo",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<ket>\|0>|\|\+>)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=|\*=|[;,{}()+\-*=<])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, num, op, ket, eof
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("keyword" if text in KEYWORDS else "ident", text, line, col))
        elif kind in ("num", "op", "ket"):
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self.toks = tokenize(source)
        self.i = 0
        self.types: dict[str, str] = {}
        self.decl: dict[str, list[str]] = {"bool": [], "nat": [], "qubit": []}
        self.positions: dict[str, tuple[int, int]] = {}

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "keyword", "ket") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}, found {self.describe(self.tok)}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail(f"expected identifier, found {self.describe(self.tok)}")
        return self.advance()

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def fail(self, msg: str, tok: Token | None = None) -> None:
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col)

    # -- declarations

    def program(self) -> Program:
        while self.tok.kind == "keyword" and self.tok.text in ("bool", "nat", "qubit"):
            self.declaration()
        if self.tok.kind == "eof":
            body: Stmt = Skip()
        else:
            body = self.stmts()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.describe(self.tok)}")
        return Program(
            tuple(self.decl["bool"]), tuple(self.decl["nat"]), tuple(self.decl["qubit"]),
            body, self.positions,
        )

    def declaration(self) -> None:
        ty = self.advance().text
        while True:
            t = self.expect_ident()
            if t.text in self.types:
                raise TypeCheckError(f"{t.text!r} declared twice", t.line, t.col)
            self.types[t.text] = ty
            self.decl[ty].append(t.text)
            self.positions[t.text] = (t.line, t.col)
            if not self.at(","):
                break
            self.advance()
        self.expect(";")

    # -- statements

    def stmts(self) -> Stmt:
        items = [self.stmt()]
        while self.at(";"):
            self.advance()
            if self.at("}") or self.tok.kind == "eof":
                break
            items.append(self.stmt())
        return seq(*items)

    def block(self) -> Stmt:
        self.expect("{")
        body = self.stmts()
        self.expect("}")
        return body

    def stmt(self) -> Stmt:
        t = self.tok
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("{"):
            return self.block()
        if self.at("if"):
            self.advance()
            cond = self.typed_expr("bool")
            self.expect("then")
            then = self.block()
            orelse: Stmt = Skip()
            if self.at("else"):
                self.advance()
                orelse = self.block()
            return If(cond, then, orelse)
        if self.at("while"):
            self.advance()
            cond = self.typed_expr("bool")
            self.expect("do")
            return While(cond, self.block())
        if t.kind == "ident":
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text in (",", "*="):
                return self.gate_app()
            if nxt.kind == "op" and nxt.text == ":=":
                return self.assignment()
            self.fail(f"expected ':=' or '*=' after {t.text!r}", nxt)
        self.fail(f"expected a statement, found {self.describe(t)}")
        raise AssertionError  # unreachable

    def var_of_type(self, t: Token, expected: str, role: str) -> str:
        ty = self.types.get(t.text)
        if ty is None:
            raise TypeCheckError(f"undeclared variable {t.text!r}", t.line, t.col)
        if ty != expected:
            raise TypeCheckError(f"{role} {t.text!r} has type {ty}, expected {expected}", t.line, t.col)
        return t.text

    def gate_app(self) -> Stmt:
        first = self.tok
        names = [self.expect_ident()]
        while self.at(","):
            self.advance()
            names.append(self.expect_ident())
        self.expect("*=")
        g = self.tok
        # gate names are case-insensitive: `q *= cnot` is CNOT
        gate = g.text.upper()
        if g.kind != "ident" or gate not in GATE_NAMES:
            self.fail(f"unknown gate {g.text!r}" if g.kind != "eof" else "expected gate name", g)
        self.advance()
        qs = tuple(self.var_of_type(n, "qubit", "gate operand") for n in names)
        if len(qs) != ARITY[gate]:
            raise ArityError(
                f"gate {gate} expects {ARITY[gate]} qubit(s), got {len(qs)}", first.line, first.col
            )
        if len(set(qs)) != len(qs):
            raise TypeCheckError(f"gate {gate} applied to repeated qubit", first.line, first.col)
        return GateApp(gate, qs)

    def assignment(self) -> Stmt:
        target = self.advance()
        self.expect(":=")
        if target.text not in self.types:
            raise TypeCheckError(f"undeclared variable {target.text!r}", target.line, target.col)
        if self.at("meas"):
            self.advance()
            q = self.expect_ident()
            return Measure(
                self.var_of_type(target, "bool", "measurement target"),
                self.var_of_type(q, "qubit", "measured operand"),
            )
        if self.tok.kind == "ket":
            ket = self.advance().text
            name = self.var_of_type(target, "qubit", "initialised operand")
            return Reset(name) if ket == "|0>" else InitPlus(name)
        if self.at("cointoss") or self.at("geo"):
            fn = self.advance().text
            self.expect("(")
            self.expect(")")
            if fn == "cointoss":
                return CoinToss(self.var_of_type(target, "bool", "cointoss target"))
            return Geo(self.var_of_type(target, "nat", "geo target"))
        ty = self.types[target.text]
        if ty == "qubit":
            raise TypeCheckError(
                f"qubit {target.text!r} can only be assigned |0> or |+>", target.line, target.col
            )
        return Assign(target.text, self.typed_expr(ty))

    # -- expressions

    def typed_expr(self, expected: str) -> Expr:
        t = self.tok
        e, ty = self.expr_or()
        if ty != expected:
            raise TypeCheckError(f"expression has type {ty}, expected {expected}", t.line, t.col)
        return e

    def _need(self, ty: str, expected: str, t: Token, what: str) -> None:
        if ty != expected:
            raise TypeCheckError(f"operand of {what} has type {ty}, expected {expected}", t.line, t.col)

    def expr_or(self) -> tuple[Expr, str]:
        t = self.tok
        e, ty = self.expr_and()
        while self.at("or"):
            self._need(ty, "bool", t, "'or'")
            self.advance()
            r_tok = self.tok
            r, rty = self.expr_and()
            self._need(rty, "bool", r_tok, "'or'")
            e, ty = BinOp("or", e, r), "bool"
        return e, ty

    def expr_and(self) -> tuple[Expr, str]:
        t = self.tok
        e, ty = self.expr_not()
        while self.at("and"):
            self._need(ty, "bool", t, "'and'")
            self.advance()
            r_tok = self.tok
            r, rty = self.expr_not()
            self._need(rty, "bool", r_tok, "'and'")
            e, ty = BinOp("and", e, r), "bool"
        return e, ty

    def expr_not(self) -> tuple[Expr, str]:
        if self.at("not"):
            self.advance()
            t = self.tok
            e, ty = self.expr_not()
            self._need(ty, "bool", t, "'not'")
            return Not(e), "bool"
        return self.expr_cmp()

    def expr_cmp(self) -> tuple[Expr, str]:
        t = self.tok
        e, ty = self.expr_add()
        if self.at("=") or self.at("<"):
            op = self.advance().text
            self._need(ty, "nat", t, repr(op))
            r_tok = self.tok
            r, rty = self.expr_add()
            self._need(rty, "nat", r_tok, repr(op))
            return BinOp(op, e, r), "bool"
        return e, ty

    def expr_add(self) -> tuple[Expr, str]:
        t = self.tok
        e, ty = self.expr_mul()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            self._need(ty, "nat", t, repr(op))
            r_tok = self.tok
            r, rty = self.expr_mul()
            self._need(rty, "nat", r_tok, repr(op))
            e, ty = BinOp(op, e, r), "nat"
        return e, ty

    def expr_mul(self) -> tuple[Expr, str]:
        t = self.tok
        e, ty = self.expr_atom()
        while self.at("*"):
            self.advance()
            self._need(ty, "nat", t, "'*'")
            r_tok = self.tok
            r, rty = self.expr_atom()
            self._need(rty, "nat", r_tok, "'*'")
            e, ty = BinOp("*", e, r), "nat"
        return e, ty

    def expr_atom(self) -> tuple[Expr, str]:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return NatLit(int(t.text)), "nat"
        if self.at("tt") or self.at("ff"):
            self.advance()
            return BoolLit(t.text == "tt"), "bool"
        if self.at("("):
            self.advance()
            e = self.expr_or()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.advance()
            ty = self.types.get(t.text)
            if ty is None:
                raise TypeCheckError(f"undeclared variable {t.text!r}", t.line, t.col)
            if ty == "qubit":
                raise TypeCheckError(f"qubit {t.text!r} used in a classical expression", t.line, t.col)
            return Var(t.text), ty
        self.fail(f"expected an expression, found {self.describe(t)}")
        raise AssertionError  # unreachable


def parse_surface(source: str) -> Program:
    """Parse and type check, keeping syntactic sugar and leaving labels unassigned."""
    return _Parser(source).program()


def parse(source: str) -> Program:
    """Parse, type check, desugar and label a program."""
    from .desugar import prepare

    return prepare(parse_surface(source))

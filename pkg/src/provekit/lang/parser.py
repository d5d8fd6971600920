"""Concrete syntax for goal files.

One declaration per ``goal`` keyword:

    goal sum_nonneg (l: IntList) := 0 <= len(l)   # trailing comment

ASCII spellings are canonical (``/\\``, ``\\/``, ``->``, ``!``, ``in``,
``::``, ``++``); the common Unicode aliases are accepted on input.  ``>``,
``>=`` and ``!=`` are sugar for the flipped or negated core comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError
from .ast import (
    Add,
    And,
    Append,
    Cons,
    Count,
    Eq,
    Exists,
    FalseF,
    Forall,
    Formula,
    GoalDecl,
    IfThenElse,
    IntLit,
    Le,
    Length,
    ListLit,
    Lt,
    Mem,
    Mod,
    Mul,
    Not,
    Or,
    Implies,
    Sort,
    SourceSpan,
    Sub,
    Term,
    TrueF,
    Var,
)

KEYWORDS = {
    "goal", "forall", "exists", "in", "if", "then", "else",
    "true", "false", "len", "count",
}

_UNICODE_ALIASES = {
    "∀": ("KW", "forall"),   # forall sign
    "∃": ("KW", "exists"),   # exists sign
    "∧": ("SYM", "/\\"),     # logical and
    "∨": ("SYM", "\\/"),     # logical or
    "→": ("SYM", "->"),      # rightwards arrow
    "⇒": ("SYM", "->"),      # double arrow
    "¬": ("SYM", "!"),       # negation sign
    "∈": ("KW", "in"),       # element of
    "≤": ("SYM", "<="),
    "≥": ("SYM", ">="),
    "≠": ("SYM", "!="),
}

# Longest first so maximal munch works with a simple scan.
_SYMBOLS = [
    ":=", "::", "<=", ">=", "!=", "++", "->", "/\\", "\\/",
    "(", ")", "[", "]", ",", ":", "=", "<", ">", "!", "+", "-", "*", "%",
]


@dataclass(frozen=True)
class Token:
    kind: str          # "INT" | "IDENT" | "KW" | "SYM" | "EOF"
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(len(self.text), 1))


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch in _UNICODE_ALIASES:
            kind, text = _UNICODE_ALIASES[ch]
            tokens.append(Token(kind, text, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            tokens.append(Token("INT", source[start:i], line, col))
            col += i - start
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            tokens.append(Token("KW" if text in KEYWORDS else "IDENT", text, line, col))
            col += i - start
            continue
        for sym in _SYMBOLS:
            if source.startswith(sym, i):
                tokens.append(Token("SYM", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


_COMPARISON_SYMS = {"=", "<", "<=", ">", ">=", "!="}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYM" and tok.text == text

    def at_kw(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "KW" and tok.text == text

    def expect_sym(self, text: str) -> Token:
        if not self.at_sym(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def expect_kw(self, text: str) -> Token:
        if not self.at_kw(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, message: str) -> None:
        tok = self.peek()
        shown = tok.text or "end of input"
        raise ParseError(f"{message}, found {shown!r}", tok.line, tok.column, max(len(tok.text), 1))

    # -- declarations ------------------------------------------------------

    def parse_file(self) -> list[GoalDecl]:
        decls: list[GoalDecl] = []
        seen: set[str] = set()
        while self.peek().kind != "EOF":
            decl = self.parse_decl()
            if decl.name in seen:
                span = decl.span or SourceSpan(1, 1)
                raise ParseError(
                    f"duplicate goal name {decl.name!r}", span.line, span.column, span.length
                )
            seen.add(decl.name)
            decls.append(decl)
        return decls

    def parse_decl(self) -> GoalDecl:
        self.expect_kw("goal")
        name_tok = self.peek()
        if name_tok.kind != "IDENT":
            self.fail("expected goal name")
        self.advance()
        binders: list[tuple[str, Sort]] = []
        scope: dict[str, Sort] = {}
        while self.at_sym("("):
            self.advance()
            btok = self.peek()
            if btok.kind != "IDENT":
                self.fail("expected binder name")
            self.advance()
            self.expect_sym(":")
            sort = self.parse_sort()
            self.expect_sym(")")
            if btok.text in scope:
                raise ParseError(
                    f"duplicate binder {btok.text!r}", btok.line, btok.column, len(btok.text)
                )
            scope[btok.text] = sort
            binders.append((btok.text, sort))
        self.expect_sym(":=")
        body = self.parse_formula(scope)
        return GoalDecl(name_tok.text, tuple(binders), body, span=name_tok.span)

    def parse_sort(self) -> Sort:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text == "Int":
            self.advance()
            return Sort.INT
        if tok.kind == "IDENT" and tok.text == "IntList":
            self.advance()
            return Sort.INT_LIST
        self.fail("unknown sort (expected Int or IntList)")
        raise AssertionError  # unreachable

    # -- formulas ----------------------------------------------------------

    def parse_formula(self, scope: dict[str, Sort]) -> Formula:
        return self.parse_implies(scope)

    def parse_implies(self, scope: dict[str, Sort]) -> Formula:
        left = self.parse_or(scope)
        if self.at_sym("->"):
            self.advance()
            return Implies(left, self.parse_formula(scope))
        return left

    def parse_or(self, scope: dict[str, Sort]) -> Formula:
        left = self.parse_and(scope)
        if self.at_sym("\\/"):
            self.advance()
            return Or(left, self.parse_or(scope))
        return left

    def parse_and(self, scope: dict[str, Sort]) -> Formula:
        left = self.parse_not(scope)
        if self.at_sym("/\\"):
            self.advance()
            return And(left, self.parse_and(scope))
        return left

    def parse_not(self, scope: dict[str, Sort]) -> Formula:
        if self.at_sym("!"):
            self.advance()
            return Not(self.parse_not(scope))
        return self.parse_atom(scope)

    def parse_quantifier(self, scope: dict[str, Sort]) -> Formula:
        ctor = Forall if self.peek().text == "forall" else Exists
        self.advance()
        btok = self.peek()
        if btok.kind != "IDENT":
            self.fail("expected bound variable name")
        self.advance()
        self.expect_sym(":")
        sort = self.parse_sort()
        self.expect_sym(",")
        inner = dict(scope)
        inner[btok.text] = sort
        return ctor(btok.text, sort, self.parse_formula(inner))

    def parse_atom(self, scope: dict[str, Sort]) -> Formula:
        tok = self.peek()
        if tok.kind == "KW" and tok.text in ("forall", "exists"):
            return self.parse_quantifier(scope)
        if self.at_kw("true"):
            self.advance()
            return TrueF()
        if self.at_kw("false"):
            self.advance()
            return FalseF()
        if self.at_sym("("):
            # Could open a parenthesized formula or the left term of a
            # comparison; try the comparison route first and back off.
            saved = self.pos
            try:
                return self.parse_comparison(scope)
            except ParseError:
                self.pos = saved
            self.advance()
            inner = self.parse_formula(scope)
            self.expect_sym(")")
            return inner
        return self.parse_comparison(scope)

    def parse_comparison(self, scope: dict[str, Sort]) -> Formula:
        op_tok_start = self.peek()
        left, left_sort = self.parse_term(scope)
        tok = self.peek()
        if tok.kind == "KW" and tok.text == "in":
            self.advance()
            right, right_sort = self.parse_term(scope)
            self.check_sort(Sort.INT, left_sort, op_tok_start)
            self.check_sort(Sort.INT_LIST, right_sort, tok)
            return Mem(left, right)
        if tok.kind != "SYM" or tok.text not in _COMPARISON_SYMS:
            self.fail("expected comparison operator")
        self.advance()
        right, right_sort = self.parse_term(scope)
        if tok.text == "=":
            if left_sort != right_sort:
                raise ParseError(
                    f"sort mismatch: {left_sort} = {right_sort}", tok.line, tok.column
                )
            return Eq(left, right)
        if tok.text == "!=":
            if left_sort != right_sort:
                raise ParseError(
                    f"sort mismatch: {left_sort} != {right_sort}", tok.line, tok.column
                )
            return Not(Eq(left, right))
        self.check_sort(Sort.INT, left_sort, tok)
        self.check_sort(Sort.INT, right_sort, tok)
        if tok.text == "<":
            return Lt(left, right)
        if tok.text == "<=":
            return Le(left, right)
        if tok.text == ">":
            return Lt(right, left)
        return Le(right, left)  # ">="

    def check_sort(self, expected: Sort, actual: Sort, tok: Token) -> None:
        if expected != actual:
            raise ParseError(
                f"sort mismatch: expected {expected}, got {actual}",
                tok.line,
                tok.column,
                max(len(tok.text), 1),
            )

    # -- terms ---------------------------------------------------------------

    def parse_term(self, scope: dict[str, Sort]) -> tuple[Term, Sort]:
        return self.parse_cons(scope)

    def parse_cons(self, scope: dict[str, Sort]) -> tuple[Term, Sort]:
        left, left_sort = self.parse_additive(scope)
        tok = self.peek()
        if tok.kind == "SYM" and tok.text == "::":
            self.advance()
            right, right_sort = self.parse_cons(scope)
            self.check_sort(Sort.INT, left_sort, tok)
            self.check_sort(Sort.INT_LIST, right_sort, tok)
            return Cons(left, right), Sort.INT_LIST
        if tok.kind == "SYM" and tok.text == "++":
            self.advance()
            right, right_sort = self.parse_cons(scope)
            self.check_sort(Sort.INT_LIST, left_sort, tok)
            self.check_sort(Sort.INT_LIST, right_sort, tok)
            return Append(left, right), Sort.INT_LIST
        return left, left_sort

    def parse_additive(self, scope: dict[str, Sort]) -> tuple[Term, Sort]:
        left, left_sort = self.parse_multiplicative(scope)
        while True:
            tok = self.peek()
            if tok.kind == "SYM" and tok.text in ("+", "-"):
                self.advance()
                right, right_sort = self.parse_multiplicative(scope)
                self.check_sort(Sort.INT, left_sort, tok)
                self.check_sort(Sort.INT, right_sort, tok)
                left = Add(left, right) if tok.text == "+" else Sub(left, right)
                left_sort = Sort.INT
            else:
                return left, left_sort

    def parse_multiplicative(self, scope: dict[str, Sort]) -> tuple[Term, Sort]:
        left, left_sort = self.parse_primary(scope)
        while True:
            tok = self.peek()
            if tok.kind == "SYM" and tok.text in ("*", "%"):
                self.advance()
                right, right_sort = self.parse_primary(scope)
                self.check_sort(Sort.INT, left_sort, tok)
                self.check_sort(Sort.INT, right_sort, tok)
                left = Mul(left, right) if tok.text == "*" else Mod(left, right)
                left_sort = Sort.INT
            else:
                return left, left_sort

    def parse_primary(self, scope: dict[str, Sort]) -> tuple[Term, Sort]:
        tok = self.peek()
        if tok.kind == "INT":
            self.advance()
            return IntLit(int(tok.text)), Sort.INT
        if tok.kind == "SYM" and tok.text == "-" and self.tokens[self.pos + 1].kind == "INT":
            self.advance()
            lit = self.advance()
            return IntLit(-int(lit.text)), Sort.INT
        if tok.kind == "IDENT":
            self.advance()
            if tok.text not in scope:
                raise ParseError(
                    f"unbound variable {tok.text!r}", tok.line, tok.column, len(tok.text)
                )
            return Var(tok.text), scope[tok.text]
        if tok.kind == "KW" and tok.text == "len":
            self.advance()
            self.expect_sym("(")
            arg, arg_sort = self.parse_term(scope)
            self.check_sort(Sort.INT_LIST, arg_sort, tok)
            self.expect_sym(")")
            return Length(arg), Sort.INT
        if tok.kind == "KW" and tok.text == "count":
            self.advance()
            self.expect_sym("(")
            arg, arg_sort = self.parse_term(scope)
            self.check_sort(Sort.INT_LIST, arg_sort, tok)
            self.expect_sym(",")
            elem, elem_sort = self.parse_term(scope)
            self.check_sort(Sort.INT, elem_sort, tok)
            self.expect_sym(")")
            return Count(arg, elem), Sort.INT
        if tok.kind == "KW" and tok.text == "if":
            self.advance()
            cond = self.parse_formula(scope)
            self.expect_kw("then")
            then, then_sort = self.parse_term(scope)
            self.expect_kw("else")
            other, other_sort = self.parse_term(scope)
            if then_sort != other_sort:
                raise ParseError(
                    f"sort mismatch: branches are {then_sort} and {other_sort}",
                    tok.line,
                    tok.column,
                )
            return IfThenElse(cond, then, other), then_sort
        if tok.kind == "SYM" and tok.text == "[":
            self.advance()
            elements: list[Term] = []
            if not self.at_sym("]"):
                while True:
                    elem, elem_sort = self.parse_term(scope)
                    self.check_sort(Sort.INT, elem_sort, tok)
                    elements.append(elem)
                    if self.at_sym(","):
                        self.advance()
                        continue
                    break
            self.expect_sym("]")
            return ListLit(tuple(elements)), Sort.INT_LIST
        if tok.kind == "SYM" and tok.text == "(":
            self.advance()
            term, sort = self.parse_term(scope)
            self.expect_sym(")")
            return term, sort
        self.fail("expected term")
        raise AssertionError  # unreachable


def parse_goal_file(source: str) -> list[GoalDecl]:
    """Parse a goal file into declarations, enforcing well-sortedness,
    bound variables, and unique goal names."""
    return _Parser(tokenize(source)).parse_file()


def parse_goal(source: str) -> GoalDecl:
    """Parse exactly one declaration (the wire format for a single lemma)."""
    decls = parse_goal_file(source)
    if len(decls) != 1:
        raise ParseError(f"expected exactly one goal, found {len(decls)}", 1, 1)
    return decls[0]

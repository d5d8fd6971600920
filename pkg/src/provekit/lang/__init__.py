"""Spec language: syntax tree, parser, printer, and structural measures."""

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
    alpha_equivalent,
    conjunct_fringe,
    formula_footprint,
    free_vars,
    operator_footprint,
    rename_free,
    statement_key,
    substitute,
    term_footprint,
)
from .parser import parse_goal, parse_goal_file, tokenize
from .printer import format_formula, format_term, print_goal, print_goal_file

__all__ = [
    "Add", "And", "Append", "Cons", "Count", "Eq", "Exists", "FalseF",
    "Forall", "Formula", "GoalDecl", "IfThenElse", "IntLit", "Le", "Length",
    "ListLit", "Lt", "Mem", "Mod", "Mul", "Not", "Or", "Implies", "Sort",
    "SourceSpan", "Sub", "Term", "TrueF", "Var",
    "alpha_equivalent", "conjunct_fringe", "formula_footprint", "free_vars",
    "operator_footprint", "rename_free", "statement_key", "substitute",
    "term_footprint",
    "parse_goal", "parse_goal_file", "tokenize",
    "format_formula", "format_term", "print_goal", "print_goal_file",
]

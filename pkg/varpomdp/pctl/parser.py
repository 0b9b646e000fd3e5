# The MIT License (MIT)
# Copyright © 2024 varpomdp developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

from lark import Lark, Transformer, Token
from lark.exceptions import UnexpectedInput, VisitError

from varpomdp.schemas import (
    And,
    Atom,
    Comparator,
    FALSE,
    Not,
    PathOperator,
    PctlSpec,
    TrueFormula,
)
from varpomdp.utils.exceptions import PctlSyntaxError

PCTL_GRAMMAR = r"""
    start: "P" comparator PROB "[" path "]"

    comparator: LE | LT | GE | GT

    ?path: state "U" LE STEPS state  -> bounded_until
         | state "U" state           -> until
         | "X" state                 -> next

    ?state: unary
          | state "&" unary          -> and_

    ?unary: "!" unary                -> not_
          | "true"                   -> true
          | "false"                  -> false
          | ESCAPED_STRING           -> atom
          | "(" state ")"

    LE: "<="
    LT: "<"
    GE: ">="
    GT: ">"
    PROB: /[0-9]*\.?[0-9]+([eE][-+]?[0-9]+)?/
    STEPS: /[-+]?[0-9]+/

    %import common.ESCAPED_STRING
    %import common.WS
    %ignore WS
"""

_parser = Lark(PCTL_GRAMMAR, parser="lalr", propagate_positions=True)


class PctlTransformer(Transformer):
    """Turns the parse tree into a PctlSpec, checking the numeric ranges."""

    def true(self, _):
        return TrueFormula()

    def false(self, _):
        return FALSE

    def atom(self, children):
        (token,) = children
        return Atom(name=token[1:-1].replace('\\"', '"'))

    def not_(self, children):
        return Not(operand=children[0])

    def and_(self, children):
        return And(left=children[0], right=children[1])

    def comparator(self, children):
        return Comparator(str(children[0]))

    def bounded_until(self, children):
        phi1, _, steps, phi2 = children
        k = int(steps)
        if k < 0:
            raise PctlSyntaxError(f"Step bound must be >= 0, got {k}", steps.start_pos)
        return dict(path=PathOperator.BOUNDED_UNTIL, phi1=phi1, phi2=phi2, steps=k)

    def until(self, children):
        phi1, phi2 = children
        return dict(path=PathOperator.UNTIL, phi1=phi1, phi2=phi2)

    def next(self, children):
        return dict(path=PathOperator.NEXT, phi2=children[0])

    def start(self, children):
        comparator, bound, path = children
        p = float(bound)
        if not 0.0 <= p <= 1.0:
            raise PctlSyntaxError(f"Probability bound {p} outside [0, 1]", bound.start_pos)
        return PctlSpec(comparator=comparator, bound=p, **path)


def _error_position(error: UnexpectedInput, text: str) -> int:
    token = getattr(error, "token", None)
    if isinstance(token, Token) and token.start_pos is not None:
        return token.start_pos
    pos = getattr(error, "pos_in_stream", None)
    if pos is None or pos < 0:
        return len(text)
    return pos


def parse_spec(text: str) -> PctlSpec:
    """Parses `P ⋈ p [ phi1 U<=k phi2 ]`, `P ⋈ p [ X phi ]` or unbounded `U`.

    Nested P operators are rejected as syntax errors.
    """
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        position = _error_position(e, text)
        if text[position : position + 1] == "P":
            raise PctlSyntaxError("Nested P operators are not supported", position) from None
        found = text[position : position + 10] or "end of input"
        raise PctlSyntaxError(f"Unexpected input {found!r}", position) from None
    try:
        return PctlTransformer().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, PctlSyntaxError):
            raise e.orig_exc from None
        raise

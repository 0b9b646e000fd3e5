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

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import FrozenSet, Optional

import numpy as np
from strenum import StrEnum


class Comparator(StrEnum):
    """Comparison ⋈ between the maximal satisfaction probability and the bound."""

    LE = "<="
    LT = "<"
    GE = ">="
    GT = ">"

    def compare(self, value: float, bound: float) -> bool:
        if self == Comparator.LE:
            return value <= bound
        if self == Comparator.LT:
            return value < bound
        if self == Comparator.GE:
            return value >= bound
        return value > bound


class PathOperator(StrEnum):
    BOUNDED_UNTIL = "bounded_until"
    UNTIL = "until"
    NEXT = "next"


class StateFormula(ABC):
    """Propositional formula over atomic propositions."""

    @abstractmethod
    def holds(self, labels: FrozenSet[str]) -> bool:
        ...

    def atoms(self) -> FrozenSet[str]:
        return frozenset()


@dataclass(frozen=True)
class TrueFormula(StateFormula):
    def holds(self, labels):
        return True

    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Atom(StateFormula):
    name: str

    def holds(self, labels):
        return self.name in labels

    def atoms(self):
        return frozenset([self.name])

    def __str__(self):
        return f'"{self.name}"'


@dataclass(frozen=True)
class Not(StateFormula):
    operand: StateFormula

    def holds(self, labels):
        return not self.operand.holds(labels)

    def atoms(self):
        return self.operand.atoms()

    def __str__(self):
        if isinstance(self.operand, TrueFormula):
            return "false"
        return f"!{self.operand}"


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula

    def holds(self, labels):
        return self.left.holds(labels) and self.right.holds(labels)

    def atoms(self):
        return self.left.atoms() | self.right.atoms()

    def __str__(self):
        return f"({self.left} & {self.right})"


FALSE = Not(TrueFormula())


@dataclass(frozen=True)
class PctlSpec:
    """P ⋈ p [ path ]. For `next`, phi1 is None and phi2 is the operand."""

    comparator: Comparator
    bound: float
    path: PathOperator
    phi2: StateFormula
    phi1: Optional[StateFormula] = None
    steps: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.bound <= 1.0:
            raise ValueError(f"Probability bound {self.bound} outside [0, 1]")
        if self.path == PathOperator.BOUNDED_UNTIL and (self.steps is None or self.steps < 0):
            raise ValueError(f"Bounded until needs a step bound k >= 0, got {self.steps}")

    @property
    def horizon(self) -> Optional[int]:
        return self.steps

    def atoms(self) -> FrozenSet[str]:
        out = self.phi2.atoms()
        if self.phi1 is not None:
            out = out | self.phi1.atoms()
        return out

    def __str__(self):
        if self.path == PathOperator.NEXT:
            body = f"X {self.phi2}"
        elif self.path == PathOperator.UNTIL:
            body = f"{self.phi1} U {self.phi2}"
        else:
            body = f"{self.phi1} U<={self.steps} {self.phi2}"
        return f"P{self.comparator}{self.bound} [ {body} ]"


@dataclass(frozen=True, eq=False)
class StatePartition:
    """S^yes / S^no / S^? split for bounded until, with terminal reward p0."""

    s_yes: FrozenSet[int]
    s_no: FrozenSet[int]
    s_q: FrozenSet[int]
    p0: np.ndarray = field(repr=False)

    @property
    def absorbing(self) -> FrozenSet[int]:
        return self.s_yes | self.s_no

    def check(self, num_states: int) -> bool:
        everything = self.s_yes | self.s_no | self.s_q
        disjoint = not (self.s_yes & self.s_no or self.s_yes & self.s_q or self.s_no & self.s_q)
        reward_ok = all(
            self.p0[s] == (1.0 if s in self.s_yes else 0.0) for s in range(num_states)
        )
        return disjoint and everything == frozenset(range(num_states)) and reward_ok

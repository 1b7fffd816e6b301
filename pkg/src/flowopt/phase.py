"""Exact phases in units of pi, reduced mod 2, with an optional variable reference."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Tuple, Union

PhaseLike = Union["PhaseExpr", Fraction, int]

__all__ = ["PhaseExpr", "PhaseLike", "as_fraction", "is_clifford", "is_pauli", "is_proper_clifford"]


def as_fraction(x: Union[Fraction, int, str]) -> Fraction:
    """Return ``x`` as a Fraction reduced into ``[0, 2)``."""
    f = Fraction(x)
    return f % 2


def is_pauli(x: Fraction) -> bool:
    return x.denominator == 1


def is_proper_clifford(x: Fraction) -> bool:
    return x.denominator == 2


def is_clifford(x: Fraction) -> bool:
    return x.denominator <= 2


@dataclass(frozen=True)
class PhaseExpr:
    """A phase ``clifford + m * alpha_var``.

    ``clifford`` is kept in ``[0, 2)``. ``var`` is ``(variable_id, multiplier)`` with the
    multiplier in ``{-1, +1}``; a phase carries at most one variable.
    """

    clifford: Fraction = Fraction(0)
    var: Optional[Tuple[int, int]] = None

    def __post_init__(self) -> None:
        c = self.clifford
        if not isinstance(c, Fraction):
            if isinstance(c, float):
                raise TypeError("phases must be exact rationals, not floats")
            c = Fraction(c)
        object.__setattr__(self, "clifford", c % 2)
        if self.var is not None:
            vid, mult = self.var
            if mult not in (-1, 1):
                raise ValueError(f"variable multiplier must be +1 or -1, got {mult}")
            object.__setattr__(self, "var", (int(vid), int(mult)))

    @classmethod
    def of(cls, x: PhaseLike) -> "PhaseExpr":
        if isinstance(x, PhaseExpr):
            return x
        return cls(Fraction(x))

    @classmethod
    def variable(cls, vid: int, mult: int = 1, clifford: Union[Fraction, int] = 0) -> "PhaseExpr":
        return cls(Fraction(clifford), (vid, mult))

    @property
    def is_symbolic(self) -> bool:
        return self.var is not None

    @property
    def value(self) -> Fraction:
        """The concrete phase. Raises if a variable is still attached."""
        if self.var is not None:
            raise ValueError(f"phase {self} carries unresolved variable {self.var[0]}")
        return self.clifford

    def is_zero(self) -> bool:
        return self.var is None and self.clifford == 0

    def is_pauli(self) -> bool:
        return self.var is None and self.clifford.denominator == 1

    def is_proper_clifford(self) -> bool:
        return self.var is None and self.clifford.denominator == 2

    def is_clifford(self) -> bool:
        return self.var is None and self.clifford.denominator <= 2

    def __add__(self, other: PhaseLike) -> "PhaseExpr":
        o = PhaseExpr.of(other)
        if self.var is not None and o.var is not None:
            raise ValueError("cannot add two phases that both carry a variable")
        return PhaseExpr(self.clifford + o.clifford, self.var if self.var is not None else o.var)

    __radd__ = __add__

    def __neg__(self) -> "PhaseExpr":
        var = None if self.var is None else (self.var[0], -self.var[1])
        return PhaseExpr(-self.clifford, var)

    def __sub__(self, other: PhaseLike) -> "PhaseExpr":
        return self + (-PhaseExpr.of(other))

    def substitute(self, values: Mapping[int, Fraction]) -> "PhaseExpr":
        """Replace the variable (if any) by ``values[var_id]``."""
        if self.var is None:
            return self
        vid, mult = self.var
        return PhaseExpr(self.clifford + mult * Fraction(values[vid]))

    def __str__(self) -> str:
        base = str(self.clifford)
        if self.var is None:
            return base
        sign = "+" if self.var[1] > 0 else "-"
        return f"{base}{sign}a{self.var[0]}"

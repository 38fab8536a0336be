"""Exact Gaussian rational scalars a/b + (c/d)i.

All coefficient arithmetic in the word algebra happens over this field so
that nilpotency and chain-stabilization decisions never depend on a
floating point tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputParseError


@dataclass(frozen=True)
class Scalar:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, other: "Scalar") -> "Scalar":
        # identity fast paths matter: permutation unitaries are all 0/1
        if self is ZERO:
            return other
        if other is ZERO:
            return self
        return Scalar(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "Scalar") -> "Scalar":
        if other is ZERO:
            return self
        return Scalar(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, other: "Scalar") -> "Scalar":
        if self is ONE:
            return other
        if other is ONE:
            return self
        if self is ZERO or other is ZERO:
            return ZERO
        if self.im == 0 and other.im == 0:
            return Scalar(self.re * other.re)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "Scalar") -> "Scalar":
        if other is ONE:
            return self
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero scalar")
        return Scalar(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def conjugate(self) -> "Scalar":
        if self.im == 0:
            return self
        return Scalar(self.re, -self.im)

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __str__(self) -> str:
        return format_scalar(self)


ZERO = Scalar()
ONE = Scalar(Fraction(1))
MINUS_ONE = Scalar(Fraction(-1))
I = Scalar(Fraction(0), Fraction(1))


def rational(p: int, q: int = 1) -> Scalar:
    return Scalar(Fraction(p, q))


def gaussian(re_p: int, re_q: int, im_p: int, im_q: int) -> Scalar:
    return Scalar(Fraction(re_p, re_q), Fraction(im_p, im_q))


def format_scalar(s: Scalar) -> str:
    if s.im == 0:
        return str(s.re)
    if s.re == 0:
        if s.im == 1:
            return "i"
        if s.im == -1:
            return "-i"
        return f"{s.im}i"
    sign = "+" if s.im > 0 else "-"
    mag = abs(s.im)
    imag = "i" if mag == 1 else f"{mag}i"
    return f"{s.re}{sign}{imag}"


def parse_scalar(text: str) -> Scalar:
    """Parse entries like ``3``, ``-3/5``, ``3/5+4/5i``, ``i``, ``-1/2i``."""
    s = "".join(text.split())
    if not s:
        raise InputParseError("empty scalar")
    try:
        if not s.endswith("i"):
            return Scalar(Fraction(s))
        body = s[:-1]
        # locate the sign that splits real and imaginary parts, if any
        split = None
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "+-/":
                split = pos
                break
        if split is None:
            re_part, im_part = "", body
        else:
            re_part, im_part = body[:split], body[split:]
        if im_part in ("", "+"):
            im = Fraction(1)
        elif im_part == "-":
            im = Fraction(-1)
        else:
            im = Fraction(im_part)
        re = Fraction(re_part) if re_part else Fraction(0)
        return Scalar(re, im)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputParseError(f"bad scalar {text!r}: {exc}") from None

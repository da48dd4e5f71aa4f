"""Exact scalars: prime-field residues and big-integer rationals.

Every protocol and analysis path runs on these types and nothing here
ever rounds: prime-field values are canonical residues in [0, p) and
rational values are reduced fractions over arbitrary-precision integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainMismatchError

__all__ = [
    "PrimeField",
    "Rationals",
    "RATIONALS",
    "Scalar",
    "Domain",
    "is_prime",
    "domain_from_label",
    "format_scalar",
    "parse_scalar",
    "scalar_to_json",
    "scalar_from_json",
]


def is_prime(n: int) -> bool:
    """Trial-division primality check, adequate for the small moduli used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field of integers modulo a prime, with exact residue arithmetic."""

    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    @property
    def label(self) -> str:
        return f"F{self.p}"

    def scalar(self, value: int) -> "Scalar":
        return Scalar(self, value % self.p)

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, 0)

    @property
    def one(self) -> "Scalar":
        return Scalar(self, 1)

    def elements(self) -> tuple["Scalar", ...]:
        return tuple(Scalar(self, v) for v in range(self.p))

    def nonzero_elements(self) -> tuple["Scalar", ...]:
        return tuple(Scalar(self, v) for v in range(1, self.p))

    # Raw residue operations; Scalar wraps these.
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def div(self, a: int, b: int) -> int:
        if b % self.p == 0:
            raise ZeroDivisionError(f"division by zero in {self.label}")
        return (a * pow(b, -1, self.p)) % self.p


@dataclass(frozen=True)
class Rationals:
    """The rational numbers, backed by reduced big-integer fractions."""

    @property
    def label(self) -> str:
        return "Q"

    def scalar(self, numerator: Union[int, Fraction], denominator: int = 1) -> "Scalar":
        return Scalar(self, Fraction(numerator, denominator))

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, Fraction(0))

    @property
    def one(self) -> "Scalar":
        return Scalar(self, Fraction(1))

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def sub(self, a: Fraction, b: Fraction) -> Fraction:
        return a - b

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def div(self, a: Fraction, b: Fraction) -> Fraction:
        if b == 0:
            raise ZeroDivisionError("division by zero in Q")
        return a / b


RATIONALS = Rationals()

Domain = Union[PrimeField, Rationals]


@dataclass(frozen=True, slots=True)
class Scalar:
    """An exact field element tagged with its domain.

    Arithmetic between scalars of different domains raises
    DomainMismatchError rather than coercing.
    """

    domain: Domain
    value: Union[int, Fraction]

    def _same(self, other: "Scalar") -> None:
        if not isinstance(other, Scalar):
            raise TypeError(f"expected Scalar, got {type(other).__name__}")
        if self.domain != other.domain:
            raise DomainMismatchError(
                f"cannot combine {self.domain.label} and {other.domain.label} scalars"
            )

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def __add__(self, other: "Scalar") -> "Scalar":
        self._same(other)
        return Scalar(self.domain, self.domain.add(self.value, other.value))

    def __sub__(self, other: "Scalar") -> "Scalar":
        self._same(other)
        return Scalar(self.domain, self.domain.sub(self.value, other.value))

    def __mul__(self, other: "Scalar") -> "Scalar":
        self._same(other)
        return Scalar(self.domain, self.domain.mul(self.value, other.value))

    def __truediv__(self, other: "Scalar") -> "Scalar":
        self._same(other)
        return Scalar(self.domain, self.domain.div(self.value, other.value))

    def __neg__(self) -> "Scalar":
        return Scalar(self.domain, self.domain.neg(self.value))

    def __str__(self) -> str:
        return format_scalar(self)


_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/[1-9]\d*)?$")
_RESIDUE_RE = re.compile(r"^[+-]?\d+$")


def domain_from_label(label: str) -> Domain:
    """Resolve a domain suffix such as ``F5`` or ``Q``."""
    if label == "Q":
        return RATIONALS
    if label.startswith("F"):
        return PrimeField(int(label[1:]))
    raise ValueError(f"unknown scalar domain {label!r}")


def format_scalar(s: Scalar) -> str:
    """Canonical text form: a residue, or ``n`` / ``n/d`` for rationals."""
    return str(s.value)


def parse_scalar(text: str, domain: Domain) -> Scalar:
    text = text.strip()
    if isinstance(domain, PrimeField):
        if not _RESIDUE_RE.match(text):
            raise ValueError(f"invalid {domain.label} scalar literal {text!r}")
        return domain.scalar(int(text))
    if not _RATIONAL_RE.match(text):
        raise ValueError(f"invalid rational literal {text!r}")
    return domain.scalar(Fraction(text))


def scalar_to_json(s: Scalar) -> Union[int, str]:
    """Residues serialize as integers, rationals as canonical strings."""
    if isinstance(s.domain, PrimeField):
        return s.value
    return str(s.value)


def scalar_from_json(domain: Domain, value: Union[int, str]) -> Scalar:
    if isinstance(domain, PrimeField):
        if not isinstance(value, int):
            raise ValueError(f"expected integer residue, got {value!r}")
        return domain.scalar(value)
    if isinstance(value, int):
        return domain.scalar(value)
    return parse_scalar(value, domain)

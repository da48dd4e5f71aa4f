"""Exact 2x2 matrices over a scalar domain, plus the text literal format.

Matrices act on row vectors from the right (``v . A``), so all
composition order in the package follows from that convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DomainMismatchError, SingularMatrixError
from .fields import (
    Domain,
    PrimeField,
    Scalar,
    domain_from_label,
    format_scalar,
    parse_scalar,
)

__all__ = [
    "Mat2",
    "mat_mul",
    "mat_inv",
    "format_matrix",
    "parse_matrix",
]


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix ``[[a, b], [c, d]]`` with entries in one domain."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __post_init__(self) -> None:
        dom = self.a.domain
        if not (self.b.domain == dom and self.c.domain == dom and self.d.domain == dom):
            raise DomainMismatchError("matrix entries must share one scalar domain")

    @property
    def domain(self) -> Domain:
        return self.a.domain

    @property
    def entries(self) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a, self.b, self.c, self.d)

    def residues(self) -> tuple[int, int, int, int]:
        """Raw residue 4-tuple; the canonical ordering key over prime fields."""
        if not isinstance(self.domain, PrimeField):
            raise ValueError("residues() requires a prime-field matrix")
        return (self.a.value, self.b.value, self.c.value, self.d.value)

    @property
    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    @property
    def is_invertible(self) -> bool:
        return not self.det.is_zero

    def __matmul__(self, other: "Mat2") -> "Mat2":
        if self.domain != other.domain:
            raise DomainMismatchError("cannot multiply matrices over different domains")
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "Mat2":
        det = self.det
        if det.is_zero:
            raise SingularMatrixError("not invertible")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def commutes_with(self, other: "Mat2") -> bool:
        return self @ other == other @ self

    @classmethod
    def identity(cls, domain: Domain) -> "Mat2":
        return cls(domain.one, domain.zero, domain.zero, domain.one)

    @classmethod
    def from_values(cls, domain: Domain, a, b, c, d) -> "Mat2":
        """Build from raw values (residues or int/Fraction for rationals)."""
        return cls(domain.scalar(a), domain.scalar(b), domain.scalar(c), domain.scalar(d))

    def __str__(self) -> str:
        return format_matrix(self)


def mat_mul(a: Mat2, b: Mat2) -> Mat2:
    """Exact matrix product; errors on domain mismatch."""
    return a @ b


def mat_inv(a: Mat2) -> Mat2:
    """Exact inverse; raises SingularMatrixError when det = 0."""
    return a.inverse()


_ENTRY = r"[+-]?\d+(?:/\d+)?"
_MATRIX_RE = re.compile(
    r"^\[\[(%s),(%s)\],\[(%s),(%s)\]\]@(F\d+|Q)$" % (_ENTRY, _ENTRY, _ENTRY, _ENTRY)
)


def format_matrix(m: Mat2) -> str:
    """Canonical whitespace-free literal, e.g. ``[[1,2],[0,1]]@F5``."""
    a, b, c, d = (format_scalar(s) for s in m.entries)
    return f"[[{a},{b}],[{c},{d}]]@{m.domain.label}"


def parse_matrix(text: str) -> Mat2:
    match = _MATRIX_RE.match(text.replace(" ", ""))
    if not match:
        raise ValueError(f"invalid matrix literal {text!r}")
    a, b, c, d, label = match.groups()
    domain = domain_from_label(label)
    return Mat2(*(parse_scalar(e, domain) for e in (a, b, c, d)))

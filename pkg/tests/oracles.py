"""Plain-integer reference implementations used as independent oracles.

Everything here works on raw residue tuples mod p and is deliberately
written without importing the package under test: matrices are 4-tuples
(a, b, c, d) read row-major, points are residue pairs.
"""

from __future__ import annotations

from itertools import product


def det(p: int, m: tuple[int, int, int, int]) -> int:
    return (m[0] * m[3] - m[1] * m[2]) % p


def gl2(p: int) -> list[tuple[int, int, int, int]]:
    return [m for m in product(range(p), repeat=4) if det(p, m) != 0]


def mmul(p: int, m, n):
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def minv(p: int, m):
    a, b, c, d = m
    di = pow(det(p, m), -1, p)
    return (d * di % p, -b * di % p, -c * di % p, a * di % p)


def act(p: int, v, m):
    return ((v[0] * m[0] + v[1] * m[2]) % p, (v[0] * m[1] + v[1] * m[3]) % p)


def closure(p: int, gens) -> frozenset:
    ident = (1, 0, 0, 1)
    seen = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = mmul(p, x, g)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return frozenset(seen)


def commutators(p: int, elems) -> set:
    out = set()
    for g in elems:
        for h in elems:
            out.add(mmul(p, mmul(p, mmul(p, minv(p, h), minv(p, g)), h), g))
    return out


def comm_subgroup(p: int, elems) -> frozenset:
    return closure(p, sorted(commutators(p, elems)))


def session(p: int, v, a, b):
    v1 = act(p, v, a)
    v2 = act(p, v1, b)
    v3 = act(p, v2, minv(p, a))
    v4 = act(p, v3, minv(p, b))
    return v1, v2, v3, v4


def witnesses(p: int, secrets, t_values, elems, transcript):
    """Four-deep scan for all (s, t, A, B) reproducing (v1, v2, v3)."""
    v1, v2, v3 = transcript
    found = []
    for s in secrets:
        for t in t_values:
            for a in elems:
                if act(p, (s, t), a) != v1:
                    continue
                inv_a = minv(p, a)
                if act(p, v2, inv_a) != v3:
                    continue
                for b in elems:
                    if act(p, v1, b) == v2:
                        found.append((s, t, a, b))
    return found


def rotation_elements(p: int) -> list[tuple[int, int, int, int]]:
    return [
        (c, s, (-s) % p, c)
        for c in range(p)
        for s in range(p)
        if (c * c + s * s) % p == 1
    ]


def diagonal_elements(p: int) -> list[tuple[int, int, int, int]]:
    return [(a, 0, 0, d) for a in range(1, p) for d in range(1, p)]


def upper_triangular_elements(p: int) -> list[tuple[int, int, int, int]]:
    return [(a, b, 0, d) for a in range(1, p) for b in range(p) for d in range(1, p)]


def norm_circle(p: int, n: int, secrets, t_values) -> set[int]:
    """Secrets s for which some t puts (s, t) on the circle x^2+y^2 = n."""
    return {s for s in secrets if any((s * s + t * t) % p == n for t in t_values)}

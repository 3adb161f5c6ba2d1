"""QuadTorsion Point Search
Box search for points with x = (u + v*sqrt(d)) / w on y^2 + h(x)y = g(x) and y^2 = f(x),
filtered by a vectorised quadratic-residue sieve before exact square roots are taken
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from sympy import primerange, sqrt_mod

from src.fields.qfield import QuadElem, QuadField, kronecker, rational_sqrt

SIEVE_PRIME_LIMIT = 2000


@dataclass(frozen=True)
class SearchBox:
    """|u| <= max_u, |v| <= max_v, 1 <= w <= max_w"""

    max_u: int = 50
    max_v: int = 50
    max_w: int = 64
    sieve_primes: int = 8

    @classmethod
    def from_settings(cls, settings=None) -> "SearchBox":
        if settings is None:
            from src.core.config import get_settings
            settings = get_settings()
        s = settings.search
        return cls(s.max_u, s.max_v, s.max_w, s.sieve_primes)


def _rational_parts(c) -> Tuple[Fraction, Fraction]:
    if isinstance(c, QuadElem):
        return c.a, c.b
    return Fraction(c), Fraction(0)


def _sieve_primes(coeffs: Sequence, d: Optional[int], count: int) -> List[Tuple[int, List[int]]]:
    """Odd primes usable for the sieve, each with the images of sqrt(d) mod p

    Over Q(sqrt(d)) only split primes are used, so both primes above p give a test.
    """
    denominators = 1
    for c in coeffs:
        a, b = _rational_parts(c)
        denominators *= a.denominator * b.denominator

    selected = []
    for p in primerange(3, SIEVE_PRIME_LIMIT):
        if len(selected) >= count:
            break
        if denominators % p == 0:
            continue
        if d is None:
            selected.append((p, [0]))
            continue
        if d % p == 0 or kronecker(d, p) != 1:
            continue
        s = sqrt_mod(d % p, p)
        selected.append((p, sorted({s, p - s})))
    return selected


def _residue(c, p: int, s: int) -> int:
    a, b = _rational_parts(c)
    value = a.numerator * pow(a.denominator, -1, p)
    if b:
        value += b.numerator * pow(b.denominator, -1, p) * s
    return value % p


def _candidate_grid(d: Optional[int], box: SearchBox):
    """All (u, v, w) in the box with gcd(u, v, w) = 1"""
    us = np.arange(-box.max_u, box.max_u + 1, dtype=np.int64)
    vs = np.arange(-box.max_v, box.max_v + 1, dtype=np.int64) if d is not None else np.zeros(1, np.int64)
    ws = np.arange(1, box.max_w + 1, dtype=np.int64)
    U, V, W = (a.ravel() for a in np.meshgrid(us, vs, ws, indexing="ij"))
    primitive = np.gcd(np.gcd(U, V), W) == 1
    return U[primitive], V[primitive], W[primitive]


def sieve_x_candidates(poly: Sequence, K: Optional[QuadField], box: SearchBox) -> List:
    """x in the box for which poly(x) survives the residue sieve

    poly lists coefficients from the leading one down. K = None searches over Q.
    """
    d = K.d if K is not None else None
    U, V, W = _candidate_grid(d, box)
    keep = np.ones(U.shape, dtype=bool)

    for p, roots in _sieve_primes(poly, d, box.sieve_primes):
        squares = np.zeros(p, dtype=bool)
        squares[(np.arange(p, dtype=np.int64) ** 2) % p] = True
        inverses = np.zeros(p, dtype=np.int64)
        inverses[1:] = [pow(i, -1, p) for i in range(1, p)]

        w_mod = np.mod(W, p)
        testable = w_mod != 0
        for s in roots:
            x = np.mod((U + V * s) * inverses[w_mod], p)
            value = np.zeros(x.shape, dtype=np.int64)
            for c in poly:
                value = np.mod(value * x + _residue(c, p, s), p)
            keep &= ~testable | squares[value]

    survivors = np.flatnonzero(keep)
    logger.debug(f"Sieve kept {survivors.size} of {U.size} x-candidates over {K or 'Q'}")

    if K is None:
        return [Fraction(int(U[i]), int(W[i])) for i in survivors]
    return [K.element(Fraction(int(U[i]), int(W[i])), Fraction(int(V[i]), int(W[i])))
            for i in survivors]


def _sqrt(value):
    if isinstance(value, QuadElem):
        return value.sqrt()
    return rational_sqrt(Fraction(value))


def _evaluate(poly: Sequence, x):
    value = 0
    for c in poly:
        value = value * x + c
    return value


@lru_cache(maxsize=256)
def _curve_points_cached(E, box: SearchBox) -> Tuple:
    from src.curves.ellcurve import EllPoint

    K = E.field if isinstance(E.field, QuadField) else None
    poly = [4, E.b2, 2 * E.b4, E.b6]
    points = []
    for x in sieve_x_candidates(poly, K, box):
        x = K(x) if K is not None else x
        root = _sqrt(_evaluate(poly, x))
        if root is None:
            continue
        h = E.a1 * x + E.a3
        for y in {(-h + root) / 2, (-h - root) / 2}:
            points.append(EllPoint(x, y))
    return tuple(points)


def curve_points(E, box: Optional[SearchBox] = None) -> List:
    """Affine points of an elliptic curve over Q or Q(sqrt(d)) with x in the box"""
    box = box or SearchBox.from_settings()
    points = list(_curve_points_cached(E, box))
    logger.debug(f"Box search on {E}: {len(points)} points")
    return points


@lru_cache(maxsize=256)
def _hyper_points_cached(coeffs: Tuple, K: Optional[QuadField], box: SearchBox) -> Tuple:
    points = []
    for x in sieve_x_candidates(coeffs, K, box):
        root = _sqrt(_evaluate(coeffs, x))
        if root is None:
            continue
        points.extend((x, y) for y in {root, -root})
    return tuple(points)


def hyper_points(coeffs: Sequence[int], K: Optional[QuadField], box: Optional[SearchBox] = None) -> List:
    """Affine (x, y) on y^2 = f(x) over Q or Q(sqrt(d)) with x in the box"""
    box = box or SearchBox.from_settings()
    return list(_hyper_points_cached(tuple(coeffs), K, box))

"""QuadTorsion Genus 2
Point counts on y^2 = f(x) over F_q, zeta numerators from counts, Jacobian orders
over F_p and F_{p^2}, and the reduction bound for Jacobian torsion over Q(sqrt(d))
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from loguru import logger
from sympy import Poly, discriminant, symbols

from src.core.errors import (BadReductionError, CountingError, CurveError,
                             InsufficientPrimesError)
from src.curves.ellcurve import combine_prime_to_p
from src.fields.ffield import (FiniteField, PrimeField, fp2_construct,
                               quadratic_extension)
from src.fields.qfield import QuadField, SplitType, splitting_type

_X = symbols("x")


@dataclass(frozen=True)
class HyperCurve:
    """y^2 = f(x), f given by integer coefficients from the leading one down

    p is the prime the curve is considered over, or None for the model over Z.
    """

    coeffs: Tuple[int, ...]
    p: Optional[int] = None

    def __post_init__(self):
        if self.degree not in (5, 6):
            raise CurveError(f"genus 2 models need deg f in (5, 6), got {self.degree}")
        if self.integer_discriminant == 0:
            raise CurveError(f"f = {self.poly_str()} is not squarefree")
        if self.p is not None and not self.good_reduction(self.p):
            raise BadReductionError(f"{self.poly_str()} has bad reduction at p={self.p}")

    @classmethod
    def from_integer_poly(cls, coeffs: Sequence[int], p: Optional[int] = None) -> "HyperCurve":
        coeffs = [int(c) for c in coeffs]
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
        return cls(tuple(coeffs), p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def integer_discriminant(self) -> int:
        return _discriminant(self.coeffs)

    def good_reduction(self, p: int) -> bool:
        """p odd, degree preserved and disc(f) nonzero mod p"""
        return p != 2 and self.coeffs[0] % p != 0 and self.integer_discriminant % p != 0

    def at(self, p: int) -> "HyperCurve":
        return HyperCurve(self.coeffs, p)

    def poly_str(self) -> str:
        return str(Poly(list(self.coeffs), _X).as_expr())

    def __str__(self):
        suffix = f" over F_{self.p}" if self.p else ""
        return f"y^2 = {self.poly_str()}{suffix}"


@lru_cache(maxsize=None)
def _discriminant(coeffs: Tuple[int, ...]) -> int:
    return int(discriminant(Poly(list(coeffs), _X)))


def _evaluate(coeffs: Sequence, x):
    value = coeffs[0]
    for c in coeffs[1:]:
        value = value * x + c
    return value


def points_at_infinity(coeffs: Sequence[int], field: FiniteField) -> int:
    """Points at infinity of the smooth model of y^2 = f(x)

    Odd degree: one. Even degree: two if the leading coefficient is a square, else none.
    """
    if len(coeffs) % 2 == 0:
        return 1
    leading = field(coeffs[0])
    return 2 if field.is_square(leading) else 0


def count_y2_points(coeffs: Sequence[int], field: FiniteField) -> int:
    """#C(F_q) for y^2 = f(x) with f of degree 3 to 6, points at infinity included"""
    if field.p == 2:
        raise CountingError("y^2 = f(x) models are not counted in characteristic 2")
    reduced = [field(c) for c in coeffs]
    squares = field.squares()
    affine = 0
    for x in field.elements():
        value = _evaluate(reduced, x)
        if value == 0:
            affine += 1
        elif value in squares:
            affine += 2
    return affine + points_at_infinity(coeffs, field)


def extension_field(p: int, extension: int) -> FiniteField:
    """F_p, F_{p^2} or the tower F_{p^4} = F_{p^2}(sqrt(t'))"""
    if extension == 1:
        return PrimeField(p)
    if extension == 2:
        return fp2_construct(p)
    if extension == 4:
        return quadratic_extension(fp2_construct(p))
    raise CountingError(f"extension degree {extension} is not supported")


@lru_cache(maxsize=None)
def _cached_count(coeffs: Tuple[int, ...], p: int, extension: int) -> int:
    return count_y2_points(coeffs, extension_field(p, extension))


def count_hyper_points(C: HyperCurve, extension: int = 1) -> int:
    """#C(F_{p^extension}) on the smooth model"""
    if C.p is None:
        raise BadReductionError("count_hyper_points needs a curve reduced at a prime")
    count = _cached_count(C.coeffs, C.p, extension)
    logger.debug(f"#C(F_{C.p}^{extension}) = {count} for {C}")
    return count


@dataclass(frozen=True)
class ZetaNumerator:
    """P(T) = 1 + c1*T + c2*T^2 + q*c1*T^3 + q^2*T^4"""

    c1: int
    c2: int
    q: int

    @property
    def coefficients(self) -> List[int]:
        return [1, self.c1, self.c2, self.q * self.c1, self.q * self.q]

    def evaluate(self, t: int) -> int:
        return sum(c * t ** i for i, c in enumerate(self.coefficients))

    @property
    def p_at_one(self) -> int:
        return self.evaluate(1)

    @property
    def p_at_minus_one(self) -> int:
        return self.evaluate(-1)

    @property
    def extension_order(self) -> int:
        return self.p_at_one * self.p_at_minus_one

    def c2_in_weil_interval(self) -> bool:
        """2*sqrt(q)*|c1| - 2q <= c2 <= c1^2/4 + 2q, compared in integers"""
        q, c1, c2 = self.q, self.c1, self.c2
        shifted = c2 + 2 * q
        return 4 * c2 <= c1 * c1 + 8 * q and shifted >= 0 and 4 * q * c1 * c1 <= shifted * shifted

    def within_weil_bounds(self) -> bool:
        q = self.q
        low = (math.sqrt(q) - 1) ** 4
        high = (math.sqrt(q) + 1) ** 4
        return (self.c1 * self.c1 <= 16 * q
                and self.c2_in_weil_interval()
                and low - 1e-9 <= self.p_at_one <= high + 1e-9
                and low - 1e-9 <= self.p_at_minus_one <= high + 1e-9)

    def weil_polynomial(self) -> str:
        terms = []
        for power, c in enumerate(self.coefficients):
            if c == 0:
                continue
            monomial = "" if power == 0 else ("T" if power == 1 else f"T^{power}")
            if monomial and abs(c) == 1:
                text = monomial
            else:
                text = f"{abs(c)}{'*' if monomial else ''}{monomial}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, text))
        head_sign, head = terms[0]
        rendered = ("-" if head_sign == "-" else "") + head
        for sign, text in terms[1:]:
            rendered += f" {sign} {text}"
        return rendered

    def to_dict(self) -> Dict[str, Any]:
        return {
            "q": self.q,
            "c1": self.c1,
            "c2": self.c2,
            "weil_polynomial": self.weil_polynomial(),
            "order": self.p_at_one,
            "extension_order": self.extension_order,
        }


def zeta_from_counts(n1: int, n2: int, p: int) -> ZetaNumerator:
    """Zeta numerator of a genus 2 curve over F_p from #C(F_p) and #C(F_{p^2})

    p may be a prime power q when the counts are taken over F_q and F_{q^2}.
    """
    c1 = n1 - (p + 1)
    s2 = p * p + 1 - n2
    twice_c2 = c1 * c1 - s2
    if twice_c2 % 2:
        raise CountingError(f"non-integral c2 from counts n1={n1}, n2={n2}, q={p}")

    zeta = ZetaNumerator(c1, twice_c2 // 2, p)
    if (zeta.c1 * zeta.c1 > 16 * p or not zeta.c2_in_weil_interval()
            or zeta.p_at_one <= 0 or zeta.p_at_minus_one <= 0):
        raise CountingError(f"counts n1={n1}, n2={n2} violate the Weil bounds at q={p}")
    return zeta


def _curve_at(C: HyperCurve, p: int) -> HyperCurve:
    if C.p == p:
        return C
    return C.at(p)


def zeta_numerator(C: HyperCurve, p: int) -> ZetaNumerator:
    Cp = _curve_at(C, p)
    return zeta_from_counts(count_hyper_points(Cp, 1), count_hyper_points(Cp, 2), p)


def jacobian_order(C: HyperCurve, p: int) -> int:
    """|J(F_p)| = P(1)"""
    return zeta_numerator(C, p).p_at_one


def jacobian_order_ext(C: HyperCurve, p: int) -> int:
    """|J(F_{p^2})| = P(1) * P(-1)"""
    return zeta_numerator(C, p).extension_order


def base_change_numerator(C: HyperCurve, p: int) -> ZetaNumerator:
    """Numerator of the curve regarded over F_{p^2}, from counts over F_{p^2} and F_{p^4}"""
    Cp = _curve_at(C, p)
    return zeta_from_counts(count_hyper_points(Cp, 2), count_hyper_points(Cp, 4), p * p)


def jacobian_residue_orders(C: HyperCurve, K: Optional[QuadField],
                            primes: Sequence[int]) -> Dict[int, int]:
    """|J(k_p)| for each usable prime, over F_{p^2} at primes inert in K"""
    orders = {}
    for p in primes:
        if p == 2:
            raise BadReductionError("the prime 2 is never used for torsion bounds")
        if not C.good_reduction(p):
            logger.warning(f"Skipping p={p}: bad reduction of {C}")
            continue
        inert = K is not None and splitting_type(K, p) == SplitType.INERT
        orders[p] = jacobian_order_ext(C, p) if inert else jacobian_order(C, p)
    return orders


def jacobian_torsion_gcd_bound(C: HyperCurve, K: Optional[QuadField], primes: Sequence[int]) -> int:
    """B with |J(K)_tors| dividing B; K = None bounds the torsion over Q"""
    orders = jacobian_residue_orders(C, K, primes)
    if len(orders) < 2:
        raise InsufficientPrimesError(f"need two primes of good reduction, got {sorted(orders)}")
    bound = combine_prime_to_p(orders)
    logger.debug(f"Jacobian torsion bound over {K or 'Q'}: {bound} from {orders}")
    return bound

"""QuadTorsion Elliptic Curves
Long Weierstrass curves over Q, Q(sqrt(d)) and finite fields: group law, point orders,
reduction at primes, point counts and reduction-based torsion bounds
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger
from sympy import factorint, primefactors

from src.core.errors import (BadReductionError, CurveError, FieldError,
                             InsufficientPrimesError, UsageError)
from src.fields.ffield import FiniteField
from src.fields.qfield import (QuadElem, QuadField, ReductionContext, rational_sqrt,
                               reduction_context)

OVER_CAP = None
DEFAULT_ORDER_CAP = 24


@dataclass(frozen=True, order=True)
class TorsionGroup:
    """Z/m + Z/n with m | n (m = 1 for cyclic groups)"""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.n % self.m:
            raise ValueError(f"Z/{self.m} + Z/{self.n} is not in normal form")

    @property
    def order(self) -> int:
        return self.m * self.n

    @property
    def is_cyclic(self) -> bool:
        return self.m == 1

    @property
    def is_quadratic_torsion(self) -> bool:
        return self in QUADRATIC_TORSION_GROUPS

    @property
    def is_mazur(self) -> bool:
        return self in MAZUR_GROUPS

    @classmethod
    def parse(cls, spec: str) -> "TorsionGroup":
        """'11' -> Z/11, '2x12' -> Z/2 + Z/12"""
        match = re.fullmatch(r"\s*(\d+)\s*(?:[xX]\s*(\d+))?\s*", spec)
        if not match:
            raise UsageError(f"cannot parse group spec {spec!r}")
        if match.group(2) is None:
            group = cls(1, int(match.group(1)))
        else:
            m, n = int(match.group(1)), int(match.group(2))
            if m < 1 or n < 1 or n % m:
                raise UsageError(f"group spec {spec!r} is not of the form m x n with m | n")
            group = cls(m, n)
        if not group.is_quadratic_torsion:
            raise UsageError(f"{group} is not a torsion group over a quadratic field")
        return group

    def spec(self) -> str:
        return str(self.n) if self.m == 1 else f"{self.m}x{self.n}"

    def to_list(self) -> List[int]:
        return [self.m, self.n]

    def __str__(self) -> str:
        return f"Z/{self.n}" if self.m == 1 else f"Z/{self.m} x Z/{self.n}"


QUADRATIC_TORSION_GROUPS = frozenset(
    [TorsionGroup(1, n) for n in range(1, 19) if n != 17]
    + [TorsionGroup(2, 2 * k) for k in range(1, 7)]
    + [TorsionGroup(3, 3), TorsionGroup(3, 6), TorsionGroup(4, 4)]
)

MAZUR_GROUPS = frozenset(
    [TorsionGroup(1, n) for n in list(range(1, 11)) + [12]]
    + [TorsionGroup(2, 2 * k) for k in range(1, 5)]
)


@dataclass(frozen=True)
class EllPoint:
    """Affine point (x, y), or the point at infinity when x is None"""

    x: Any = None
    y: Any = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def to_dict(self) -> Dict[str, Any]:
        if self.is_infinity:
            return {"infinity": True}
        return {"x": _coord_json(self.x), "y": _coord_json(self.y)}

    def __str__(self):
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


INFINITY = EllPoint()


def _coord_json(value):
    if isinstance(value, QuadElem):
        return value.to_json()
    if isinstance(value, Fraction):
        return str(value)
    return repr(value)


class EllCurve:
    """y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6"""

    def __init__(self, a1, a2, a3, a4, a6, field=None, check: bool = True):
        self.field = field
        coerce = field if field is not None else Fraction
        self.a1, self.a2, self.a3, self.a4, self.a6 = (coerce(a) for a in (a1, a2, a3, a4, a6))

        a1, a2, a3, a4, a6 = self.ainvs
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.discriminant = (-self.b2 * self.b2 * self.b8 - 8 * self.b4 ** 3
                             - 27 * self.b6 * self.b6 + 9 * self.b2 * self.b4 * self.b6)
        if check and self.discriminant == 0:
            raise CurveError(f"singular curve {self}")

    @property
    def ainvs(self) -> Tuple:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def is_singular(self) -> bool:
        return self.discriminant == 0

    @property
    def j_invariant(self):
        return self.c4 ** 3 / self.discriminant

    def base_change(self, field) -> "EllCurve":
        return EllCurve(*self.ainvs, field=field)

    def point(self, x, y) -> EllPoint:
        coerce = self.field if self.field is not None else Fraction
        P = EllPoint(coerce(x), coerce(y))
        if not self.contains(P):
            raise CurveError(f"{P} is not on {self}")
        return P

    def contains(self, P: EllPoint) -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    def negate(self, P: EllPoint) -> EllPoint:
        if P.is_infinity:
            return P
        return EllPoint(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: EllPoint, Q: EllPoint) -> EllPoint:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        a1, a2, a3, a4, a6 = self.ainvs
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y

        if x1 == x2:
            denominator = 2 * y1 + a1 * x1 + a3
            if y1 + y2 + a1 * x2 + a3 == 0 or denominator == 0:
                return INFINITY
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / denominator
            nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) / denominator
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = (y1 * x2 - y2 * x1) / (x2 - x1)

        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return EllPoint(x3, y3)

    def multiply(self, n: int, P: EllPoint) -> EllPoint:
        if n < 0:
            return self.multiply(-n, self.negate(P))
        result, addend = INFINITY, P
        while n:
            if n & 1:
                result = self.add(result, addend)
            addend = self.add(addend, addend)
            n >>= 1
        return result

    def order(self, P: EllPoint, cap: int = DEFAULT_ORDER_CAP) -> Optional[int]:
        Q = P
        for n in range(1, cap + 1):
            if Q.is_infinity:
                return n
            Q = self.add(Q, P)
        return OVER_CAP

    def points_with_x(self, x) -> List[EllPoint]:
        """All points over the base field with the given x-coordinate"""
        coerce = self.field if self.field is not None else Fraction
        x = coerce(x)
        h = self.a1 * x + self.a3
        g = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        disc = h * h + 4 * g
        root = _field_sqrt(disc)
        if root is None:
            return []
        ys = {(-h + root) / 2, (-h - root) / 2}
        return [EllPoint(x, y) for y in ys]

    def __eq__(self, other):
        return isinstance(other, EllCurve) and self.field == other.field and self.ainvs == other.ainvs

    def __hash__(self):
        return hash((self.field, self.ainvs))

    def __str__(self):
        a1, a2, a3, a4, a6 = self.ainvs
        return f"[{a1}, {a2}, {a3}, {a4}, {a6}]"

    __repr__ = __str__


def _field_sqrt(value):
    if isinstance(value, QuadElem):
        return value.sqrt()
    if isinstance(value, Fraction):
        return rational_sqrt(value)
    raise FieldError(f"square roots of {type(value).__name__} are not supported here")


def _require_on_curve(E: EllCurve, *points: EllPoint):
    for P in points:
        if not E.contains(P):
            raise CurveError(f"{P} is not on {E}")


def ec_add(E: EllCurve, P: EllPoint, Q: EllPoint) -> EllPoint:
    _require_on_curve(E, P, Q)
    return E.add(P, Q)


def ec_negate(E: EllCurve, P: EllPoint) -> EllPoint:
    _require_on_curve(E, P)
    return E.negate(P)


def scalar_multiply(E: EllCurve, n: int, P: EllPoint) -> EllPoint:
    _require_on_curve(E, P)
    return E.multiply(n, P)


def point_order(E: EllCurve, P: EllPoint, cap: int = DEFAULT_ORDER_CAP) -> Optional[int]:
    """Smallest n <= cap with nP = O, or OVER_CAP"""
    _require_on_curve(E, P)
    n = E.order(P, cap)
    if n is not OVER_CAP and not certify_order(E, P, n):
        raise CurveError(f"order certification failed for {P}")
    return n


def certify_order(E: EllCurve, P: EllPoint, n: int) -> bool:
    """nP = O and (n/q)P != O for every prime q | n"""
    if not E.multiply(n, P).is_infinity:
        return False
    return all(not E.multiply(n // q, P).is_infinity for q in primefactors(n))


# Reduction

def _valuation(value, p: int) -> Optional[int]:
    if isinstance(value, QuadElem):
        return value.valuation_bound(p)
    value = Fraction(value)
    if value == 0:
        return None
    v, num, den = 0, value.numerator, value.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def integral_scale(E: EllCurve, p: int) -> int:
    """Exponent k such that the model with a_i * p^(i*k) is p-integral and k is least"""
    k = None
    for weight, a in zip((1, 2, 3, 4, 6), E.ainvs):
        v = _valuation(a, p)
        if v is None:
            continue
        needed = -(v // weight)
        k = needed if k is None else max(k, needed)
    return k or 0


def reduce_at(E: EllCurve, ctx: ReductionContext) -> EllCurve:
    """Reduce a curve over Q or Q(sqrt(d)) modulo a prime above ctx.p

    The model is first rescaled by a_i -> a_i * p^(i*k) so that every coefficient is
    p-integral. Raises BadReductionError when the reduction is singular,
    when no residue field is available, or when p = 2.
    """
    if ctx.p == 2:
        raise BadReductionError("reduction at 2 is not used")
    if ctx.target is None:
        raise BadReductionError(f"no residue field at p={ctx.p}")

    k = integral_scale(E, ctx.p)
    factors = [Fraction(ctx.p) ** (weight * k) for weight in (1, 2, 3, 4, 6)]
    scaled = [a * f for a, f in zip(E.ainvs, factors)]
    reduced = [ctx.reduce(a) for a in scaled]
    curve = EllCurve(*reduced, field=ctx.target, check=False)
    if curve.is_singular:
        raise BadReductionError(f"bad reduction of {E} at p={ctx.p}")
    return curve


def reduce_point_at(E: EllCurve, P: EllPoint, ctx: ReductionContext) -> EllPoint:
    if P.is_infinity:
        return INFINITY
    k = integral_scale(E, ctx.p)
    x = P.x * Fraction(ctx.p) ** (2 * k)
    y = P.y * Fraction(ctx.p) ** (3 * k)
    vx = _valuation(x, ctx.p)
    if vx is not None and vx < 0:
        return INFINITY
    return EllPoint(ctx.reduce(x), ctx.reduce(y))


def count_points_elliptic(E: EllCurve) -> int:
    """#E(F_q) by enumeration, point at infinity included"""
    field = E.field
    if not isinstance(field, FiniteField):
        raise CurveError("point counting needs a curve over a finite field")
    if field.p == 2:
        raise CurveError("point counting in characteristic 2 is not supported")
    if E.is_singular:
        raise CurveError(f"singular curve {E}")

    squares = field.squares()
    a1, a2, a3, a4, a6 = E.ainvs
    count = 1
    for x in field.elements():
        h = a1 * x + a3
        disc = h * h + 4 * (((x + a2) * x + a4) * x + a6)
        if disc == 0:
            count += 1
        elif disc in squares:
            count += 2
    return count


def combine_prime_to_p(counts: Dict[int, int]) -> int:
    """Largest B whose l-part divides the residue count at every prime p != l"""
    if len(counts) < 2:
        raise InsufficientPrimesError(f"need at least two usable primes, got {sorted(counts)}")

    factored = {p: factorint(n) for p, n in counts.items()}
    ells = set()
    for factors in factored.values():
        ells.update(factors)

    bound = 1
    for ell in sorted(ells):
        exponent = min(factors.get(ell, 0) for p, factors in factored.items() if p != ell)
        bound *= ell ** exponent
    return bound


def residue_counts(E: EllCurve, primes: Iterable[int]) -> Dict[int, int]:
    """#E(k_p) at each usable odd prime; bad primes are skipped"""
    K = E.field if isinstance(E.field, QuadField) else None
    counts = {}
    for p in primes:
        if p == 2:
            raise BadReductionError("the prime 2 is never used for torsion bounds")
        try:
            reduced = reduce_at(E, reduction_context(K, p))
        except BadReductionError as e:
            logger.debug(f"Skipping p={p}: {e}")
            continue
        counts[p] = count_points_elliptic(reduced)
    return counts


def torsion_bound(E: EllCurve, primes: Sequence[int]) -> int:
    """B with |E(K)_tors| dividing B, from residue counts at odd primes"""
    counts = residue_counts(E, primes)
    bound = combine_prime_to_p(counts)
    logger.debug(f"Torsion bound {bound} from counts {counts}")
    return bound


# Finite subgroups

def generated_group(E: EllCurve, generators: Iterable[EllPoint],
                    cap: int = DEFAULT_ORDER_CAP) -> Tuple[TorsionGroup, List[EllPoint]]:
    """Structure and elements of the subgroup generated by torsion points"""
    gens = []
    for P in generators:
        if E.order(P, cap) is OVER_CAP:
            raise CurveError(f"{P} has order above {cap}")
        gens.append(P)

    elements = {INFINITY}
    frontier = [INFINITY]
    while frontier:
        P = frontier.pop()
        for g in gens:
            Q = E.add(P, g)
            if Q not in elements:
                elements.add(Q)
                frontier.append(Q)
        if len(elements) > cap * cap:
            raise CurveError("generated subgroup is larger than any torsion group")

    exponent = 1
    for P in elements:
        exponent = math.lcm(exponent, E.order(P, cap))
    group = TorsionGroup(len(elements) // exponent, exponent)
    ordered = sorted(elements, key=lambda P: (E.order(P, cap), str(P)))
    return group, ordered


@dataclass
class TorsionCertificate:
    """Lower bound from explicit points, upper bound from reductions"""

    lower: TorsionGroup
    upper_order: Optional[int]
    points: List[EllPoint] = dc_field(default_factory=list)
    counts: Dict[int, int] = dc_field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.upper_order is not None and self.lower.order == self.upper_order

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lower": self.lower.to_list(),
            "upper_order": self.upper_order,
            "exact": self.exact,
            "points": [P.to_dict() for P in self.points],
            "counts": {str(p): n for p, n in self.counts.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def torsion_certify(E: EllCurve, candidate_points: Sequence[EllPoint] = (),
                    search: bool = True, primes: Optional[Sequence[int]] = None,
                    box=None, cap: int = DEFAULT_ORDER_CAP) -> TorsionCertificate:
    """Certify the torsion subgroup of E over its base field as far as possible"""
    from src.core.config import get_settings
    from src.curves.search import SearchBox, curve_points

    settings = get_settings()
    _require_on_curve(E, *candidate_points)
    primes = primes or settings.primes.torsion_primes

    counts = residue_counts(E, primes)
    try:
        upper = combine_prime_to_p(counts)
    except InsufficientPrimesError as e:
        logger.warning(f"No torsion upper bound for {E}: {e}")
        upper = None

    found = list(candidate_points)
    if search:
        found.extend(curve_points(E, box or SearchBox.from_settings(settings)))

    torsion = []
    for P in found:
        n = E.order(P, cap)
        if n is OVER_CAP or (upper is not None and upper % n):
            continue
        torsion.append(P)

    group, elements = generated_group(E, torsion, cap)
    certificate = TorsionCertificate(group, upper, elements, counts)
    logger.debug(f"Torsion of {E}: lower {group}, upper {upper}, exact={certificate.exact}")
    return certificate

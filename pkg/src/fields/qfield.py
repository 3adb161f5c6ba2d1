"""QuadTorsion Quadratic Fields
Exact arithmetic in Q and Q(sqrt(d)), discriminants, Kronecker symbols and prime splitting
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, Optional, Tuple, Union

from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import jacobi_symbol

from src.core.errors import BadReductionError, BudgetExceededError, FieldError
from src.fields.ffield import FiniteField, PrimeField, fp2_construct, sqrt_mod_p

Rat = Fraction
RationalLike = Union[int, Fraction]

FACTORIZATION_BUDGET = 10 ** 12
TRIAL_DIVISION_LIMIT = 10 ** 4


def squarefree_reduce(n: int, budget: int = FACTORIZATION_BUDGET) -> Tuple[int, int]:
    """Write n = c^2 * d with d squarefree and c > 0

    Small primes are removed by trial division; a cofactor left after
    TRIAL_DIVISION_LIMIT goes to sympy.factorint.
    """
    if n == 0:
        raise FieldError("squarefree_reduce: zero has no squarefree part")
    if abs(n) > budget:
        raise BudgetExceededError(f"|{n}| exceeds the factorization budget {budget}")

    d = -1 if n < 0 else 1
    c = 1
    m = abs(n)
    exponents: Dict[int, int] = {}
    p = 2
    while p <= TRIAL_DIVISION_LIMIT and p * p <= m:
        while m % p == 0:
            m //= p
            exponents[p] = exponents.get(p, 0) + 1
        p += 1 if p == 2 else 2
    if m > 1:
        for prime, exponent in factorint(m).items():
            exponents[prime] = exponents.get(prime, 0) + exponent

    for prime, exponent in exponents.items():
        c *= prime ** (exponent // 2)
        if exponent % 2:
            d *= prime
    return d, c


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorint(abs(n)).values())


def field_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt(d)): d if d = 1 (mod 4), else 4d"""
    if d in (0, 1) or not is_squarefree(d):
        raise FieldError(f"{d} is not a squarefree integer different from 0 and 1")
    return d if d % 4 == 1 else 4 * d


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)"""
    if n == 0:
        raise FieldError("kronecker symbol (a/0) is undefined here")

    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result

    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result

    if n == 1:
        return result
    return result * int(jacobi_symbol(a % n, n))


class SplitType(str, Enum):
    SPLIT = "SPLIT"
    INERT = "INERT"
    RAMIFIED = "RAMIFIED"


@dataclass(frozen=True)
class QuadField:
    """The quadratic field Q(sqrt(d)) for squarefree d not in {0, 1}"""

    d: int

    def __post_init__(self):
        field_discriminant(self.d)

    @property
    def disc(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    def element(self, a: RationalLike = 0, b: RationalLike = 0) -> "QuadElem":
        return QuadElem(a, b, self)

    @property
    def zero(self) -> "QuadElem":
        return QuadElem(0, 0, self)

    @property
    def one(self) -> "QuadElem":
        return QuadElem(1, 0, self)

    @property
    def sqrt_d(self) -> "QuadElem":
        return QuadElem(0, 1, self)

    def __call__(self, value) -> "QuadElem":
        if isinstance(value, QuadElem):
            value._check_field(self)
            return value
        return QuadElem(value, 0, self)

    def contains_sqrt(self, n: RationalLike) -> bool:
        return QuadElem(n, 0, self).sqrt() is not None

    def __str__(self) -> str:
        return "Q(i)" if self.d == -1 else f"Q(sqrt({self.d}))"


def rational_sqrt(r: Fraction) -> Optional[Fraction]:
    if r < 0:
        return None
    num_root = math.isqrt(r.numerator)
    den_root = math.isqrt(r.denominator)
    if num_root * num_root == r.numerator and den_root * den_root == r.denominator:
        return Fraction(num_root, den_root)
    return None


class QuadElem:
    """An exact element a + b*sqrt(d) of a quadratic field"""

    __slots__ = ("a", "b", "field")

    def __init__(self, a: RationalLike, b: RationalLike, field: QuadField):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.field = field

    def _check_field(self, field: QuadField):
        if field.d != self.field.d:
            raise FieldError(f"field mismatch: {self.field} vs {field}")

    def _coerce(self, other) -> Optional["QuadElem"]:
        if isinstance(other, QuadElem):
            other._check_field(self.field)
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(other, 0, self.field)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QuadElem(self.a + other.a, self.b + other.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.field)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QuadElem(self.a - other.a, self.b - other.b, self.field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        d = self.field.d
        return QuadElem(self.a * other.a + d * self.b * other.b,
                        self.a * other.b + self.b * other.a, self.field)

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise FieldError("division by zero in " + str(self.field))
        return QuadElem(self.a / n, -self.b / n, self.field)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QuadElem(1, 0, self.field)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return self.field.d == other.field.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.field.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.field)

    def norm(self) -> Fraction:
        return self.a * self.a - self.field.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_rational(self) -> bool:
        return self.b == 0

    def sqrt(self) -> Optional["QuadElem"]:
        """A square root inside the same field, or None"""
        d = self.field.d
        if self.b == 0:
            root = rational_sqrt(self.a)
            if root is not None:
                return QuadElem(root, 0, self.field)
            root = rational_sqrt(self.a / d)
            if root is not None:
                return QuadElem(0, root, self.field)
            return None

        # (x + y*sqrt(d))^2 = self  <=>  x^2 + d*y^2 = a, 2*x*y = b
        n = rational_sqrt(self.norm())
        if n is None:
            return None
        for candidate in ((self.a + n) / 2, (self.a - n) / 2):
            x = rational_sqrt(candidate)
            if x:
                root = QuadElem(x, self.b / (2 * x), self.field)
                if root * root == self:
                    return root
        return None

    def valuation_bound(self, p: int) -> Optional[int]:
        """min(v_p(a), v_p(b)); None for zero"""
        values = [_valuation(c, p) for c in (self.a, self.b) if c != 0]
        return min(values) if values else None

    def to_json(self) -> Dict[str, object]:
        return {"a": _rat_str(self.a), "b": _rat_str(self.b), "d": self.field.d}

    @classmethod
    def from_json(cls, data: Dict[str, object], field: Optional[QuadField] = None) -> "QuadElem":
        try:
            d = int(data["d"])
            a = Fraction(str(data["a"]))
            b = Fraction(str(data.get("b", "0")))
        except (KeyError, ValueError, TypeError) as e:
            raise FieldError(f"malformed field element {data!r}: {e}") from e
        if field is None:
            field = QuadField(d)
        elif field.d != d:
            raise FieldError(f"element over d={d} given for {field}")
        return cls(a, b, field)

    def __repr__(self):
        return f"QuadElem({_rat_str(self.a)}, {_rat_str(self.b)}, d={self.field.d})"

    def __str__(self):
        if self.b == 0:
            return _rat_str(self.a)
        radical = "i" if self.field.d == -1 else f"sqrt({self.field.d})"
        if self.a == 0:
            return f"{_rat_str(self.b)}*{radical}"
        sign = "-" if self.b < 0 else "+"
        return f"{_rat_str(self.a)} {sign} {_rat_str(abs(self.b))}*{radical}"


def _rat_str(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def _valuation(r: Fraction, p: int) -> int:
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def splitting_type(K: QuadField, p: int) -> SplitType:
    """How the rational prime p decomposes in K"""
    d = K.d
    if p == 2:
        if d % 4 in (2, 3):
            return SplitType.RAMIFIED
        return SplitType.SPLIT if d % 8 == 1 else SplitType.INERT
    if d % p == 0:
        return SplitType.RAMIFIED
    return SplitType.SPLIT if kronecker(d, p) == 1 else SplitType.INERT


@dataclass(frozen=True)
class ReductionContext:
    """Residue field at a prime above p, with the image of sqrt(d)"""

    p: int
    split_type: SplitType
    target: Optional[FiniteField]
    sqrt_image: object = None

    def reduce(self, value):
        """Map an element of K (or Q) into the residue field"""
        if self.target is None:
            raise BadReductionError(f"no residue field constructed at p={self.p}")
        if isinstance(value, QuadElem):
            a = self._reduce_rational(value.a)
            if value.b == 0:
                return a
            return a + self._reduce_rational(value.b) * self.sqrt_image
        return self._reduce_rational(Fraction(value))

    def _reduce_rational(self, r: Fraction):
        if r.denominator % self.p == 0:
            raise BadReductionError(f"{r} is not integral at p={self.p}")
        return self.target(r)

    @property
    def residue_order(self) -> int:
        return self.target.order if self.target is not None else self.p ** (
            2 if self.split_type == SplitType.INERT else 1)


def reduction_context(K: Optional[QuadField], p: int) -> ReductionContext:
    """Residue field data at p; K = None means the rational field"""
    if not isprime(p):
        raise FieldError(f"{p} is not prime")

    if K is None:
        field = PrimeField(p)
        return ReductionContext(p, SplitType.SPLIT, field, field.zero)

    split = splitting_type(K, p)
    if split == SplitType.INERT:
        if p == 2:
            # F_4 is not modelled; reductions at 2 are refused later
            return ReductionContext(p, split, None, None)
        field = fp2_construct(p)
        base = field.base
        # d is a non-residue, so d / t is a square c^2 and sqrt(d) -> c * omega
        c = sqrt_mod_p(base(K.d) / field.t)
        return ReductionContext(p, split, field, field.omega * c)

    field = PrimeField(p)
    if p == 2:
        return ReductionContext(p, split, field, field(K.d % 2))
    if split == SplitType.RAMIFIED:
        return ReductionContext(p, split, field, field.zero)
    return ReductionContext(p, split, field, sqrt_mod_p(field(K.d)))


def iter_fields_by_disc(max_abs_disc: int) -> Iterator[QuadField]:
    """Quadratic fields by ascending |disc|, positive d first on ties"""
    candidates = []
    for d in range(-max_abs_disc, max_abs_disc + 1):
        if d in (0, 1) or not is_squarefree(d):
            continue
        disc = d if d % 4 == 1 else 4 * d
        if abs(disc) <= max_abs_disc:
            candidates.append((abs(disc), d < 0, d))
    for _, _, d in sorted(candidates):
        yield QuadField(d)

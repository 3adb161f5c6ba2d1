"""QuadTorsion Finite Fields
F_p, quadratic extensions F_{p^2} (and the tower F_{p^4}), square roots mod p
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import FrozenSet, Iterator, Optional

from sympy import isprime

from src.core.errors import FieldError


class FiniteField:
    """Common interface of the residue fields"""

    p: int

    @property
    def order(self) -> int:
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def elements(self) -> Iterator:
        raise NotImplementedError

    def squares(self) -> FrozenSet:
        return _square_set(self)

    def is_square(self, x) -> bool:
        """True for zero and the nonzero squares"""
        return self(x) in self.squares()

    def __call__(self, value):
        raise NotImplementedError


@lru_cache(maxsize=None)
def _square_set(field: FiniteField) -> FrozenSet:
    return frozenset(x * x for x in field.elements())


@dataclass(frozen=True)
class PrimeField(FiniteField):
    p: int

    def __post_init__(self):
        if not isprime(self.p):
            raise FieldError(f"{self.p} is not prime")

    @property
    def order(self) -> int:
        return self.p

    @property
    def degree(self) -> int:
        return 1

    def __call__(self, value) -> "FpElem":
        if isinstance(value, FpElem):
            if value.field.p != self.p:
                raise FieldError(f"element of F_{value.field.p} used in F_{self.p}")
            return value
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise FieldError(f"{value} has no image in F_{self.p}")
            return FpElem(value.numerator * pow(value.denominator, -1, self.p), self)
        return FpElem(int(value), self)

    def elements(self) -> Iterator["FpElem"]:
        for v in range(self.p):
            yield FpElem(v, self)

    def __str__(self):
        return f"F_{self.p}"


class FpElem:
    """Canonical residue in [0, p)"""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        self.value = value % field.p
        self.field = field

    def _coerce(self, other) -> Optional["FpElem"]:
        if isinstance(other, FpElem):
            if other.field.p != self.field.p:
                raise FieldError(f"F_{self.field.p} and F_{other.field.p} elements mixed")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FpElem(self.value + other.value, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FpElem(self.value - other.value, self.field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FpElem(other.value - self.value, self.field)

    def __neg__(self):
        return FpElem(-self.value, self.field)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FpElem(self.value * other.value, self.field)

    __rmul__ = __mul__

    def inverse(self) -> "FpElem":
        if self.value == 0:
            raise FieldError(f"division by zero in F_{self.field.p}")
        return FpElem(pow(self.value, -1, self.field.p), self.field)

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
        return FpElem(pow(self.value, exponent, self.field.p), self.field)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.field.p == other.field.p and self.value == other.value
        if isinstance(other, int):
            return (self.value - other) % self.field.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


@dataclass(frozen=True)
class QuadraticExtension(FiniteField):
    """base[omega] with omega^2 = t, t a non-square of base"""

    base: FiniteField
    t: object

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def order(self) -> int:
        return self.base.order ** 2

    @property
    def degree(self) -> int:
        return 2 * self.base.degree

    @property
    def omega(self) -> "ExtElem":
        return ExtElem(self.base.zero, self.base.one, self)

    def __call__(self, value) -> "ExtElem":
        if isinstance(value, ExtElem) and value.field == self:
            return value
        return ExtElem(self.base(value), self.base.zero, self)

    def elements(self) -> Iterator["ExtElem"]:
        base_elements = list(self.base.elements())
        for u in base_elements:
            for v in base_elements:
                yield ExtElem(u, v, self)

    def __str__(self):
        return f"F_{self.order}"


class ExtElem:
    """u + v*omega in a quadratic extension"""

    __slots__ = ("u", "v", "field")

    def __init__(self, u, v, field: QuadraticExtension):
        self.u = u
        self.v = v
        self.field = field

    def _coerce(self, other) -> Optional["ExtElem"]:
        if isinstance(other, ExtElem) and other.field == self.field:
            return other
        try:
            return self.field(other)
        except (FieldError, TypeError, ValueError):
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ExtElem(self.u + other.u, self.v + other.v, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ExtElem(self.u - other.u, self.v - other.v, self.field)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return ExtElem(-self.u, -self.v, self.field)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        t = self.field.t
        return ExtElem(self.u * other.u + t * self.v * other.v,
                       self.u * other.v + self.v * other.u, self.field)

    __rmul__ = __mul__

    def norm(self):
        return self.u * self.u - self.field.t * self.v * self.v

    def inverse(self) -> "ExtElem":
        n = self.norm()
        if not n:
            raise FieldError(f"division by zero in {self.field}")
        n_inv = n.inverse()
        return ExtElem(self.u * n_inv, -self.v * n_inv, self.field)

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
        result = self.field.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def frobenius(self) -> "ExtElem":
        return self ** self.field.p

    def __eq__(self, other):
        if isinstance(other, ExtElem) and other.field == self.field:
            return self.u == other.u and self.v == other.v
        if isinstance(other, (int, FpElem, ExtElem)):
            return not self.v and self.u == other
        return NotImplemented

    def __hash__(self):
        # v = 0 compares equal to the base element u
        if not self.v:
            return hash(self.u)
        return hash((self.u, self.v))

    def __bool__(self):
        return bool(self.u) or bool(self.v)

    def __repr__(self):
        return f"({self.u!r}) + ({self.v!r})*w"


def _euler_is_square(a: int, p: int) -> bool:
    return a % p == 0 or pow(a, (p - 1) // 2, p) == 1


@lru_cache(maxsize=None)
def fp2_construct(p: int) -> QuadraticExtension:
    """F_{p^2} = F_p[omega], omega^2 = t with t the smallest positive non-residue"""
    if p == 2:
        raise FieldError("F_4 is not constructed (p = 2 unsupported)")
    if not isprime(p):
        raise FieldError(f"{p} is not prime")
    base = PrimeField(p)
    t = next(a for a in range(2, p) if not _euler_is_square(a, p))
    return QuadraticExtension(base, base(t))


@lru_cache(maxsize=None)
def quadratic_extension(base: FiniteField) -> QuadraticExtension:
    """Extension of an arbitrary finite field by its first non-square"""
    squares = base.squares()
    t = next(x for x in base.elements() if x not in squares)
    return QuadraticExtension(base, t)


def sqrt_mod_p(a: FpElem) -> Optional[FpElem]:
    """Square root of a in F_p by Tonelli-Shanks, normalised to min(r, p - r)

    Returns None when a is a quadratic non-residue.
    """
    field = a.field
    p = field.p
    n = a.value
    if n == 0 or p == 2:
        return FpElem(n, field)
    if not _euler_is_square(n, p):
        return None

    # p - 1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1

    z = next(c for c in range(2, p) if not _euler_is_square(c, p))
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p

    return FpElem(min(r, p - r), field)

"""QuadTorsion Density Experiment
Orders quadratic fields by the psi bijection (sign and prime exponents of d read as binary
digits) and measures how often the Kenku-Momose conditions rule out Z/18 torsion
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional

import pandas as pd
from loguru import logger
from sympy import factorint, prime, primepi

from src.core.errors import FieldError
from src.fields.qfield import QuadField, is_squarefree
from src.modular.catalog import KenkuMomose, kenku_momose_conditions

# Limits of the per-condition fractions as t -> infinity (t a power of two)
PREDICTED_LIMITS = {
    "i": Fraction(1, 4),
    "ii": Fraction(7, 32),
    "iii": Fraction(3, 4),
    "i_or_ii": Fraction(15, 32),
    "any": Fraction(111, 128),
}
CLAIMED_LOWER_BOUND = Fraction(55, 64)


@dataclass(frozen=True)
class PsiIndex:
    """psi(d) together with its binary digits, least significant (the sign) first"""

    n: int

    @property
    def bits(self) -> List[int]:
        return [int(b) for b in reversed(bin(self.n)[2:])]

    @property
    def d(self) -> int:
        return psi_inverse(self.n)


def psi(d: int) -> int:
    """Bit 0 is the exponent of -1, bit k (k >= 1) the exponent of the k-th prime"""
    if d in (0, 1) or not is_squarefree(d):
        raise FieldError(f"psi is defined on squarefree d not in (0, 1), got {d}")
    n = 1 if d < 0 else 0
    for p in factorint(abs(d)):
        n |= 1 << int(primepi(p))
    return n


def psi_inverse(n: int) -> int:
    if n < 1:
        raise FieldError(f"psi_inverse needs a positive integer, got {n}")
    d = -1 if n & 1 else 1
    k, rest = 1, n >> 1
    while rest:
        if rest & 1:
            d *= prime(k)
        rest >>= 1
        k += 1
    return d


def iter_psi_fields(start: int, stop: int) -> Iterator[QuadField]:
    """Q(sqrt(psi_inverse(n))) for start <= n < stop"""
    for n in range(start, stop):
        yield QuadField(psi_inverse(n))


@dataclass
class DensityCounter:
    total: int = 0
    any: int = 0
    i: int = 0
    ii: int = 0
    iii: int = 0
    i_or_ii: int = 0
    i_and_ii: int = 0

    def add(self, conditions: List[KenkuMomose]):
        held = set(conditions)
        self.total += 1
        self.any += bool(held)
        self.i += KenkuMomose.I in held
        self.ii += KenkuMomose.II in held
        self.iii += KenkuMomose.III in held
        self.i_or_ii += bool(held & {KenkuMomose.I, KenkuMomose.II})
        self.i_and_ii += {KenkuMomose.I, KenkuMomose.II} <= held

    def merge(self, other: "DensityCounter") -> "DensityCounter":
        return DensityCounter(*(getattr(self, k) + getattr(other, k) for k in _COUNTER_FIELDS))


_COUNTER_FIELDS = ("total", "any", "i", "ii", "iii", "i_or_ii", "i_and_ii")


def scan_chunk(start: int, stop: int) -> DensityCounter:
    counter = DensityCounter()
    for K in iter_psi_fields(start, stop):
        counter.add(kenku_momose_conditions(K))
    return counter


@dataclass
class DensityResult:
    t: int
    counter: DensityCounter = field(default_factory=DensityCounter)

    @property
    def n_t(self) -> int:
        return self.counter.any

    @property
    def a_t(self) -> int:
        return self.counter.total

    def fraction(self, key: str) -> float:
        return getattr(self.counter, key) / self.a_t if self.a_t else 0.0

    @property
    def ratio(self) -> float:
        return self.fraction("any")

    @property
    def disjoint(self) -> bool:
        return self.counter.i_and_ii == 0

    def breakdown_frame(self) -> pd.DataFrame:
        rows = []
        for key, limit in PREDICTED_LIMITS.items():
            rows.append({
                "condition": key,
                "count": getattr(self.counter, key),
                "fraction": round(self.fraction(key), 6),
                "predicted": float(limit),
            })
        return pd.DataFrame(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "N_t": self.n_t,
            "A_t": self.a_t,
            "ratio": self.ratio,
            "frac_i": self.fraction("i"),
            "frac_ii": self.fraction("ii"),
            "frac_iii": self.fraction("iii"),
            "i_and_ii": self.counter.i_and_ii,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def density_scan(t: int, chunk: Optional[int] = None) -> DensityResult:
    """Fraction of the fields psi^-1(1..t) meeting at least one Kenku-Momose condition"""
    if t < 1:
        raise FieldError(f"density_scan needs t >= 1, got {t}")
    if chunk is None:
        from src.core.config import get_settings
        chunk = get_settings().density.chunk_size

    result = DensityResult(t)
    for start in range(1, t + 1, chunk):
        stop = min(start + chunk, t + 1)
        result.counter = result.counter.merge(scan_chunk(start, stop))
        logger.debug(f"Density scan: {stop - 1}/{t} fields")

    logger.info(f"Density scan t={t}: N_t={result.n_t}, ratio={result.ratio:.4f} "
                f"(bound {float(CLAIMED_LOWER_BOUND):.4f})")
    if not result.disjoint:
        logger.warning(f"Conditions (i) and (ii) overlap on {result.counter.i_and_ii} fields")
    return result

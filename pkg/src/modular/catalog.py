"""QuadTorsion Modular Curve Catalog
Models and cusp polynomials of the eight curves X1(m,n) behind the quadratic-only torsion
groups, the cusp predicate, the noncuspidal point search and the Kenku-Momose Z/18 criterion
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from loguru import logger
from sympy import Poly, symbols

from src.core.errors import UsageError
from src.curves.ellcurve import OVER_CAP, EllCurve, EllPoint, TorsionGroup
from src.curves.genus2 import HyperCurve
from src.curves.search import SearchBox, curve_points, hyper_points
from src.fields.qfield import QuadField, SplitType, splitting_type

_X = symbols("x")


@dataclass(frozen=True)
class ModularCurveRecord:
    """One modular curve X1(m,n) with the model and cusp factors used for classification

    Polynomials are integer coefficient tuples from the leading coefficient down.
    Genus 1 models are a-invariants [a1, a2, a3, a4, a6]; genus 2 models are y^2 = f(x).
    """

    m: int
    n: int
    genus: int
    ainvs: Optional[Tuple[int, ...]]
    hyper_coeffs: Optional[Tuple[int, ...]]
    cusp_factors: Tuple[Tuple[int, ...], ...]
    printed_equation: str
    printed_cusps: str
    flags: Tuple[str, ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def key(self) -> str:
        return f"X1_{self.n}" if self.m == 1 else f"X1_{self.m}_{self.n}"

    @property
    def curve_id(self) -> str:
        return f"X1({self.n})" if self.m == 1 else f"X1({self.m},{self.n})"

    @property
    def classifies(self) -> TorsionGroup:
        return TorsionGroup(self.m, self.n)

    @property
    def equation(self) -> str:
        if self.genus == 2:
            return f"y^2 = {Poly(list(self.hyper_coeffs), _X).as_expr()}"
        a1, a2, a3, a4, a6 = self.ainvs
        lhs = "y^2" + _term(a1, "x*y") + _term(a3, "y")
        rhs = "x^3" + _term(a2, "x^2") + _term(a4, "x") + _term(a6, "")
        return f"{lhs} = {rhs}"

    @property
    def corrected(self) -> bool:
        return "corrected-model" in self.flags

    @property
    def cusp_poly(self) -> Tuple[int, ...]:
        product = Poly(1, _X)
        for factor in self.cusp_factors:
            product *= Poly(list(factor), _X)
        return tuple(int(c) for c in product.all_coeffs())

    def cusp_poly_str(self) -> str:
        return "".join(f"({Poly(list(f), _X).as_expr()})" for f in self.cusp_factors)

    def rational_cusp_roots(self) -> List[Fraction]:
        """Roots of the linear cusp factors"""
        return [Fraction(-f[1], f[0]) for f in self.cusp_factors if len(f) == 2]

    def curve_over(self, K: Optional[QuadField]) -> EllCurve:
        if self.genus != 1:
            raise UsageError(f"{self.curve_id} is not an elliptic curve")
        return EllCurve(*self.ainvs, field=K)

    @property
    def hyper(self) -> HyperCurve:
        if self.genus != 2:
            raise UsageError(f"{self.curve_id} is not a genus 2 curve")
        return HyperCurve.from_integer_poly(self.hyper_coeffs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve": self.curve_id,
            "key": self.key,
            "genus": self.genus,
            "classifies": self.classifies.to_list(),
            "equation": self.equation,
            "printed_equation": self.printed_equation,
            "cusp_poly": self.cusp_poly_str(),
            "flags": list(self.flags),
            "notes": list(self.notes),
        }


def _term(c: int, monomial: str) -> str:
    if c == 0:
        return ""
    sign = " - " if c < 0 else " + "
    magnitude = abs(c)
    if not monomial:
        return f"{sign}{magnitude}"
    return f"{sign}{'' if magnitude == 1 else magnitude}{monomial}"


@lru_cache(maxsize=None)
def _catalog() -> Tuple[ModularCurveRecord, ...]:
    return (
        ModularCurveRecord(
            1, 11, 1, (0, -1, -1, 0, 0), None,
            ((1, 0), (1, -1), (1, -18, 35, -16, -2, 1)),
            "y^2 - y = x^3 - x", "x(x-1)(x^5-18x^4+35x^3-16x^2-2x+1)",
            flags=("corrected-model",),
            notes=("The displayed cubic x^3 - x has trivial torsion over Q; the stored model "
                   "y^2 - y = x^3 - x^2 carries the Z/5 of cusps at x = 0 and x = 1.",),
        ),
        ModularCurveRecord(
            1, 13, 2, None, (1, -2, 1, -2, 6, -4, 1),
            ((1, 0), (1, -1), (1, -4, 1, 1)),
            "y^2 = x^6 - 2x^5 + x^4 - 2x^3 + 6x^2 - 4x + 1", "x(x-1)(x^3-4x^2+x+1)",
            notes=("Both points at infinity are cusps.",),
        ),
        ModularCurveRecord(
            1, 14, 1, (1, 0, 1, -1, 0), None,
            ((1, 0), (1, -1), (1, 1), (1, -9, -1, 1), (1, -2, -1, 1)),
            "y^2 + xy + y = x^3 - x", "x(x-1)(x+1)(x^3-9x^2-x+1)(x^3-2x^2-x+1)",
        ),
        ModularCurveRecord(
            1, 15, 1, (1, 1, 1, 0, 0), None,
            ((1, 0), (1, 1), (1, 3, 4, 2, 1), (1, 0, -13, 2, 1)),
            "y^2 + xy + y = x^3 + x^2", "x(x+1)(x^4+3x^3+4x^2+2x+1)(x^4-7x^2-6x^2+2x+1)",
            flags=("printed-factor-suspect",),
            notes=("The last quartic factor is stored as printed, x^4 - 13x^2 + 2x + 1; "
                   "the printed form repeats the x^2 monomial.",),
        ),
        ModularCurveRecord(
            1, 16, 2, None, (1, 2, 0, 2, -1, 0),
            ((1, 0), (1, -1), (1, 1), (1, -2, -1), (1, 2, -1)),
            "y^2 = x(x^2+1)(x^2+2x-1)", "x(x-1)(x+1)(x^2-2x-1)(x^2+2x-1)",
            notes=("The single point at infinity is a cusp.",),
        ),
        ModularCurveRecord(
            1, 18, 2, None, (1, 2, 5, 10, 10, 4, 1),
            ((1, 0), (1, 1), (1, 1, 1), (1, -3, -1)),
            "y^2 = x^6 + 2x^5 + 5x^4 + 10x^3 + 10x^2 + 4x + 1", "x(x+1)(x^2+x+1)(x^2-3x-1)",
            notes=("Both points at infinity are cusps.",),
        ),
        ModularCurveRecord(
            2, 10, 1, (0, 1, 0, -1, 0), None,
            ((1, 0), (1, -1), (1, 1), (1, 1, -1), (1, -4, -1)),
            "y^2 = x^3 + x^2 - x", "x(x-1)(x+1)(x^2+x-1)(x^2-4x-1)",
        ),
        ModularCurveRecord(
            2, 12, 1, (0, -1, 0, 1, 0), None,
            ((1, 0), (1, -1), (2, -1), (2, -1, 1), (3, -3, -1), (6, -6, -1)),
            "y^2 = x^3 - x^2 + x", "x(x-1)(2x-1)(2x^2-x+1)(3x^2-3x-1)(6x^2-6x-1)",
            notes=("The root x = 1/2 of 2x - 1 gives y^2 = 3/8, so its points are defined "
                   "over Q(sqrt(6)) and not over Q.",),
        ),
    )


def catalog() -> List[ModularCurveRecord]:
    """The eight cataloged modular curves"""
    return list(_catalog())


def get_record(selector: str) -> ModularCurveRecord:
    """Look up a record by key (X1_13), curve id (X1(2,10)) or group spec (2x12)"""
    cleaned = selector.strip().upper().replace(" ", "")
    match = re.fullmatch(r"X1[_(]?(\d+)(?:[_,](\d+))?\)?", cleaned)
    if match:
        spec = match.group(1) if match.group(2) is None else f"{match.group(1)}x{match.group(2)}"
    else:
        spec = cleaned.lower()
    try:
        group = TorsionGroup.parse(spec)
    except UsageError:
        raise UsageError(f"unknown modular curve {selector!r}") from None
    record = record_for_group(group)
    if record is None:
        raise UsageError(f"{selector!r} is not one of the cataloged curves")
    return record


def record_for_group(group: TorsionGroup) -> Optional[ModularCurveRecord]:
    for record in _catalog():
        if record.classifies == group:
            return record
    return None


def _evaluate(coeffs: Sequence[int], x):
    value = 0
    for c in coeffs:
        value = value * x + c
    return value


def is_cusp(rec: ModularCurveRecord, x) -> bool:
    """True iff x is a root of the cusp polynomial; None stands for a point at infinity"""
    if x is None:
        return True
    return any(_evaluate(factor, x) == 0 for factor in rec.cusp_factors)


@dataclass
class NoncuspidalPoint:
    """A box-search point that is not a cusp; tag is TORSION, NONTORSION or RAW (genus 2)"""

    x: Any
    y: Any
    tag: str
    order: Optional[int] = None

    @property
    def point(self) -> EllPoint:
        return EllPoint(self.x, self.y)

    def to_dict(self) -> Dict[str, Any]:
        return {"point": self.point.to_dict(), "tag": self.tag, "order": self.order}


def noncuspidal_search(rec: ModularCurveRecord, K: Optional[QuadField],
                       box: Optional[SearchBox] = None, cap: int = 24) -> List[NoncuspidalPoint]:
    """Points of the model over K (None for Q) in the search box that are not cusps"""
    box = box or SearchBox.from_settings()
    found = []
    if rec.genus == 1:
        E = rec.curve_over(K)
        for P in curve_points(E, box):
            if is_cusp(rec, P.x):
                continue
            order = E.order(P, cap)
            tag = "NONTORSION" if order is OVER_CAP else "TORSION"
            found.append(NoncuspidalPoint(P.x, P.y, tag, order))
    else:
        for x, y in hyper_points(rec.hyper_coeffs, K, box):
            if not is_cusp(rec, x):
                found.append(NoncuspidalPoint(x, y, "RAW"))
    logger.debug(f"{rec.curve_id} over {K or 'Q'}: {len(found)} noncuspidal points in the box")
    return found


class KenkuMomose(str, Enum):
    """Splitting conditions excluding Z/18 torsion"""

    I = "I"      # 3 inert
    II = "II"    # 3 split, 2 not split
    III = "III"  # 5 or 7 ramified


def kenku_momose_conditions(K: QuadField) -> List[KenkuMomose]:
    """Every satisfied condition, in order"""
    satisfied = []
    three = splitting_type(K, 3)
    if three == SplitType.INERT:
        satisfied.append(KenkuMomose.I)
    if three == SplitType.SPLIT and splitting_type(K, 2) != SplitType.SPLIT:
        satisfied.append(KenkuMomose.II)
    if SplitType.RAMIFIED in (splitting_type(K, 5), splitting_type(K, 7)):
        satisfied.append(KenkuMomose.III)
    return satisfied


def kenku_momose_Z18(K: QuadField) -> Optional[KenkuMomose]:
    """First satisfied condition, or None when the criterion is silent"""
    satisfied = kenku_momose_conditions(K)
    return satisfied[0] if satisfied else None

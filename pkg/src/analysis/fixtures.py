"""QuadTorsion Fixtures
Loads the explicit curves with prescribed torsion and verifies them: points on the curve,
certified orders, and the subgroup they generate against the claimed group
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
import sympy
from loguru import logger
from pydantic import BaseModel, ValidationError, field_validator

from src.core.errors import CurveError, FieldError, FixtureError
from src.curves.ellcurve import (EllCurve, EllPoint, TorsionGroup, generated_group,
                                 point_order, torsion_certify)
from src.fields.qfield import QuadElem, QuadField

COEFFICIENTS = ("a1", "a2", "a3", "a4", "a6")


class FixturePoint(BaseModel):
    x: Dict[str, Any]
    y: Dict[str, Any]


class FixtureRecord(BaseModel):
    """One explicit curve over Q(sqrt(d)) together with its torsion generators"""

    name: str
    curve: str
    d: int
    a1: Dict[str, Any]
    a2: Dict[str, Any]
    a3: Dict[str, Any]
    a4: Dict[str, Any]
    a6: Dict[str, Any]
    points: List[FixturePoint]
    printed_points: List[FixturePoint] = []
    claimed_group: List[int]
    provenance: str
    radical_candidates: List[int] = []

    @field_validator("claimed_group")
    @classmethod
    def group_shape(cls, v: List[int]) -> List[int]:
        if len(v) != 2 or v[0] < 1 or v[1] % v[0]:
            raise ValueError(f"claimed_group must be [m, n] with m | n, got {v}")
        return v

    @property
    def field(self) -> QuadField:
        return QuadField(self.d)

    @property
    def claimed(self) -> TorsionGroup:
        return TorsionGroup(*self.claimed_group)

    @property
    def ambiguous(self) -> bool:
        return bool(self.radical_candidates)

    def build_curve(self) -> EllCurve:
        K = self.field
        return EllCurve(*(QuadElem.from_json(getattr(self, name), K) for name in COEFFICIENTS), field=K)

    def build_points(self, reading: Optional[int] = None) -> List[EllPoint]:
        """Points over the curve's field, reading the printed radical as sqrt(reading)"""
        return self._build(self.points, reading)

    def build_printed_points(self) -> List[EllPoint]:
        """Generators as originally printed, kept when the stored ones were corrected"""
        return self._build(self.printed_points)

    def _build(self, source: List[FixturePoint], reading: Optional[int] = None) -> List[EllPoint]:
        K = self.field
        points = []
        for p in source:
            coords = []
            for data in (p.x, p.y):
                data = dict(data)
                if reading is not None:
                    data["d"] = reading
                coords.append(QuadElem.from_json(data, K))
            points.append(EllPoint(*coords))
        return points


def load_fixtures(path: Optional[Union[str, Path]] = None) -> List[FixtureRecord]:
    """Read and validate the fixture file; any malformed record is an error"""
    if path is None:
        from src.core.config import get_settings
        path = get_settings().fixtures_file
    path = Path(path)
    if not path.exists():
        raise FixtureError(f"fixture file not found at {path}")

    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise FixtureError(f"fixture file {path} is not valid JSON: {e}") from e

    if isinstance(raw, dict):
        entries = raw["fixtures"] if "fixtures" in raw else [raw]
    else:
        entries = raw
    if not isinstance(entries, list):
        raise FixtureError(f"fixture file {path} must hold a list of fixtures")

    records = []
    for i, entry in enumerate(entries):
        try:
            records.append(FixtureRecord.model_validate(entry))
        except ValidationError as e:
            raise FixtureError(f"malformed fixture #{i} in {path}: {e}") from e
    logger.debug(f"Loaded {len(records)} fixtures from {path}")
    return records


def _symbolic(data: Dict[str, Any], d: int):
    a = Fraction(str(data["a"]))
    b = Fraction(str(data.get("b", "0")))
    return sympy.Rational(a.numerator, a.denominator) + sympy.Rational(b.numerator, b.denominator) * sympy.sqrt(d)


def _satisfies(record: FixtureRecord, reading: int) -> bool:
    """Does every point, with its radical read as sqrt(reading), lie on the curve?

    The check runs in the compositum of Q(sqrt(d)) and Q(sqrt(reading)) through sympy.
    """
    a1, a2, a3, a4, a6 = (_symbolic(getattr(record, name), record.d) for name in COEFFICIENTS)
    for p in record.points:
        x, y = _symbolic(p.x, reading), _symbolic(p.y, reading)
        residual = y ** 2 + a1 * x * y + a3 * y - (x ** 3 + a2 * x ** 2 + a4 * x + a6)
        if sympy.expand(residual) != 0:
            return False
    return True


@dataclass
class RadicalResolution:
    """Outcome of substituting each candidate reading of a printed radical"""

    printed: int
    candidates: Dict[int, bool]

    @property
    def chosen(self) -> Optional[int]:
        satisfied = [d for d, ok in self.candidates.items() if ok]
        return satisfied[0] if len(satisfied) == 1 else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "printed": self.printed,
            "candidates": {str(d): ok for d, ok in self.candidates.items()},
            "chosen": self.chosen,
        }


def resolve_radical(record: FixtureRecord) -> RadicalResolution:
    printed = int(record.points[0].x.get("d", record.d))
    candidates = {d: _satisfies(record, d) for d in record.radical_candidates}
    resolution = RadicalResolution(printed, candidates)
    logger.info(f"{record.name}: radical readings {candidates} -> sqrt({resolution.chosen})")
    return resolution


@dataclass
class FixtureCheck:
    name: str
    d: int
    claimed: TorsionGroup
    on_curve: bool = False
    orders: List[Optional[int]] = field(default_factory=list)
    generated: Optional[TorsionGroup] = None
    torsion_upper: Optional[int] = None
    radical: Optional[RadicalResolution] = None
    printed_on_curve: Optional[bool] = None
    error: Optional[str] = None

    @property
    def order_ok(self) -> bool:
        return bool(self.orders) and all(n is not None and self.claimed.n % n == 0 for n in self.orders)

    @property
    def passed(self) -> bool:
        return self.error is None and self.on_curve and self.order_ok and self.generated == self.claimed

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "name": self.name,
            "d": self.d,
            "claimed": self.claimed.to_list(),
            "on_curve": self.on_curve,
            "orders": self.orders,
            "generated": self.generated.to_list() if self.generated else None,
            "torsion_upper": self.torsion_upper,
            "passed": self.passed,
        }
        if self.radical is not None:
            data["radical"] = self.radical.to_dict()
        if self.printed_on_curve is not None:
            data["printed_on_curve"] = self.printed_on_curve
        if self.error:
            data["error"] = self.error
        return data


def check_fixture(record: FixtureRecord, bound: bool = False) -> FixtureCheck:
    """Verify one fixture; bound=True also computes a reduction upper bound for the torsion"""
    check = FixtureCheck(record.name, record.d, record.claimed)
    try:
        E = record.build_curve()
        reading = None
        if record.ambiguous:
            check.radical = resolve_radical(record)
            reading = check.radical.chosen
            if reading != record.d:
                check.error = f"no reading of the printed radical lies on the curve over {record.field}"
                return check
        points = record.build_points(reading)
        if record.printed_points:
            check.printed_on_curve = all(E.contains(P) for P in record.build_printed_points())
            if not check.printed_on_curve:
                logger.warning(f"Fixture {record.name}: printed generator is off the curve, "
                               f"using the stored correction")

        check.on_curve = all(E.contains(P) for P in points)
        if not check.on_curve:
            check.error = "point not on curve"
            return check

        check.orders = [point_order(E, P) for P in points]
        check.generated, _ = generated_group(E, points)
        if bound:
            certificate = torsion_certify(E, points, search=False)
            check.torsion_upper = certificate.upper_order
    except (CurveError, FieldError) as e:
        check.error = str(e)

    status = "passed" if check.passed else "FAILED"
    logger.debug(f"Fixture {record.name} {status}: orders {check.orders}, generated {check.generated}")
    return check


@dataclass
class FixtureReport:
    checks: List[FixtureCheck]

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def by_name(self, name: str) -> FixtureCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise FixtureError(f"no fixture named {name!r}")

    def frame(self) -> pd.DataFrame:
        rows = []
        for c in self.checks:
            rows.append({
                "fixture": c.name,
                "d": c.d,
                "claimed": str(c.claimed),
                "orders": ",".join(str(n) for n in c.orders),
                "generated": str(c.generated) if c.generated else "-",
                "result": "PASS" if c.passed else "FAIL",
            })
        return pd.DataFrame(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "fixtures": [c.to_dict() for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def verify_fixtures(path: Optional[Union[str, Path]] = None, bound: bool = False) -> FixtureReport:
    records = load_fixtures(path)
    report = FixtureReport([check_fixture(r, bound) for r in records])
    passed = sum(c.passed for c in report.checks)
    logger.info(f"Fixture verification: {passed}/{len(report.checks)} passed")
    return report


@lru_cache(maxsize=None)
def verified_witnesses(path: Optional[str] = None) -> Dict[str, List[FixtureCheck]]:
    """Passing fixtures grouped by the modular curve they witness"""
    witnesses: Dict[str, List[FixtureCheck]] = {}
    records = {r.name: r for r in load_fixtures(path)}
    for check in verify_fixtures(path).checks:
        if check.passed:
            witnesses.setdefault(records[check.name].curve, []).append(check)
    return witnesses

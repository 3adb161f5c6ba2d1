"""QuadTorsion System Evaluation
Golden checks behind `verify-paper`: Jacobian orders of X1(13), Jacobian torsion bounds,
the explicit fixture curves, torsion of X1(11), the Kenku-Momose table, smallest fields
and the density experiment
"""

import json
from datetime import datetime
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from loguru import logger

from src.analysis.classify import smallest_field
from src.analysis.density import CLAIMED_LOWER_BOUND, PREDICTED_LIMITS, density_scan
from src.analysis.fixtures import verify_fixtures
from src.core.errors import QuadTorsionError
from src.curves.ellcurve import TorsionGroup, torsion_certify
from src.curves.genus2 import jacobian_order, jacobian_order_ext, jacobian_torsion_gcd_bound
from src.fields.qfield import QuadField
from src.modular.catalog import get_record, is_cusp, kenku_momose_Z18
from src.modular.ledger import FactKind, get_ledger

# (p, extension) -> |J_1(13)(F_{p^extension})|
GOLDEN_JACOBIAN_ORDERS = {
    (3, 1): 19,
    (3, 2): 3 * 19,
    (5, 2): 19 ** 2,
    (11, 2): 7 ** 2 * 19 ** 2,
    (17, 1): 2 ** 2 * 3 * 19,
    (17, 2): 2 ** 6 * 3 ** 2 * 7 * 19,
    (29, 2): 2 ** 6 * 3 ** 2 * 19 * 61,
    (41, 2): 2 ** 6 * 7 ** 4 * 19,
    (47, 2): 2 ** 8 * 7 ** 2 * 19 ** 2,
}

# (d, primes) -> bound on |J_1(13)(Q(sqrt(d)))_tors|
GOLDEN_TORSION_BOUNDS = {
    (5, (3, 47)): 19,
    (-7, (3, 5)): 19,
}

# Conditions read literally: (i) 3 inert, (ii) 3 split and 2 not split, (iii) 5 or 7 ramified.
# d = -2 and d = 23 are listed as NONE in the printed table; see KENKU_MOMOSE_PRINTED.
GOLDEN_KENKU_MOMOSE = {
    2: "I", -19: "I", -31: "I", 17: "I", 5: "I", -7: "I", -1: "I", 29: "I", 23: "I",
    -11: "II", 13: "II", -2: "II",
    21: "III", -15: "III",
    3: None, 6: None, -6: None, 33: None, -23: None, -3: None,
}

GOLDEN_SMALLEST_FIELDS = {
    "11": -7, "13": 17, "14": -7, "15": 5, "16": -15, "18": 33, "2x10": -2, "2x12": 13,
}

# Printed values that the literal conditions contradict
KENKU_MOMOSE_PRINTED = {-2: None, 23: None}
PRINTED_FRACTION_II = Fraction(3, 16)
LITERAL_READING_NOTE = ("deviation: literal Kenku-Momose (ii), 3 split and 2 not split; "
                        "see DESIGN.md, Deviations and corrections")
DENSITY_TOLERANCE = 0.02

X11_TORSION_FIELDS = (None, -1, -3, 5, -7)


class SystemEvaluator:
    """Runs the golden checks and keeps a pass/fail matrix"""

    def __init__(self, include_slow: bool = True, density_t: Optional[int] = None, quiet: bool = False):
        self.include_slow = include_slow
        self.density_t = density_t
        self.quiet = quiet
        self.results = {
            'timestamp': datetime.now().isoformat(),
            'checks': [],
        }

    def _say(self, text: str):
        if not self.quiet:
            print(text)

    def _record(self, section: str, name: str, expected: Any, actual: Any,
                passed: Optional[bool] = None, note: Optional[str] = None):
        passed = (expected == actual) if passed is None else passed
        check = {
            'section': section,
            'name': name,
            'expected': expected,
            'actual': actual,
            'passed': passed,
        }
        if note:
            check['note'] = note
        self.results['checks'].append(check)
        self._say(f"   {'✅' if passed else '❌'} {name}: {actual}" + ("" if passed else f" (expected {expected})"))
        if note:
            self._say(f"      ⚠️  {note}")

    def _guard(self, section: str, check: Callable[[], None]):
        try:
            check()
        except QuadTorsionError as e:
            logger.error(f"{section} check raised: {e}")
            self._record(section, f"{section} error", "no error", str(e), passed=False)

    def evaluate_system(self) -> bool:
        self._say("🔍 QuadTorsion verification")
        self._say("=" * 50)

        self._guard("jacobian", self._test_jacobian_orders)
        self._guard("bounds", self._test_torsion_bounds)
        self._guard("fixtures", self._test_fixtures)
        self._guard("x11", self._test_x11_torsion)
        self._guard("kenku-momose", self._test_kenku_momose)
        if self.include_slow:
            self._guard("smallest", self._test_smallest_fields)
            self._guard("density", self._test_density)

        self._generate_report()
        return self.passed

    @property
    def passed(self) -> bool:
        return bool(self.results['checks']) and all(c['passed'] for c in self.results['checks'])

    def _test_jacobian_orders(self):
        self._say("📐 Jacobian orders of X1(13)...")
        C = get_record("X1_13").hyper
        for (p, ext), expected in GOLDEN_JACOBIAN_ORDERS.items():
            actual = jacobian_order(C, p) if ext == 1 else jacobian_order_ext(C, p)
            field = f"F_{p}" if ext == 1 else f"F_{p}^2"
            self._record("jacobian", f"|J(X1(13))({field})|", expected, actual)

    def _test_torsion_bounds(self):
        self._say("🧮 Jacobian torsion bounds...")
        C = get_record("X1_13").hyper
        for (d, primes), expected in GOLDEN_TORSION_BOUNDS.items():
            actual = jacobian_torsion_gcd_bound(C, QuadField(d), primes)
            self._record("bounds", f"bound over Q(sqrt({d})) from {list(primes)}", expected, actual)

        rational = get_ledger().first("X1(13)", 1, FactKind.TORSION_GROUP)
        order = rational.value[0] * rational.value[1] if rational else None
        self._record("bounds", "|J_1(13)(Q)_tors| in ledger", 19, order)
        if rational is not None and rational.note:
            self._say(f"   ⚠️  {rational.note}")

    def _test_fixtures(self):
        self._say("📜 Explicit curves...")
        report = verify_fixtures()
        for check in report.checks:
            actual = str(check.generated) if check.generated else check.error
            self._record("fixtures", check.name, str(check.claimed), actual, passed=check.passed)
            if check.radical is not None:
                chosen = check.radical.chosen
                self._say(f"      radical printed as sqrt({check.radical.printed}) resolves to sqrt({chosen})")
            if check.printed_on_curve is False:
                self._say("      printed generator is off the curve; the stored generator is 7*(0,0)")

    def _test_x11_torsion(self):
        self._say("🔁 Torsion of X1(11)...")
        rec = get_record("X1_11")
        for d in X11_TORSION_FIELDS:
            K = QuadField(d) if d is not None else None
            certificate = torsion_certify(rec.curve_over(K))
            cusps = all(is_cusp(rec, P.x) for P in certificate.points)
            name = f"X1(11) over {K or 'Q'}"
            self._record("x11", name, str(TorsionGroup(1, 5)), str(certificate.lower),
                         passed=certificate.lower == TorsionGroup(1, 5) and cusps)

    def _test_kenku_momose(self):
        self._say("🚫 Kenku-Momose conditions for Z/18...")
        for d, expected in GOLDEN_KENKU_MOMOSE.items():
            condition = kenku_momose_Z18(QuadField(d))
            note = None
            if d in KENKU_MOMOSE_PRINTED:
                note = f"printed {KENKU_MOMOSE_PRINTED[d] or 'NONE'}; {LITERAL_READING_NOTE}"
            self._record("kenku-momose", f"d = {d}", expected, condition.value if condition else None,
                         note=note)

    def _test_smallest_fields(self):
        self._say("🔎 Smallest fields...")
        for spec, expected in GOLDEN_SMALLEST_FIELDS.items():
            result = smallest_field(TorsionGroup.parse(spec))
            note = f" conditional on {[s.d for s in result.skipped]}" if result.conditional else ""
            self._record("smallest", f"{TorsionGroup.parse(spec)}{note}", expected, result.d)

    def _test_density(self):
        from src.core.config import get_settings

        t = self.density_t or get_settings().density.default_t
        self._say(f"📊 Density scan up to t = {t}...")
        result = density_scan(t)
        self._record("density", f"N_t / A_t >= 55/64 - {DENSITY_TOLERANCE}", True,
                     result.ratio >= float(CLAIMED_LOWER_BOUND) - DENSITY_TOLERANCE)
        for condition, note in (("i", None),
                                ("ii", f"printed limit {PRINTED_FRACTION_II}; {LITERAL_READING_NOTE}")):
            limit = PREDICTED_LIMITS[condition]
            low, high = float(limit) - DENSITY_TOLERANCE, float(limit) + DENSITY_TOLERANCE
            actual = result.fraction(condition)
            self._record("density", f"frac_{condition} in [{low:.4f}, {high:.4f}] (limit {limit})",
                         True, low <= actual <= high, note=note)
        self._record("density", "(i) and (ii) disjoint", True, result.disjoint)

    def _generate_report(self):
        checks = self.results['checks']
        passed = sum(c['passed'] for c in checks)
        self._say("")
        self._say("📋 SUMMARY")
        self._say("=" * 50)
        self._say(f"{passed}/{len(checks)} checks passed")
        failures = [c for c in checks if not c['passed']]
        for c in failures:
            self._say(f"   ❌ [{c['section']}] {c['name']}" + (f" ({c['note']})" if c.get('note') else ""))
        if failures:
            logger.error(f"{len(failures)} golden checks failed")
        else:
            logger.success("All golden checks passed")

    def matrix(self) -> List[Dict[str, Any]]:
        return self.results['checks']

    def to_json(self) -> str:
        return json.dumps({**self.results, 'passed': self.passed}, indent=2, default=str)

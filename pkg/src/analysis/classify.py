"""QuadTorsion Classification Engine
Decides, for a quadratic field K and a torsion group T, whether T appears as the torsion
of an elliptic curve over K, combining computations on the modular curve with ledger facts
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

from loguru import logger

from src.core.errors import FixtureError, InsufficientPrimesError, UsageError
from src.curves.ellcurve import (MAZUR_GROUPS, QUADRATIC_TORSION_GROUPS,
                                 TorsionCertificate, TorsionGroup, torsion_certify)
from src.curves.genus2 import jacobian_torsion_gcd_bound
from src.curves.search import SearchBox
from src.fields.qfield import QuadField, field_discriminant, iter_fields_by_disc
from src.modular.catalog import (ModularCurveRecord, NoncuspidalPoint, is_cusp,
                                 kenku_momose_conditions, kenku_momose_Z18,
                                 noncuspidal_search, record_for_group)
from src.modular.ledger import RATIONAL_FIELD, FactEntry, FactKind, FactLedger, get_ledger

# Full level structure Z/n + Z/n forces mu_n inside K
LEVEL_STRUCTURE_FIELD = {
    TorsionGroup(3, 3): -3,
    TorsionGroup(3, 6): -3,
    TorsionGroup(4, 4): -1,
}
# X1(3,3), X1(3,6) and X1(4,4) are rational curves
LEVEL_STRUCTURE_GENUS = 0


class Verdict(str, Enum):
    APPEARS_INFINITELY = "APPEARS_INFINITELY"
    APPEARS_FINITELY = "APPEARS_FINITELY"
    IMPOSSIBLE = "IMPOSSIBLE"
    UNKNOWN = "UNKNOWN"

    @property
    def appears(self) -> bool:
        return self in (Verdict.APPEARS_INFINITELY, Verdict.APPEARS_FINITELY)


class Signal(str, Enum):
    """What an evidence step contributes to the decision"""

    MAZUR = "MAZUR"
    WEIL_PAIRING = "WEIL_PAIRING"
    EXCLUDED = "EXCLUDED"
    KENKU_MOMOSE = "KENKU_MOMOSE"
    COUNT = "COUNT"
    WITNESS = "WITNESS"
    RANK_POSITIVE = "RANK_POSITIVE"
    RANK_ZERO = "RANK_ZERO"
    INFINITE_IF_APPEARS = "INFINITE_IF_APPEARS"
    CUSPIDAL = "CUSPIDAL"
    TORSION_RATIONAL = "TORSION_RATIONAL"
    INFO = "INFO"


class RankState(str, Enum):
    POSITIVE = "POSITIVE"
    ZERO = "ZERO"
    UNKNOWN = "UNKNOWN"


@dataclass
class EvidenceStep:
    """A computation result or a ledger fact; source is ledger, computed, search or fixture"""

    signal: Signal
    source: str
    detail: str
    fact: Optional[FactEntry] = None
    data: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_fact(cls, signal: Signal, fact: FactEntry) -> "EvidenceStep":
        return cls(signal, "ledger", f"{fact.label()}: {fact.citation}", fact)

    def to_dict(self) -> Dict[str, Any]:
        data = {"signal": self.signal.value, "source": self.source, "detail": self.detail}
        if self.fact is not None:
            data["fact"] = self.fact.to_dict()
        if self.data:
            data["data"] = self.data
        return data


def decide(evidence: List[EvidenceStep], genus: Optional[int]) -> Tuple[Verdict, Optional[int]]:
    """Verdict and count (or lower bound) implied by an evidence list

    genus is that of the modular curve behind the group, or None for groups decided
    without one.
    """
    signals = {step.signal for step in evidence}

    if Signal.MAZUR in signals:
        return Verdict.APPEARS_INFINITELY, None
    if signals & {Signal.WEIL_PAIRING, Signal.EXCLUDED, Signal.KENKU_MOMOSE}:
        return Verdict.IMPOSSIBLE, None
    for step in evidence:
        if step.signal == Signal.COUNT:
            return Verdict.APPEARS_FINITELY, int(step.data["count"])

    witnessed = Signal.WITNESS in signals
    torsion_known = bool(signals & {Signal.CUSPIDAL, Signal.TORSION_RATIONAL})

    if genus is None:
        return (Verdict.APPEARS_FINITELY, 1) if witnessed else (Verdict.UNKNOWN, None)

    if genus == 0:
        # a noncuspidal point on a genus 0 curve over K parametrizes infinitely many
        return (Verdict.APPEARS_INFINITELY, None) if witnessed else (Verdict.UNKNOWN, None)

    if genus == 2:
        # finitely many points on a genus 2 curve
        if witnessed:
            return Verdict.APPEARS_FINITELY, 1
        if Signal.RANK_ZERO in signals and torsion_known:
            return Verdict.IMPOSSIBLE, None
        return Verdict.UNKNOWN, None

    if Signal.RANK_POSITIVE in signals:
        return Verdict.APPEARS_INFINITELY, None
    if witnessed and Signal.INFINITE_IF_APPEARS in signals:
        return Verdict.APPEARS_INFINITELY, None
    if Signal.RANK_ZERO in signals and torsion_known:
        return Verdict.IMPOSSIBLE, None
    if witnessed:
        # rank unknown: report the witnesses as a lower bound
        return Verdict.APPEARS_FINITELY, 1
    return Verdict.UNKNOWN, None


@dataclass
class ClassificationStatus:
    d: int
    group: TorsionGroup
    verdict: Verdict
    count: Optional[int] = None
    evidence: List[EvidenceStep] = field(default_factory=list)
    genus: Optional[int] = None

    @property
    def reason(self) -> Optional[str]:
        if self.verdict != Verdict.IMPOSSIBLE:
            return None
        for step in self.evidence:
            if step.signal in (Signal.WEIL_PAIRING, Signal.EXCLUDED, Signal.KENKU_MOMOSE):
                return step.detail
        return "rank zero and every torsion point is a cusp"

    @property
    def label(self) -> str:
        if self.verdict == Verdict.APPEARS_FINITELY:
            bound = "" if self.has_exact_count else ">="
            return f"APPEARS_FINITELY({bound}{self.count})"
        if self.verdict == Verdict.IMPOSSIBLE:
            tag = self.kenku_momose_tag
            return f"IMPOSSIBLE(Kenku-Momose {tag})" if tag else "IMPOSSIBLE"
        return self.verdict.value

    @property
    def has_exact_count(self) -> bool:
        return any(step.signal == Signal.COUNT for step in self.evidence)

    @property
    def kenku_momose_tag(self) -> Optional[str]:
        for step in self.evidence:
            if step.signal == Signal.KENKU_MOMOSE:
                return step.data["condition"]
        return None

    def notes(self) -> List[FactEntry]:
        return [s.fact for s in self.evidence if s.fact is not None and s.fact.kind == FactKind.NOTE]

    def replay(self, ledger: Optional[FactLedger] = None) -> Tuple[Verdict, Optional[int]]:
        """Re-derive the verdict from the evidence after re-checking every replayable step

        Ledger steps must still be present and applicable; Kenku-Momose and level-structure
        steps are recomputed from K.
        """
        ledger = ledger or get_ledger()
        K = QuadField(self.d)
        kept = []
        for step in self.evidence:
            if step.fact is not None:
                current = ledger.by_id(step.fact.id)
                if not (current.applies_to(current.curve, self.d) or current.d == RATIONAL_FIELD):
                    continue
            elif step.signal == Signal.KENKU_MOMOSE:
                if step.data["condition"] not in [c.value for c in kenku_momose_conditions(K)]:
                    continue
            elif step.signal == Signal.WEIL_PAIRING:
                if LEVEL_STRUCTURE_FIELD.get(self.group) in (None, self.d):
                    continue
            kept.append(step)
        return decide(kept, self.genus)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "field": self.d,
            "group": self.group.to_list(),
            "verdict": self.verdict.value,
            "label": self.label,
            "count": self.count,
            "reason": self.reason,
            "evidence": [s.to_dict() for s in self.evidence],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class RankStatus:
    state: RankState
    fact: Optional[FactEntry] = None
    witness: Optional[NoncuspidalPoint] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "state": self.state.value,
            "fact": self.fact.to_dict() if self.fact else None,
            "witness": self.witness.to_dict() if self.witness else None,
        }


def rank_status(rec: ModularCurveRecord, K: QuadField, ledger: Optional[FactLedger] = None,
                box: Optional[SearchBox] = None) -> RankStatus:
    """Mordell-Weil rank of a genus 1 modular curve over K as far as it is known

    ZERO only ever comes from the ledger; POSITIVE from the ledger or from a point of
    infinite order found by the search.
    """
    if rec.genus != 1:
        raise UsageError(f"rank_status needs a genus 1 curve, got {rec.curve_id}")
    ledger = ledger or get_ledger()

    positive = ledger.first(rec.curve_id, K.d, FactKind.RANK_POSITIVE)
    if positive is not None:
        return RankStatus(RankState.POSITIVE, fact=positive)
    zero = ledger.first(rec.curve_id, K.d, FactKind.RANK_ZERO)
    if zero is not None:
        return RankStatus(RankState.ZERO, fact=zero)
    for point in noncuspidal_search(rec, K, box):
        if point.tag == "NONTORSION":
            return RankStatus(RankState.POSITIVE, witness=point)
    return RankStatus(RankState.UNKNOWN)


class _Evidence:
    """Collects evidence steps for one (curve, field) pair"""

    def __init__(self, rec: ModularCurveRecord, K: QuadField, ledger: FactLedger,
                 box: Optional[SearchBox]):
        self.rec = rec
        self.K = K
        self.ledger = ledger
        self.box = box
        self.steps: List[EvidenceStep] = []

    def fact(self, kind: FactKind, d: Optional[int] = None) -> Optional[FactEntry]:
        return self.ledger.first(self.rec.curve_id, self.K.d if d is None else d, kind)

    def add_fact(self, signal: Signal, fact: FactEntry):
        self.steps.append(EvidenceStep.from_fact(signal, fact))

    def add(self, signal: Signal, source: str, detail: str, **data):
        self.steps.append(EvidenceStep(signal, source, detail, data=data))

    def notes(self):
        for fact in self.ledger.lookup(self.rec.curve_id, self.K.d, FactKind.NOTE):
            self.add_fact(Signal.INFO, fact)

    def witnesses(self):
        for fact in self.ledger.lookup(self.rec.curve_id, self.K.d, FactKind.APPEARS_WITNESS):
            self.add_fact(Signal.WITNESS, fact)
        try:
            from src.analysis.fixtures import verified_witnesses
            fixtures = verified_witnesses().get(self.rec.curve_id, [])
        except FixtureError as e:
            logger.warning(f"Fixture witnesses unavailable: {e}")
            fixtures = []
        for check in fixtures:
            if check.d == self.K.d:
                self.add(Signal.WITNESS, "fixture",
                         f"fixture {check.name} has torsion {check.generated}", fixture=check.name)

    def rational_torsion(self) -> Optional[FactEntry]:
        return self.fact(FactKind.TORSION_GROUP, RATIONAL_FIELD)


def _computed_cuspidal(rec: ModularCurveRecord, certificate: TorsionCertificate) -> bool:
    return certificate.exact and all(is_cusp(rec, P.x) for P in certificate.points)


def _genus1_evidence(ev: _Evidence) -> None:
    rec, K = ev.rec, ev.K
    rank = rank_status(rec, K, ev.ledger, ev.box)
    if rank.state == RankState.POSITIVE:
        if rank.fact is not None:
            ev.add_fact(Signal.RANK_POSITIVE, rank.fact)
        else:
            ev.add(Signal.RANK_POSITIVE, "search",
                   f"point of infinite order {rank.witness.point}", point=rank.witness.to_dict())
            ev.add(Signal.WITNESS, "search", f"noncuspidal point {rank.witness.point}",
                   point=rank.witness.to_dict())
        return
    if rank.state == RankState.ZERO:
        ev.add_fact(Signal.RANK_ZERO, rank.fact)

    background = ev.ledger.background("infinite-if-appears", rec.curve_id, K.d)
    if background is not None:
        ev.add_fact(Signal.INFINITE_IF_APPEARS, background)

    ev.witnesses()
    if rank.state == RankState.UNKNOWN:
        for point in noncuspidal_search(rec, K, ev.box):
            ev.add(Signal.WITNESS, "search", f"noncuspidal {point.tag.lower()} point {point.point}",
                   point=point.to_dict())

    E = rec.curve_over(K)
    certificate = torsion_certify(E, box=ev.box)
    if _computed_cuspidal(rec, certificate):
        ev.add(Signal.CUSPIDAL, "computed",
               f"torsion over {K} is {certificate.lower}, certified by reduction; every point is a cusp",
               certificate=certificate.to_dict())
        return
    ev.add(Signal.INFO, "computed",
           f"torsion over {K} contains {certificate.lower}, upper bound {certificate.upper_order}",
           certificate=certificate.to_dict())

    cuspidal = ev.fact(FactKind.TORSION_CUSPIDAL)
    if cuspidal is not None:
        ev.add_fact(Signal.CUSPIDAL, cuspidal)
        return
    here = ev.fact(FactKind.TORSION_GROUP)
    rational = ev.rational_torsion()
    rational_cuspidal = ev.fact(FactKind.TORSION_CUSPIDAL, RATIONAL_FIELD)
    if here is not None and rational is not None and rational_cuspidal is not None \
            and here.value == rational.value:
        ev.add_fact(Signal.TORSION_RATIONAL, here)
        ev.add_fact(Signal.INFO, rational_cuspidal)


def _genus2_evidence(ev: _Evidence) -> None:
    from src.core.config import get_settings

    rec, K = ev.rec, ev.K
    ev.witnesses()
    for point in noncuspidal_search(rec, K, ev.box):
        ev.add(Signal.WITNESS, "search", f"noncuspidal point {point.point}", point=point.to_dict())

    zero = ev.fact(FactKind.RANK_ZERO)
    if zero is None:
        return
    ev.add_fact(Signal.RANK_ZERO, zero)

    rational = ev.rational_torsion()
    if rational is not None:
        m, n = rational.value
        try:
            bound = jacobian_torsion_gcd_bound(rec.hyper, K, get_settings().primes.jacobian_primes)
        except InsufficientPrimesError as e:
            logger.warning(f"No Jacobian bound for {rec.curve_id} over {K}: {e}")
            bound = None
        if bound == m * n:
            ev.add(Signal.TORSION_RATIONAL, "computed",
                   f"|J(K)_tors| divides {bound} = |J(Q)_tors|, so J(K)_tors = J(Q)_tors", bound=bound)
            ev.add_fact(Signal.INFO, rational)
            return
        if bound is not None:
            ev.add(Signal.INFO, "computed", f"|J(K)_tors| divides {bound}", bound=bound)

    cuspidal = ev.fact(FactKind.TORSION_CUSPIDAL)
    if cuspidal is not None:
        ev.add_fact(Signal.CUSPIDAL, cuspidal)
        return
    here = ev.fact(FactKind.TORSION_GROUP)
    if here is not None and rational is not None and here.value == rational.value:
        ev.add_fact(Signal.TORSION_RATIONAL, here)


def classify(K: QuadField, T: TorsionGroup, ledger: Optional[FactLedger] = None,
             box: Optional[SearchBox] = None) -> ClassificationStatus:
    """Does T occur as E(K)_tors for some elliptic curve E over K?"""
    if T not in QUADRATIC_TORSION_GROUPS:
        raise UsageError(f"{T} is not a torsion group over a quadratic field")
    ledger = ledger or get_ledger()

    if T in MAZUR_GROUPS:
        mazur = ledger.background("mazur")
        steps = [EvidenceStep.from_fact(Signal.MAZUR, mazur)] if mazur else []
        if mazur is None:
            logger.warning("Ledger has no Mazur background fact")
        return _status(K, T, steps, None)

    if T in LEVEL_STRUCTURE_FIELD:
        steps = []
        needed = LEVEL_STRUCTURE_FIELD[T]
        if K.d != needed:
            steps.append(EvidenceStep(Signal.WEIL_PAIRING, "computed",
                                      f"{T} needs the roots of unity of Q(sqrt({needed}))"))
        else:
            curve = f"X1({T.m},{T.n})"
            steps.extend(EvidenceStep.from_fact(Signal.WITNESS, f)
                         for f in ledger.lookup(curve, K.d, FactKind.APPEARS_WITNESS))
        return _status(K, T, steps, LEVEL_STRUCTURE_GENUS)

    rec = record_for_group(T)
    ev = _Evidence(rec, K, ledger, box)

    excluded = ev.fact(FactKind.EXCLUDED)
    if excluded is not None:
        ev.add_fact(Signal.EXCLUDED, excluded)
        return _status(K, T, ev.steps, rec.genus)

    if T == TorsionGroup(1, 18):
        condition = kenku_momose_Z18(K)
        if condition is not None:
            ev.add(Signal.KENKU_MOMOSE, "computed",
                   f"Kenku-Momose condition {condition.value} holds for {K}", condition=condition.value)
            return _status(K, T, ev.steps, rec.genus)

    count = ev.fact(FactKind.APPEARS_COUNT)
    if count is not None:
        ev.steps.append(EvidenceStep(Signal.COUNT, "ledger", f"{count.label()}: {count.citation}",
                                     count, {"count": count.value}))
        ev.notes()
        return _status(K, T, ev.steps, rec.genus)

    if rec.genus == 1:
        _genus1_evidence(ev)
    else:
        _genus2_evidence(ev)
    ev.notes()
    return _status(K, T, ev.steps, rec.genus)


def _status(K: QuadField, T: TorsionGroup, steps: List[EvidenceStep],
            genus: Optional[int]) -> ClassificationStatus:
    verdict, count = decide(steps, genus)
    status = ClassificationStatus(K.d, T, verdict, count, steps, genus)
    if verdict == Verdict.UNKNOWN:
        logger.warning(f"{T} over {K}: UNKNOWN")
    else:
        logger.debug(f"{T} over {K}: {status.label}")
    return status


def classify_many(fields: Iterable[QuadField], T: TorsionGroup,
                  ledger: Optional[FactLedger] = None) -> List[ClassificationStatus]:
    """classify over several fields, ordered by |disc| with positive d first"""
    ordered = sorted(fields, key=lambda K: (abs(field_discriminant(K.d)), K.d < 0, K.d))
    return [classify(K, T, ledger) for K in ordered]


@dataclass
class SmallestFieldResult:
    group: TorsionGroup
    d: Optional[int]
    status: Optional[ClassificationStatus]
    skipped: List[ClassificationStatus] = field(default_factory=list)
    examined: int = 0

    @property
    def exhausted(self) -> bool:
        return self.d is None

    @property
    def conditional(self) -> bool:
        return bool(self.skipped)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group": self.group.to_list(),
            "d": self.d,
            "exhausted": self.exhausted,
            "conditional": self.conditional,
            "conditional_on": [s.d for s in self.skipped],
            "fields_examined": self.examined,
            "status": self.status.to_dict() if self.status else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def smallest_field(T: TorsionGroup, max_abs_disc: Optional[int] = None,
                   ledger: Optional[FactLedger] = None) -> SmallestFieldResult:
    """First field by ascending |disc| over which T appears

    UNKNOWN fields met on the way do not stop the scan but make the answer conditional.
    """
    if record_for_group(T) is None:
        raise UsageError(f"{T} is not one of the cataloged groups")
    if max_abs_disc is None:
        from src.core.config import get_settings
        max_abs_disc = get_settings().primes.max_abs_disc
    ledger = ledger or get_ledger()

    result = SmallestFieldResult(T, None, None)
    for K in iter_fields_by_disc(max_abs_disc):
        result.examined += 1
        status = classify(K, T, ledger)
        if status.verdict.appears:
            result.d, result.status = K.d, status
            note = f" (conditional on d in {[s.d for s in result.skipped]})" if result.skipped else ""
            logger.info(f"Smallest field for {T}: {K}, {status.label}{note}")
            return result
        if status.verdict == Verdict.UNKNOWN:
            result.skipped.append(status)

    logger.warning(f"Smallest field search for {T} exhausted |disc| <= {max_abs_disc}")
    return result

"""Classification engine tests
Verdicts for worked examples, the decision rules, rank status and smallest fields
"""

import pytest

from src.analysis.classify import (ClassificationStatus, EvidenceStep, RankState, Signal,
                                   Verdict, classify, classify_many, decide, rank_status,
                                   smallest_field)
from src.analysis.evaluator import GOLDEN_SMALLEST_FIELDS
from src.core.errors import UsageError
from src.curves.ellcurve import QUADRATIC_TORSION_GROUPS, TorsionGroup
from src.fields.qfield import QuadField, is_squarefree
from src.modular.catalog import catalog, get_record

CATALOG_GROUPS = [rec.classifies for rec in catalog()]


def _step(signal, **data):
    return EvidenceStep(signal, "computed", signal.value, data=data)


class TestDecide:
    """Test the decision rules on synthetic evidence"""

    def test_mazur_first(self):
        assert decide([_step(Signal.MAZUR)], None) == (Verdict.APPEARS_INFINITELY, None)

    def test_obstructions(self):
        for signal in (Signal.WEIL_PAIRING, Signal.EXCLUDED, Signal.KENKU_MOMOSE):
            assert decide([_step(signal), _step(Signal.WITNESS)], 1)[0] == Verdict.IMPOSSIBLE

    def test_count(self):
        assert decide([_step(Signal.COUNT, count=2)], 1) == (Verdict.APPEARS_FINITELY, 2)

    def test_genus_two_never_infinite(self):
        steps = [_step(Signal.RANK_POSITIVE), _step(Signal.WITNESS), _step(Signal.INFINITE_IF_APPEARS)]
        assert decide(steps, 2) == (Verdict.APPEARS_FINITELY, 1)
        assert decide([_step(Signal.RANK_POSITIVE)], 2) == (Verdict.UNKNOWN, None)

    def test_genus_two_impossible(self):
        steps = [_step(Signal.RANK_ZERO), _step(Signal.TORSION_RATIONAL)]
        assert decide(steps, 2) == (Verdict.IMPOSSIBLE, None)
        assert decide([_step(Signal.RANK_ZERO)], 2) == (Verdict.UNKNOWN, None)

    def test_genus_one(self):
        assert decide([_step(Signal.RANK_POSITIVE)], 1)[0] == Verdict.APPEARS_INFINITELY
        assert decide([_step(Signal.WITNESS), _step(Signal.INFINITE_IF_APPEARS)], 1)[0] \
            == Verdict.APPEARS_INFINITELY
        assert decide([_step(Signal.RANK_ZERO), _step(Signal.CUSPIDAL)], 1)[0] == Verdict.IMPOSSIBLE
        assert decide([_step(Signal.WITNESS)], 1) == (Verdict.APPEARS_FINITELY, 1)
        assert decide([_step(Signal.CUSPIDAL)], 1) == (Verdict.UNKNOWN, None)

    def test_genus_zero_witness_is_infinite(self):
        assert decide([_step(Signal.WITNESS)], 0) == (Verdict.APPEARS_INFINITELY, None)
        assert decide([], 0) == (Verdict.UNKNOWN, None)

    def test_four_verdicts(self):
        assert {v.value for v in Verdict} == {
            "APPEARS_INFINITELY", "APPEARS_FINITELY", "IMPOSSIBLE", "UNKNOWN"}

    def test_witness_without_rank_is_a_lower_bound(self):
        steps = [_step(Signal.WITNESS)]
        verdict, count = decide(steps, 1)
        status = ClassificationStatus(-7, TorsionGroup(1, 14), verdict, count, steps, 1)
        assert status.label == "APPEARS_FINITELY(>=1)"


class TestWorkedExamples:
    """Test verdicts decided by the ledger and the splitting conditions"""

    def test_z14_over_minus_seven(self, ledger):
        status = classify(QuadField(-7), TorsionGroup(1, 14), ledger)
        assert status.verdict == Verdict.APPEARS_FINITELY
        assert status.count == 2
        assert status.label == "APPEARS_FINITELY(2)"
        assert any(note.topic == "curves-rank-zero" for note in status.notes())

    def test_z18_over_two(self, ledger):
        status = classify(QuadField(2), TorsionGroup(1, 18), ledger)
        assert status.verdict == Verdict.IMPOSSIBLE
        assert status.label == "IMPOSSIBLE(Kenku-Momose I)"
        assert "Kenku-Momose" in status.reason

    def test_z11_over_minus_seven(self, ledger):
        status = classify(QuadField(-7), TorsionGroup(1, 11), ledger)
        assert status.verdict == Verdict.APPEARS_INFINITELY
        assert status.evidence[0].fact.id == "x11-rank1-m7"

    @pytest.mark.parametrize("d", [5, -15])
    def test_z15_counts(self, ledger, d):
        status = classify(QuadField(d), TorsionGroup(1, 15), ledger)
        assert status.verdict == Verdict.APPEARS_FINITELY
        assert status.count == 1
        assert any(n.topic == "curves-rank-zero" for n in status.notes())

    def test_mazur_groups(self, ledger):
        status = classify(QuadField(13), TorsionGroup(1, 7), ledger)
        assert status.verdict == Verdict.APPEARS_INFINITELY
        assert status.evidence[0].signal == Signal.MAZUR

    def test_level_structure(self, ledger):
        assert classify(QuadField(-1), TorsionGroup(4, 4), ledger).verdict == Verdict.APPEARS_INFINITELY
        assert classify(QuadField(-3), TorsionGroup(3, 6), ledger).verdict == Verdict.APPEARS_INFINITELY
        assert classify(QuadField(-3), TorsionGroup(3, 3), ledger).verdict == Verdict.APPEARS_INFINITELY
        assert classify(QuadField(5), TorsionGroup(4, 4), ledger).verdict == Verdict.IMPOSSIBLE
        assert classify(QuadField(-1), TorsionGroup(3, 3), ledger).verdict == Verdict.IMPOSSIBLE

    @pytest.mark.parametrize("group", CATALOG_GROUPS, ids=str)
    @pytest.mark.parametrize("d", [-1, -3])
    def test_cyclotomic_exclusions(self, ledger, group, d):
        status = classify(QuadField(d), group, ledger)
        assert status.verdict == Verdict.IMPOSSIBLE
        assert status.evidence[0].signal == Signal.EXCLUDED

    def test_not_a_quadratic_torsion_group(self, ledger):
        with pytest.raises(UsageError):
            classify(QuadField(5), TorsionGroup(1, 17), ledger)

    def test_json(self, ledger):
        data = classify(QuadField(-7), TorsionGroup(1, 14), ledger).to_dict()
        assert data["field"] == -7
        assert data["group"] == [1, 14]
        assert data["verdict"] == "APPEARS_FINITELY"
        assert data["reason"] is None

    def test_replay(self, ledger):
        cases = [(-7, TorsionGroup(1, 14)), (2, TorsionGroup(1, 18)), (-7, TorsionGroup(1, 11)),
                 (5, TorsionGroup(4, 4)), (-3, TorsionGroup(1, 13)), (13, TorsionGroup(1, 9))]
        for d, group in cases:
            status = classify(QuadField(d), group, ledger)
            assert status.replay(ledger) == (status.verdict, status.count)

    def test_classify_many_orders_by_discriminant(self, ledger):
        fields = [QuadField(d) for d in (13, -1, 2, -2, 5)]
        statuses = classify_many(fields, TorsionGroup(1, 18), ledger)
        assert [s.d for s in statuses] == [-1, 5, 2, -2, 13]


class TestRankStatus:
    """Test rank lookups on the genus 1 curves"""

    def test_positive_from_ledger(self, ledger):
        status = rank_status(get_record("X1_11"), QuadField(-7), ledger)
        assert status.state == RankState.POSITIVE
        assert status.fact.id == "x11-rank1-m7"

    def test_zero_from_ledger(self, ledger):
        assert rank_status(get_record("X1_2_10"), QuadField(5), ledger).state == RankState.ZERO

    def test_zero_never_computed(self, ledger, small_box):
        status = rank_status(get_record("X1_14"), QuadField(101), ledger, small_box)
        assert status.state != RankState.ZERO

    def test_genus_two_rejected(self, ledger):
        with pytest.raises(UsageError):
            rank_status(get_record("X1_13"), QuadField(5), ledger)


@pytest.mark.slow
class TestScans:
    """Test whole-range behaviour of the engine"""

    def test_trichotomy(self, ledger, small_box):
        """Every verdict lies in the allowed set and genus 2 curves never appear infinitely"""
        for d in range(-100, 101):
            if d in (0, 1) or not is_squarefree(d):
                continue
            K = QuadField(d)
            for rec in catalog():
                status = classify(K, rec.classifies, ledger, small_box)
                assert status.verdict in Verdict
                if rec.genus == 2:
                    assert status.verdict != Verdict.APPEARS_INFINITELY, (d, rec.curve_id)
                if status.verdict == Verdict.APPEARS_FINITELY:
                    assert status.count >= 1

    def test_every_group_classifies(self, ledger, small_box):
        K = QuadField(-7)
        for group in QUADRATIC_TORSION_GROUPS:
            assert classify(K, group, ledger, small_box).verdict in Verdict

    @pytest.mark.parametrize("spec", sorted(GOLDEN_SMALLEST_FIELDS))
    def test_smallest_field(self, ledger, spec):
        result = smallest_field(TorsionGroup.parse(spec), ledger=ledger)
        assert result.d == GOLDEN_SMALLEST_FIELDS[spec]
        if spec == "2x10":
            assert result.to_dict()["conditional_on"] == [2]
        else:
            assert not result.conditional
        if spec == "14":
            assert result.status.label == "APPEARS_FINITELY(2)"

    def test_smallest_field_rejects_mazur(self, ledger):
        with pytest.raises(UsageError):
            smallest_field(TorsionGroup(1, 7), ledger=ledger)

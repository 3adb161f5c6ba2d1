"""Modular curve catalog tests
Record lookup, cusps, the noncuspidal search and the Kenku-Momose conditions
"""

from fractions import Fraction

import pytest

from src.analysis.evaluator import GOLDEN_KENKU_MOMOSE
from src.core.errors import UsageError
from src.curves.ellcurve import TorsionGroup
from src.fields.qfield import QuadField, is_squarefree
from src.modular.catalog import (KenkuMomose, catalog, get_record, is_cusp,
                                 kenku_momose_conditions, kenku_momose_Z18,
                                 noncuspidal_search, record_for_group)


class TestCatalog:
    """Test the eight cataloged curves"""

    def test_contents(self):
        records = catalog()
        assert len(records) == 8
        assert [r.curve_id for r in records if r.genus == 2] == ["X1(13)", "X1(16)", "X1(18)"]

    @pytest.mark.parametrize("selector, curve_id", [
        ("X1_13", "X1(13)"),
        ("X1(2,10)", "X1(2,10)"),
        ("x1_2_12", "X1(2,12)"),
        ("2x12", "X1(2,12)"),
        ("15", "X1(15)"),
    ])
    def test_get_record(self, selector, curve_id):
        assert get_record(selector).curve_id == curve_id

    @pytest.mark.parametrize("selector", ["X1_17", "12", "X1(2,8)", "nonsense"])
    def test_unknown_selectors(self, selector):
        with pytest.raises(UsageError):
            get_record(selector)

    def test_record_for_mazur_group(self):
        assert record_for_group(TorsionGroup(1, 7)) is None

    def test_flags(self):
        assert get_record("X1_11").corrected
        assert "printed-factor-suspect" in get_record("X1_15").flags
        assert get_record("X1_11").printed_equation == "y^2 - y = x^3 - x"
        assert get_record("X1_11").equation == "y^2 - y = x^3 - x^2"

    def test_genus_guards(self):
        with pytest.raises(UsageError):
            get_record("X1_13").curve_over(None)
        with pytest.raises(UsageError):
            get_record("X1_11").hyper

    def test_cusp_poly(self):
        assert get_record("X1_16").cusp_poly[0] == 1
        assert len(get_record("X1_16").cusp_poly) == 8


class TestCusps:
    """Test the cusp predicate against the models"""

    def test_is_cusp(self):
        rec = get_record("X1_11")
        assert is_cusp(rec, Fraction(0))
        assert is_cusp(rec, Fraction(1))
        assert not is_cusp(rec, Fraction(2))
        assert is_cusp(rec, None)

    def test_quadratic_cusp(self):
        rec = get_record("X1_2_10")
        K = QuadField(5)
        assert is_cusp(rec, K.element(Fraction(-1, 2), Fraction(1, 2)))
        assert is_cusp(rec, K.element(2, 1))

    def test_rational_cusps_lie_on_the_models(self):
        for rec in catalog():
            if rec.genus != 1:
                continue
            E = rec.curve_over(None)
            for root in rec.rational_cusp_roots():
                points = E.points_with_x(root)
                if rec.key == "X1_2_12" and root == Fraction(1, 2):
                    assert points == []
                else:
                    assert points, (rec.curve_id, root)

    def test_half_cusp_over_six(self):
        E = get_record("X1_2_12").curve_over(QuadField(6))
        points = E.points_with_x(Fraction(1, 2))
        assert len(points) == 2
        assert all(not P.y.is_rational() for P in points)

    def test_no_noncuspidal_points_over_q(self, small_box):
        assert noncuspidal_search(get_record("X1_11"), None, small_box) == []


class TestKenkuMomose:
    """Test the splitting conditions excluding Z/18"""

    @pytest.mark.parametrize("d", sorted(GOLDEN_KENKU_MOMOSE))
    def test_literal_table(self, d):
        condition = kenku_momose_Z18(QuadField(d))
        assert (condition.value if condition else None) == GOLDEN_KENKU_MOMOSE[d]

    def test_all_conditions(self):
        assert kenku_momose_conditions(QuadField(5)) == [KenkuMomose.I, KenkuMomose.III]
        assert kenku_momose_conditions(QuadField(21)) == [KenkuMomose.III]
        assert kenku_momose_conditions(QuadField(33)) == []

    def test_i_and_ii_disjoint(self):
        for d in range(-1000, 1001):
            if d in (0, 1) or not is_squarefree(d):
                continue
            held = kenku_momose_conditions(QuadField(d))
            assert not (KenkuMomose.I in held and KenkuMomose.II in held), d

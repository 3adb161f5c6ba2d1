"""Fixture verification tests
Each shipped curve carries its claimed torsion; the misprinted radical resolves to one reading
"""

import json

import pytest

from src.analysis.fixtures import (check_fixture, load_fixtures, resolve_radical,
                                   verify_fixtures)
from src.core.errors import FixtureError
from src.curves.ellcurve import EllPoint, TorsionGroup, point_order, scalar_multiply


@pytest.fixture(scope="module")
def report():
    return verify_fixtures()


@pytest.fixture(scope="module")
def records():
    return {r.name: r for r in load_fixtures()}


class TestShippedFixtures:
    """Test every shipped curve against its claimed group"""

    def test_all_loaded(self, records):
        assert len(records) == 11
        assert {r.curve for r in records.values()} == {
            "X1(11)", "X1(13)", "X1(14)", "X1(15)", "X1(16)", "X1(18)", "X1(2,10)", "X1(2,12)"}

    def test_all_pass(self, report):
        failed = [c.name for c in report.checks if not c.passed]
        assert failed == []
        assert report.passed

    @pytest.mark.parametrize("name, order", [
        ("z11@-7", 11), ("z13@17", 13), ("z14@-7", 14), ("z15@5", 15),
        ("z16@-15", 16), ("z18@33", 18), ("z14@-7-b", 14), ("z14@-7-c", 14),
        ("z15@-15", 15),
    ])
    def test_cyclic_generator_orders(self, report, name, order):
        assert report.by_name(name).orders == [order]

    def test_two_generator_groups(self, report):
        assert report.by_name("z2z10@-2").generated == TorsionGroup(2, 10)
        assert report.by_name("z2z12@13").generated == TorsionGroup(2, 12)
        assert report.by_name("z2z10@-2").orders[0] == 2

    def test_radical_resolves_to_seventeen(self, records):
        resolution = resolve_radical(records["z13@17"])
        assert resolution.printed == -7
        assert resolution.candidates == {-7: False, 17: True}
        assert resolution.chosen == 17

    @pytest.mark.parametrize("name", ["z14@-7", "z14@-7-b", "z14@-7-c", "z15@-15"])
    def test_upper_bound_matches(self, records, name):
        """Rank-zero witnesses: the reduction bound is a multiple of the claimed order"""
        check = check_fixture(records[name], bound=True)
        assert check.passed
        assert check.torsion_upper % check.claimed.order == 0

    def test_frame(self, report):
        frame = report.frame()
        assert len(frame) == 11
        assert set(frame["result"]) == {"PASS"}

    def test_unknown_name(self, report):
        with pytest.raises(FixtureError):
            report.by_name("z99@0")


class TestCorrectedGenerator:
    """Test the Z/15 curve over Q(sqrt(-15)) whose printed generator is off the curve"""

    @pytest.fixture
    def record(self, records):
        return records["z15@-15"]

    def test_printed_point_off_curve(self, record):
        E = record.build_curve()
        K = record.field
        printed = record.build_printed_points()[0]
        assert not E.contains(printed)
        for sx in (1, -1):
            for sy in (1, -1):
                x = K.element(sx * printed.x.a, printed.x.b)
                y = K.element(sy * printed.y.a, printed.y.b)
                assert not E.contains(EllPoint(x, y))

    def test_stored_point_is_seven_times_origin(self, record):
        E = record.build_curve()
        K = record.field
        origin = EllPoint(K.zero, K.zero)
        stored = record.build_points()[0]
        assert E.contains(stored)
        assert point_order(E, origin) == 15
        assert point_order(E, stored) == 15
        assert scalar_multiply(E, 7, origin) == stored

    def test_report_flags_printed_point(self, report):
        check = report.by_name("z15@-15")
        assert check.passed
        assert check.printed_on_curve is False
        assert check.to_dict()["printed_on_curve"] is False
        assert report.by_name("z16@-15").printed_on_curve is None


class TestFixtureFiles:
    """Test loading of hand-made fixture files"""

    def test_missing(self, tmp_path):
        with pytest.raises(FixtureError):
            load_fixtures(tmp_path / "none.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        with pytest.raises(FixtureError):
            load_fixtures(path)

    def test_bad_claimed_group(self, tmp_path, records):
        data = records["z16@-15"].model_dump()
        data["claimed_group"] = [2, 3]
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps(data))
        with pytest.raises(FixtureError):
            load_fixtures(path)

    def test_single_record_file(self, tmp_path, records):
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps(records["z16@-15"].model_dump()))
        assert [r.name for r in load_fixtures(path)] == ["z16@-15"]

    def test_point_off_curve(self, records):
        data = records["z16@-15"].model_dump()
        data["points"][0]["x"]["a"] = "4"
        record = type(records["z16@-15"]).model_validate(data)
        check = check_fixture(record)
        assert not check.passed
        assert check.error == "point not on curve"

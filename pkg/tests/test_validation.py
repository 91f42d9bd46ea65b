import barenblatt_euler.barenblatt as barenblatt
from barenblatt_euler.validation import CRITERIA, check_barenblatt, validate_suite


def test_corrupted_shape_constant_is_caught(monkeypatch):
    original = barenblatt.shape_constant
    monkeypatch.setattr(barenblatt, "shape_constant", lambda gas, d: 1.1 * original(gas, d))
    ok, detail = check_barenblatt()
    assert not ok, detail


def test_quick_subset_excludes_long_runs():
    quick = {c.number for c in CRITERIA if c.quick}
    assert quick == {1, 2, 3, 4, 5, 6, 10}


def test_suite_reports_failures(monkeypatch):
    import barenblatt_euler.validation as v

    broken = v.Criterion(99, "always fails", lambda: (False, "broken on purpose"), True)
    monkeypatch.setattr(v, "CRITERIA", (broken,))
    ok, results = v.validate_suite(quick=True)
    assert not ok and results[0].detail == "broken on purpose"
    crash = v.Criterion(98, "crashes", lambda: 1 / 0, True)
    monkeypatch.setattr(v, "CRITERIA", (crash,))
    ok, results = v.validate_suite()
    assert not ok and "ZeroDivisionError" in results[0].detail

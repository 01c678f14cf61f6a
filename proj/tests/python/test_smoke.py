import math

import numpy as np
import pytest

import mmsgeo


def test_grid_mass_and_weights():
    sp = mmsgeo.grid_box(2, 4, [(0.0, 1.0)])
    assert len(sp) == 16
    assert np.allclose(sp.weights, 1.0 / 16.0)
    assert sp.total_mass == pytest.approx(1.0, abs=1e-12)


def test_three_point_strict_semigroup():
    sp = mmsgeo.explicit_space([[0, 2, 3], [2, 0, 1], [3, 1, 0]])
    chi = mmsgeo.field_from_values(sp, [1.0, 0.0, 0.0])
    t4 = mmsgeo.sup_semigroup(sp, chi, 4.0)
    t2 = mmsgeo.field_from_values(sp, mmsgeo.sup_semigroup(sp, chi, 2.0))
    t2t2 = mmsgeo.sup_semigroup(sp, t2, 2.0)
    assert t4[2] == 1.0 and t2t2[2] == 0.0


def test_disk_perimeter_and_content():
    sp = mmsgeo.grid_box(2, 128, [(-2.0, 2.0)])
    xy = sp.coordinates
    disk = mmsgeo.set_from_mask(sp, (xy ** 2).sum(axis=1) <= 1.0)
    per = mmsgeo.perimeter(sp, disk)
    low = mmsgeo.content(sp, disk, "lower")
    assert per["value"] == pytest.approx(2 * math.pi, rel=0.06)
    assert low["extrapolated"] == pytest.approx(2 * math.pi, rel=0.06)


def test_point_gauge_measure():
    sp = mmsgeo.grid_box(1, 1001, [(0.0, 1.0)])
    pt = mmsgeo.set_from_indices(sp, [500])
    assert mmsgeo.hausdorff(sp, pt)["value"] == pytest.approx(1.0, rel=0.05)


def test_interval_cheeger():
    sp = mmsgeo.space_from_spec("interval")
    rep = mmsgeo.cheeger(sp)
    assert rep["passed"]


def test_verify_and_config():
    assert mmsgeo.verify("three_point", "quick")["passed"]
    rep = mmsgeo.run_config("task: eq13-gap\nspace: {kind: fat_cantor, n: 4001, depth: 6, k_mass: 0.5}\n")
    assert rep["passed"]
    assert "strict-semigroup" in mmsgeo.suites()


def test_config_errors_are_line_anchored():
    with pytest.raises(mmsgeo.Error, match=r"<inline>:3:\d+: unknown key 'bogus'"):
        mmsgeo.run_config("task: perimeter\nspace: {kind: grid}\nbogus: 1\n")


def test_binding_mismatch():
    a = mmsgeo.grid_box(1, 10, [(0.0, 1.0)])
    with pytest.raises(mmsgeo.Error):
        mmsgeo.set_from_mask(a, np.ones(11, dtype=bool))

import math

import numpy as np
import pytest

from liplearn import MoonSpec, gen_moons, load_csv, load_keel, moon_point, save_csv


def test_moon_point_formula():
    # class 0 at t=0 sits at (1, 0); at t=pi/2 at (0, 1)
    assert moon_point(0, 0.0) == pytest.approx((1.0, 0.0))
    assert moon_point(0, math.pi / 2) == pytest.approx((0.0, 1.0))
    # odd classes flip the arc downward and shift right by the class id
    assert moon_point(1, math.pi / 2) == pytest.approx((1.0, -0.5))
    assert moon_point(1, 0.0) == pytest.approx((2.0, 0.5))
    assert moon_point(2, math.pi) == pytest.approx((1.0, 0.0))


def test_gen_moons_noise_free_on_arc():
    ds = gen_moons(MoonSpec(classes=2, points_per_class=200, noise=0.0, seed=1))
    for j in (0, 1):
        pts = ds.points[ds.labels == j]
        x = pts[:, 0] - j
        y = pts[:, 1] if j % 2 == 0 else 0.5 - pts[:, 1]
        r = np.hypot(x, y)
        assert np.abs(r - 1.0).max() < 1e-12
        assert (y >= -1e-12).all()


def test_gen_moons_shapes_and_interleave():
    ds = gen_moons(MoonSpec(classes=3, points_per_class=50, noise=0.05, seed=2))
    assert ds.n == 150
    assert ds.k == 3
    assert np.array_equal(ds.labels[:6], [0, 1, 2, 0, 1, 2])
    for j in range(3):
        assert (ds.labels == j).sum() == 50


def test_gen_moons_seeded():
    a = gen_moons(MoonSpec(seed=5, points_per_class=20))
    b = gen_moons(MoonSpec(seed=5, points_per_class=20))
    c = gen_moons(MoonSpec(seed=6, points_per_class=20))
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)


def test_moon_spec_validation():
    with pytest.raises(ValueError):
        MoonSpec(classes=1)
    with pytest.raises(ValueError):
        MoonSpec(points_per_class=0)
    with pytest.raises(ValueError):
        MoonSpec(noise=-0.1)


# -------------------------------------------------------------------- csv

def test_csv_round_trip(tmp_path):
    ds = gen_moons(MoonSpec(points_per_class=30, seed=4))
    p = tmp_path / "m.csv"
    save_csv(ds, p)
    back = load_csv(p)
    assert np.array_equal(back.points, ds.points)
    assert np.array_equal(back.labels, ds.labels)
    assert back.k == ds.k


def test_csv_no_label_column(tmp_path):
    p = tmp_path / "plain.csv"
    p.write_text("1.0,2.0\n3.0,4.0\n")
    ds = load_csv(p, has_label_column=False)
    assert ds.labels is None
    assert ds.points.shape == (2, 2)


def test_csv_skips_comments_and_blanks(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("# header\n\n0.5,1.5,0\n2.5,3.5,1\n")
    ds = load_csv(p)
    assert ds.n == 2
    assert np.array_equal(ds.labels, [0, 1])


def test_csv_label_remap_first_appearance(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("0,0,7\n1,1,3\n2,2,7\n")
    ds = load_csv(p)
    # 7 appears first -> 0, then 3 -> 1
    assert np.array_equal(ds.labels, [0, 1, 0])
    assert ds.label_map == {7: 0, 3: 1}


def test_csv_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1.0,2.0,0\n1.0,2.0\n")
    with pytest.raises(ValueError, match="line 2"):
        load_csv(p)
    p.write_text("1.0,abc,0\n")
    with pytest.raises(ValueError, match="line 1"):
        load_csv(p)
    p.write_text("1.0,2.0,0.5\n1.0,2.0,1\n")
    with pytest.raises(ValueError, match="line 1"):
        load_csv(p)


def test_csv_single_class_rejected(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("1,2,0\n3,4,0\n")
    with pytest.raises(ValueError, match="single class"):
        load_csv(p)


def test_csv_empty_rejected(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("# nothing\n")
    with pytest.raises(ValueError):
        load_csv(p)


# ------------------------------------------------------------------- keel

KEEL_SAMPLE = """@relation test
@attribute A1 real [0.0, 1.0]
@attribute Class {positive, negative}
@inputs A1
@outputs Class
@data
0.1, 0.2, negative
0.3, 0.4, Positive
0.5, 0.6, negative
0.7, 0.8, negative
"""


def test_keel_basic(tmp_path):
    p = tmp_path / "t.dat"
    p.write_text(KEEL_SAMPLE)
    ds, info = load_keel(p)
    assert ds.n == 4
    assert ds.points.shape == (4, 2)
    # positive/negative vocabulary maps negative->0, positive->1,
    # case-insensitively
    assert np.array_equal(ds.labels, [0, 1, 0, 0])
    assert info.n == 4
    assert info.minority_class == 1
    assert info.minority_count == 1
    assert info.majority_count == 3
    assert info.imbalance_ratio == pytest.approx(3.0)
    assert info.minority_fraction == pytest.approx(0.25)


def test_keel_other_vocab_first_appearance(tmp_path):
    p = tmp_path / "v.dat"
    p.write_text("@data\n1,b\n2,a\n3,b\n")
    ds, info = load_keel(p)
    assert np.array_equal(ds.labels, [0, 1, 0])


def test_keel_errors(tmp_path):
    p = tmp_path / "e.dat"
    p.write_text("1,2,negative\n")
    with pytest.raises(ValueError, match="@data"):
        load_keel(p)
    p.write_text("@data\n1,negative\n")
    with pytest.raises(ValueError, match="single class"):
        load_keel(p)
    p.write_text("@data\n1,2,negative\n1,positive\n")
    with pytest.raises(ValueError, match="line 3"):
        load_keel(p)
    p.write_text("@data\nx,negative\n2,positive\n")
    with pytest.raises(ValueError, match="line 2"):
        load_keel(p)

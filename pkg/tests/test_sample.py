import json

import pytest

from freeboundary.mobius import MetricError, is_mobius
from freeboundary.sample import (
    SampleError,
    build_sample,
    close_sample,
    element_map,
    load_map,
    load_space,
    map_to_json,
    random_points,
    sample_space,
    space_to_json,
    write_sample,
)
from freeboundary.words import Word, act


def test_random_points_are_distinct(F2, rng):
    pts = random_points(F2, 40, rng)
    assert len(set(pts)) == 40


def test_closure_adds_images(F2, rng):
    g = F2.parse("a1.A2")
    base = random_points(F2, 10, rng)
    pts = close_sample(base, [g])
    assert pts[:10] == base
    assert all(act(g, xi) in pts for xi in base)
    m = element_map(pts, g)
    assert len(m.domain) >= 10
    assert close_sample(base, []) == base


def test_strict_closure_names_the_escaping_point(F2):
    xi = F2.parse_point("|(a2)^inf")
    with pytest.raises(SampleError, match=r"a1 sends \|\(a2\)\^inf to a1\|\(a2\)\^inf"):
        close_sample([xi], [F2.parse("a1")], strict=True)


def test_fixed_points_form_the_only_invariant_samples(F2, rng):
    g = F2.parse("a1.a2")
    fixed = [F2.parse_point("|(a1.a2)^inf"), F2.parse_point("|(A2.A1)^inf")]
    assert close_sample(fixed, [g], strict=True) == fixed
    # any further point has an infinite orbit
    for _ in range(10):
        extra = random_points(F2, 1, rng)[0]
        if extra in fixed:
            continue
        with pytest.raises(SampleError):
            close_sample(fixed + [extra], [g], strict=True)
        with pytest.raises(SampleError):
            close_sample(fixed + [extra], [g], depth=200, cap=100)


def test_cap(F2, rng):
    base = random_points(F2, 20, rng)
    with pytest.raises(SampleError, match="exceeds 30"):
        close_sample(base, [F2.parse("a1"), F2.parse("a2")], cap=30)


def test_distances_are_powers_of_q(F3, rng):
    pts = random_points(F3, 15, rng)
    s = sample_space(F3, pts).validate()
    for i, row in enumerate(s.dist):
        for j, d in enumerate(row):
            if i != j:
                k = d.denominator
                while k % 5 == 0:
                    k //= 5
                assert d.numerator == 1 and k == 1


def test_element_maps_are_mobius(F2, rng):
    g = F2.random_word(5, rng)
    pts, space, (m,) = build_sample(F2, 20, [g], rng)
    assert is_mobius(space, m, 0).holds
    assert element_map(pts, Word()).is_permutation


def test_json_round_trip(F2, rng, tmp_path):
    g = F2.parse("a2.a1")
    pts, space, (m,) = build_sample(F2, 8, [g], rng)
    paths = write_sample(tmp_path, space, [(str(g), m)])
    assert [p.name for p in paths] == ["space.json", "map_0.json"]
    back = load_space(paths[0])
    assert back.exact and back.points == space.points and back.dist == space.dist
    assert load_map(paths[1], len(pts)) == m
    assert json.loads(map_to_json(m, "x"))["element"] == "x"
    assert json.loads(space_to_json(space))["dist"][0][0] == "0/1"


def test_float_json_and_csv(tmp_path):
    (tmp_path / "s.json").write_text(json.dumps({"points": ["a", "b", "c"], "dist": [[0, 1, 1], [1, 0, 0.5], [1, 0.5, 0]]}))
    s = load_space(tmp_path / "s.json")
    assert not s.exact and s.dist[1][2] == 0.5
    (tmp_path / "s.csv").write_text("a,b,c\n0,1,1\n1,0,0.5\n1,0.5,0\n")
    c = load_space(tmp_path / "s.csv")
    assert c.points == ["a", "b", "c"] and c.dist == s.dist


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SampleError):
        load_space(bad)
    bad.write_text(json.dumps({"points": ["a", "b"], "dist": [[0, "1"], ["1", 0]]}))
    with pytest.raises(SampleError, match="a/b"):
        load_space(bad)
    bad.write_text(json.dumps({"points": ["a", "b", "c"], "dist": [[0, "1/1", "3/1"], ["1/1", 0, "1/1"], ["3/1", "1/1", 0]]}))
    with pytest.raises(MetricError, match="triangle inequality fails"):
        load_space(bad)
    bad.write_text(json.dumps({"points": ["a", "b"], "dist": [[0, "1/1"], [0.5, 0]]}))
    with pytest.raises(SampleError, match="mixed"):
        load_space(bad)
    mp = tmp_path / "m.json"
    mp.write_text(json.dumps([0, 1]))
    with pytest.raises(SampleError, match="3 images"):
        load_map(mp, 3)
    mp.write_text(json.dumps({"map": [1, 1, None]}))
    with pytest.raises(MetricError):
        load_map(mp, 3)
    mp.write_text(json.dumps({"map": [1, 0, None]}))
    assert load_map(mp, 3).domain == [0, 1]

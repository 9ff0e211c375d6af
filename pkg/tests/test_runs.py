"""Run-list algebra against brute-force set semantics."""

import random

from sidonlab import runs as rn


def points(runs):
    return set(rn.iter_points(runs))


def random_runs(rng, span=60, max_runs=5):
    pairs = []
    for _ in range(rng.randrange(max_runs + 1)):
        a = rng.randrange(-span, span)
        b = a + rng.randrange(1, 12)
        pairs.append((a, b))
    return rn.normalize(pairs)


def test_normalize_sorts_merges_and_drops_empty():
    assert rn.normalize([(5, 7), (1, 3)]) == ((1, 3), (5, 7))
    assert rn.normalize([(1, 3), (3, 5)]) == ((1, 5),)
    assert rn.normalize([(1, 4), (2, 6)]) == ((1, 6),)
    assert rn.normalize([(2, 2), (4, 3)]) == ()
    assert rn.normalize([]) == ()


def test_is_normal():
    assert rn.is_normal(((1, 3), (5, 7)))
    assert not rn.is_normal(((3, 1),))
    assert not rn.is_normal(((1, 3), (3, 5)))
    assert not rn.is_normal(((5, 7), (1, 3)))


def test_count_and_bounds():
    xs = ((1, 3), (10, 14))
    assert rn.count(xs) == 6
    assert rn.bounds(xs) == (1, 14)


def test_shift():
    assert rn.shift(((1, 3), (5, 7)), 10) == ((11, 13), (15, 17))
    assert rn.shift((), 3) == ()


def test_slice_overlapping():
    xs = ((0, 5), (8, 12), (20, 25))
    assert rn.slice_overlapping(xs, 4, 9) == ((0, 5), (8, 12))
    assert rn.slice_overlapping(xs, 5, 8) == ()
    assert rn.slice_overlapping(xs, 21, 22) == ((20, 25),)


def test_set_algebra_matches_brute_force():
    rng = random.Random(20240811)
    for _ in range(300):
        xs = random_runs(rng)
        ys = random_runs(rng)
        px, py = points(xs), points(ys)
        assert points(rn.intersect(xs, ys)) == px & py
        assert points(rn.union(xs, ys)) == px | py
        assert rn.is_normal(rn.intersect(xs, ys))
        assert rn.is_normal(rn.union(xs, ys))
        assert rn.count(xs) == len(px)
        d = rng.randrange(-40, 40)
        assert points(rn.shift(xs, d)) == {x + d for x in px}
        assert rn.is_subset(xs, ys) == (px <= py)
        for x in range(-70, 70, 7):
            assert rn.contains(xs, x) == (x in px)


def test_subset_reflexive_and_empty():
    xs = ((1, 3), (5, 9))
    assert rn.is_subset(xs, xs)
    assert rn.is_subset((), xs)
    assert not rn.is_subset(xs, ())

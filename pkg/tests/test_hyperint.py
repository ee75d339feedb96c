import random

import pytest
from hypothesis import given, strategies as st

from honestdeg.hyperint import (
    BOUND, HyperInt, NotExact, add_exact, add_saturating, compare, exp2, max_h, min_h,
    mul_small, parse, pow_small, tower,
)
from oracles import full_value

MAX_BITS = 1 << 20


def corpus(size=200, seed=7):
    rng = random.Random(seed)
    vals = {HyperInt.exact(v) for v in (0, 1, 2, 3, 63, 64, 65, 255, 256, BOUND - 1)}
    vals |= {HyperInt.tower(1, x) for x in (64, 65, 100, 128, 1000, 4096, MAX_BITS)}
    vals.add(HyperInt.exact(BOUND + 1))
    while len(vals) < size:
        kind = rng.random()
        if kind < 0.4:
            vals.add(HyperInt.exact(rng.randrange(1 << rng.randrange(1, 64))))
        elif kind < 0.6:
            vals.add(HyperInt.exact(rng.randrange(BOUND, 1 << 200)))
        elif kind < 0.9:
            vals.add(HyperInt.tower(1, rng.randrange(64, MAX_BITS)))
        else:
            vals.add(tower(rng.randrange(0, 4), rng.randrange(0, 5)))
    return sorted(vals, key=full_value)


CORPUS = corpus()


def test_corpus_shape():
    assert len(CORPUS) == 200
    assert any(not h.is_exact for h in CORPUS)
    assert all(full_value(h).bit_length() <= MAX_BITS + 1 for h in CORPUS)


def test_compare_matches_full_evaluation():
    full = [full_value(h) for h in CORPUS]
    for a, fa in zip(CORPUS, full):
        for b, fb in zip(CORPUS, full):
            assert compare(a, b) == (fa > fb) - (fa < fb)


def test_equality_is_numeric():
    full = [full_value(h) for h in CORPUS]
    assert len(set(full)) == len(CORPUS)


@pytest.mark.parametrize("h", CORPUS[::7])
def test_exp2_and_tower_identities(h):
    assert tower(0, h) == h
    assert exp2(h) == tower(1, h)
    assert tower(2, h) == exp2(exp2(h))
    assert compare(exp2(h), h) > 0
    if full_value(h) <= 1 << 16:
        assert full_value(exp2(h)) == 2 ** full_value(h)


def test_exp2_strictly_monotone_sample():
    rng = random.Random(3)
    for _ in range(10_000):
        a, b = rng.choice(CORPUS), rng.choice(CORPUS)
        assert compare(exp2(a), exp2(b)) == compare(a, b)


def test_tower_step():
    for k in range(7):
        for m in (0, 1, 2, 5, 64, 1000, 1 << 16):
            assert tower(k + 1, m) == exp2(tower(k, m))


def test_round_trip_text():
    for h in CORPUS:
        assert parse(str(h)) == h


def test_canonical_form():
    assert HyperInt.exact(1 << 64) == HyperInt.tower(1, 64)
    assert HyperInt.tower(1, 10) == HyperInt.exact(1024)
    assert HyperInt.tower(3, 3) == HyperInt.tower(1, 256)
    assert str(HyperInt.exact(1 << 64)) == "T:1:64"


def test_examples():
    assert max_h(HyperInt.exact(10), HyperInt.tower(3, 3)) == HyperInt.tower(3, 3)
    assert min_h(0, 0) == HyperInt.exact(0)
    assert add_exact(2, 3) == HyperInt.exact(5)


def test_add_exact_rejects_towers():
    with pytest.raises(NotExact):
        add_exact(HyperInt.tower(1, 100), 1)
    with pytest.raises(NotExact):
        HyperInt.tower(2, 100).to_int()


def test_saturation_is_flagged_and_harmless():
    t = HyperInt.tower(2, 100)
    s = mul_small(t, 3)
    assert s.saturated and s == t
    assert add_saturating(t, 5).saturated
    assert mul_small(HyperInt.tower(1, 100), 4) == HyperInt.tower(1, 102)
    assert pow_small(HyperInt.tower(1, 100), 4) == HyperInt.tower(1, 400)
    # saturation never flips an order against anything in the corpus
    for h in CORPUS:
        assert compare(s, h) == compare(t, h)


def test_parse_rejects_garbage():
    for bad in ("", "E:", "T:1", "X:3", "E:-1", "T:a:b"):
        with pytest.raises(ValueError):
            parse(bad)


@given(st.integers(min_value=0, max_value=1 << 80), st.integers(min_value=0, max_value=1 << 80))
def test_exact_compare_property(a, b):
    assert compare(a, b) == (a > b) - (a < b)


@given(st.integers(0, 3), st.integers(0, 5), st.integers(0, 3), st.integers(0, 5))
def test_small_tower_compare_property(k1, x1, k2, x2):
    a, b = tower(k1, x1), tower(k2, x2)
    if all(h.is_exact or (h.height == 1 and h.top < 1 << 17) for h in (a, b)):
        fa, fb = full_value(a), full_value(b)
        assert compare(a, b) == (fa > fb) - (fa < fb)
    assert compare(tower(k1 + 1, x1), tower(k1, x1)) > 0

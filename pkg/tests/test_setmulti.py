import itertools

import numpy as np
import pytest

from markovcats.finstoch import FinSet, finset
from markovcats.kernel import Obj, check_comonoid_laws, is_deterministic, marginalize
from markovcats.setmulti import (
    SETMULTI,
    InvalidMap,
    from_json,
    marginal_image,
    nonextension_witness,
    random_multimap,
    state,
)
from markovcats._relational import bits

from oracles import relational_compose

X = finset("0", "1")
Y = finset("p", "q", "r")


def test_empty_image_rejected():
    with pytest.raises(InvalidMap):
        SETMULTI.from_sets(X, Y, {"0": ["p"], "1": []})


def test_json_round_trip():
    data = {"dom": ["0", "1"], "cod": ["p", "q", "r"], "image": {"0": ["p"], "1": ["q", "r"]}}
    m = from_json(data)
    assert m.image("1") == {"q", "r"}
    assert from_json(m.to_json()) == m


def test_composition_is_union_of_images():
    rng = np.random.default_rng(2)
    for _ in range(50):
        f, g = random_multimap(X, Y, rng), random_multimap(Y, X, rng)
        got = SETMULTI.compose(f, g)
        want = relational_compose([set(bits(m)) for m in f.images], [set(bits(m)) for m in g.images])
        assert [set(bits(m)) for m in got.images] == want


def test_deterministic_iff_singleton_valued():
    rng = np.random.default_rng(4)
    for _ in range(100):
        f = random_multimap(X, Y, rng)
        assert is_deterministic(f) == f.is_singleton_valued()


def test_comonoid():
    assert check_comonoid_laws(SETMULTI, X).passed
    assert check_comonoid_laws(SETMULTI, X @ Y).passed


def test_marginal_image_matches_projection_enumeration():
    Z = Obj(tuple(FinSet(("0", "1")) for _ in range(3)))
    S = {("0", "1", "1"), ("1", "0", "1"), ("1", "1", "0")}
    for r in range(4):
        for keep in itertools.combinations(range(3), r):
            want = {tuple(s[k] for k in keep) for s in S}
            assert marginal_image(S, Z, keep) == want
            got = marginalize(state(Z, S), keep)
            assert len(bits(got.images[0])) == len(want)


@pytest.mark.parametrize("N", range(1, 9))
def test_nonextension_witness(N):
    A, B, report = nonextension_witness(N)
    assert report.passed and A != B
    assert len(A) == len(B) == 2 ** N - 1


def test_witness_rejects_nonpositive():
    with pytest.raises(ValueError):
        nonextension_witness(0)

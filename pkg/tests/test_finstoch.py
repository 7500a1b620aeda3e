from fractions import Fraction

import numpy as np
import pytest

from markovcats.finstoch import (
    FINSTOCH,
    FinSet,
    InvalidKernel,
    StochMatrix,
    finset,
    from_json,
    points,
    random_distribution,
    random_kernel,
)
from markovcats.kernel import Obj, TypeMismatch, check_comonoid_laws, is_deterministic

from oracles import chapman_kolmogorov, kron

X = finset("a", "b")
Y = finset("x", "y", "z")


def test_empty_carrier_rejected():
    with pytest.raises(ValueError):
        FinSet(())


def test_duplicate_labels_rejected():
    with pytest.raises(ValueError):
        FinSet(("a", "a"))


def test_loader_validates_row_sums():
    with pytest.raises(InvalidKernel):
        from_json({"dom": ["a"], "cod": ["x", "y"], "rows": [["1/2", "1/3"]]})
    with pytest.raises(InvalidKernel):
        from_json({"dom": ["a"], "cod": ["x", "y"], "rows": [["3/2", "-1/2"]]})
    with pytest.raises(InvalidKernel):
        from_json({"dom": ["a", "b"], "cod": ["x"], "rows": [["1"]]})


def test_json_round_trip():
    f = FINSTOCH.kernel(X, Y, [["1/2", "1/4", "1/4"], [0, 0, 1]])
    data = f.to_json()
    assert data == {"dom": ["a", "b"], "cod": ["x", "y", "z"], "rows": [["1/2", "1/4", "1/4"], ["0", "0", "1"]]}
    assert from_json(data) == f


def test_composition_oracle_on_random_kernels():
    rng = np.random.default_rng(3)
    for _ in range(50):
        f = random_kernel(X, Y, rng, int(rng.integers(1, 9)))
        g = random_kernel(Y, X, rng, int(rng.integers(1, 9)))
        assert FINSTOCH.compose(f, g).rows() == chapman_kolmogorov(f.rows(), g.rows())
        assert FINSTOCH.tensor(f, g).rows() == kron(f.rows(), g.rows())


def test_huge_denominators_stay_exact():
    big = 2 ** 40 + 15
    f = FINSTOCH.kernel(X, X, [[Fraction(1, big), Fraction(big - 1, big)], [1, 0]])
    h = f
    for _ in range(4):
        h = FINSTOCH.compose(h, f)
    oracle = f.rows()
    for _ in range(4):
        oracle = chapman_kolmogorov(oracle, f.rows())
    assert h.rows() == oracle
    assert all(sum(row) == 1 for row in h.rows())


def test_compose_type_mismatch():
    with pytest.raises(TypeMismatch):
        FINSTOCH.compose(FINSTOCH.identity(X), FINSTOCH.identity(Y))


def test_deterministic_iff_zero_one():
    rng = np.random.default_rng(11)
    for _ in range(100):
        f = random_kernel(X, Y, rng, int(rng.integers(1, 4)))
        assert is_deterministic(f) == f.is_zero_one()


def test_structural_maps_by_points():
    Z = X @ Y
    cp = FINSTOCH.copy(Z)
    for p in points(Z):
        assert cp.prob(p, p + p) == 1
    sw = FINSTOCH.swap(X, Y)
    for a, y in points(Z):
        assert sw.prob((a, y), (y, a)) == 1
    assert FINSTOCH.discard(Z).num.shape == (6, 1)


def test_dirac_and_function():
    d = FINSTOCH.dirac(Y, "y")
    assert d.rows() == [[0, 1, 0]]
    f = FINSTOCH.function(X, Y, lambda a: {"a": "z", "b": "x"}[a])
    assert f.rows() == [[0, 0, 1], [1, 0, 0]]


def test_random_distribution_sums():
    rng = np.random.default_rng(0)
    for n in range(1, 6):
        for d in range(1, 8):
            parts = random_distribution(n, d, rng)
            assert len(parts) == n and sum(parts) == d and min(parts) >= 0


def test_comonoid_on_word_objects():
    assert check_comonoid_laws(FINSTOCH, X @ Y @ X).passed


def test_unit_object():
    assert FINSTOCH.identity(Obj()).rows() == [[1]]
    s = FINSTOCH.state(X, ["1/3", "2/3"])
    assert FINSTOCH.tensor(FINSTOCH.identity(Obj()), s) == s


def test_stochmatrix_rejects_wrong_shape():
    with pytest.raises(TypeMismatch):
        StochMatrix(X, Y, np.ones((2, 2), dtype=np.int64), 2)

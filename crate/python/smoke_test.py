"""Smoke test for the addcomb Python extension.

Build and install the extension first, e.g.

    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/addcomb-*.whl

then run `python python/smoke_test.py` (or `pytest python/smoke_test.py`).
"""

import json
import math

import addcomb


def test_subset_and_sumsets():
    a = addcomb.Subset([12], [0, 1, 3])
    assert len(a) == 3 and 3 in a and 2 not in a
    assert a.sumset(a).elements() == [0, 1, 2, 3, 4, 6]
    assert a.difference_set().elements() == [0, 1, 2, 3, 9, 10, 11]
    k_sum, k_diff = a.doubling()
    assert k_sum == 2.0 and math.isclose(k_diff, 7 / 3)


def test_fourier_parseval_and_convolution():
    a = addcomb.Subset.random([8, 8], 0.3, seed=5)
    coeffs = a.fourier()
    assert math.isclose(sum(abs(c) ** 2 for c in coeffs), len(a) / 64, abs_tol=1e-12)
    conv = a.convolution("sum")
    support = [x for x, v in enumerate(conv) if v > 1 / (2 * 64 * 64)]
    assert support == a.sumset(a).elements()


def test_cover_element_verifies():
    a = addcomb.Subset.random([256], 0.25, seed=1)
    elem = json.loads(addcomb.build_cover_element(a, mode="difference", seed=2))
    assert elem["verification"]["status"] == "sandwich-verified"
    assert sum(a.level_sizes()) > 0


def test_cayley_alpha():
    g = addcomb.CayleyGraph.sample([20], 0.2, kind="sum", seed=3)
    alpha, witness = g.alpha_exact()
    assert len(witness) == alpha and g.is_independent(witness)
    lower, _ = g.alpha_heuristic(effort=50)
    assert lower <= alpha


def test_nonsumsets():
    assert [addcomb.f_value([n]) for n in range(2, 13)] == [1, 1, 1, 1, 1, 3, 1, 3, 1, 3, 2]
    t = addcomb.Subset([7], [0, 1, 2])
    root = addcomb.sumset_root(t)
    assert root is not None and root.sumset(root) == t
    assert addcomb.sumset_root(addcomb.Subset([8], [1, 2, 3, 4, 5, 6, 7])) is None
    out = json.loads(addcomb.probabilistic_nonsumset([16], 0.25, seed=4))
    assert out["status"] in ("witness", "degenerate")


def test_progressions():
    t = addcomb.Subset([13], [2, 5, 8, 11, 1])
    start, diff, length = addcomb.longest_ap(t)
    assert length == 5
    q = 1 / math.sqrt(10007)
    assert 0.60 < addcomb.miss_probability(10007, q) < 0.62


def test_verify_quick_runs():
    report = json.loads(addcomb.verify_all(quick=True))
    assert len(report["outcomes"]) == 13


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print("ok", name)

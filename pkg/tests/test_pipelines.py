import numpy as np
import pytest

from homcup import pipelines
from homcup.gfield import GF2, field_make, ga_element, ideal_analyze
from homcup.graphs import GraphError, complete_graph


def test_make_complex_from_spec():
    field, X, sheaf = pipelines.make_complex({"base": {"kind": "complete", "n": 4}, "t": 2,
                                              "lift": {"l": 3, "seed": 1},
                                              "sheaf": {"kind": "explicit",
                                                        "locals": [[[1, 1, 0], [0, 1, 1]]] * 2}})
    assert field == GF2 and X.l == 3 and sheaf.m == [[2, 2]]


def test_make_base_variants():
    assert pipelines.make_base({"kind": "s3"}).n_vertices == 6
    assert pipelines.make_base({"kind": "complete", "n": 3, "double_cover": True}).n_vertices == 6
    G = pipelines.make_base({"kind": "cayley", "group": "cyclic", "order": 5})
    assert G.n_vertices == 5 and G.degree == 2
    with pytest.raises(GraphError):
        pipelines.make_base({"kind": "cayley", "group": "cyclic", "order": 5, "generators": [1]})


def test_rs_and_random_locals():
    F4 = field_make(2)
    rs = pipelines.make_locals({"kind": "rs", "m": [1, 2]}, 3, 2, F4)
    assert [h.shape for h in rs] == [(1, 3), (2, 3)]
    rnd = pipelines.make_locals({"kind": "random", "m": 1, "seed": 4}, 3, 2, GF2)
    assert len(rnd) == 2 and all(h.shape == (1, 3) for h in rnd)
    again = pipelines.make_locals({"kind": "random", "m": 1, "seed": 4}, 3, 2, GF2)
    assert all(np.array_equal(a, b) for a, b in zip(rnd, again))


def test_factored_sheaf():
    s = pipelines.make_sheaf({"factors": [{"kind": "trivial"}, {"kind": "trivial"}]}, 3, 2, GF2)
    assert s.n_factors == 2


def test_inverse_product_vector_small():
    F4 = field_make(2)
    x = pipelines.inverse_product_vector(F4, [0, 1, 2])
    # 1/((0-1)(0-2)), 1/((1-0)(1-2)), 1/((2-0)(2-1)) in GF(4)
    assert x.tolist() == [F4.inv(2), F4.inv(3), F4.inv(F4.mul(2, 3))]


def test_polarized_retries_after_obstruction(monkeypatch):
    real = pipelines.find_probe
    calls = []

    def flaky(basis, X, direction, anchor, max_tries=None):
        calls.append(X.seed)
        if X.seed == 0:
            rep = ideal_analyze([ga_element([1] * 5, GF2)])
            return None, rep, [{"probe": None}]
        return real(basis, X, direction, anchor, max_tries)

    monkeypatch.setattr(pipelines, "find_probe", flaky)
    h = np.array([[1, 1, 0], [0, 1, 1]])
    r = pipelines.polarized_diagonal(complete_graph(4), 2, 5, h, np.array([[1, 1, 1]]), seed=0)
    first = r["attempts"][0]
    assert not first["ok"] and first["maximal_ideals"] and "whole-algebra" in first["reason"]
    assert r["seed"] == 1 and r["ok"] and r["certificate"].count == 5


def test_polarized_gives_up_after_budget(monkeypatch):
    monkeypatch.setattr(pipelines, "find_probe",
                        lambda *a, **k: (None, ideal_analyze([ga_element([1, 1], GF2, 5)]), []))
    h = np.array([[1, 1, 0], [0, 1, 1]])
    r = pipelines.polarized_diagonal(complete_graph(4), 2, 5, h, np.array([[1, 1, 1]]), max_seeds=3)
    assert r["seed"] is None and not r["ok"] and len(r["attempts"]) == 3

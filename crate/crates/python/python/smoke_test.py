"""Smoke test for the pyvocabsize extension module.

Build first: `maturin develop --release` from crates/python.
"""

import json
import math
import pathlib
import tempfile

import pyvocabsize as vs

DATA = pathlib.Path(__file__).resolve().parents[2] / "core" / "tests" / "data"


def check_corpus_and_tokenizer():
    stats = vs.compute_stats("a b\na\n")
    assert stats["sentences"] == 2 and stats["words"] == 3 and stats["chars"] == 3, stats

    tok = vs.Tokenizer.train("abab abab", 3)
    assert tok.pieces == ["a", "b", "ab"], tok.pieces
    assert tok.merges == [("a", "b")]
    assert tok.segment("abab abab") == {"ab": 4}
    with tempfile.TemporaryDirectory() as d:
        path = f"{d}/model.txt"
        tok.save(path)
        assert vs.Tokenizer.load(path).pieces == tok.pieces

    rows = vs.run_sweep("abab abab", 2, 3, 1)
    assert [(r["n"], r["theta"]) for r in rows] == [(2, 8), (3, 4)], rows


def check_fitting():
    truth = vs.Fit("quad", [1.0, 2.0, 3.0])
    assert truth.derivatives(5.0) == (12.0, 2.0)
    points = [(float(n), truth.evaluate(n)) for n in range(28, 200, 7)]
    fit = vs.Fit.fit(points, "quad")
    assert all(math.isclose(a, b, rel_tol=1e-9) for a, b in zip(fit.coeffs, truth.coeffs)), fit
    assert fit.r_squared > 1 - 1e-12


def check_solver():
    spec = vs.CostSpec.from_json((DATA / "librispeech_quad_norm.json").read_text())
    out = spec.solve((0.0, 0.39, 0.61))
    assert out["converged"] and abs(out["n_star"] - 364.35) < 0.01, out

    raw = vs.CostSpec.from_json((DATA / "librispeech_quad.json").read_text())
    sols = raw.reverse(300.0, seed=1)
    assert sols and all(abs(s["achieved_n"] - 300.0) <= 0.5 for s in sols)

    qe = vs.CostSpec.from_json((DATA / "librispeech_quadexp.json").read_text())
    res = qe.search(restarts=200, seed=7, mode="min-abs")
    lo, hi = res["summary"]["modal_band"]
    assert 50 < lo <= hi < 65, res["summary"]
    json.loads(qe.to_json())

    try:
        spec.solve((0.0, 0.0, 0.0))
    except ValueError:
        pass
    else:
        raise AssertionError("zero weights accepted")


if __name__ == "__main__":
    check_corpus_and_tokenizer()
    check_fitting()
    check_solver()
    print("smoke test passed")

"""Acceptance criteria, one test per criterion.

Each criterion is a function returning ``(passed, detail)``; the tests assert
on it and the terminal summary prints one PASS/FAIL line per criterion.
Run on its own with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``.
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

from multitwist import constructions, document, models
from multitwist.algebra import membership_residual
from multitwist.cli import main
from multitwist.numat import inverse, op_norm, random_unitary
from multitwist.triple import (
    CLASSICAL,
    STRUCTURAL,
    MultitwistedStructure,
    RealSpectralTriple,
    check_epsilon_prime,
    check_epsilon_prime_untwisted,
    check_first_order,
    check_mt_first_order,
    check_mt_zero_order,
    check_zero_order,
    conjugate_by,
    report,
    twist_ad,
)

pytestmark = pytest.mark.acceptance

WITNESS = Path(__file__).parent / "data" / "fluctuation_witness.json"
TWISTED = ["mt_zero_order", "mt_first_order", "mt_epsilon_prime", "regularity"]
RESULTS = {}


def _worst(rep, ids):
    return max(rep.worst(c) for c in ids if rep.select(c))


def criterion_1():
    worst, bad = 0.0, []
    for q in (2, 3, 4, 5):
        params = models.FuzzyModelParams(q=q)
        for m in (models.fuzzy_torus2(params), models.fuzzy_circle_even(q), models.fuzzy_torus3(q)):
            rep = report(m, tol=1e-10)
            ids = [c for c in STRUCTURAL + CLASSICAL if rep.select(c)]
            w = _worst(rep, ids)
            worst = max(worst, w)
            if not rep.passes(ids):
                bad.append(f"{m.provenance}: {[e.condition_id for e in rep.failures(ids)]}")
    return not bad, f"worst relative {worst:.2e} over 12 triples" + (f"; failing {bad}" if bad else "")


def criterion_2():
    p = constructions.tensor_product(models.fuzzy_circle_even(2), models.fuzzy_torus3(2))
    rep = report(p, tol=1e-9)
    ok = rep.passes(TWISTED) and len(p.mt) == 2 and p.triple.grading is None
    return ok, f"worst relative {_worst(rep, TWISTED):.2e}, N = {len(p.mt)}, graded = {p.triple.is_even}"


def criterion_3():
    ids = ["mt_zero_order", "grading_twist"] + TWISTED[1:]
    worst, bad = 0.0, []
    for q in (2, 3, 4):
        for seed in range(5):
            m = models.asymmetric_torus(models.FuzzyModelParams(q=q, seed=seed))
            rep = report(m, tol=1e-9)
            worst = max(worst, _worst(rep, ids))
            if not rep.passes(ids):
                bad.append((q, seed))
    params = models.FuzzyModelParams(q=3)
    base = models.fuzzy_torus2(params)
    same = models.asymmetric_torus(params, np.eye(3), np.eye(3))
    gap = max(
        np.abs(same.triple.d - base.triple.d).max(),
        max(np.abs(a.d - b.d).max() for a, b in zip(same.mt.summands, base.mt.summands)),
        max(np.abs(s.nu - np.eye(base.triple.dim_h)).max() for s in same.mt.summands),
    )
    ok = not bad and gap < 1e-14
    return ok, f"worst relative {worst:.2e} over 15 triples; identity rescaling gap {gap:.1e}" + (
        f"; failing {bad}" if bad else ""
    )


def criterion_4():
    data = json.loads(WITNESS.read_text())
    spec = data["model"]
    model = models.asymmetric_torus(models.FuzzyModelParams(q=spec["q"], seed=spec["seed"]))
    terms = [(document.matrix_from_json(t["a"]), document.matrix_from_json(t["b"])) for t in data["terms"]]
    form = constructions.make_one_form(model, terms, symmetrize=data["symmetrize"])
    plain = constructions.fluctuate_plain(model, form)
    eps = constructions.fluctuate_eps(model, form)
    rp, re = report(plain, tol=1e-9), report(eps, tol=1e-10)
    plain_ok = rp.passes(["mt_zero_order", "mt_first_order"])
    plain_eps = rp.worst("mt_epsilon_prime")
    eps_eps = re.worst("mt_epsilon_prime")
    gap = constructions.commutator_gap(eps, plain)[2]
    ok = form.selfadjoint and plain_ok and plain_eps > 1e-3 and eps_eps < 1e-10 and gap < 1e-11
    return ok, (
        f"plain: (3),(5) pass={plain_ok}, eps' relative {plain_eps:.2e}; "
        f"eps-preserving: eps' relative {eps_eps:.2e}, commutator gap {gap:.2e}"
    )


def criterion_5():
    base = models.fuzzy_torus2(models.FuzzyModelParams(q=3))
    x = constructions.clifford_direction(base, seed=0)
    outside = membership_residual(x, base.triple.algebra)
    lam, v = np.linalg.eigh(x)
    k = (v * np.exp(0.3 * lam)) @ v.conj().T
    out = constructions.clifford_rescale(base, k)
    rep = report(out, tol=1e-9)
    defect, _ = constructions.automorphism_defect(out)
    zo = rep.passes(["mt_zero_order"])
    ok = outside > 1e-3 and rep.passes(TWISTED) and defect > 0.01 and zo
    return ok, (
        f"x outside A by {outside:.2f}; worst relative {_worst(rep, TWISTED):.2e}; "
        f"max membership residual of nu(b) {defect:.3f}"
    )


def criterion_6():
    lines, ok = [], True
    for q in (2, 3):
        for t in (0.1, 0.3):
            m = models.circle_bundle(models.FuzzyModelParams(q=q, t=t))
            rep = report(m, tol=1e-9)
            per = {
                cid: [e.relative_residual for e in rep.select(cid)] for cid in ("mt_zero_order", "mt_first_order")
            }
            passed = rep.passes(["mt_zero_order", "mt_first_order"])
            w, (w1, w2) = m.extras["w"], m.extras["omega"]
            rhs = np.kron(np.eye(2), models.leftmult(np.eye(q) + w1 @ w1 + w2 @ w2))
            sq = op_norm(w @ w - rhs)
            ok &= passed and sq < 1e-12
            lines.append(
                f"q={q} t={t}: (3) {per['mt_zero_order'][0]:.1e}/{per['mt_zero_order'][1]:.1e}"
                f" (5) {per['mt_first_order'][0]:.1e}/{per['mt_first_order'][1]:.1e} w^2 {sq:.0e}"
            )
        flat = models.circle_bundle(models.FuzzyModelParams(q=q, t=0.0))
        gap = np.abs(flat.triple.d - models.fuzzy_torus3(q).triple.d).max()
        ok &= gap < 1e-14
        lines.append(f"q={q} t=0 flat gap {gap:.0e}")
    return ok, "; ".join(lines)


def criterion_7():
    mismatches, count = [], 0
    for m in (
        models.fuzzy_torus2(models.FuzzyModelParams(q=3)),
        models.fuzzy_circle_even(3),
        models.fuzzy_torus3(3, split=True),
    ):
        t, mt = m
        zo_ref = check_zero_order(t)
        zo = check_mt_zero_order(t, mt)
        fo = check_mt_first_order(t, mt)
        ep = check_epsilon_prime(t, mt)
        for ell, s in enumerate(mt.summands):
            single = RealSpectralTriple(t.algebra, s.d, t.j, t.epsilon_prime)
            pairs = [
                (zo[ell], zo_ref),
                (fo[ell], check_first_order(single)),
                (ep[ell], check_epsilon_prime_untwisted(single)),
            ]
            for got, ref in pairs:
                count += 1
                same = (got.absolute_residual, got.scale, got.relative_residual, got.passed) == (
                    ref.absolute_residual,
                    ref.scale,
                    ref.relative_residual,
                    ref.passed,
                )
                if not same:
                    mismatches.append(f"{got.condition_id}[{ell}]")
    return not mismatches, f"{count} entry pairs compared, {len(mismatches)} differ {mismatches or ''}".strip()


def _all_examples():
    p2 = models.FuzzyModelParams(q=2, seed=2)
    out = [
        models.fuzzy_torus2(p2),
        models.fuzzy_circle_even(2),
        models.fuzzy_torus3(2, split=True),
        models.asymmetric_torus(p2),
        models.circle_bundle(p2),
        constructions.tensor_product(models.fuzzy_circle_even(2), models.fuzzy_torus3(2)),
    ]
    base = models.fuzzy_torus2(models.FuzzyModelParams(q=3))
    x = constructions.clifford_direction(base)
    lam, v = np.linalg.eigh(x)
    out.append(constructions.clifford_rescale(base, (v * np.exp(0.3 * lam)) @ v.conj().T))
    return out


def criterion_8():
    rng = np.random.default_rng(8)
    worst, n = 0.0, 0
    for m in _all_examples():
        w = random_unitary(m.triple.dim_h, rng)
        a, b = report(m), report(conjugate_by(m, w))
        for ea, eb in zip(a.entries, b.entries):
            assert ea.condition_id == eb.condition_id
            worst = max(worst, abs(ea.relative_residual - eb.relative_residual))
            n += 1
    return worst < 1e-10, f"max change {worst:.2e} over {n} entries"


def criterion_9(tmp_path):
    m = models.asymmetric_torus(models.FuzzyModelParams(q=2, seed=9))
    path = tmp_path / "m.json"
    document.save(m, path)
    back = document.load(path)
    exact = document.models_equal(m, back) and np.array_equal(back.triple.d, m.triple.d)
    document.save(back, tmp_path / "again.json")
    exact &= path.read_bytes() == (tmp_path / "again.json").read_bytes()

    doc = document.to_document(models.fuzzy_torus2())
    for s in doc["multitwist"]:
        s["nu_ell"] = document.matrix_to_json(2 * np.eye(doc["hilbert_dim"]))
    bad = tmp_path / "nu2.json"
    bad.write_text(json.dumps(doc))
    corrupt = tmp_path / "corrupt.json"
    corrupt.write_bytes(path.read_bytes()[:100])
    good = tmp_path / "good.json"
    document.save(models.fuzzy_torus2(), good)

    codes = (main(["check", str(good)]), main(["check", str(bad)]), main(["check", str(corrupt)]))
    ok = exact and codes == (0, 1, 2)
    return ok, f"bit-exact round trip {exact}; exit codes pass/violation/corrupt = {codes}"


def _record(n, result):
    ok, detail = result
    RESULTS[n] = (ok, detail)
    print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return ok, detail


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8])
def test_criterion(n):
    ok, detail = _record(n, globals()[f"criterion_{n}"]())
    assert ok, detail


def test_criterion_9(tmp_path, capsys):
    result = criterion_9(tmp_path)
    capsys.readouterr()  # drop the check tables printed by the CLI
    ok, detail = _record(9, result)
    assert ok, detail


if __name__ == "__main__":
    import tempfile

    failed = 0
    for n in range(1, 10):
        if n == 9:
            with tempfile.TemporaryDirectory() as d:
                ok, _ = _record(n, criterion_9(Path(d)))
        else:
            ok, _ = _record(n, globals()[f"criterion_{n}"]())
        failed += not ok
    sys.exit(1 if failed else 0)

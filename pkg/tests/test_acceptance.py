"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one ``CRITERION n: PASS|FAIL`` line; the lines are printed
in the terminal summary (and immediately with ``-s``).
"""

import numpy as np
import pytest

from _builders import (
    constant_family_pair,
    normalized_equal_pair,
    perturb_h,
    random_disk_mobius,
    random_witness,
)
from hschwarz.analytic import Compose, Identity, MobiusLeaf, recover_mobius, schwarzian
from hschwarz.corpus import BASE_NAMES, CONSTANT_NAMES, NONCONSTANT_NAMES
from hschwarz.equivalence import (
    Verdict,
    check_equal_schwarzian,
    verify_corollary,
    verify_invariance,
    verify_phi_identity,
    verify_phi_lemma_limits,
    verify_prop31,
    verify_thm33,
)
from hschwarz.errors import DegenerateBasePoint
from hschwarz.grid import DEFAULT_GRID
from hschwarz.harmonic import (
    dilatation,
    normalization_defects,
    normalize_at,
    schwarzian_h_closed,
    schwarzian_h_definition,
    schwarzian_h_pointwise,
)
from hschwarz.jets import WirtingerStencil

PTS = DEFAULT_GRID.points()
THM33_W = (0j, 0.3, 0.5j, -0.4 + 0.2j, -0.1 - 0.6j, 0.65, -0.55j, 0.2 + 0.2j)
PAIR_W = (0.3, -0.2 + 0.4j)
NORMALIZE_W = (0.3, -0.2 + 0.4j, 0.5j, -0.45, 0.15 - 0.25j)


@pytest.fixture
def record(acceptance_log):
    def _record(n, ok, detail):
        line = f"CRITERION {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        acceptance_log[n] = line
        print(line)
        return ok

    return _record


def test_criterion_01_route_equivalence(corpus, record):
    stencil = WirtingerStencil(step=1e-3)
    dp = dd = 0.0
    for f in corpus.values():
        s = schwarzian_h_closed(f, PTS)
        dp = max(dp, np.abs(s - schwarzian_h_pointwise(f, PTS)).max())
        dd = max(dd, np.abs(s - schwarzian_h_definition(f, PTS, stencil)).max())
    ok = len(corpus) == 10 and dp <= 1e-10 and dd <= 1e-5
    assert record(1, ok, f"closed-pointwise {dp:.2e} <= 1e-10, closed-definition {dd:.2e} <= 1e-5")


@pytest.fixture(scope="module")
def invariance_reports():
    from hschwarz.corpus import corpus_maps

    return {n: verify_invariance(s.build(), n_affine=20, n_rotation=8, n_automorphism=5)
            for n, s in corpus_maps().items()}


def test_criterion_02_invariance(invariance_reports, record):
    worst = {}
    for reps in invariance_reports.values():
        for r in reps[:3]:
            worst[r.name] = max(worst.get(r.name, 0.0), r.max_residual)
    ok = len(worst) == 3 and max(worst.values()) <= 1e-10
    detail = ", ".join(f"{k.split('.')[1]} {v:.2e}" for k, v in worst.items())
    assert record(2, ok, detail + " (each <= 1e-10)")


def test_criterion_03_chain_rule(invariance_reports, record):
    worst = max(reps[3].max_residual for reps in invariance_reports.values())
    assert all(reps[3].name == "invariance.chain_rule" for reps in invariance_reports.values())
    assert record(3, worst <= 1e-9, f"5 automorphisms x 10 maps, residual {worst:.2e} <= 1e-9")


def test_criterion_04_constant_collapse(constant, record):
    worst = 0.0
    for f in constant.values():
        worst = max(worst, np.abs(schwarzian_h_closed(f, PTS) - schwarzian(f.h, PTS)).max())
    ok = len(constant) == 5 and worst <= 1e-12
    assert record(4, ok, f"|S_H(f) - S(h)| = {worst:.2e} <= 1e-12 on 5 maps")


def test_criterion_05_mobius(constant, record):
    rng = np.random.default_rng(5)
    s_max = rt_max = 0.0
    hs = [f.h for f in constant.values()]
    for k in range(20):
        T = random_disk_mobius(rng, Identity())
        s_max = max(s_max, np.abs(schwarzian(MobiusLeaf(T), PTS)).max())
        h = hs[k % len(hs)]
        T = random_disk_mobius(rng, h)
        Th = Compose(MobiusLeaf(T), h)
        R = recover_mobius(Th, h)
        rt_max = max(rt_max, np.abs(R(h(PTS)) - Th(PTS)).max())
    ok = s_max <= 1e-12 and rt_max <= 1e-8
    assert record(5, ok, f"max |S(T)| {s_max:.2e} <= 1e-12, recover_mobius residual {rt_max:.2e} <= 1e-8")


@pytest.fixture(scope="module")
def witness_results():
    from hschwarz.corpus import corpus_maps

    maps = {n: s.build() for n, s in corpus_maps().items()}
    rng = np.random.default_rng(6)
    out = []
    for _ in range(50):
        name = BASE_NAMES[rng.integers(len(BASE_NAMES))]
        f1 = maps[name]
        _, _, f2 = random_witness(rng, f1)
        out.append((name, f1, f2, check_equal_schwarzian(f1, f2)))
    return out


def test_criterion_06_connector_round_trip(witness_results, record):
    equal = sum(r.equal for *_, r in witness_results)
    act = max(np.abs(r.predict(f1, PTS) - f2(PTS)).max() for _, f1, f2, r in witness_results if r.equal)
    flipped = 0
    for _, f1, f2, _ in witness_results[:10]:
        flipped += check_equal_schwarzian(f1, perturb_h(f2, (0, 0, 0, 1e-3))).verdict is Verdict.NOT_EQUAL
    ok = equal == 50 and act <= 1e-8 and flipped == 10
    assert record(6, ok, f"{equal}/50 Equal, witness action {act:.2e} <= 1e-8, {flipped}/10 perturbed NotEqual")


def test_criterion_07_constant_family(constant, record):
    rng = np.random.default_rng(7)
    hs = [f.h for f in constant.values()]
    ok_verdicts, t_ok, res = 0, 0, 0.0
    n = 10
    for k in range(n):
        h = hs[k % len(hs)]
        T = random_disk_mobius(rng, h)
        al = [complex(*rng.uniform(-0.6, 0.6, 2)) for _ in range(2)]
        ga = [complex(*rng.normal(size=2)) for _ in range(2)]
        f1, f2 = constant_family_pair(h, T, *al, *ga)
        r = check_equal_schwarzian(f1, f2)
        ok_verdicts += r.verdict is Verdict.EQUAL_CONSTANT_FAMILY
        if r.mobius is not None:
            t_ok += r.mobius.is_close(T, tol=1e-8)
            res = max(res, r.residual)
    ok = ok_verdicts == n and t_ok == n and res <= 1e-8
    assert record(7, ok, f"{ok_verdicts}/{n} EqualConstantFamily, {t_ok}/{n} T matched, residual {res:.2e} <= 1e-8")


@pytest.fixture(scope="module")
def equal_normalized_pairs():
    from hschwarz.corpus import corpus_maps

    rng = np.random.default_rng(8)
    out = []
    for name in NONCONSTANT_NAMES:
        f = corpus_maps()[name].build()
        for w in PAIR_W:
            A, mu, _ = random_witness(rng, f, preserving=True)
            out.append(normalized_equal_pair(f, w, A, mu))
    return out


def _suites(f1, f2, strict=True):
    return {
        "prop31": max(r.max_residual for r in verify_prop31(f1, f2)),
        "thm33": verify_thm33(f1, f2, THM33_W).max_residual,
        "corollary": verify_corollary(f1, f2).max_residual,
        "phi": verify_phi_identity(f1, f2).max_residual,
        "limits": verify_phi_lemma_limits(f1, f2, strict=strict).max_residual,
    }


def test_criterion_08_identity_suites(equal_normalized_pairs, record):
    worst = dict.fromkeys(("prop31", "thm33", "corollary", "phi", "limits"), 0.0)
    least_flip = dict.fromkeys(worst, np.inf)
    for f1, f2 in equal_normalized_pairs:
        for k, v in _suites(f1, f2).items():
            worst[k] = max(worst[k], v)
        probe = perturb_h(f2, (0, 0, 1e-3))
        for k, v in _suites(f1, probe).items():
            if k != "limits":
                least_flip[k] = min(least_flip[k], v)
        # the limit relations follow from normalization alone; the probe must break it
        probe = perturb_h(f2, (0, 1e-3))
        least_flip["limits"] = min(least_flip["limits"], verify_phi_lemma_limits(f1, probe, strict=False).max_residual)
    ok = max(worst.values()) <= 1e-7 and min(least_flip.values()) > 1e-7
    detail = ", ".join(f"{k} {worst[k]:.1e}/flip {least_flip[k]:.1e}" for k in worst)
    assert record(8, ok, f"equal <= 1e-7, probe > 1e-7: {detail}")


def test_criterion_09_omega_prime(witness_results, equal_normalized_pairs, record):
    gaps = [r.diagnostics["omega_prime_gap"] for *_, r in witness_results if r.verdict is Verdict.EQUAL_NONCONSTANT]
    for f1, f2 in equal_normalized_pairs:
        gaps.append(abs(dilatation(f1, 0j).w1 - dilatation(f2, 0j).w1))
    worst = max(gaps)
    assert record(9, worst <= 1e-9, f"{len(gaps)} Equal non-constant pairs, |w1'(0) - w2'(0)| {worst:.2e} <= 1e-9")


def test_criterion_10_normalization(corpus, record):
    worst, positive, degenerate = 0.0, True, 0
    for name, f in corpus.items():
        if name in CONSTANT_NAMES:
            with pytest.raises(DegenerateBasePoint):
                normalize_at(f, 0.3)
            degenerate += 1
            continue
        for w in NORMALIZE_W:
            d = normalization_defects(normalize_at(f, w).map)
            positive &= d.pop("Re omega'(0)") > 0
            worst = max(worst, max(d.values()))
    ok = worst <= 1e-10 and positive and degenerate == 5
    assert record(10, ok, f"5 maps x 5 w, defects {worst:.2e} <= 1e-10, Re w'(0) > 0: {positive}; "
                          f"{degenerate} constant maps raise DegenerateBasePoint")

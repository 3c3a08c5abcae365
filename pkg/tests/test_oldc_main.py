import random
from fractions import Fraction

import pytest

from listdefect import (
    ClassBudget,
    FailFast,
    LdcInstance,
    MainConfig,
    OldcConfig,
    lambda_profile,
    main_oldc,
    two_phase_oldc,
    validate_ldc,
)
from listdefect.errors import InvalidInstance

from conftest import random_dag

MAIN_SCALED = MainConfig(
    alpha=1, tau_override=1, taubar_override=1, stage1_scale=(2, 2), stage2_scale=(2, 2)
)


def test_lambda_single_bucket_case2():
    p = lambda_profile({0: 1, 1: 1, 2: 1}, beta_v=2, h=2, alpha=16, taubar=4, hprime=4)
    assert p.case2
    (lam,) = p.lam.values()
    assert lam == 1


def test_lambda_threshold_zero():
    # energies 4 and 13: 4/17 < 1/2 at h=1, so that bucket drops to zero
    defs = {0: 1} | {c: 0 for c in range(1, 14)}
    p = lambda_profile(defs, beta_v=2, h=1, alpha=16, taubar=4, hprime=4)
    shares = {mu: Fraction(e, p.total_energy) for mu, e in p.energy.items()}
    for mu, share in shares.items():
        if share < Fraction(1, 2):
            assert p.lam[mu] == 0


def test_lambda_point_six_floors_to_quarter():
    # energies 12 (three colors with rounded defect 2) vs 8 (eight with 1)
    defs = {c: 1 for c in range(3)} | {c: 0 for c in range(3, 11)}
    p = lambda_profile(defs, beta_v=2, h=2, alpha=16, taubar=4, hprime=4)
    shares = {mu: Fraction(e, p.total_energy) for mu, e in p.energy.items()}
    heavy = next(mu for mu, s in shares.items() if s == Fraction(3, 5))
    assert p.lam[heavy] == Fraction(1, 4)
    assert p.case2  # lambda >= 1/4 is the Case II boundary


def test_lambda_exact_powers():
    defs = {c: 3 for c in range(16)}
    p = lambda_profile(defs, beta_v=4, h=2, alpha=1, taubar=1, hprime=4)
    assert p.r_big == 1 * 16 * 1 * 16
    for cls, delta in p.deltas.items():
        lam = p.lam[p.mu_of_class[cls]]
        if not p.case2:
            assert delta * delta <= lam * p.r_big


def test_lambda_empty_list_rejected():
    with pytest.raises(InvalidInstance):
        lambda_profile({}, 1, 1, 1, 1, 1)


def _blocky_graph_and_lists(seed, n=12):
    """DAG with outdegree <= 2 and sparse 16-color lists over 256 colors."""
    g = random_dag(n, 2, 0.3, seed)
    rng = random.Random(seed)
    lists = [sorted(16 * b + rng.randrange(16) for b in range(16)) for _ in range(n)]
    return g, lists


def test_two_phase_single_class():
    g, lists = _blocky_graph_and_lists(seed=2)
    budget = ClassBudget(
        classes={v: 1 for v in range(g.n)},
        defects={v: 3 for v in range(g.n)},
        h=1,
        q=1,
    )
    cfg = OldcConfig(alpha=1.0, scale_override=(2, 2))
    out, trace = two_phase_oldc(g, list(range(256)), lists, budget, cfg)
    inst = LdcInstance.build(
        list(range(256)), lists, [{x: 3 for x in l} for l in lists], flavor="oriented"
    )
    assert validate_ldc(g, inst, out).valid
    assert trace.audit is not None
    for v, lower, ignored, star in trace.audit:
        d = 3
        assert 4 * lower <= d and 4 * ignored <= d and 2 * star <= d


def test_two_phase_empty_bad_colors_with_disjoint_lower():
    # lower class uses colors 0..15, upper class colors 128..255: B_v empty
    g = random_dag(8, 1, 0.5, seed=7)
    rng = random.Random(7)
    lists = []
    classes = {}
    for v in range(g.n):
        if v % 2 == 0:
            lists.append(sorted(rng.sample(range(8 * v, 8 * v + 8), 4)))
            classes[v] = 1
        else:
            lists.append(sorted(rng.sample(range(128 + 16 * v, 144 + 16 * v), 12)))
            classes[v] = 2
    budget = ClassBudget(classes=classes, defects={v: 3 for v in range(g.n)}, h=2, q=1)
    cfg = OldcConfig(alpha=0.5, scale_override=(1, 2))
    out, trace = two_phase_oldc(g, list(range(256)), lists, budget, cfg)
    for (v, lower, ignored, star) in trace.audit:
        if classes.get(v) == 2:
            assert lower == 0  # disjoint colors: no bad-color pressure


def test_main_case2_trivial_stage1():
    g, lists = _blocky_graph_and_lists(seed=4)
    inst = LdcInstance.build(
        list(range(256)), lists, [{x: 3 for x in l} for l in lists], flavor="oriented"
    )
    out, trace = main_oldc(g, inst, MAIN_SCALED)
    assert validate_ldc(g, inst, out).valid


def test_main_fail_safe_randomized():
    rng = random.Random(21)
    ok = fail = 0
    for trial in range(60):
        n = rng.randrange(8, 24)
        g = random_dag(n, rng.choice([2, 3]), 0.25, seed=trial)
        space = list(range(64))
        lists = [sorted(rng.sample(space, rng.choice([8, 12]))) for _ in range(n)]
        inst = LdcInstance.build(
            space, lists,
            [{x: rng.choice([0, 1, 2, 3]) for x in l} for l in lists],
            flavor="oriented",
        )
        try:
            out, _ = main_oldc(g, inst, MAIN_SCALED)
        except FailFast:
            fail += 1
            continue
        ok += 1
        assert validate_ldc(g, inst, out).valid
    assert ok > 0 and ok + fail == 60


def test_main_paper_scale_rejects_small_lists():
    g, lists = _blocky_graph_and_lists(seed=5)
    inst = LdcInstance.build(
        list(range(256)), lists, [{x: 1 for x in l} for l in lists], flavor="oriented"
    )
    with pytest.raises(FailFast):
        main_oldc(g, inst, MainConfig())


def test_main_determinism():
    g, lists = _blocky_graph_and_lists(seed=8)
    inst = LdcInstance.build(
        list(range(256)), lists, [{x: 3 for x in l} for l in lists], flavor="oriented"
    )
    a = main_oldc(g, inst, MAIN_SCALED)
    b = main_oldc(g, inst, MAIN_SCALED)
    assert a[0] == b[0]
    assert a[1].to_json(verbose=True) == b[1].to_json(verbose=True)

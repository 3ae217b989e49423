import itertools

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowergap.corpus import petersen, prism, symmetric_subsets, triangle
from lowergap.errors import HypothesisNotMet, NotASubgroup, WrongIndex
from lowergap.freiman import (
    CorrelationProfile,
    canonical_companion,
    correlation_profile,
    dichotomy_test,
    extract_index_two,
    orbit_concentration,
    orbit_concentration_bound,
    verify_left2right,
)
from lowergap.graphs import build_instance
from lowergap.groups import cyclic, dihedral, left_translation_action, quaternion8, symmetric
from lowergap.spectral import bottom_eigenfunction, derived_constants, dichotomy_delta

ORBIT_RHS_AT_STAGE = 0.0533459373129939  # mpmath at kappa = 1/260, xi = 4/5


def test_synthetic_two_cluster_extracts_even_subgroup():
    corr = CorrelationProfile.synthetic([2.0, 0, 2.0, 0, 2.0, 0], 2.0)
    assert not dichotomy_test(corr, 0.1).dichotomy_holds
    H, check = extract_index_two(corr, cyclic(6), 0.1)
    assert H == frozenset({0, 2, 4})
    assert check.ok and check.index == 2


def test_closure_violating_set_raises():
    corr = CorrelationProfile.synthetic([1.0, 1.0, 0, 0, 0, 0], 1.0)
    with pytest.raises(NotASubgroup) as err:
        extract_index_two(corr, cyclic(6), 0.1, failed_hypotheses=("kappa <= 1/260",))
    assert not isinstance(err.value, WrongIndex)


def test_wrong_index_raises():
    corr = CorrelationProfile.synthetic([1.0, 0, 0, 1.0, 0, 0], 1.0)  # {0, 3}: index three
    with pytest.raises(WrongIndex):
        extract_index_two(corr, cyclic(6), 0.1)


def test_extraction_refuses_dichotomy():
    corr = CorrelationProfile.synthetic([1.0, 0.5, 1.0, 0, 1.0, 0], 1.0)
    with pytest.raises(ValueError):
        extract_index_two(corr, cyclic(6), 0.1)


def test_delta_range():
    corr = CorrelationProfile.synthetic([1.0, 0.0], 1.0)
    for bad in (0.0, 0.5, -0.1, 0.7):
        with pytest.raises(ValueError):
            dichotomy_test(corr, bad)


def test_tie_at_threshold_is_not_a_dichotomy():
    corr = CorrelationProfile.synthetic([1.0, 0.1, 0.9], 1.0)
    assert not dichotomy_test(corr, 0.1).dichotomy_holds


def direct_correlations(f, action):
    """<f+, (tau.f)+> by explicit summation over v."""
    n = f.size
    out = []
    for tau in range(action.group.order):
        inv = action.perm[action.group.inv[tau]]
        out.append(sum(max(f[v], 0) * max(f[inv[v]], 0) for v in range(n)))
    return np.array(out)


def test_prism_witness_is_shift_by_one():
    P = prism()
    prof = bottom_eigenfunction(P)
    corr = correlation_profile(prof, P.action)
    assert np.allclose(corr.values, direct_correlations(prof.f, P.action), atol=1e-12)
    verdict = dichotomy_test(corr, 0.1)
    assert verdict.dichotomy_holds and verdict.witness == 1
    assert corr.ratio(1) == pytest.approx(2 / 3, abs=1e-12)
    assert [round(corr.ratio(t), 12) for t in range(6)] == pytest.approx([1, 2 / 3, 1 / 6, 0, 1 / 6, 2 / 3])


@pytest.mark.parametrize("inst", [triangle(), prism(), petersen(),
                                  build_instance("cayley", dihedral(5), [1, 4, 5]),
                                  build_instance("cayley", symmetric(3), [3, 4, 5])],
                         ids=lambda i: i.label)
def test_correlation_sum_identity(inst):
    # sum over tau of <f+, (tau.f)+> = t (sum of f+)^2, t the stabilizer size
    prof = bottom_eigenfunction(inst, strict=False)
    corr = correlation_profile(prof, inst.action)
    t = inst.action.t
    assert corr.values.sum() == pytest.approx(t * prof.f_plus.sum() ** 2, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([5, 6, 7, 8, 9]), st.data())
def test_correlation_sum_identity_random_functions(n, data):
    G = cyclic(n)
    action = left_translation_action(G)
    f = np.array(data.draw(st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n)))
    vals = direct_correlations(f, action)
    assert vals.sum() == pytest.approx(np.maximum(f, 0).sum() ** 2, rel=1e-9, abs=1e-9)
    assert np.all(vals <= (np.maximum(f, 0) ** 2).sum() + 1e-9)  # Cauchy-Schwarz


def test_orbit_bound_against_mpmath():
    mpmath.mp.dps = 30
    k = mpmath.mpf(1) / 260
    s = mpmath.sqrt(k / (1 - k))
    P = 1 + s + k + 2 * mpmath.sqrt(2) * mpmath.sqrt(k)
    delta = mpmath.mpf(2) / 5 * (3 * (1 - k) / P * (1 / mpmath.sqrt(2) - s) ** 2 - 1)
    rhs = s / mpmath.sqrt(2) + mpmath.sqrt(delta) / 2 * mpmath.sqrt(P / (2 * (1 - k)))
    assert float(rhs) == pytest.approx(ORBIT_RHS_AT_STAGE, rel=1e-12)
    assert orbit_concentration_bound(1 / 260, dichotomy_delta(1 / 260, 0.8)) == pytest.approx(ORBIT_RHS_AT_STAGE, rel=1e-9)


def test_orbit_concentration_gated():
    P = prism()
    prof = bottom_eigenfunction(P)
    with pytest.raises(HypothesisNotMet):
        orbit_concentration({0, 2, 4}, prof, derived_constants(prof, P), P.action)


def test_orbit_concentration_on_bipartite_like_instance():
    # K_{m,m} plus loops: kappa = 2/m, f = +1 on evens, -1 on odds, H = evens
    m = 521
    G = cyclic(2 * m)
    inst = build_instance("cayley", G, [0] + list(range(1, 2 * m, 2)))
    prof = bottom_eigenfunction(inst)
    dc = derived_constants(prof, inst)
    assert dc.kappa == pytest.approx(2 / m, rel=1e-9)
    oc = orbit_concentration(frozenset(range(0, 2 * m, 2)), prof, dc, inst.action)
    assert oc.lhs == 0 and oc.holds


def brute_left2right(inst):
    """Search every permutation rho_tau for each tau (n <= 6)."""
    for tau in range(inst.group.order):
        t = inst.action.perm[tau]
        if not any(np.array_equal(inst.a[np.ix_(list(r), t)], inst.a) for r in itertools.permutations(range(inst.n))):
            return False
    return True


@pytest.mark.parametrize("kind", ["cayley", "cayley_sum", "twisted_cayley", "twisted_cayley_sum"])
def test_canonical_companions_verify(kind):
    for G in (cyclic(5), dihedral(3), cyclic(6)):
        sigma = [int(x) for x in G.inv] if G.is_abelian() else list(range(G.order))
        twisted = kind.startswith("twisted")
        for S in symmetric_subsets(G, 3, include_identity=False):
            try:
                inst = build_instance(kind, G, S, sigma if twisted else None)
            except Exception:
                continue
            res = verify_left2right(inst)
            assert res.holds, (kind, G.name, S, res.witness)
            assert brute_left2right(inst)


def test_cayley_sum_nonabelian_companions():
    G = symmetric(3)
    for S in ([1], [3], [1, 2], [3, 4, 5]):
        try:
            inst = build_instance("cayley_sum", G, S)
        except Exception:
            continue
        assert verify_left2right(inst).holds


def test_left2right_reports_witness():
    P = prism()
    wrong = {tau: [(v + 1) % 6 for v in range(6)] for tau in range(6)}
    res = verify_left2right(P, rho_map=wrong)
    assert not res.holds and res.witness is not None
    tau, u, v = res.witness
    r = wrong[tau]
    assert P.a[u, v] != P.a[r[u], P.action.perm[tau][v]]


def test_vertex_transitive_companion_is_tau():
    Pet = petersen()
    assert verify_left2right(Pet).holds
    comp = canonical_companion(Pet)
    assert np.array_equal(comp(5), Pet.action.perm[5])


def test_quaternion_cayley():
    Q = quaternion8()
    inst = build_instance("cayley", Q, sorted({1, int(Q.inv[1]), 2, int(Q.inv[2])}))
    assert verify_left2right(inst).holds


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.45), st.floats(0.0, 0.3), st.floats(0.0, 1.0))
def test_extraction_stable_under_small_delta_changes(delta, low, high_gap):
    # two clusters: {0, 2, 4} near ||f+||^2 and the rest near 0, both clear of the band
    norm = 1.0
    hi = 1.0 - delta * high_gap * 0.5
    lo = delta * low * 0.5
    corr = CorrelationProfile.synthetic([1.0, lo, hi, lo, hi, 0.0], norm)
    H1, _ = extract_index_two(corr, cyclic(6), delta)
    H2, _ = extract_index_two(corr, cyclic(6), delta / 2) if hi >= 1 - delta / 2 and lo <= delta / 2 else (H1, None)
    assert H1 == H2 == frozenset({0, 2, 4})


def test_left2right_holds_on_cayley_corpus(corpus):
    assert all(verify_left2right(inst).holds for inst in corpus)

"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line."""

import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import CORPUS_TIMING
from lowergap.certify import CertifyOptions, certify_instance
from lowergap.corpus import five_cycle, four_cycle, odd_circulants, prism, triangle
from lowergap.errors import NotASubgroup
from lowergap.freiman import CorrelationProfile, correlation_profile, dichotomy_test, extract_index_two, verify_left2right
from lowergap.graphs import build_instance
from lowergap.groups import cyclic
from lowergap.instances import load_family_spec
from lowergap.invariants import edge_bipartiteness_exact, edge_cheeger_exact, vertex_cheeger_exact
from lowergap.scan import scan_family
from lowergap.serialize import serialize_report, serialize_scan
from lowergap.spectral import bottom_eigenfunction, spectrum

TOL = 1e-9


def test_criterion_1_oracle_spectra(acceptance_line):
    start = time.perf_counter()
    worst, count = 0.0, 0
    for inst in odd_circulants():
        n, S = inst.n, inst.connection_set
        closed = np.array([sum(math.cos(2 * math.pi * k * s / n) for s in S) for k in range(n)])
        for lam in spectrum(inst).eigenvalues:
            worst = max(worst, float(np.min(np.abs(closed - lam))))
        count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= TOL and elapsed < 10
    acceptance_line(1, ok, f"{count} odd circulants, worst eigenvalue error {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_2_main_bound_on_corpus(corpus_reports, acceptance_line):
    seconds = CORPUS_TIMING["seconds"]
    c1_bad = [i.label for i, r in corpus_reports if not (r.check("C1").status == "pass" and r.check("C1").margin > 0)]
    c2_applicable = [(i, r) for i, r in corpus_reports if r.check("C2").hypothesis_satisfied]
    c2_bad = [i.label for i, r in c2_applicable if r.check("C2").status != "pass"]
    ok = not c1_bad and not c2_bad and seconds < 60
    acceptance_line(2, ok, f"{len(corpus_reports)} instances: C1 failures {len(c1_bad)}, "
                           f"C2 failures {len(c2_bad)} of {len(c2_applicable)} applicable, {seconds:.1f} s")
    assert ok, (c1_bad[:5], c2_bad[:5])


def test_criterion_3_exact_spot_values(acceptance_line):
    K3, C5, C4 = triangle(), five_cycle(), four_cycle()
    got = {
        "beta_edge(K3)": (edge_bipartiteness_exact(K3), Fraction(1, 4)),
        "h_edge(K3)": (edge_cheeger_exact(K3), Fraction(1)),
        "h_vertex(K3)": (vertex_cheeger_exact(K3), Fraction(2)),
        "h_edge(C5)": (edge_cheeger_exact(C5), Fraction(1, 2)),
        "h_vertex(C5)": (vertex_cheeger_exact(C5), Fraction(1)),
        "beta_edge(C4)": (edge_bipartiteness_exact(C4), Fraction(0)),
        "beta_edge(C5)": (edge_bipartiteness_exact(C5), Fraction(1, 8)),
    }
    bad = {k: v for k, v in got.items() if v[0] != v[1] or not isinstance(v[0], Fraction)}
    acceptance_line(3, not bad, "exact values " + ", ".join(f"{k}={v[0]}" for k, v in got.items()))
    assert not bad


CHAIN_REASON = (
    "the stated bounds beta_edge <= (1+mu)/(2(1-kappa)) and beta_f <= (1-mu2) kappa/(2(1-kappa)) are false on "
    "odd cycles: the 5-cycle has beta_f = 1/5 > 0.13197 and the 7-cycle has beta_edge = 1/12 > 0.06719; "
    "the sandwich (check C4), "
    "kappa >= beta_edge/2 and the proved bound 2 beta_f <= 1+mu+(1-mu) sigma^2 hold everywhere"
)


@pytest.mark.xfail(strict=True, reason=CHAIN_REASON)
def test_criterion_4_cheeger_and_bipartiteness_chains(corpus_reports, acceptance_line):
    small = [(i, r) for i, r in corpus_reports if i.n <= 13]
    failures = {cid: [i.label for i, r in small if r.check(cid).status == "fail"] for cid in ("C4", "C5", "C7")}
    tight = certify_instance(triangle()).check("C4").parts[0]
    tight_ok = tight.lhs == Fraction(1, 2) and abs(float(tight.rhs) - 0.5) <= 1e-12
    ok = not any(failures.values()) and tight_ok
    counts = ", ".join(f"{cid} failures {len(v)}" for cid, v in failures.items())
    acceptance_line(4, ok, f"{len(small)} instances with n <= 13: {counts}; K3 sandwich tight: {tight_ok}"
                           + ("" if ok else f" (expected: {CHAIN_REASON})"))
    assert ok


def test_criterion_5_lemma_suite(corpus_reports, acceptance_line):
    extra = [build_instance("cayley", cyclic(2 * m), [0] + list(range(1, 2 * m, 2))) for m in (11, 21)]
    reports = list(corpus_reports) + [(i, certify_instance(i)) for i in extra]
    bad, worst, gated = [], math.inf, {"C9": 0, "C10": 0}
    for inst, r in reports:
        if not 0 < r.kappa < 1:
            continue
        for cid in ("C6", "C8", "C9", "C10", "C11", "C12"):
            c = r.check(cid)
            if cid in gated and c.hypothesis_satisfied:
                gated[cid] += 1
            if c.status == "vacuous" and cid not in gated and r.profile["conditioned"]:
                bad.append((inst.label, cid, "vacuous"))
            for p in c.parts:
                worst = min(worst, p.slack())
            if c.status == "fail":
                bad.append((inst.label, cid, c.note))
    ok = not bad and worst >= -TOL
    acceptance_line(5, ok, f"{len(reports)} instances; C9 applied on {gated['C9']}, C10 on {gated['C10']}; "
                           f"worst relative slack {worst:.3g}; failures {len(bad)}")
    assert ok, bad[:5]


def test_criterion_6_freiman_units(acceptance_line):
    two_cluster = CorrelationProfile.synthetic([3.0, 0, 3.0, 0, 3.0, 0], 3.0)
    H, check = extract_index_two(two_cluster, cyclic(6), 0.1)
    try:
        extract_index_two(CorrelationProfile.synthetic([1.0, 1.0, 0, 0, 0, 0], 1.0), cyclic(6), 0.1)
        raised = False
    except NotASubgroup:
        raised = True
    P = prism()
    prof = bottom_eigenfunction(P)
    corr = correlation_profile(prof, P.action)
    f = prof.f
    direct = sum(max(f[v], 0) * max(f[(v - 1) % 6], 0) for v in range(6)) / float(np.maximum(f, 0) @ np.maximum(f, 0))
    verdict = dichotomy_test(corr, 0.1)
    ok = (H == frozenset({0, 2, 4}) and check.ok and raised and verdict.witness == 1
          and abs(corr.ratio(1) - 2 / 3) <= TOL and abs(direct - 2 / 3) <= TOL)
    acceptance_line(6, ok, f"two-cluster H={sorted(H)} index {check.index}; {{0,1}} raises NotASubgroup: {raised}; "
                           f"prism witness {verdict.witness} ratio {corr.ratio(1):.12f} (direct sum {direct:.12f})")
    assert ok


def test_criterion_7_prism_end_to_end(acceptance_line):
    P = prism()
    l2r = verify_left2right(P)
    taus_are_identity = l2r.holds and np.array_equal(l2r.companions, P.action.perm)
    r = certify_instance(P)
    c15 = r.check("C15")
    rhs_ok = abs(float(c15.parts[0].rhs) - (2 / 3) / 2521) <= TOL if c15.parts else False
    lhs_ok = abs(float(c15.parts[0].lhs) - 1 / 3) <= TOL if c15.parts else False
    ok = (taus_are_identity and r.constants["nu"] == 1 and r.freiman.get("dichotomy_witness") is not None
          and c15.status == "pass" and c15.margin > 0.33 and rhs_ok and lhs_ok)
    acceptance_line(7, ok, f"Left2Right with rho_tau = tau: {taus_are_identity}; nu = {r.constants['nu']}; "
                           f"dichotomy witness {r.freiman.get('dichotomy_witness')}; C15 margin {c15.margin:.5f}")
    assert ok


def test_criterion_8_scale_free(corpus, acceptance_line):
    # C1 only needs the spectrum, so the exhaustive constants are skipped on the doubled copies
    opts = CertifyOptions(max_exact_bipartiteness=1, max_exact_cheeger=1)
    bad = []
    worst = 0.0
    for inst in corpus:
        base = spectrum(inst)
        twice = inst.with_doubled_connections()
        r = certify_instance(twice, opts)
        dev = max(abs(r.mu - base.mu), abs(r.mu2 - base.mu2))
        worst = max(worst, dev)
        if dev > TOL or r.d != 2 * inst.d or r.check("C1").status != "pass":
            bad.append(inst.label)
    ok = not bad
    acceptance_line(8, ok, f"{len(corpus)} doubled instances, worst mu/mu2 drift {worst:.2e}, failures {len(bad)}")
    assert ok, bad[:5]


def test_criterion_9_determinism(tmp_path, acceptance_line):
    same_reports = all(serialize_report(certify_instance(i), fmt) == serialize_report(certify_instance(i), fmt)
                       for i in (triangle(), prism()) for fmt in ("json", "csv"))
    path = tmp_path / "prism.json"
    path.write_text('{"kind": "cayley", "group": {"family": "cyclic", "n": 6}, "connection_set": [2, 3, 4]}')
    cli = [subprocess.run([sys.executable, "-m", "lowergap.cli", "analyze", str(path)], capture_output=True).stdout
           for _ in range(2)]
    spec = load_family_spec({"kind": "cayley", "family": "cyclic", "n_range": [3, 11, 2], "degree_max": 4})
    scans = {p: serialize_scan(scan_family(spec, parallel=p), "json") for p in (1, 2, 4)}
    ok = same_reports and cli[0] == cli[1] and len(cli[0]) > 0 and len(set(scans.values())) == 1
    acceptance_line(9, ok, f"analyze repeat identical: {same_reports and cli[0] == cli[1]}; "
                           f"scan identical across --parallel 1/2/4: {len(set(scans.values())) == 1}")
    assert ok

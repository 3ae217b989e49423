"""Family scans: enumerate Cayley-type instances, certify each, reduce to a summary.

Enumeration happens up front (cheap lists of connection sets) so the instance
cap is enforced before any spectral work. Certification runs in the calling
process or in a process pool; results come back in enumeration order either
way, so the output does not depend on the worker count.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Optional

from .certify import CertificateReport, CertifyOptions, c1_ratio, certify_instance
from .corpus import symmetric_subsets
from .errors import InstanceFormatError, LowerGapError, NotUndirected
from .graphs import build_instance
from .groups import FiniteGroup, builtin_group
from .instances import FamilySpec, family_automorphisms

DEFAULT_MAX_INSTANCES = 10_000


@dataclass(frozen=True)
class Candidate:
    kind: str
    family: str
    n: int
    S: tuple[int, ...]
    sigma: Optional[tuple[int, ...]] = None

    @property
    def label(self) -> str:
        text = f"{self.kind}({self.family}{'' if self.family == 'quaternion8' else self.n};S={list(self.S)}"
        if self.sigma is not None:
            text += f";sigma={list(self.sigma)}"
        return text + ")"


@dataclass(frozen=True)
class ScanRow:
    label: str
    kind: str
    group_order: int
    n: Optional[int] = None
    d: Optional[int] = None
    status: str = "certified"  # or "skipped"
    reason: str = ""
    mu: Optional[float] = None
    mu2: Optional[float] = None
    kappa: Optional[float] = None
    c1_ratio: Optional[float] = None
    overall: Optional[bool] = None
    passed: int = 0
    failed: int = 0
    vacuous: int = 0
    failed_checks: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScanSummary:
    rows: tuple[ScanRow, ...]
    skipped: dict = field(default_factory=dict)  # reason -> count

    @property
    def certified(self) -> list[ScanRow]:
        return [r for r in self.rows if r.status == "certified"]

    @property
    def failed_instances(self) -> list[ScanRow]:
        return [r for r in self.certified if not r.overall]

    @property
    def min_row(self) -> Optional[ScanRow]:
        rows = self.certified
        return min(rows, key=lambda r: (r.c1_ratio, r.label)) if rows else None

    @property
    def ok(self) -> bool:
        return not self.failed_instances


def _group(spec: FamilySpec, n: int) -> FiniteGroup:
    if spec.family == "quaternion8":
        return builtin_group("quaternion8")
    return builtin_group(spec.family, n)


def _connection_sets(spec: FamilySpec, G: FiniteGroup) -> Iterator[tuple[int, ...]]:
    if not isinstance(spec.connection_policy, str):
        yield from spec.connection_policy
        return
    if spec.kind == "cayley":
        for S in symmetric_subsets(G, spec.degree_max, include_identity=spec.allow_identity):
            yield tuple(S)
        return
    # other kinds: every subset; the builder rejects the directed ones
    elems = [g for g in range(G.order) if spec.allow_identity or g != G.identity]
    for k in range(1, spec.degree_max + 1):
        for S in combinations(elems, k):
            yield S


def enumerate_family(spec: FamilySpec, max_instances: int = DEFAULT_MAX_INSTANCES) -> list[Candidate]:
    """All candidates of the family in a fixed order; raises once the cap is exceeded."""
    out: list[Candidate] = []
    for n in spec.n_values:
        try:
            G = _group(spec, n)
        except LowerGapError as exc:
            raise InstanceFormatError(str(exc), "n_range") from exc
        for sigma in family_automorphisms(spec, G):
            for S in _connection_sets(spec, G):
                if any(not 0 <= s < G.order for s in S):
                    raise InstanceFormatError(f"element outside 0..{G.order - 1} for n={n}", "connection_policy")
                out.append(Candidate(spec.kind, spec.family, n, tuple(S), sigma))
                if len(out) > max_instances:
                    raise InstanceFormatError(
                        f"family has more than {max_instances} instances (raise --max-instances)", "max_instances"
                    )
    return out


def certify_candidate(cand: Candidate, options: Optional[CertifyOptions] = None) -> tuple[ScanRow, Optional[CertificateReport]]:
    G = _group(FamilySpec(cand.kind, cand.family, (cand.n,), 1), cand.n)
    base = dict(label=cand.label, kind=cand.kind, group_order=G.order)
    try:
        inst = build_instance(cand.kind, G, cand.S, cand.sigma, label=cand.label)
    except NotUndirected:
        return ScanRow(**base, status="skipped", reason="directed"), None
    except ValueError as exc:
        return ScanRow(**base, status="skipped", reason=str(exc)), None
    if not inst.flags.valid:
        return ScanRow(**base, n=inst.n, d=inst.d, status="skipped", reason=",".join(inst.flags.reasons)), None
    report = certify_instance(inst, options)
    statuses = Counter(c.status for c in report.checks)
    row = ScanRow(
        **base, n=report.n, d=report.d, mu=report.mu, mu2=report.mu2, kappa=report.kappa,
        c1_ratio=c1_ratio(report), overall=report.overall,
        passed=statuses["pass"], failed=statuses["fail"], vacuous=statuses["vacuous"],
        failed_checks=tuple(c.id for c in report.checks if c.status == "fail"),
    )
    return row, report


def _row_only(args) -> ScanRow:
    cand, options = args
    return certify_candidate(cand, options)[0]


def scan_family(
    spec: FamilySpec,
    options: Optional[CertifyOptions] = None,
    max_instances: int = DEFAULT_MAX_INSTANCES,
    parallel: int = 1,
) -> ScanSummary:
    """Certify every valid instance of the family; invalid ones are skipped with a reason."""
    cands = enumerate_family(spec, max_instances)
    jobs = [(c, options) for c in cands]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(_row_only, jobs, chunksize=max(1, len(jobs) // (4 * parallel))))
    else:
        rows = [_row_only(j) for j in jobs]
    skipped = Counter(r.reason for r in rows if r.status == "skipped")
    return ScanSummary(tuple(rows), dict(sorted(skipped.items())))

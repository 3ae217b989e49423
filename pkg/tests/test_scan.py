import csv
import io
import json

import pytest

from lowergap.errors import InstanceFormatError
from lowergap.instances import load_family_spec
from lowergap.scan import Candidate, enumerate_family, scan_family
from lowergap.serialize import SCAN_CSV_FIELDS, serialize_scan

ODD_CYCLES = {"kind": "cayley", "family": "cyclic", "n_range": [3, 9, 2], "degree_max": 2}


def test_enumeration_order_and_labels():
    cands = enumerate_family(load_family_spec(ODD_CYCLES))
    assert [c.n for c in cands] == [3, 5, 5, 7, 7, 7, 9, 9, 9, 9]
    assert cands[0] == Candidate("cayley", "cyclic", 3, (1, 2))
    assert cands[0].label == "cayley(cyclic3;S=[1, 2])"


def test_cap_enforced_before_certification():
    spec = load_family_spec({"kind": "cayley", "family": "cyclic", "n_range": [3, 15], "degree_max": 6})
    with pytest.raises(InstanceFormatError) as err:
        enumerate_family(spec, max_instances=20)
    assert err.value.field == "max_instances"


def test_scan_summary():
    summary = scan_family(load_family_spec(ODD_CYCLES))
    assert len(summary.rows) == 10
    assert summary.skipped == {"disconnected": 1}
    assert len(summary.certified) == 9
    # odd cycles beyond the triangle trip the stated beta bounds (see the counterexample tests)
    assert {r.label for r in summary.failed_instances} == {r.label for r in summary.certified if r.n > 3}
    assert summary.min_row.n == 9
    assert not summary.ok


def test_directed_candidates_are_skipped():
    spec = load_family_spec({"kind": "twisted_cayley", "family": "cyclic", "n_range": [5, 5], "degree_max": 1,
                             "automorphism_policy": "identity"})
    summary = scan_family(spec)
    assert summary.skipped.get("directed", 0) >= 1


def test_scan_outputs():
    summary = scan_family(load_family_spec(ODD_CYCLES))
    body = json.loads(serialize_scan(summary, "json"))
    assert body["summary"]["instances"] == 10 and body["summary"]["overall"] == "fail"
    assert body["rows"][0]["overall"] == "pass"
    rows = list(csv.DictReader(io.StringIO(serialize_scan(summary, "csv").decode())))
    assert tuple(rows[0].keys()) == SCAN_CSV_FIELDS
    assert rows[-1]["status"] == "summary" and rows[-1]["passed"] == "9"


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_parallel_scan_is_byte_identical(fmt):
    spec = load_family_spec({"kind": "cayley", "family": "dihedral", "n_range": [3, 5], "degree_max": 3})
    serial = serialize_scan(scan_family(spec, parallel=1), fmt)
    assert serialize_scan(scan_family(spec, parallel=3), fmt) == serial
    assert serialize_scan(scan_family(spec, parallel=1), fmt) == serial

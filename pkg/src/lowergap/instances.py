"""Instance files and family-scan specs (JSON).

Instance file::

    {"kind": "cayley", "group": {"family": "cyclic", "n": 6}, "connection_set": [2, 3, 4]}
    {"kind": "twisted_cayley", "group": {...}, "connection_set": [...], "automorphism": [...]}
    {"kind": "vertex_transitive", "n": 10, "rho": [[...], ...],
     "action": {"generators": [[...], ...]}}            # or {"group": {...}, "perms": [[...], ...]}

Groups are ``{"family": name, "n": k}``, ``{"family": "quaternion8"}``,
``{"family": "direct_product", "factors": [g1, g2]}`` or ``{"generators": [[...], ...]}``.

Family spec::

    {"kind": "cayley", "family": "cyclic", "n_range": [3, 15, 2], "degree_max": 6,
     "connection_policy": "all_symmetric", "automorphism_policy": "identity"}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from pathlib import Path
from typing import Any, Optional, Union

from .errors import ClosureExceedsLimit, InstanceFormatError, InvalidPermutation, UnsupportedParameter
from .graphs import CAYLEY_KINDS, KINDS, SpectralInstance, build_instance, vertex_transitive_instance
from .groups import (
    MAX_GROUP_ORDER,
    FiniteGroup,
    GroupAction,
    builtin_group,
    direct_product,
    group_from_permutation_generators,
    verify_automorphism,
)

FAMILIES_WITH_N = ("cyclic", "dihedral", "symmetric")
AUTOMORPHISM_POLICIES = ("identity", "inversion", "units", "explicit")


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise InstanceFormatError("missing required field", f"{where}.{key}" if where else key)
    return obj[key]


def _int_list(x: Any, field: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise InstanceFormatError("expected a list of integers", field)
    return list(x)


def _int_lists(x: Any, field: str) -> list[list[int]]:
    if not isinstance(x, list):
        raise InstanceFormatError("expected a list of integer lists", field)
    return [_int_list(v, f"{field}[{i}]") for i, v in enumerate(x)]


def parse_group(spec: Any, field: str = "group", max_order: int = MAX_GROUP_ORDER) -> tuple[FiniteGroup, Optional[GroupAction]]:
    """Group (and, for generator specs, its natural action) from a group spec."""
    if not isinstance(spec, dict):
        raise InstanceFormatError("expected an object", field)
    if "generators" in spec:
        gens = _int_lists(spec["generators"], f"{field}.generators")
        degree = spec.get("degree")
        if not gens and not isinstance(degree, int):
            raise InstanceFormatError("an empty generator list needs an integer 'degree'", f"{field}.degree")
        try:
            return group_from_permutation_generators(gens, max_order=max_order, degree=degree)
        except (InvalidPermutation, ClosureExceedsLimit, ValueError) as exc:
            raise InstanceFormatError(str(exc), f"{field}.generators") from exc
    family = _require(spec, "family", field)
    try:
        if family == "direct_product":
            factors = _require(spec, "factors", field)
            if not isinstance(factors, list) or len(factors) != 2:
                raise InstanceFormatError("direct_product takes exactly two factors", f"{field}.factors")
            G1, _ = parse_group(factors[0], f"{field}.factors[0]", max_order)
            G2, _ = parse_group(factors[1], f"{field}.factors[1]", max_order)
            G = direct_product(G1, G2)
        elif family == "quaternion8":
            G = builtin_group("quaternion8")
        elif family in FAMILIES_WITH_N:
            n = _require(spec, "n", field)
            if not isinstance(n, int) or isinstance(n, bool):
                raise InstanceFormatError("expected an integer", f"{field}.n")
            G = builtin_group(family, n, max_order=max_order) if family == "symmetric" else builtin_group(family, n)
        else:
            raise InstanceFormatError(f"unknown group family {family!r}", f"{field}.family")
    except (UnsupportedParameter, ClosureExceedsLimit) as exc:
        raise InstanceFormatError(str(exc), field) from exc
    if G.order > max_order:
        raise InstanceFormatError(f"group order {G.order} exceeds --max-group-order {max_order}", field)
    return G, None


def parse_instance(data: Any, max_group_order: int = MAX_GROUP_ORDER) -> SpectralInstance:
    """Build a validated instance from a parsed instance file.

    Format problems raise InstanceFormatError; a well-formed but directed graph
    raises NotUndirected from the builder.
    """
    if not isinstance(data, dict):
        raise InstanceFormatError("instance file must hold a JSON object", "")
    kind = _require(data, "kind", "")
    if kind not in KINDS:
        raise InstanceFormatError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", "kind")
    label = data.get("label")
    if kind == "vertex_transitive":
        n = _require(data, "n", "")
        if not isinstance(n, int) or n < 1:
            raise InstanceFormatError("expected a positive integer", "n")
        rho = _int_lists(_require(data, "rho", ""), "rho")
        if not rho:
            raise InstanceFormatError("at least one permutation is required", "rho")
        for i, r in enumerate(rho):
            if sorted(r) != list(range(n)):
                raise InstanceFormatError(f"not a permutation of 0..{n - 1}", f"rho[{i}]")
        action = parse_action(_require(data, "action", ""), n, max_group_order)
        return vertex_transitive_instance(n, rho, action, label or "vertex_transitive")
    G, _ = parse_group(_require(data, "group", ""), "group", max_group_order)
    S = _int_list(_require(data, "connection_set", ""), "connection_set")
    if not S:
        raise InstanceFormatError("must be non-empty", "connection_set")
    if any(not 0 <= s < G.order for s in S):
        raise InstanceFormatError(f"elements must lie in 0..{G.order - 1}", "connection_set")
    sigma = data.get("automorphism")
    if kind in ("twisted_cayley", "twisted_cayley_sum"):
        if sigma is None:
            raise InstanceFormatError(f"{kind} needs an automorphism", "automorphism")
        sigma = _int_list(sigma, "automorphism")
        if sorted(sigma) != list(range(G.order)):
            raise InstanceFormatError(f"not a permutation of 0..{G.order - 1}", "automorphism")
        if not verify_automorphism(G, sigma):
            raise InstanceFormatError("not a group automorphism", "automorphism")
    elif sigma is not None:
        raise InstanceFormatError(f"{kind} takes no automorphism", "automorphism")
    return build_instance(kind, G, S, sigma, label=label)


def parse_action(spec: Any, n: int, max_group_order: int = MAX_GROUP_ORDER) -> GroupAction:
    if not isinstance(spec, dict):
        raise InstanceFormatError("expected an object", "action")
    if "generators" in spec:
        gens = _int_lists(spec["generators"], "action.generators")
        for i, g in enumerate(gens):
            if sorted(g) != list(range(n)):
                raise InstanceFormatError(f"not a permutation of 0..{n - 1}", f"action.generators[{i}]")
        try:
            _, action = group_from_permutation_generators(gens, max_order=max_group_order, degree=n)
        except ClosureExceedsLimit as exc:
            raise InstanceFormatError(str(exc), "action.generators") from exc
        return action
    G, _ = parse_group(_require(spec, "group", "action"), "action.group", max_group_order)
    perms = _int_lists(_require(spec, "perms", "action"), "action.perms")
    if len(perms) != G.order:
        raise InstanceFormatError(f"expected {G.order} permutations, one per group element", "action.perms")
    for i, p in enumerate(perms):
        if sorted(p) != list(range(n)):
            raise InstanceFormatError(f"not a permutation of 0..{n - 1}", f"action.perms[{i}]")
    try:
        return GroupAction(G, perms)
    except ValueError as exc:
        raise InstanceFormatError(str(exc), "action.perms") from exc


def _load_json(source: Union[str, Path, bytes, dict]) -> Any:
    if isinstance(source, dict):
        return source
    if isinstance(source, bytes):
        text = source.decode()
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InstanceFormatError(f"cannot read file: {exc.strerror}", str(source)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", "") from exc


def load_instance(source, max_group_order: int = MAX_GROUP_ORDER) -> SpectralInstance:
    return parse_instance(_load_json(source), max_group_order)


# ---------------------------------------------------------------------------
# family specs


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    family: str
    n_values: tuple[int, ...]
    degree_max: int
    connection_policy: Union[str, tuple[tuple[int, ...], ...]] = "all_symmetric"
    automorphism_policy: str = "identity"
    automorphisms: tuple[tuple[int, ...], ...] = ()
    allow_identity: bool = False  # include the identity (a loop) in enumerated connection sets


def parse_family_spec(data: Any) -> FamilySpec:
    if not isinstance(data, dict):
        raise InstanceFormatError("family spec must hold a JSON object", "")
    kind = _require(data, "kind", "")
    if kind not in CAYLEY_KINDS:
        raise InstanceFormatError(f"scans support {', '.join(CAYLEY_KINDS)}", "kind")
    family = _require(data, "family", "")
    if family not in FAMILIES_WITH_N + ("quaternion8",):
        raise InstanceFormatError(f"unknown group family {family!r}", "family")
    if family == "quaternion8":
        n_values: tuple[int, ...] = (8,)
    else:
        rng = _int_list(_require(data, "n_range", ""), "n_range")
        if len(rng) not in (2, 3):
            raise InstanceFormatError("expected [lo, hi] or [lo, hi, step]", "n_range")
        step = rng[2] if len(rng) == 3 else 1
        if step < 1:
            raise InstanceFormatError("step must be positive", "n_range")
        n_values = tuple(range(rng[0], rng[1] + 1, step))
    degree_max = _require(data, "degree_max", "")
    if not isinstance(degree_max, int) or degree_max < 1:
        raise InstanceFormatError("expected a positive integer", "degree_max")
    policy = data.get("connection_policy", "all_symmetric")
    if isinstance(policy, list):
        policy = tuple(tuple(S) for S in _int_lists(policy, "connection_policy"))
    elif policy != "all_symmetric":
        raise InstanceFormatError("expected 'all_symmetric' or a list of connection sets", "connection_policy")
    auto = data.get("automorphism_policy", "identity")
    if auto not in AUTOMORPHISM_POLICIES:
        raise InstanceFormatError(f"expected one of {', '.join(AUTOMORPHISM_POLICIES)}", "automorphism_policy")
    autos: tuple[tuple[int, ...], ...] = ()
    if auto == "explicit":
        autos = tuple(tuple(a) for a in _int_lists(_require(data, "automorphisms", ""), "automorphisms"))
    allow_identity = data.get("allow_identity", False)
    if not isinstance(allow_identity, bool):
        raise InstanceFormatError("expected true or false", "allow_identity")
    return FamilySpec(kind, family, n_values, degree_max, policy, auto, autos, allow_identity)


def load_family_spec(source) -> FamilySpec:
    return parse_family_spec(_load_json(source))


def family_automorphisms(spec: FamilySpec, G: FiniteGroup) -> list[Optional[tuple[int, ...]]]:
    """Twists to apply for a twisted kind; [None] for untwisted kinds."""
    if spec.kind not in ("twisted_cayley", "twisted_cayley_sum"):
        return [None]
    order = G.order
    if spec.automorphism_policy == "identity":
        return [tuple(range(order))]
    if spec.automorphism_policy == "inversion":
        return [tuple(int(x) for x in G.inv)]
    if spec.automorphism_policy == "units":
        if spec.family != "cyclic":
            raise InstanceFormatError("the 'units' policy applies to cyclic groups only", "automorphism_policy")
        return [tuple((k * x) % order for x in range(order)) for k in range(1, max(order, 2)) if gcd(k, order) == 1]
    return [a for a in spec.automorphisms if len(a) == order]

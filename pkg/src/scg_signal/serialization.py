"""JSON documents for instances and schemes.

Numbers are written as strings: exact decimals where the denominator allows
it, ``"p/q"`` otherwise, so rational fixtures survive a round trip
unchanged.  Output is canonical (fixed key order, two-space indent, trailing
newline), so ``write(read(doc))`` is byte-stable.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

from .core import Instance, all_exact, as_number, validate_instance
from .errors import InstanceError, ParseError, SchemaError
from .private import ExplicitScheme, ReducedForm
from .public import PublicScheme, scheme_from_emissions

POSTERIOR_TOL = 1e-9


def format_number(v) -> str:
    if isinstance(v, float):
        return repr(v)
    v = Fraction(v)
    den, k2, k5 = v.denominator, 0, 0
    while den % 2 == 0:
        den //= 2
        k2 += 1
    while den % 5 == 0:
        den //= 5
        k5 += 1
    if den != 1:
        return f"{v.numerator}/{v.denominator}"
    k = max(k2, k5)
    scaled = v * 10**k
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(k + 1, "0")
    return sign + (digits if k == 0 else f"{digits[:-k]}.{digits[-k:]}")


def parse_number(raw, where: str):
    if isinstance(raw, bool) or not isinstance(raw, (str, int, float)):
        raise SchemaError(f"{where}: expected a number or numeric string, got {raw!r}")
    try:
        return as_number(raw)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SchemaError(f"{where}: cannot parse {raw!r} as a number") from exc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def loads(text: str, source: str = "<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _require(doc, key, where, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


# -- instances -----------------------------------------------------------------

def instance_to_doc(inst: Instance) -> dict:
    return {
        "name": inst.name,
        "num_agents": inst.num_agents,
        "resources": list(inst.resources),
        "action_sets": [list(a) for a in inst.action_sets],
        "states": [
            {
                "name": inst.state_names[t],
                "prior": format_number(inst.prior[t]),
                "costs": {
                    str(inst.resources[r]): [format_number(v) for v in inst.costs[t][r]]
                    for r in range(inst.num_resources)
                },
            }
            for t in range(inst.num_states)
        ],
    }


def instance_from_doc(doc) -> Instance:
    if not isinstance(doc, dict):
        raise SchemaError("instance document must be an object")
    N = _require(doc, "num_agents", "instance", int)
    resources = [str(r) for r in _require(doc, "resources", "instance", list)]
    action_sets = _require(doc, "action_sets", "instance", list)
    states = _require(doc, "states", "instance", list)
    for i, acts in enumerate(action_sets):
        if not isinstance(acts, list) or not all(isinstance(r, int) and not isinstance(r, bool) for r in acts):
            raise SchemaError(f"action_sets[{i}]: expected a list of resource indices")
    names, prior, costs = [], [], []
    for t, st in enumerate(states):
        where = f"states[{t}]"
        names.append(str(_require(st, "name", where)))
        prior.append(parse_number(_require(st, "prior", where), f"{where}.prior"))
        table = _require(st, "costs", where, dict)
        rows = []
        for r in resources:
            row = table.get(r)
            if not isinstance(row, list):
                raise SchemaError(f"{where}.costs: missing cost array for resource {r!r}")
            rows.append([parse_number(v, f"{where}.costs[{r}][{k}]") for k, v in enumerate(row)])
        extra = set(table) - set(resources)
        if extra:
            raise SchemaError(f"{where}.costs: unknown resources {sorted(extra)}")
        costs.append(rows)
    try:
        return validate_instance(Instance(N, resources, action_sets, names, prior, costs,
                                          str(doc.get("name", ""))))
    except InstanceError as exc:
        raise SchemaError(str(exc)) from exc


def instance_digest(inst: Instance) -> str:
    return hashlib.sha256(dumps(instance_to_doc(inst)).encode()).hexdigest()[:16]


def read_instance(path) -> Instance:
    path = Path(path)
    return instance_from_doc(loads(path.read_text(encoding="utf-8"), str(path)))


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps(instance_to_doc(inst)), encoding="utf-8")


# -- schemes -------------------------------------------------------------------

def _arithmetic(values) -> str:
    return "exact" if all_exact(values) else "float"


def _value_parser(doc):
    """Parser for scheme probabilities; float documents stay in floats so
    solver noise is not mistaken for exact data."""
    mode = doc.get("arithmetic", "exact")
    if mode not in ("exact", "float"):
        raise SchemaError(f"scheme.arithmetic: expected 'exact' or 'float', got {mode!r}")
    if mode == "exact":
        return parse_number
    return lambda raw, where: float(parse_number(raw, where))


def public_scheme_to_doc(inst: Instance, scheme: PublicScheme, value=None) -> dict:
    values = [v for sig in scheme.signals for v in sig.emission]
    doc = {"kind": "public", "instance": instance_digest(inst), "arithmetic": _arithmetic(values)}
    if value is not None:
        doc["value"] = format_number(value)
    doc["signals"] = [
        {
            "emission": {inst.state_names[t]: format_number(s.emission[t]) for t in range(inst.num_states)},
            "posterior": {inst.state_names[t]: format_number(s.posterior[t]) for t in range(inst.num_states)},
            "recommended_config": list(s.config),
            "recommended_assignment": list(s.assignment),
        }
        for s in scheme.signals
    ]
    return doc


def private_scheme_to_doc(inst: Instance, x: ReducedForm, explicit: ExplicitScheme = None,
                          value=None) -> dict:
    doc = {"kind": "private", "instance": instance_digest(inst),
           "arithmetic": _arithmetic(v for _, v in x.items())}
    if value is not None:
        doc["value"] = format_number(value)
    doc["reduced_form"] = [
        [t, list(n), i, r, format_number(v)] for (t, n, i, r), v in sorted(x.items())
    ]
    if explicit is not None:
        doc["explicit"] = [
            {"state": t, "profile": list(a), "prob": format_number(p)}
            for t, support in enumerate(explicit.per_state) for a, p in support
        ]
    return doc


def public_scheme_from_doc(inst: Instance, doc) -> PublicScheme:
    parse = _value_parser(doc)
    signals = _require(doc, "signals", "scheme", list)
    emissions, recs, posts = [], [], []
    for k, sig in enumerate(signals):
        where = f"signals[{k}]"
        em = _require(sig, "emission", where, dict)
        post = _require(sig, "posterior", where, dict)
        emissions.append(tuple(
            parse(em.get(name, "0"), f"{where}.emission[{name}]") for name in inst.state_names
        ))
        posts.append(tuple(
            parse(post.get(name, "0"), f"{where}.posterior[{name}]") for name in inst.state_names
        ))
        config = sig.get("recommended_config")
        assignment = sig.get("recommended_assignment")
        recs.append((tuple(config), tuple(assignment)) if config is not None and assignment is not None else None)
    scheme = scheme_from_emissions(inst, emissions, recs)
    if len(scheme.signals) != len(signals):
        raise SchemaError("scheme contains a signal that is never sent")
    for k, (s, post) in enumerate(zip(scheme.signals, posts)):
        for t, (a, b) in enumerate(zip(s.posterior, post)):
            if abs(a - b) > POSTERIOR_TOL:
                raise SchemaError(f"signals[{k}].posterior[{inst.state_names[t]}] disagrees with the emissions")
    return scheme


def private_scheme_from_doc(inst: Instance, doc):
    """Returns ``(ReducedForm, ExplicitScheme or None)``."""
    parse = _value_parser(doc)
    rows = _require(doc, "reduced_form", "scheme", list)
    entries = {}
    for k, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 5:
            raise SchemaError(f"reduced_form[{k}]: expected [state, config, agent, resource, value]")
        t, n, i, r, v = row
        entries[int(t), tuple(int(m) for m in n), int(i), int(r)] = parse(v, f"reduced_form[{k}][4]")
    explicit = None
    if "explicit" in doc:
        per_state = [[] for _ in range(inst.num_states)]
        for k, item in enumerate(doc["explicit"]):
            where = f"explicit[{k}]"
            t = _require(item, "state", where, int)
            if not 0 <= t < inst.num_states:
                raise SchemaError(f"{where}.state: index {t} out of range")
            per_state[t].append((tuple(_require(item, "profile", where, list)),
                                 parse(_require(item, "prob", where), f"{where}.prob")))
        explicit = ExplicitScheme(per_state)
    return ReducedForm(entries), explicit


def read_scheme(inst: Instance, path):
    """Load a scheme document; returns ``("public", PublicScheme)`` or
    ``("private", (ReducedForm, ExplicitScheme | None))``."""
    path = Path(path)
    doc = loads(path.read_text(encoding="utf-8"), str(path))
    kind = _require(doc, "kind", "scheme", str)
    if kind == "public":
        return kind, public_scheme_from_doc(inst, doc)
    if kind == "private":
        return kind, private_scheme_from_doc(inst, doc)
    raise SchemaError(f"scheme.kind: unknown kind {kind!r}")


def write_scheme(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")

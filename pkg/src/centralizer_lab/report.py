"""Scenario configs, dispatch to the pipelines, and deterministic reports."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema
import yaml

from . import __version__
from .automorphisms import LetterMap, conjugations, exact_sequence_report, translations
from .checks import Check, Status, check, overall, plain
from .constructions import (
    ComponentSystem,
    Horizons,
    build_block_hierarchy,
    build_cyclic_extension_system,
    build_direct_product,
    build_product_normalizer,
    build_profinite_realization,
    hierarchy_checks,
    run_sadic_embedding,
    verify_product_relations,
)
from .groups import GroupAction, GroupError, build_action, build_group, build_quotient_tower, symmetric_generators
from .io import read_letter_maps
from .oracle import complexity_profile, oracle_language
from .subshift import (
    AlphabetMetric,
    BudgetExceeded,
    LanguageError,
    SubstitutionSequence,
    generate_language,
)

SCHEMA_TAG = "centralizer-lab/report/v1"
KINDS = ("sadic-embedding", "block-hierarchy", "product-normalizer", "profinite", "direct-product", "oracle-compare")

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3

_pos = {"type": "integer", "minimum": 1}
_group = {"anyOf": [{"type": "string"}, {"type": "object"}]}
_action = {"anyOf": [{"type": "string"}, {"type": "object", "properties": {"kind": {"type": "string"}}}]}
_schedule = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
}
_auts = {
    "anyOf": [
        {"enum": ["translations", "left-translations", "right-translations", "conjugations", "translations+conjugations"]},
        {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
        {"type": "object", "properties": {"file": {"type": "string"}}, "required": ["file"]},
    ]
}
_horizons = {
    "type": "object",
    "properties": {k: _pos for k in ("L", "K", "H", "p_max", "independence_L", "independence_K")},
    "additionalProperties": False,
}
_system = {
    "type": "object",
    "properties": {
        "group": _group,
        "action": _action,
        "generators": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "schedule": _schedule,
        "automorphisms": _auts,
    },
    "required": ["group"],
}

SCHEMA: dict = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "seed": {"type": "integer"},
        "output": {"type": "string"},
        "budget": _pos,
        "group": _group,
        "action": _action,
        "tower": {"anyOf": [{"type": "array"}, {"type": "object"}]},
        "depth": _pos,
        "generators": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "schedule": _schedule,
        "automorphisms": _auts,
        "normalizer_candidates": _auts,
        "horizons": _horizons,
        "oracle": {"type": "boolean"},
        "levels": _pos,
        "markers": {"type": "object"},
        "density": {"type": "object"},
        "metric": {"enum": ["discrete", "tower"]},
        "k_cap": _pos,
        "enumeration_cap": _pos,
        "sample": _pos,
        "modulus": {"type": "integer", "minimum": 2},
        "base_component": {"type": "integer", "minimum": 0},
        "state_cap": _pos,
        "components": {"type": "array", "minItems": 2, "maxItems": 2, "items": _system},
        "L": _pos,
        "K": {"type": "integer", "minimum": 0},
        "seeds": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    },
    "additionalProperties": False,
}

_REQUIRED = {
    "sadic-embedding": ("group",),
    "block-hierarchy": ("group", "levels"),
    "product-normalizer": ("group", "modulus"),
    "profinite": ("tower", "depth"),
    "direct-product": ("components",),
    "oracle-compare": ("group", "L", "K"),
}


class ConfigError(ValueError):
    """Schema violation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ScenarioConfig:
    kind: str
    body: dict
    seed: int | None = None
    output: str | None = None

    @property
    def sampled(self) -> bool:
        return "sample" in self.body

    def echo(self) -> dict:
        return plain({**self.body, "kind": self.kind, "seed": self.seed})


def _path(parts) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in parts)


def validate_config(raw: Any, seed: int | None = None, output: str | None = None) -> ScenarioConfig:
    """Schema check plus the cross-field rules; CLI overrides take precedence."""
    if not isinstance(raw, dict):
        raise ConfigError("$", "config must be a mapping")
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(_path(err.absolute_path), err.message)
    body = dict(raw)
    kind = body.pop("kind")
    for key in _REQUIRED[kind]:
        if key not in body:
            raise ConfigError(f"$.{key}", f"required for kind {kind!r}")
    seed = seed if seed is not None else body.pop("seed", None)
    body.pop("seed", None)
    output = output or body.pop("output", None)
    body.pop("output", None)
    if "sample" in body and seed is None:
        raise ConfigError("$.seed", "a seed is required when sampling is enabled")
    for key in ("markers", "density"):
        for lvl in body.get(key, {}):
            if not str(lvl).isdigit() or int(lvl) < 2:
                raise ConfigError(f"$.{key}.{lvl}", "level keys must be integers >= 2")
    for lvl, eps in body.get("density", {}).items():
        try:
            value = Fraction(str(eps))
        except ValueError:
            raise ConfigError(f"$.density.{lvl}", f"not a rational number: {eps!r}") from None
        if not 0 < value <= 1:
            raise ConfigError(f"$.density.{lvl}", "density must lie in (0, 1]")
    return ScenarioConfig(kind, body, seed, output)


def load_config(path: str | Path, seed: int | None = None, output: str | None = None) -> ScenarioConfig:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError("$", f"cannot read config: {exc}") from exc
    return validate_config(raw, seed, output)


@dataclass
class Report:
    scenario: dict
    checks: list[Check]
    info: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def status(self) -> Status:
        return overall(self.checks)

    @property
    def exit_code(self) -> int:
        return {Status.PASS: EXIT_PASS, Status.FAIL: EXIT_FAIL, Status.INCONCLUSIVE: EXIT_INCONCLUSIVE}[self.status]

    def deterministic(self) -> dict:
        return {
            "schema": SCHEMA_TAG,
            "version": __version__,
            "scenario": self.scenario,
            "status": self.status.value,
            "checks": [c.as_dict() for c in self.checks],
            "info": plain(self.info),
        }

    def digest(self) -> str:
        blob = json.dumps(self.deterministic(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_json(self, timings: bool = True) -> str:
        doc = {**self.deterministic(), "digest": self.digest()}
        if timings:
            doc["timings"] = self.timings
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def summary(self) -> str:
        lines = [f"{self.scenario.get('kind')}: {self.status.value.upper()}"]
        for c in self.checks:
            extra = "" if c.passed else f"  witness={json.dumps(plain(c.witness), sort_keys=True)}"
            lines.append(f"  [{c.status.value:>12}] {c.name}{extra}")
        return "\n".join(lines)


def action_from_config(spec: dict) -> GroupAction:
    grp = build_group(spec["group"])
    return build_action(grp, spec.get("action", "left-translation"))


def schedule_from_config(spec: dict, action: GroupAction) -> list[tuple[int, ...]]:
    if "schedule" in spec:
        return [tuple(g) for g in spec["schedule"]]
    grp = action.group
    steps = spec.get("generators") or grp.generating_set()
    return [symmetric_generators(grp, steps)]


def _automorphisms_of(spec, action: GroupAction, key: str = "automorphisms") -> list[LetterMap]:
    value = spec.get(key, "translations")
    grp = action.group
    if isinstance(value, dict):
        return read_letter_maps(value["file"])
    if isinstance(value, list):
        return [LetterMap(tuple(v), f"h{i}") for i, v in enumerate(value)]
    if value == "translations":
        # the maps commuting with left translation are the right translations
        value = "left-translations" if grp.is_abelian else "right-translations"
    if value == "left-translations":
        return translations(grp, "left")
    if value == "right-translations":
        return translations(grp, "right")
    if value == "conjugations":
        return conjugations(grp)
    return translations(grp, "right") + conjugations(grp)


def _horizons_of(spec: dict, default: Horizons = Horizons()) -> Horizons:
    return Horizons(**{**default.__dict__, **spec.get("horizons", {})})


def _oracle_checks(seq, max_len: int, depth: int, seeds, budget) -> list[Check]:
    mism, agreed, skipped = None, 0, []
    for a in seeds:
        try:
            ref = oracle_language(seq, a, max_len, depth, budget)
        except BudgetExceeded as exc:
            skipped.append({"seed": a, "reason": str(exc)})
            continue
        got = generate_language(seq, a, max_len, depth, budget)
        if got != ref:
            ell = next(e for e in range(1, max_len + 1) if got.stratum(e) != ref.stratum(e))
            diff = sorted(got.stratum(ell) ^ ref.stratum(ell))
            mism = mism or {"seed": a, "length": ell, "word": diff[0]}
        else:
            agreed += 1
    out = []
    if mism:
        out.append(check("oracle_agreement", False, mism, agreed=agreed, L=max_len, K=depth))
    elif skipped:
        out.append(Check("oracle_agreement", Status.INCONCLUSIVE, skipped, {"agreed": agreed, "L": max_len, "K": depth}))
    else:
        out.append(check("oracle_agreement", True, agreed=agreed, L=max_len, K=depth))
    return out


def _run_sadic(cfg: ScenarioConfig) -> tuple[list[Check], dict]:
    b = cfg.body
    action = action_from_config(b)
    schedule = schedule_from_config(b, action)
    auts = _automorphisms_of(b, action)
    hz = _horizons_of(b)
    rep = run_sadic_embedding(action, schedule, auts, hz, b.get("budget"))
    checks, info = rep.checks, dict(rep.info)
    info["automorphisms"] = [p.label for p in auts]
    if b.get("oracle", True) and all(c.name != "substitution" or c.passed for c in checks):
        seq = SubstitutionSequence.from_action(action, schedule)
        checks += _oracle_checks(seq, hz.L, hz.K, range(action.alphabet_size), b.get("budget"))
    if "normalizer_candidates" in b:
        es = exact_sequence_report(_automorphisms_of(b, action, "normalizer_candidates"), action)
        checks.append(
            check(
                "exact_sequence",
                es.homomorphism_ok and es.kernel_matches_commutant,
                es.homomorphism_witness,
                reason="kernel differs from the commuting maps",
                kernel=es.kernel,
                image_order=es.image_order,
            )
        )
        info["alpha_image"] = [list(a) for a in es.image]
    return checks, info


def _run_hierarchy(cfg: ScenarioConfig) -> tuple[list[Check], dict]:
    b = cfg.body
    action = action_from_config(b)
    markers = {int(k): [tuple(w) for w in v] for k, v in b.get("markers", {}).items()} or None
    density = {int(k): Fraction(str(v)) for k, v in b.get("density", {}).items()} or None
    metric = AlphabetMetric(b.get("metric", "discrete"))
    kw = {k: b[k] for k in ("k_cap", "enumeration_cap") if k in b}
    h = build_block_hierarchy(action, b["levels"], markers, density, metric=metric, **kw)
    r = hierarchy_checks(h, b.get("sample"), cfg.seed)
    fw = {g: list(w) for g, w in r.faithfulness_witnesses.items()}
    checks = [
        check("lengths", r.lengths_ok, _first(r.failures, "lengths"), lengths=[lv.length for lv in h.levels]),
        check("nesting", r.nesting_ok, _first(r.failures, "nesting")),
        check("invariance", r.invariance_ok, _first(r.failures, "invariance"), checked=r.invariance_checked),
        check(
            "claim",
            r.claim_ok,
            _first(r.failures, "claim"),
            checked=r.claim_checked,
            max_distance=r.claim_max_distance,
            exact_hits=r.claim_exact_hits,
        ),
        check("faithfulness", r.faithful_ok, _first(r.failures, "faithful"), witnesses=len(fw)),
    ]
    info = {
        "levels": [
            {"n": lv.n, "length": lv.length, "k": lv.k, "count": lv.count, "density": lv.density, "enumerated": lv.enumerated}
            for lv in h.levels
        ],
        "faithfulness_witnesses": fw,
        "sampled": r.sampled,
        "seed": r.seed,
    }
    return checks, info


def _first(failures, tag):
    return next((f for f in failures if f and tag in f[0]), None)


def _run_product(cfg: ScenarioConfig) -> tuple[list[Check], dict]:
    b = cfg.body
    grp = build_group(b["group"])
    system = build_cyclic_extension_system(grp, b["modulus"])
    comps = system.components()
    checks = [
        check("f_commutes_with_T", not system.commutation_failures(), system.commutation_failures()[:1], points=system.size),
    ]
    kw = {"state_cap": b["state_cap"]} if "state_cap" in b else {}
    ps = build_product_normalizer(system, b.get("base_component", 0), sample=b.get("sample"), seed=cfg.seed, **kw)
    r = verify_product_relations(ps)
    checks += [
        check("relation", r.relation_ok, r.witness.get("relation"), instances=r.instances, groups=r.groups, vectors=r.vectors, states=r.states),
        check("T_tilde_homomorphism", r.hom_ok, r.witness.get("homomorphism")),
        check("T_tilde_injective", r.injective, r.witness.get("injective")),
        check("alpha_multiplicative", r.alpha_hom_ok, r.witness.get("alpha")),
        check("S_free_in_window", r.free_ok, r.witness.get("free"), instances=r.free_instances),
    ]
    info = {
        "points": system.size,
        "components": len(comps),
        "index_set": list(ps.reps),
        "stabilizer": sorted(ps.stabilizer),
        "sigma": [list(s) for s in ps.sigma],
        "sampled": ps.sampled,
        "seed": ps.seed,
    }
    return checks, info


def _run_profinite(cfg: ScenarioConfig) -> tuple[list[Check], dict]:
    b = cfg.body
    tower = build_quotient_tower(b["tower"])
    hz = _horizons_of(b) if "horizons" in b else None
    rep = build_profinite_realization(tower, b["depth"], hz)
    return rep.checks, rep.info


def _component(spec: dict) -> ComponentSystem:
    action = action_from_config(spec)
    return ComponentSystem(action, schedule_from_config(spec, action)[0], _automorphisms_of(spec, action))


def _run_direct_product(cfg: ScenarioConfig) -> tuple[list[Check], dict]:
    b = cfg.body
    a, c = (_component(s) for s in b["components"])
    kw = {"horizons": _horizons_of(b, Horizons(L=4, K=3, H=4, p_max=2))} if "horizons" in b else {}
    rep = build_direct_product(a, c, **kw)
    return rep.checks, rep.info


def _run_oracle_compare(cfg: ScenarioConfig) -> tuple[list[Check], dict]:
    b = cfg.body
    action = action_from_config(b)
    seq = SubstitutionSequence.from_action(action, schedule_from_config(b, action))
    seeds = b.get("seeds", list(range(action.alphabet_size)))
    checks = _oracle_checks(seq, b["L"], b["K"], seeds, b.get("budget"))
    profiles, drops = {}, {}
    for a in seeds:
        prof = complexity_profile(generate_language(seq, a, b["L"], b["K"], b.get("budget")))
        profiles[a] = list(prof.counts)
        if not prof.nondecreasing:
            drops[a] = prof.note()
    checks.append(
        Check("complexity_monotone", Status.PASS if not drops else Status.INCONCLUSIVE, drops or None, {"seeds": len(seeds)})
    )
    return checks, {"complexity": profiles}


_DISPATCH = {
    "sadic-embedding": _run_sadic,
    "block-hierarchy": _run_hierarchy,
    "product-normalizer": _run_product,
    "profinite": _run_profinite,
    "direct-product": _run_direct_product,
    "oracle-compare": _run_oracle_compare,
}


def run_scenario(cfg: ScenarioConfig) -> Report:
    """Run one scenario and write the report if an output path is set.

    Construction errors in the inputs (bad tables, infeasible densities) are
    recorded as a failing ``setup`` check rather than raised.
    """
    t0 = time.perf_counter()
    try:
        checks, info = _DISPATCH[cfg.kind](cfg)
    except (GroupError, LanguageError, ValueError, BudgetExceeded) as exc:
        if isinstance(exc, ConfigError):
            raise
        checks, info = [check("setup", False, reason=f"{type(exc).__name__}: {exc}")], {}
    total = time.perf_counter() - t0
    rep = Report(cfg.echo(), checks, info, {"total_seconds": round(total, 6)})
    for c in checks:
        if c.elapsed:
            rep.timings[c.name] = round(c.elapsed, 6)
    if cfg.output:
        Path(cfg.output).write_text(rep.to_json())
    return rep

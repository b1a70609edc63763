"""Analysis configuration: parsing, validation and rendering.

A run is described by one self-contained YAML document whose ``command``
key selects the engine.  Validation is whole-file: every problem is
reported with a dotted path to the offending field, so a config never
fails one error at a time.  ``render_config`` writes the canonical form
back out; ``parse_config(render_config(cfg)) == cfg`` for every valid
config.  The full grammar is documented in the project README next to
the shipped example configs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import yaml

from .conjugate import BinomialData
from .distributions import Beta, Component, Normal, PointMass, Uniform
from .gibbs import DirichletWeights, FixedWeights
from .shrinkage import IndependentBeta, IndependentFixed, SharedBeta, WeightModel

__all__ = [
    "AnalysisConfig",
    "COMMANDS",
    "ConfigError",
    "GibbsAnalysis",
    "GibbsCommand",
    "MarginalCheckCommand",
    "ShrinkageCommand",
    "UpdateCommand",
    "parse_config",
    "render_config",
]

COMMANDS = ("update", "gibbs", "shrinkage", "marginal-check")

DEFAULT_SEED = 1


class ConfigError(ValueError):
    """Raised with the full list of validation problems."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class UpdateCommand:
    components: tuple[Beta, ...]
    weight_prior: FixedWeights | DirichletWeights
    data: BinomialData


@dataclass(frozen=True)
class GibbsAnalysis:
    label: str
    weight_prior: FixedWeights | DirichletWeights


@dataclass(frozen=True)
class GibbsCommand:
    components: tuple[Beta, ...]
    data: BinomialData
    analyses: tuple[GibbsAnalysis, ...]
    burn_in: int = 50_000
    iterations: int = 500_000
    thin: int = 1


@dataclass(frozen=True)
class ShrinkageCommand:
    parameters: int
    weight_model: WeightModel
    components: tuple[Component, Component] | None = None
    draws: int | None = None
    patterns: bool = False


@dataclass(frozen=True)
class MarginalCheckCommand:
    shape: float
    scale: float
    mu: float = 0.0
    draws: int = 1_000_000


Payload = UpdateCommand | GibbsCommand | ShrinkageCommand | MarginalCheckCommand


@dataclass(frozen=True)
class AnalysisConfig:
    command: str
    payload: Payload
    seed: int = DEFAULT_SEED
    output_path: str | None = None


class _Errors:
    def __init__(self):
        self.items: list[str] = []

    def add(self, path: str, message: str) -> None:
        self.items.append(f"{path}: {message}" if path else message)

    def raise_if_any(self) -> None:
        if self.items:
            raise ConfigError(self.items)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _number(node, path: str, errs: _Errors, *, default=None, required=True):
    if node is None:
        if required:
            errs.add(path, "missing required number")
        return default
    if not _is_number(node):
        errs.add(path, f"expected a number, got {node!r}")
        return default
    return float(node)


def _integer(node, path: str, errs: _Errors, *, default=None, required=True,
             minimum=None):
    if node is None:
        if required:
            errs.add(path, "missing required integer")
        return default
    if isinstance(node, bool) or not isinstance(node, int):
        errs.add(path, f"expected an integer, got {node!r}")
        return default
    if minimum is not None and node < minimum:
        errs.add(path, f"must be >= {minimum}, got {node}")
        return default
    return node


def _number_list(node, path: str, errs: _Errors):
    if not isinstance(node, list) or not node:
        errs.add(path, "expected a non-empty list of numbers")
        return None
    out = []
    for i, x in enumerate(node):
        if not _is_number(x):
            errs.add(f"{path}[{i}]", f"expected a number, got {x!r}")
            return None
        out.append(float(x))
    return out


def _check_keys(node: dict, path: str, errs: _Errors, allowed: set[str]) -> None:
    for key in node:
        if key not in allowed:
            where = f"{path}.{key}" if path else str(key)
            errs.add(where, "unknown key")


_COMPONENT_KINDS = ("beta", "normal", "uniform", "point_mass")


def _parse_component(node, path: str, errs: _Errors) -> Component | None:
    if not isinstance(node, dict) or len(node) != 1:
        errs.add(path, "expected a one-key mapping, e.g. {beta: [11, 32]}")
        return None
    ((kind, args),) = node.items()
    if kind not in _COMPONENT_KINDS:
        errs.add(path, f"unknown component family {kind!r} (one of {', '.join(_COMPONENT_KINDS)})")
        return None
    where = f"{path}.{kind}"
    try:
        if kind == "point_mass":
            loc = _number(args, where, errs)
            return PointMass(loc) if loc is not None else None
        pair = _number_list(args, where, errs)
        if pair is None:
            return None
        if len(pair) != 2:
            errs.add(where, f"expected two numbers, got {len(pair)}")
            return None
        cls = {"beta": Beta, "normal": Normal, "uniform": Uniform}[kind]
        return cls(pair[0], pair[1])
    except ValueError as e:
        errs.add(where, str(e))
        return None


def _parse_components(node, path: str, errs: _Errors, *, beta_only: bool,
                      minimum: int):
    if not isinstance(node, list):
        errs.add(path, "expected a list of components")
        return None
    comps = []
    for i, item in enumerate(node):
        c = _parse_component(item, f"{path}[{i}]", errs)
        if c is None:
            return None
        if beta_only and not isinstance(c, Beta):
            errs.add(f"{path}[{i}]", "this command requires beta components")
            return None
        comps.append(c)
    if len(comps) < minimum:
        errs.add(path, f"need at least {minimum} components, got {len(comps)}")
        return None
    return tuple(comps)


def _parse_weight_prior(node: dict, path: str, errs: _Errors, k: int | None):
    """Pick up `weights:` or `dirichlet:` from a mapping that has exactly one."""
    has_w = "weights" in node
    has_d = "dirichlet" in node
    if has_w and has_d:
        errs.add(path, "give either weights or dirichlet, not both")
        return None
    if not has_w and not has_d:
        errs.add(path, "missing weights (fixed) or dirichlet (uncertain)")
        return None
    key = "weights" if has_w else "dirichlet"
    where = f"{path}.{key}" if path else key
    values = _number_list(node[key], where, errs)
    if values is None:
        return None
    if k is not None and len(values) != k:
        errs.add(where, f"expected {k} entries to match the components, got {len(values)}")
        return None
    if has_w:
        total = math.fsum(values)
        if abs(total - 1.0) > 1e-12:
            errs.add(where, f"sum to {total:.6g}, expected 1")
            return None
        if any(not 0.0 <= w <= 1.0 for w in values):
            errs.add(where, "weights must lie in [0, 1]")
            return None
        return FixedWeights(tuple(values))
    if any(a <= 0.0 for a in values):
        errs.add(where, "concentration parameters must be positive")
        return None
    return DirichletWeights(tuple(values))


def _parse_data(node, path: str, errs: _Errors) -> BinomialData | None:
    if not isinstance(node, dict):
        errs.add(path, "expected a mapping with responders and patients")
        return None
    _check_keys(node, path, errs, {"responders", "patients"})
    r = _integer(node.get("responders"), f"{path}.responders", errs, minimum=0)
    n = _integer(node.get("patients"), f"{path}.patients", errs, minimum=1)
    if r is None or n is None:
        return None
    try:
        return BinomialData(r, n)
    except ValueError as e:
        errs.add(path, str(e))
        return None


def _parse_update(doc: dict, errs: _Errors) -> UpdateCommand | None:
    _check_keys(doc, "", errs, {"command", "seed", "out", "components", "weights",
                                "dirichlet", "data"})
    comps = _parse_components(doc.get("components"), "components", errs,
                              beta_only=True, minimum=1)
    prior = _parse_weight_prior(doc, "", errs, len(comps) if comps else None)
    data = _parse_data(doc.get("data"), "data", errs)
    if comps is None or prior is None or data is None:
        return None
    return UpdateCommand(comps, prior, data)


def _parse_gibbs(doc: dict, errs: _Errors) -> GibbsCommand | None:
    _check_keys(doc, "", errs, {"command", "seed", "out", "components", "data",
                                "analyses", "sampler"})
    comps = _parse_components(doc.get("components"), "components", errs,
                              beta_only=True, minimum=2)
    data = _parse_data(doc.get("data"), "data", errs)
    k = len(comps) if comps else None

    analyses_node = doc.get("analyses")
    analyses = None
    if not isinstance(analyses_node, list) or not analyses_node:
        errs.add("analyses", "expected a non-empty list of analyses")
    else:
        analyses = []
        for i, item in enumerate(analyses_node):
            path = f"analyses[{i}]"
            if not isinstance(item, dict):
                errs.add(path, "expected a mapping")
                analyses = None
                break
            _check_keys(item, path, errs, {"label", "weights", "dirichlet"})
            label = item.get("label", f"analysis{i + 1}")
            if not isinstance(label, str):
                errs.add(f"{path}.label", f"expected a string, got {label!r}")
                analyses = None
                break
            prior = _parse_weight_prior(item, path, errs, k)
            if prior is None:
                analyses = None
                break
            analyses.append(GibbsAnalysis(label, prior))

    sampler = doc.get("sampler", {})
    burn_in, iterations, thin = 50_000, 500_000, 1
    if not isinstance(sampler, dict):
        errs.add("sampler", "expected a mapping")
    else:
        _check_keys(sampler, "sampler", errs, {"burn_in", "iterations", "thin"})
        burn_in = _integer(sampler.get("burn_in"), "sampler.burn_in", errs,
                           default=50_000, required=False, minimum=0)
        iterations = _integer(sampler.get("iterations"), "sampler.iterations", errs,
                              default=500_000, required=False, minimum=1)
        thin = _integer(sampler.get("thin"), "sampler.thin", errs,
                        default=1, required=False, minimum=1)

    if comps is None or data is None or analyses is None:
        return None
    return GibbsCommand(comps, data, tuple(analyses), burn_in, iterations, thin)


def _parse_weight_model(node, path: str, errs: _Errors, m: int | None):
    if not isinstance(node, dict) or len(node) != 1:
        errs.add(path, "expected a one-key mapping: fixed, shared_beta or independent_beta")
        return None
    ((kind, args),) = node.items()
    where = f"{path}.{kind}"
    try:
        if kind == "fixed":
            if _is_number(args):
                values = [float(args)] * (m or 1)
            else:
                values = _number_list(args, where, errs)
                if values is None:
                    return None
                if m is not None and len(values) == 1:
                    values = values * m
            if m is not None and len(values) != m:
                errs.add(where, f"expected {m} probabilities, got {len(values)}")
                return None
            return IndependentFixed(tuple(values))
        if kind == "shared_beta":
            pair = _number_list(args, where, errs)
            if pair is None:
                return None
            if len(pair) != 2:
                errs.add(where, f"expected [a, b], got {len(pair)} numbers")
                return None
            return SharedBeta(pair[0], pair[1])
        if kind == "independent_beta":
            if not isinstance(args, list) or not args:
                errs.add(where, "expected [a, b] or a list of [a, b] pairs")
                return None
            if all(_is_number(x) for x in args):
                pairs = [args] * (m or 1)
            else:
                pairs = args
            out = []
            for i, pair in enumerate(pairs):
                values = _number_list(pair, f"{where}[{i}]", errs)
                if values is None:
                    return None
                if len(values) != 2:
                    errs.add(f"{where}[{i}]", f"expected [a, b], got {len(values)} numbers")
                    return None
                out.append((values[0], values[1]))
            if m is not None and len(out) != m:
                errs.add(where, f"expected {m} pairs, got {len(out)}")
                return None
            return IndependentBeta(tuple(out))
        errs.add(path, f"unknown weight model {kind!r}")
        return None
    except ValueError as e:
        errs.add(where, str(e))
        return None


def _parse_shrinkage(doc: dict, errs: _Errors) -> ShrinkageCommand | None:
    _check_keys(doc, "", errs, {"command", "seed", "out", "parameters", "latent",
                                "components", "draws", "patterns"})
    m = _integer(doc.get("parameters"), "parameters", errs, minimum=1)
    model = _parse_weight_model(doc.get("latent"), "latent", errs, m)
    comps = None
    if doc.get("components") is not None:
        comps = _parse_components(doc.get("components"), "components", errs,
                                  beta_only=False, minimum=2)
        if comps is not None and len(comps) != 2:
            errs.add("components", f"expected exactly 2 components, got {len(comps)}")
            comps = None
    draws = _integer(doc.get("draws"), "draws", errs, required=False, minimum=10_000)
    patterns = doc.get("patterns", False)
    if not isinstance(patterns, bool):
        errs.add("patterns", f"expected true/false, got {patterns!r}")
        patterns = False
    if m is None or model is None:
        return None
    return ShrinkageCommand(m, model, comps, draws, patterns)


def _parse_marginal_check(doc: dict, errs: _Errors) -> MarginalCheckCommand | None:
    _check_keys(doc, "", errs, {"command", "seed", "out", "mu", "shape", "scale",
                                "draws"})
    mu = _number(doc.get("mu"), "mu", errs, default=0.0, required=False)
    shape = _number(doc.get("shape"), "shape", errs)
    scale = _number(doc.get("scale"), "scale", errs)
    draws = _integer(doc.get("draws"), "draws", errs, default=1_000_000,
                     required=False, minimum=1)
    if shape is not None and shape <= 0.0:
        errs.add("shape", f"must be positive, got {shape:g}")
        shape = None
    if scale is not None and scale <= 0.0:
        errs.add("scale", f"must be positive, got {scale:g}")
        scale = None
    if shape is None or scale is None:
        return None
    return MarginalCheckCommand(shape, scale, mu, draws)


_PARSERS = {
    "update": _parse_update,
    "gibbs": _parse_gibbs,
    "shrinkage": _parse_shrinkage,
    "marginal-check": _parse_marginal_check,
}


def parse_config(text: str) -> AnalysisConfig:
    """Parse and validate a config document.

    Raises :class:`ConfigError` carrying one entry per problem, each
    prefixed with the dotted path of the offending field.
    """
    errs = _Errors()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError([f"not valid YAML: {e}"]) from e
    if not isinstance(doc, dict):
        raise ConfigError(["top level must be a mapping"])

    command = doc.get("command")
    if command not in COMMANDS:
        errs.add("command", f"expected one of {', '.join(COMMANDS)}, got {command!r}")
        errs.raise_if_any()

    seed = _integer(doc.get("seed"), "seed", errs, default=DEFAULT_SEED, required=False)
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        errs.add("out", f"expected a path string, got {out!r}")
        out = None

    payload = _PARSERS[command](doc, errs)
    errs.raise_if_any()
    return AnalysisConfig(command, payload, seed, out)


def _render_component(c: Component) -> dict:
    if isinstance(c, Beta):
        return {"beta": [c.alpha, c.beta]}
    if isinstance(c, Normal):
        return {"normal": [c.mu, c.sigma2]}
    if isinstance(c, Uniform):
        return {"uniform": [c.lo, c.hi]}
    if isinstance(c, PointMass):
        return {"point_mass": c.location}
    raise TypeError(f"cannot render component {c!r}")


def _render_weight_prior(prior) -> dict:
    if isinstance(prior, FixedWeights):
        return {"weights": list(prior.weights)}
    return {"dirichlet": list(prior.concentration)}


def _render_weight_model(model: WeightModel) -> dict:
    if isinstance(model, IndependentFixed):
        return {"fixed": list(model.probs)}
    if isinstance(model, SharedBeta):
        return {"shared_beta": [model.a, model.b]}
    return {"independent_beta": [list(pair) for pair in model.concentrations]}


def render_config(cfg: AnalysisConfig) -> str:
    """Canonical YAML for a config; inverse of :func:`parse_config`."""
    doc: dict = {"command": cfg.command}
    p = cfg.payload
    if isinstance(p, UpdateCommand):
        doc["components"] = [_render_component(c) for c in p.components]
        doc.update(_render_weight_prior(p.weight_prior))
        doc["data"] = {"responders": p.data.responders, "patients": p.data.patients}
    elif isinstance(p, GibbsCommand):
        doc["components"] = [_render_component(c) for c in p.components]
        doc["data"] = {"responders": p.data.responders, "patients": p.data.patients}
        doc["analyses"] = [
            {"label": a.label, **_render_weight_prior(a.weight_prior)}
            for a in p.analyses
        ]
        doc["sampler"] = {"burn_in": p.burn_in, "iterations": p.iterations,
                          "thin": p.thin}
    elif isinstance(p, ShrinkageCommand):
        doc["parameters"] = p.parameters
        doc["latent"] = _render_weight_model(p.weight_model)
        if p.components is not None:
            doc["components"] = [_render_component(c) for c in p.components]
        if p.draws is not None:
            doc["draws"] = p.draws
        if p.patterns:
            doc["patterns"] = True
    elif isinstance(p, MarginalCheckCommand):
        doc["mu"] = p.mu
        doc["shape"] = p.shape
        doc["scale"] = p.scale
        doc["draws"] = p.draws
    else:
        raise TypeError(f"cannot render payload {p!r}")
    doc["seed"] = cfg.seed
    if cfg.output_path is not None:
        doc["out"] = cfg.output_path
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)

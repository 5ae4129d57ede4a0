"""Experiment configuration files.

A config is YAML holding either one experiment mapping or a list under
``experiments``::

    experiments:
      - name: small_mu
        instance: {n: 50, m: 50, a: 0.0, b: 0.2, rho: 0.1, seed: 15}
        max_iters: 2000
        algorithms:
          - algorithm: FBS
          - {algorithm: FISTA_DELTA, delta: 0}
          - {algorithm: FISTA_DELTA, delta: rho/2}
          - {algorithm: FISTA_DELTA, delta: rho, overrides: {stop_tolerance: 0}}
        outputs: {csv_path: fig2, plot: true, diagnostics: [e, ell]}

``delta`` accepts a number or ``rho``, ``mu``, ``-mu``, ``rho/<k>``,
``<k>*rho``; it is resolved once the instance (hence ``mu``) is known.
``overrides`` may set ``gamma``, ``alpha``, ``c_coupling``,
``stop_tolerance`` and ``store_every``. ``outputs.csv_path`` is a directory
relative to the output root.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import yaml

from ..core import Algorithm

PRESETS = ("fig1", "fig2", "fig3", "fig4")
DIAGNOSTICS = ("e", "v", "ell")
_OVERRIDES = {"gamma": float, "alpha": float, "c_coupling": float, "stop_tolerance": float,
              "store_every": int}


class ConfigError(ValueError):
    def __init__(self, msg: str, where: str = "", line: Optional[int] = None):
        self.where, self.line = where, line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if where:
            prefix += f"{where}: "
        super().__init__(prefix + msg)


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    m: int
    a: float
    b: float
    rho: float
    seed: int


@dataclass(frozen=True)
class AlgorithmSpec:
    algorithm: Algorithm
    delta: object = None  # float or symbolic string
    overrides: dict = field(default_factory=dict)

    def resolve_delta(self, mu: float, rho: float) -> Optional[float]:
        if self.algorithm is not Algorithm.FISTA_DELTA:
            return None
        return parse_delta(self.delta if self.delta is not None else "rho", mu, rho)

    @property
    def label(self) -> str:
        if self.algorithm is Algorithm.FISTA_DELTA:
            d = "rho" if self.delta is None else str(self.delta).replace(" ", "")
            return f"FISTA-delta={d}"
        return self.algorithm.value


@dataclass(frozen=True)
class OutputSpec:
    csv_path: str = "."
    plot: bool = False
    plot_path: Optional[str] = None
    diagnostics: tuple = ("e", "ell")
    region_grid: Optional[int] = None


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    instance: InstanceSpec
    algorithms: tuple
    max_iters: int
    outputs: OutputSpec = OutputSpec()

    def with_overrides(self, seed=None, max_iters=None) -> "ExperimentConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, instance=replace(cfg.instance, seed=int(seed)))
        if max_iters is not None:
            cfg = replace(cfg, max_iters=int(max_iters))
        return cfg


_DELTA_RE = re.compile(
    r"^(?:(?P<num>[-+]?[0-9.]+(?:e[-+]?\d+)?)"
    r"|(?P<coef>[-+]?[0-9.]+(?:e[-+]?\d+)?)\*(?P<sym1>rho|mu)"
    r"|(?P<sign>-?)(?P<sym2>rho|mu)(?:/(?P<div>[0-9.]+))?)$")


def parse_delta(value, mu: float, rho: float) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).replace(" ", "")
    mt = _DELTA_RE.match(text)
    if not mt:
        raise ConfigError(f"cannot parse delta {value!r}", "delta")
    if mt["num"] is not None:
        return float(mt["num"])
    sym = {"rho": rho, "mu": mu}
    if mt["coef"] is not None:
        return float(mt["coef"]) * sym[mt["sym1"]]
    out = sym[mt["sym2"]] / (float(mt["div"]) if mt["div"] else 1.0)
    return -out if mt["sign"] else out


def _need(d: dict, key: str, where: str, cast, line=None):
    if key not in d:
        raise ConfigError(f"missing field {key!r}", where, line)
    try:
        return cast(d[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {d[key]!r} ({exc})", where, line) from None


def _experiment(d, idx: int, lines: dict) -> ExperimentConfig:
    where = f"experiments[{idx}]"
    line = lines.get(id(d))
    if not isinstance(d, dict):
        raise ConfigError("experiment must be a mapping", where, line)
    inst = d.get("instance")
    if not isinstance(inst, dict):
        raise ConfigError("missing or malformed 'instance' mapping", where, line)
    iw = where + ".instance"
    il = lines.get(id(inst), line)
    instance = InstanceSpec(
        n=_need(inst, "n", iw, int, il), m=_need(inst, "m", iw, int, il),
        a=float(inst.get("a", 0.0)), b=_need(inst, "b", iw, float, il),
        rho=_need(inst, "rho", iw, float, il), seed=int(inst.get("seed", 0)))
    if instance.n < 1 or instance.m < 1:
        raise ConfigError("n and m must be positive", iw, il)
    if not instance.rho > 0:
        raise ConfigError("rho must be positive", iw, il)
    algs = d.get("algorithms")
    if not isinstance(algs, list) or not algs:
        raise ConfigError("at least one algorithm is required", where + ".algorithms", line)
    specs = []
    for j, a in enumerate(algs):
        aw = f"{where}.algorithms[{j}]"
        al = lines.get(id(a), line)
        if isinstance(a, str):
            a = {"algorithm": a}
        if not isinstance(a, dict):
            raise ConfigError("algorithm entry must be a mapping or a name", aw, al)
        try:
            alg = Algorithm(str(a.get("algorithm", "")).upper())
        except ValueError:
            raise ConfigError(f"unknown algorithm {a.get('algorithm')!r}", aw, al) from None
        raw = a.get("overrides") or {}
        if not isinstance(raw, dict):
            raise ConfigError("overrides must be a mapping", aw, al)
        unknown = set(raw) - set(_OVERRIDES)
        if unknown:
            raise ConfigError(f"unknown overrides {sorted(unknown)}", aw, al)
        # YAML 1.1 reads 1e-12 (no dot) as a string, so cast explicitly
        overrides = {k: _need(raw, k, aw + ".overrides", _OVERRIDES[k], al) for k in raw}
        if "delta" in a and alg is not Algorithm.FISTA_DELTA:
            raise ConfigError("delta is only meaningful for FISTA_DELTA", aw, al)
        delta = a.get("delta")
        if delta is not None:
            parse_delta(delta, 0.0, 1.0)  # syntax check now, range check later
        specs.append(AlgorithmSpec(alg, delta, overrides))
    max_iters = _need(d, "max_iters", where, int, line) if "max_iters" in d else 2000
    if max_iters < 1:
        raise ConfigError("max_iters must be positive", where, line)
    out = d.get("outputs") or {}
    if not isinstance(out, dict):
        raise ConfigError("outputs must be a mapping", where + ".outputs", line)
    diags = tuple(out.get("diagnostics", ("e", "ell")))
    if not diags or set(diags) - set(DIAGNOSTICS):
        raise ConfigError(f"diagnostics must be a nonempty subset of {DIAGNOSTICS}",
                          where + ".outputs", line)
    outputs = OutputSpec(csv_path=str(out.get("csv_path", d.get("name", f"exp{idx}"))),
                         plot=bool(out.get("plot", out.get("plot_path") is not None)),
                         plot_path=out.get("plot_path"), diagnostics=diags,
                         region_grid=out.get("region_grid"))
    return ExperimentConfig(name=str(d.get("name", f"exp{idx}")), instance=instance,
                            algorithms=tuple(specs), max_iters=max_iters, outputs=outputs)


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    mapping = yaml.SafeLoader.construct_mapping(loader, node, deep=True)
    loader.lines[id(mapping)] = node.start_mark.line + 1
    return mapping


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def loads(text: str) -> list:
    """Parse config text into a list of :class:`ExperimentConfig`."""
    loader = _LineLoader(text)
    loader.lines = {}
    try:
        doc = loader.get_single_data()
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                          line=None if mark is None else mark.line + 1) from None
    finally:
        loader.dispose()
    if isinstance(doc, dict) and "experiments" in doc:
        items = doc["experiments"]
        if not isinstance(items, list) or not items:
            raise ConfigError("'experiments' must be a nonempty list")
    elif isinstance(doc, dict):
        items = [doc]
    else:
        raise ConfigError("config must be a mapping")
    return [_experiment(d, i, loader.lines) for i, d in enumerate(items)]


def load(path) -> list:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return loads(text)


def preset(name: str) -> list:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files(__package__).joinpath("presets", f"{name}.yaml").read_text()
    return loads(text)

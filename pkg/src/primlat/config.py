"""Experiment configuration: one JSON document describing specs, forms and
the command to run.  See README.md for the schema and worked examples."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CapacityError, ConfigError, DomainError
from .gaussian import GaussianMultSpec, gauss_spec_from_dict
from .lattice import ALL_POINTS, GridMode, HomogeneousForm, SUM_OF_SQUARES
from .multfunc import MultiplicativeSpec, spec_from_dict
from .multilinear import LinearForm
from .sieve import SIEVE_LIMIT_CAP

ENV_PREFIX = "PRIMLAT_"
COMMANDS = ("avg", "predict", "verify", "ergodic", "multi", "gauss")


@dataclass
class ExperimentConfig:
    """Validated, object-level view of a config document."""

    command: str
    raw: dict
    specs: dict[str, MultiplicativeSpec] = field(default_factory=dict)
    gaussian_specs: dict[str, GaussianMultSpec] = field(default_factory=dict)
    forms: dict[str, HomogeneousForm] = field(default_factory=dict)
    linear_forms: dict[str, LinearForm] = field(default_factory=dict)
    threads: int = 1
    exact: bool = False
    seed: int | None = None
    out: str | None = None
    prime_cutoff: int = 10**6
    series_cutoff: int = 10**6
    tolerances: dict = field(default_factory=dict)


def parse_mode(block) -> GridMode:
    if block is None:
        return ALL_POINTS
    if isinstance(block, str):
        block = {"kind": block}
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigError(f"mode must be a string or a dict with 'kind', got {block!r}")
    kind = block["kind"]
    try:
        if kind == "kfree_gcd":
            return GridMode("kfree_gcd", int(block["k"]))
        if kind == "fixed_gcd":
            return GridMode("fixed_gcd", int(block["d"]))
        return GridMode(kind)
    except (KeyError, DomainError, ValueError) as exc:
        raise ConfigError(f"bad mode block {block!r}: {exc}") from exc


def _parse_form(block) -> HomogeneousForm:
    if block == "sum_of_squares":
        return SUM_OF_SQUARES
    try:
        return HomogeneousForm(int(block["degree"]), tuple(int(c) for c in block["coeffs"]))
    except (TypeError, KeyError, DomainError, ValueError) as exc:
        raise ConfigError(f"bad form block {block!r}: {exc}") from exc


def _ascending_ns(block, where: str) -> list[int]:
    try:
        ns = [int(x) for x in block]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: Ns must be a list of integers") from exc
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError(f"{where}: Ns must be nonempty and strictly ascending, got {ns}")
    return ns


def load_config(path) -> ExperimentConfig:
    """Read and validate a config file; ConfigError carries the reason."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return validate_config(raw)


def validate_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {COMMANDS}, got {command!r}")

    cfg = ExperimentConfig(command=command, raw=raw)
    try:
        for name, block in raw.get("specs", {}).items():
            cfg.specs[name] = spec_from_dict(block, name=name)
        for name, block in raw.get("gaussian_specs", {}).items():
            cfg.gaussian_specs[name] = gauss_spec_from_dict(block, cfg.specs, name=name)
        for name, block in raw.get("forms", {}).items():
            cfg.forms[name] = _parse_form(block)
        for name, vec in raw.get("linear_forms", {}).items():
            cfg.linear_forms[name] = LinearForm(tuple(int(c) for c in vec))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    cfg.threads = int(raw.get("threads", 1))
    if cfg.threads < 1:
        raise ConfigError(f"threads must be >= 1, got {cfg.threads}")
    cfg.exact = bool(raw.get("exact", False))
    cfg.seed = raw.get("seed")
    cfg.out = raw.get("out")
    cutoffs = raw.get("cutoffs", {})
    cfg.prime_cutoff = int(cutoffs.get("primes", 10**6))
    cfg.series_cutoff = int(cutoffs.get("series", 10**6))
    cfg.tolerances = dict(raw.get("tolerances", {}))

    section = raw.get(command)
    if command != "verify" and not isinstance(section, dict):
        raise ConfigError(f"config needs a {command!r} section")
    _validate_section(cfg, command, section or {})
    return cfg


def _need_spec(cfg: ExperimentConfig, name, where: str) -> MultiplicativeSpec:
    spec = cfg.specs.get(name)
    if spec is None:
        raise ConfigError(f"{where}: unknown function {name!r}")
    return spec


def _validate_section(cfg: ExperimentConfig, command: str, section: dict) -> None:
    if command == "avg":
        _need_spec(cfg, section.get("spec"), "avg")
        form = section.get("form", "sum_of_squares")
        if form != "sum_of_squares" and form not in cfg.forms:
            raise ConfigError(f"avg: unknown form {form!r}")
        _ascending_ns(section.get("Ns"), "avg")
        parse_mode(section.get("mode"))
    elif command == "predict":
        names = section.get("specs") or list(cfg.specs)
        for name in names:
            _need_spec(cfg, name, "predict")
    elif command == "ergodic":
        system = section.get("system", {})
        if system.get("kind") not in ("circle", "cyclic"):
            raise ConfigError("ergodic: system.kind must be 'circle' or 'cyclic'")
        fn = section.get("fn")
        if not isinstance(fn, dict) or ("table" not in fn) == ("coeffs" not in fn):
            raise ConfigError("ergodic: fn needs exactly one of 'table' or 'coeffs'")
        if system.get("kind") == "cyclic" and "table" not in fn:
            raise ConfigError("ergodic: cyclic systems take a 'table' test function")
        if system.get("kind") == "circle" and "coeffs" not in fn:
            raise ConfigError("ergodic: circle systems take a 'coeffs' test function")
        _ascending_ns(section.get("Ns"), "ergodic")
        parse_mode(section.get("mode"))
    elif command == "multi":
        names = section.get("specs", [])
        forms = section.get("forms", [])
        if len(names) != len(forms):
            raise ConfigError("multi: specs and forms must have equal length")
        for name in names:
            _need_spec(cfg, name, "multi")
        for name in forms:
            if name not in cfg.linear_forms:
                raise ConfigError(f"multi: unknown linear form {name!r}")
        for pair in section.get("pairs", []):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(f"multi: each pair must name two linear forms, got {pair!r}")
            for name in pair:
                if name not in cfg.linear_forms:
                    raise ConfigError(f"multi: unknown linear form {name!r} in pairs")
        _ascending_ns(section.get("Ns"), "multi")
        parse_mode(section.get("mode"))
    elif command == "gauss":
        if section.get("spec") not in cfg.gaussian_specs:
            raise ConfigError(f"gauss: unknown gaussian function {section.get('spec')!r}")
        _ascending_ns(section.get("Ns"), "gauss")
        parse_mode(section.get("mode"))


def required_sieve_limit(cfg: ExperimentConfig) -> int:
    """Smallest table size covering every lookup the configured run makes."""
    raw = cfg.raw
    section = raw.get(cfg.command) or {}
    need = 1
    if cfg.command == "avg":
        ns = _ascending_ns(section.get("Ns"), "avg")
        form = section.get("form", "sum_of_squares")
        f = SUM_OF_SQUARES if form == "sum_of_squares" else cfg.forms[form]
        n = ns[-1]
        # upper bound for |P| on the box [1, N]^2
        need = sum(abs(c) for c in f.coeffs) * n**f.degree
    elif cfg.command == "predict":
        need = max(cfg.prime_cutoff, cfg.series_cutoff)
    elif cfg.command == "ergodic":
        ns = _ascending_ns(section.get("Ns"), "ergodic")
        need = 2 * ns[-1] * ns[-1]
    elif cfg.command == "multi":
        ns = _ascending_ns(section.get("Ns"), "multi")
        n = ns[-1]
        need = max(cfg.linear_forms[name].max_on_grid(n) for name in section.get("forms", [])) if section.get("forms") else 1
        for pair in section.get("pairs", []):
            for name in pair:
                need = max(need, cfg.linear_forms[name].max_on_grid(n))
    elif cfg.command == "gauss":
        ns = _ascending_ns(section.get("Ns"), "gauss")
        need = 2 * ns[-1] * ns[-1]
    if cfg.command == "verify":
        need = 10**6
    if need > SIEVE_LIMIT_CAP:
        raise CapacityError(f"run needs tables up to {need}, over the cap {SIEVE_LIMIT_CAP}")
    return max(need, 10)


def apply_cli_overrides(cfg: ExperimentConfig, args) -> None:
    """Flags beat environment variables beat the config document."""

    def pick(flag_value, env_name, cast):
        if flag_value is not None:
            return cast(flag_value)
        env = os.environ.get(ENV_PREFIX + env_name)
        if env is not None:
            return cast(env)
        return None

    v = pick(getattr(args, "threads", None), "THREADS", int)
    if v is not None:
        cfg.threads = v
    v = pick(getattr(args, "out", None), "OUT", str)
    if v is not None:
        cfg.out = v
    v = pick(getattr(args, "cutoff", None), "CUTOFF", int)
    if v is not None:
        cfg.prime_cutoff = v
        cfg.series_cutoff = v
    v = pick(getattr(args, "seed", None), "SEED", int)
    if v is not None:
        cfg.seed = v
    if getattr(args, "exact", False) or os.environ.get(ENV_PREFIX + "EXACT") == "1":
        cfg.exact = True
    if cfg.seed is not None:
        _reseed_specs(cfg, int(cfg.seed))


def _reseed_specs(cfg: ExperimentConfig, seed: int) -> None:
    """Point every seeded value rule at the override seed."""
    from .multfunc import MultiplicativeSpec, SeededPhase, SeededSign

    for name, spec in list(cfg.specs.items()):
        if isinstance(spec.rule, SeededSign):
            rule = SeededSign(seed)
        elif isinstance(spec.rule, SeededPhase):
            rule = SeededPhase(seed)
        else:
            continue
        cfg.specs[name] = MultiplicativeSpec(
            rule=rule, overrides=dict(spec.overrides), bound=spec.bound, name=spec.name
        )

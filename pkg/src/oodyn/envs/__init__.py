"""Benchmark domains and environment construction."""

import configparser
import re
from importlib import resources

from .base import Domain, EnvInstance, GenerationError
from .grid import (CoinsDomain, DoorsDomain, FishDomain, GatesDomain,
                   KeysDomain, MazeDomain, ScaleDomain, SwitchesDomain,
                   WallsDomain)
from .lights import LightsDomain

_SCALE_RE = re.compile(r"^scale(\d+)x(\d+)$")


def load_defaults() -> dict:
    cfg = configparser.ConfigParser()
    with resources.files("oodyn.envs").joinpath("defaults.cfg").open() as fh:
        cfg.read_file(fh)
    return {section: {k: int(v) for k, v in cfg[section].items()}
            for section in cfg.sections()}


_DEFAULTS = load_defaults()


def domain_names() -> list:
    return ["walls", "maze", "coins", "keys", "doors", "fish", "switches",
            "gates", "lights", "scale(n_p,n_c)"]


def make_domain(name: str, params: dict) -> Domain:
    base = name.removesuffix("-scoreless").removesuffix("-t")
    scoreless = name.endswith("-scoreless")
    if base == "walls":
        return WallsDomain()
    if base == "maze":
        return MazeDomain(name=name, scored=not scoreless)
    if base == "coins":
        return CoinsDomain(name=name, scored=not scoreless)
    if base == "keys":
        return KeysDomain(name=name, scored=not scoreless)
    if base == "doors":
        return DoorsDomain()
    if base == "fish":
        return FishDomain()
    if base == "switches":
        return SwitchesDomain()
    if base == "gates":
        return GatesDomain()
    if base == "lights":
        return LightsDomain(name=name, scored=not scoreless,
                            channels=params.get("channels", 8))
    m = _SCALE_RE.match(base)
    if m:
        return ScaleDomain(int(m.group(1)), int(m.group(2)))
    raise ValueError(f"unknown domain {name!r}")


def default_params(name: str) -> dict:
    base = name.removesuffix("-scoreless")
    if base in _DEFAULTS:
        return dict(_DEFAULTS[base])
    stem = base.removesuffix("-t")
    if _SCALE_RE.match(stem):
        return dict(_DEFAULTS["scale"])
    if stem in _DEFAULTS:
        return dict(_DEFAULTS[stem])
    raise ValueError(f"no defaults for domain {name!r}")


def make_env(name: str, seed: int, overrides: dict | None = None) -> EnvInstance:
    params = default_params(name)
    if overrides:
        params.update(overrides)
    domain = make_domain(name, params)
    return EnvInstance(domain, params, seed)


__all__ = ["Domain", "EnvInstance", "GenerationError", "make_env",
           "make_domain", "default_params", "domain_names", "load_defaults"]

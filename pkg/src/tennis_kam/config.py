"""Run configuration: INI-style ``key = value`` file with sections.

    [map]            kind = tennis | standard | integrable, plus per-kind keys
    [profile]        mean_height (tennis only)
    [harmonic.<n>]   k, cos_coeff, sin_coeff (tennis only, any number)
    [ensemble]       t_grid, e_grid, e_low, e_high, n_steps
    [run]            seed, output, steps, t0, v0, renorm_every

Parsing is strict: unknown sections or keys are errors, and every problem
found is reported at once with its line number.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields

from .profile import Harmonic, RacketProfile
from .tennis import TennisParams

MAP_KINDS = ("tennis", "standard", "integrable")

_MAP_KEYS = {
    "tennis": {"kind", "g", "v_star", "root_tol", "march_step", "grid_n"},
    "standard": {"kind", "k"},
    "integrable": {"kind"},
}
_ALL_MAP_KEYS = set().union(*_MAP_KEYS.values())


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class EnsembleConfig:
    t_grid: int = 32
    e_grid: int = 8
    e_low: float = 50.0
    e_high: float = 60.0
    n_steps: int = 1000


@dataclass(frozen=True)
class RunConfig:
    kind: str
    g: float = 1.0
    v_star: float | None = None
    root_tol: float = 1e-9
    march_step: float | None = None
    grid_n: int = 1024
    k: float | None = None
    profile: RacketProfile = field(default_factory=RacketProfile)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    seed: int = 0
    output: str | None = None
    steps: int = 100
    t0: float = 0.0
    v0: float | None = None
    renorm_every: int = 1

    def tennis_params(self) -> TennisParams:
        return TennisParams(self.profile, g=self.g, v_star=self.v_star, root_tol=self.root_tol,
                            march_step=self.march_step, grid_n=self.grid_n)

    def to_text(self) -> str:
        """Serialise back to the file format; ``parse_config`` round-trips it."""
        lines = ["[map]", f"kind = {self.kind}"]
        if self.kind == "tennis":
            lines += [f"g = {self.g!r}", f"root_tol = {self.root_tol!r}", f"grid_n = {self.grid_n}"]
            if self.v_star is not None:
                lines.append(f"v_star = {self.v_star!r}")
            if self.march_step is not None:
                lines.append(f"march_step = {self.march_step!r}")
            lines += ["", "[profile]", f"mean_height = {self.profile.mean_height!r}"]
            for i, h in enumerate(self.profile.harmonics, 1):
                lines += ["", f"[harmonic.{i}]", f"k = {h.k}",
                          f"cos_coeff = {h.cos_coeff!r}", f"sin_coeff = {h.sin_coeff!r}"]
        elif self.kind == "standard":
            lines.append(f"k = {self.k!r}")
        lines += ["", "[ensemble]"]
        lines += [f"{f.name} = {getattr(self.ensemble, f.name)!r}" for f in fields(EnsembleConfig)]
        lines += ["", "[run]", f"seed = {self.seed}", f"steps = {self.steps}",
                  f"t0 = {self.t0!r}", f"renorm_every = {self.renorm_every}"]
        if self.v0 is not None:
            lines.append(f"v0 = {self.v0!r}")
        if self.output is not None:
            lines.append(f"output = {self.output}")
        return "\n".join(lines) + "\n"


_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


def _line_map(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> 1-based line number, for error messages."""
    where = {}
    section = None
    for n, line in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            where[(section, "")] = n
            continue
        m = _KEY_RE.match(line)
        if m and section is not None and not line[:1].isspace():
            where[(section, m.group(1).strip().lower())] = n
    return where


class _Reader:
    def __init__(self, cp: configparser.ConfigParser, where: dict):
        self.cp = cp
        self.where = where
        self.errors: list[str] = []

    def err(self, section: str, key: str, msg: str):
        line = self.where.get((section, key), self.where.get((section, "")))
        loc = f"line {line}: " if line else ""
        label = f"[{section}] {key}" if key else f"[{section}]"
        self.errors.append(f"{loc}{label}: {msg}")

    def get(self, section, key, conv, default=None, required=False, check=None, what=""):
        if not self.cp.has_option(section, key):
            if required:
                self.err(section, key, "required key missing")
            return default
        raw = self.cp.get(section, key).strip()
        try:
            val = conv(raw)
        except ValueError:
            self.err(section, key, f"expected {conv.__name__}, got {raw!r}")
            return default
        if check is not None and not check(val):
            self.err(section, key, f"value {raw} out of range ({what})")
            return default
        return val

    def allowed(self, section: str, keys: set, kind_note: str = ""):
        for key in self.cp.options(section):
            if key not in keys:
                self.err(section, key, "unknown key" + kind_note)


def integer(raw: str) -> int:
    return int(raw)


def real(raw: str) -> float:
    return float(raw)


def word(raw: str) -> str:
    if not raw:
        raise ValueError
    return raw


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, strict=True, default_section="\0none")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from exc
    r = _Reader(cp, _line_map(text))

    if not cp.has_section("map"):
        raise ConfigError(["[map]: required section missing"])
    kind = r.get("map", "kind", word, required=True)
    if kind is not None and kind not in MAP_KINDS:
        r.err("map", "kind", f"unknown map kind {kind!r}; expected one of {', '.join(MAP_KINDS)}")
        kind = None
    if kind is None:
        raise ConfigError(r.errors)

    for key in cp.options("map"):
        if key not in _MAP_KEYS[kind]:
            note = f" for map kind {kind}" if key in _ALL_MAP_KEYS else ""
            r.err("map", key, "unknown key" + note)

    kw: dict = {"kind": kind}
    harmonics = []
    mean = 0.0
    for sec in cp.sections():
        if sec in ("map", "ensemble", "run"):
            continue
        if kind != "tennis" and (sec == "profile" or sec.startswith("harmonic.")):
            r.err(sec, "", f"section not allowed for map kind {kind}")
            continue
        if sec == "profile":
            r.allowed(sec, {"mean_height"})
            mean = r.get(sec, "mean_height", real, 0.0)
        elif sec.startswith("harmonic."):
            r.allowed(sec, {"k", "cos_coeff", "sin_coeff"})
            hk = r.get(sec, "k", integer, required=True, check=lambda v: v >= 1, what="k >= 1")
            c = r.get(sec, "cos_coeff", real, 0.0)
            s = r.get(sec, "sin_coeff", real, 0.0)
            if hk is not None:
                harmonics.append((sec, Harmonic(hk, c, s)))
        else:
            r.err(sec, "", "unknown section")

    positive = dict(check=lambda v: v > 0, what="must be > 0")
    if kind == "tennis":
        kw["g"] = r.get("map", "g", real, 1.0, **positive)
        kw["v_star"] = r.get("map", "v_star", real, None, **positive)
        kw["root_tol"] = r.get("map", "root_tol", real, 1e-9, **positive)
        kw["march_step"] = r.get("map", "march_step", real, None, **positive)
        kw["grid_n"] = r.get("map", "grid_n", integer, 1024, check=lambda v: v >= 64, what="must be >= 64")
        if not any(sec.startswith("harmonic.") for sec in cp.sections()):
            r.errors.append("[harmonic.*]: tennis map needs at least one harmonic section")
        kw["profile"] = RacketProfile(tuple(h for _, h in harmonics), mean)
    elif kind == "standard":
        kw["k"] = r.get("map", "k", real, None, required=True,
                        check=lambda v: v >= 0, what="must be >= 0")

    ens = {}
    if cp.has_section("ensemble"):
        r.allowed("ensemble", {f.name for f in fields(EnsembleConfig)})
        for f in fields(EnsembleConfig):
            conv = integer if f.type in ("int", int) else real
            chk = dict(check=lambda v: v >= 1, what="must be >= 1") if conv is integer else {}
            if f.name == "n_steps":
                chk = dict(check=lambda v: v >= 0, what="must be >= 0")
            val = r.get("ensemble", f.name, conv, None, **chk)
            if val is not None:
                ens[f.name] = val
    ensemble = EnsembleConfig(**ens)
    if not ensemble.e_high >= ensemble.e_low:
        r.err("ensemble", "e_high", "must be >= e_low")
    kw["ensemble"] = ensemble

    if cp.has_section("run"):
        r.allowed("run", {"seed", "output", "steps", "t0", "v0", "renorm_every"})
        kw["seed"] = r.get("run", "seed", integer, 0, check=lambda v: v >= 0, what="must be >= 0")
        kw["output"] = r.get("run", "output", word, None)
        kw["steps"] = r.get("run", "steps", integer, 100, check=lambda v: v >= 0, what="must be >= 0")
        kw["t0"] = r.get("run", "t0", real, 0.0)
        kw["v0"] = r.get("run", "v0", real, None)
        kw["renorm_every"] = r.get("run", "renorm_every", integer, 1, check=lambda v: v >= 1,
                                   what="must be >= 1")

    if r.errors:
        raise ConfigError(r.errors)
    cfg = RunConfig(**kw)
    if kind == "tennis":
        try:
            cfg.tennis_params()
        except ValueError as exc:
            raise ConfigError([f"[map]: {exc}"]) from exc
    return cfg


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


__all__ = ["ConfigError", "EnsembleConfig", "MAP_KINDS", "RunConfig", "load_config", "parse_config"]

"""JSON system configurations and bundled presets."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .convolutional import ConvCodeSpec, PuncturePattern
from .crc import MalformedPolynomialError, parse_hex_poly
from .gf2 import GeneratorMatrix, bits_from_str
from .listdec import ListConfig
from .polar import construct_frozen_set, load_reliability_sequence
from .system import CodeSystem


class ConfigError(ValueError):
    """Configuration that cannot be turned into a code system."""


@dataclass(frozen=True)
class LoadedConfig:
    raw: dict
    system: CodeSystem | None
    generator: GeneratorMatrix | None
    list_config: ListConfig | None
    stop: str | None
    seed: int

    @property
    def name(self) -> str:
        return self.raw.get("name", self.raw["kind"])

    def require_system(self) -> CodeSystem:
        if self.system is None:
            raise ConfigError("this command needs a tbcc or polar configuration")
        return self.system

    def full_generator(self) -> GeneratorMatrix:
        return self.generator if self.system is None else self.system.generator()


def _schema() -> dict:
    text = resources.files("crclist.schema").joinpath("system_config.schema.json").read_text()
    return json.loads(text)


def preset_names() -> list[str]:
    root = resources.files("crclist.presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_config(ref: str | Path) -> dict:
    """Load a config from a path, or by preset name."""
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    elif str(ref) in preset_names():
        text = resources.files("crclist.presets").joinpath(f"{ref}.json").read_text()
    else:
        raise ConfigError(f"no config file or preset named {ref!r} (presets: {', '.join(preset_names())})")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{ref}: invalid JSON ({exc})") from exc


def build(raw: dict) -> LoadedConfig:
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    kind = raw["kind"]
    m = raw["message_length"]
    try:
        crc = None if raw.get("crc") is None else parse_hex_poly(raw["crc"]["hex"], raw["crc"]["width"])
    except MalformedPolynomialError as exc:
        raise ConfigError(str(exc)) from exc
    dec = raw.get("decoder", {})
    try:
        if kind == "block":
            if crc is not None:
                raise ConfigError("block configs take no CRC")
            rows = [bits_from_str(r) for r in raw["block"]["generator"]]
            if len({r.size for r in rows}) != 1:
                raise ConfigError("generator rows differ in length")
            G = GeneratorMatrix(rows)
            if G.k != m:
                raise ConfigError(f"generator has {G.k} rows but message_length is {m}")
            return LoadedConfig(raw, None, G, None, None, raw.get("seed", 0))
        if kind == "tbcc":
            t = raw["tbcc"]
            conv = ConvCodeSpec.from_octal(t["memory"], t["taps"])
            k = m + (crc.width if crc else 0)
            punc = PuncturePattern(tuple(t["puncture"]), k * conv.n_out) if t.get("puncture") else None
            system = CodeSystem("tbcc", m, crc, conv=conv, puncture=punc)
        else:
            p = raw["polar"]
            seq_file = p.get("sequence_file")
            if seq_file is not None and not Path(seq_file).is_file():
                raise ConfigError(f"reliability sequence file {seq_file!r} not found")
            seq = load_reliability_sequence(seq_file)
            system = CodeSystem("polar", m, crc, polar=construct_frozen_set(seq, p["N"], p["K"]))
        expected = "lva" if kind == "tbcc" else "scl"
        if dec.get("name", expected) != expected:
            raise ConfigError(f"decoder {dec['name']!r} does not apply to {kind} codes")
        cfg = ListConfig(dec.get("L_min", 1), dec.get("L_max", 1024))
        stop = dec.get("stop")
        if stop == "certified" and kind != "tbcc":
            raise ConfigError("the certified stop rule needs a trellis decoder")
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return LoadedConfig(raw, system, None, cfg, stop, raw.get("seed", 0))


def load(ref: str | Path) -> LoadedConfig:
    return build(read_config(ref))

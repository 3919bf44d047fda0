"""Flat key = value run configuration with line-precise errors."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import ConfigError, Params
from .solver import InitialProfile

_PARAM_KEYS = {
    "gamma": ("gamma", float),
    "beta": ("beta", float),
    "alpha": ("alpha", float),
    "L": ("half_width", float),
    "N": ("n_cells", int),
    "cfl_adv": ("cfl_adv", float),
    "cfl_visc": ("cfl_visc", float),
    "rho_floor": ("rho_floor", float),
    "t_end": ("t_end", float),
    "snapshot_every": ("snapshot_every", int),
    "diag_every": ("diag_every", int),
    "visc_ref_frac": ("visc_ref_frac", float),
    "weighted_diagnostics": ("weighted_diagnostics", bool),
}

_PROFILE_KEYS = {
    "profile": ("kind", str),
    "amplitude": ("amplitude", float),
    "support_radius": ("support_radius", float),
    "smoothness_order": ("smoothness_order", int),
    "velocity_kind": ("velocity_kind", str),
    "velocity_amplitude": ("velocity_amplitude", float),
    "background": ("background", float),
}

_RUN_KEYS = {
    "outputs": str,
    "emit_snapshots": bool,
    "emit_plots_script": bool,
    "emit_figures": bool,
    "seed": int,
}

_SWEEP_KEYS = {"axis", "values"}

SWEEP_AXES = ("beta", "gamma", "alpha", "n_cells")


@dataclass
class RunConfig:
    params: Params
    profile: InitialProfile
    outputs: Path
    emit_snapshots: bool = False
    emit_plots_script: bool = False
    emit_figures: bool = True
    seed: int = 0


@dataclass
class SweepConfig:
    base: RunConfig
    axis: str
    values: list


def _parse_bool(raw, lineno):
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError("line %d: expected a boolean, got %r" % (lineno, raw))


def _convert(raw, typ, lineno):
    try:
        if typ is bool:
            return _parse_bool(raw, lineno)
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw.strip()
    except ValueError as err:
        raise ConfigError("line %d: %s" % (lineno, err)) from err


def parse_config(path):
    """Parse a flat ``key = value`` file into a RunConfig or SweepConfig.

    Lines starting with ``#`` (or inline ``#`` suffixes) are comments.
    Unknown keys and malformed values are rejected with their line number;
    a ``axis``/``values`` pair turns the file into a sweep.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config file not found: %s" % path)

    param_kw = {}
    profile_kw = {}
    run_kw = {}
    sweep_kw = {}
    key_lines = {}

    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError("line %d: expected 'key = value'" % lineno)
        key, raw = (part.strip() for part in text.split("=", 1))
        if key in key_lines:
            raise ConfigError("line %d: duplicate key %r" % (lineno, key))
        key_lines[key] = lineno
        if key in _PARAM_KEYS:
            name, typ = _PARAM_KEYS[key]
            param_kw[name] = _convert(raw, typ, lineno)
        elif key in _PROFILE_KEYS:
            name, typ = _PROFILE_KEYS[key]
            profile_kw[name] = _convert(raw, typ, lineno)
        elif key in _RUN_KEYS:
            run_kw[key] = _convert(raw, _RUN_KEYS[key], lineno)
        elif key == "axis":
            if raw not in SWEEP_AXES:
                raise ConfigError(
                    "line %d: axis must be one of %s" % (lineno, ", ".join(SWEEP_AXES))
                )
            sweep_kw["axis"] = raw
        elif key == "values":
            items = [v.strip() for v in raw.split(",") if v.strip()]
            if not items:
                raise ConfigError("line %d: empty values list" % lineno)
            sweep_kw["values_raw"] = (items, lineno)
        else:
            raise ConfigError("line %d: unknown key %r" % (lineno, key))

    try:
        params = Params(**param_kw)
    except ConfigError as err:
        raise ConfigError(_locate(str(err), param_kw, key_lines)) from err
    try:
        profile = InitialProfile(**profile_kw)
    except ConfigError as err:
        raise ConfigError(_locate(str(err), profile_kw, key_lines)) from err

    cfg = RunConfig(
        params=params,
        profile=profile,
        outputs=Path(run_kw.get("outputs", "out")),
        emit_snapshots=run_kw.get("emit_snapshots", False),
        emit_plots_script=run_kw.get("emit_plots_script", False),
        emit_figures=run_kw.get("emit_figures", True),
        seed=run_kw.get("seed", 0),
    )

    if "axis" in sweep_kw or "values_raw" in sweep_kw:
        if "axis" not in sweep_kw or "values_raw" not in sweep_kw:
            raise ConfigError("a sweep needs both 'axis' and 'values'")
        axis = sweep_kw["axis"]
        items, lineno = sweep_kw["values_raw"]
        typ = int if axis == "n_cells" else float
        values = [_convert(v, typ, lineno) for v in items]
        # every derived member must be valid
        for v in values:
            derive_run_config(cfg, axis, v)
        return SweepConfig(base=cfg, axis=axis, values=values)
    return cfg


def _locate(message, kwargs, key_lines):
    """Attach a line number to a constraint violation when attributable."""
    reverse = {name: key for key, (name, _) in {**_PARAM_KEYS, **_PROFILE_KEYS}.items()}
    for name in kwargs:
        key = reverse.get(name, name)
        if key in key_lines and (name in message or key in message):
            return "line %d: %s" % (key_lines[key], message)
    return message


def derive_run_config(base: RunConfig, axis: str, value) -> RunConfig:
    """A sweep member: the base config with one parameter replaced."""
    from dataclasses import replace

    params = replace(base.params, **{axis: value})
    tag = ("%g" % value) if axis != "n_cells" else str(int(value))
    return RunConfig(
        params=params,
        profile=base.profile,
        outputs=Path(base.outputs) / ("%s_%s" % (axis, tag)),
        emit_snapshots=base.emit_snapshots,
        emit_plots_script=base.emit_plots_script,
        emit_figures=base.emit_figures,
        seed=base.seed,
    )

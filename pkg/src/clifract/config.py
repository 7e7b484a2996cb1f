"""JSON problem configurations for the command line front end.

A config describes one solve: the algebra dimension (0 requests scalar
mode), the partition, per-tile q and s data, the carrier grid, tolerances,
the function space whose gate certifies the solve, and the probe seed.
Interpolation problems can be stated directly as data points under "fif".

Parsing is strict: unknown keys, wrong types, and inconsistent sizes are
rejected with the offending field named, and parse -> serialize -> parse is
the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .algebra import MAX_DIMENSION, TEXT_FORM_MAX, parse_blade_key
from .engine import Field, GridFunction, Poly, RBParams, SpaceSpec, fif_from_data
from .lift import CliffordRBParams, clifford_fif_from_data
from .partition import AffinePartition, from_knots, uniform_partition

__all__ = ["ConfigError", "ProblemConfig", "ProblemSetup", "build_problem", "load_config"]

SCHEMA_VERSION = 1

_TOP_LEVEL_KEYS = {
    "schema_version",
    "n",
    "grid_M",
    "partition",
    "q",
    "fif",
    "s",
    "tol",
    "max_iter",
    "seed",
    "trials",
    "space",
    "output",
}


class ConfigError(ValueError):
    """Invalid configuration; `field` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _require(data: Mapping, key: str, kind, where: str = ""):
    label = f"{where}.{key}" if where else key
    if key not in data:
        raise ConfigError(label, "missing required field")
    value = data[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(label, f"expected a number, got {type(value).__name__}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(label, f"expected an integer, got {type(value).__name__}")
        return value
    if not isinstance(value, kind):
        raise ConfigError(label, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _number_list(value: Any, label: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(label, "expected a nonempty list of numbers")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"{label}[{i}]", "expected a number")
        out.append(float(item))
    return out


@dataclass(frozen=True)
class ProblemConfig:
    """Validated problem description; `to_dict` emits the canonical JSON form."""

    n: int
    grid_m: int
    s: tuple
    partition: dict | None = None
    q: tuple | None = None
    fif: dict | None = None
    tol: float = 1e-10
    max_iter: int = 1000
    seed: int = 0
    trials: int = 32
    space: SpaceSpec = field(default_factory=lambda: SpaceSpec.ck(0))
    output: dict | None = None

    @property
    def scalar_mode(self) -> bool:
        return self.n == 0

    def to_dict(self) -> dict:
        data: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "grid_M": self.grid_m,
        }
        if self.partition is not None:
            data["partition"] = self.partition
        if self.q is not None:
            data["q"] = list(self.q)
        if self.fif is not None:
            data["fif"] = self.fif
        data["s"] = list(self.s)
        data.update(
            tol=self.tol,
            max_iter=self.max_iter,
            seed=self.seed,
            trials=self.trials,
            space=_space_to_dict(self.space),
        )
        if self.output is not None:
            data["output"] = self.output
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "ProblemConfig":
        if not isinstance(data, Mapping):
            raise ConfigError("<root>", "config must be a JSON object")
        unknown = set(data) - _TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown field")
        version = _require(data, "schema_version", int)
        if version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version}")

        n = _require(data, "n", int)
        if not 0 <= n <= MAX_DIMENSION:
            raise ConfigError("n", f"must lie in 0..{MAX_DIMENSION} (0 selects scalar mode)")
        if n > TEXT_FORM_MAX:
            raise ConfigError("n", f"blade keys limit configs to n <= {TEXT_FORM_MAX}")
        grid_m = _require(data, "grid_M", int)
        if grid_m < 2:
            raise ConfigError("grid_M", "must be at least 2")

        has_fif = "fif" in data
        has_pq = "partition" in data or "q" in data
        if has_fif and has_pq:
            raise ConfigError("fif", "cannot combine 'fif' with 'partition'/'q'")
        if not has_fif and not ("partition" in data and "q" in data):
            raise ConfigError("partition", "need either 'partition' plus 'q', or 'fif'")

        partition_spec = _parse_partition_spec(data["partition"]) if "partition" in data else None
        n_maps = None
        if partition_spec is not None:
            n_maps = (
                partition_spec["N"]
                if "N" in partition_spec
                else len(partition_spec["knots"]) - 1
            )

        fif_spec = _parse_fif_spec(data["fif"], n) if has_fif else None
        if fif_spec is not None:
            n_maps = len(fif_spec["x"]) - 1

        q_spec = None
        if "q" in data:
            q_spec = _parse_q_spec(data["q"], n, n_maps)

        s_spec = _parse_s_spec(_require(data, "s", list), n_maps, fif=has_fif)

        tol = _require(data, "tol", float) if "tol" in data else 1e-10
        if not tol > 0:
            raise ConfigError("tol", "must be positive")
        max_iter = _require(data, "max_iter", int) if "max_iter" in data else 1000
        if max_iter < 1:
            raise ConfigError("max_iter", "must be at least 1")
        seed = _require(data, "seed", int) if "seed" in data else 0
        trials = _require(data, "trials", int) if "trials" in data else 32
        if trials < 1:
            raise ConfigError("trials", "must be at least 1")
        space = _parse_space(data["space"]) if "space" in data else SpaceSpec.ck(0)
        output = _parse_output(data["output"]) if "output" in data else None

        return cls(
            n=n,
            grid_m=grid_m,
            s=tuple(s_spec),
            partition=partition_spec,
            q=tuple(q_spec) if q_spec is not None else None,
            fif=fif_spec,
            tol=tol,
            max_iter=max_iter,
            seed=seed,
            trials=trials,
            space=space,
            output=output,
        )


def load_config(path: str | Path) -> ProblemConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from exc
    return ProblemConfig.from_dict(data)


# ---------------------------------------------------------------------------
# Section parsers
# ---------------------------------------------------------------------------


def _parse_partition_spec(spec: Any) -> dict:
    if not isinstance(spec, Mapping):
        raise ConfigError("partition", "expected an object")
    unknown = set(spec) - {"interval", "N", "knots"}
    if unknown:
        raise ConfigError(f"partition.{sorted(unknown)[0]}", "unknown field")
    interval = _number_list(_require(spec, "interval", list, "partition"), "partition.interval")
    if len(interval) != 2 or not interval[0] < interval[1]:
        raise ConfigError("partition.interval", "expected [x_lo, x_hi] with x_lo < x_hi")
    if ("N" in spec) == ("knots" in spec):
        raise ConfigError("partition", "give exactly one of 'N' or 'knots'")
    out: dict[str, Any] = {"interval": interval}
    if "N" in spec:
        n_maps = _require(spec, "N", int, "partition")
        if n_maps < 2:
            raise ConfigError("partition.N", "must be at least 2")
        out["N"] = n_maps
    else:
        knots = _number_list(spec["knots"], "partition.knots")
        if len(knots) < 3 or any(b <= a for a, b in zip(knots, knots[1:])):
            raise ConfigError("partition.knots", "expected >= 3 strictly increasing knots")
        if knots[0] != interval[0] or knots[-1] != interval[1]:
            raise ConfigError("partition.knots", "knots must start and end at the interval endpoints")
        out["knots"] = knots
    return out


def _parse_field_spec(spec: Any, label: str) -> Any:
    if isinstance(spec, bool):
        raise ConfigError(label, "expected a field spec")
    if isinstance(spec, (int, float)):
        return float(spec)
    if isinstance(spec, Mapping):
        keys = set(spec)
        if keys == {"const"}:
            return {"const": _require(spec, "const", float, label.rstrip("."))}
        if keys == {"poly"}:
            return {"poly": _number_list(spec["poly"], f"{label}.poly")}
        if keys == {"samples"}:
            return {"samples": _number_list(spec["samples"], f"{label}.samples")}
        raise ConfigError(label, "expected exactly one of 'const', 'poly' or 'samples'")
    raise ConfigError(label, "expected a number or an object")


def _parse_q_spec(spec: Any, n: int, n_maps: int | None) -> list:
    if not isinstance(spec, list):
        raise ConfigError("q", "expected a list with one entry per map")
    if n_maps is not None and len(spec) != n_maps:
        raise ConfigError("q", f"expected {n_maps} entries, got {len(spec)}")
    out = []
    for i, entry in enumerate(spec):
        if n == 0:
            out.append(_parse_field_spec(entry, f"q[{i}]"))
            continue
        if not isinstance(entry, Mapping):
            raise ConfigError(f"q[{i}]", "expected an object mapping blade keys to field specs")
        blades = {}
        for key in sorted(entry):
            if not isinstance(key, str):
                raise ConfigError(f"q[{i}]", f"blade keys must be strings, got {key!r}")
            try:
                parse_blade_key(key, n)
            except ValueError as exc:
                raise ConfigError(f"q[{i}].{key or '<scalar>'}", str(exc)) from exc
            blades[key] = _parse_field_spec(entry[key], f"q[{i}].{key or '<scalar>'}")
        out.append(blades)
    return out


def _parse_s_spec(spec: list, n_maps: int | None, fif: bool) -> list:
    if n_maps is not None and len(spec) != n_maps:
        raise ConfigError("s", f"expected {n_maps} entries, got {len(spec)}")
    out = []
    for i, entry in enumerate(spec):
        parsed = _parse_field_spec(entry, f"s[{i}]")
        if isinstance(parsed, Mapping) and "poly" in parsed:
            raise ConfigError(f"s[{i}]", "multipliers must be constants or samples")
        if fif and not isinstance(parsed, float):
            raise ConfigError(f"s[{i}]", "interpolation multipliers must be constants")
        out.append(parsed)
    return out


def _parse_fif_spec(spec: Any, n: int) -> dict:
    if not isinstance(spec, Mapping):
        raise ConfigError("fif", "expected an object")
    unknown = set(spec) - {"x", "y"}
    if unknown:
        raise ConfigError(f"fif.{sorted(unknown)[0]}", "unknown field")
    xs = _number_list(_require(spec, "x", list, "fif"), "fif.x")
    if len(xs) < 3 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ConfigError("fif.x", "expected >= 3 strictly increasing abscissae")
    if "y" not in spec:
        raise ConfigError("fif.y", "missing required field")
    y = spec["y"]
    if n == 0:
        ys = _number_list(y, "fif.y")
        if len(ys) != len(xs):
            raise ConfigError("fif.y", f"expected {len(xs)} ordinates, got {len(ys)}")
        return {"x": xs, "y": ys}
    if not isinstance(y, Mapping) or not y:
        raise ConfigError("fif.y", "expected a nonempty object mapping blade keys to ordinates")
    table = {}
    for key in sorted(y):
        try:
            parse_blade_key(key, n)
        except ValueError as exc:
            raise ConfigError(f"fif.y.{key or '<scalar>'}", str(exc)) from exc
        ys = _number_list(y[key], f"fif.y.{key or '<scalar>'}")
        if len(ys) != len(xs):
            raise ConfigError(f"fif.y.{key or '<scalar>'}", f"expected {len(xs)} ordinates")
        table[key] = ys
    return {"x": xs, "y": table}


def _parse_space(spec: Any) -> SpaceSpec:
    if not isinstance(spec, Mapping):
        raise ConfigError("space", "expected an object with a 'tag'")
    tag = _require(spec, "tag", str, "space")
    kwargs = {}
    for name in ("k", "alpha", "p", "q", "s"):
        if name in spec:
            kwargs[name] = spec[name]
    unknown = set(spec) - {"tag", "k", "alpha", "p", "q", "s"}
    if unknown:
        raise ConfigError(f"space.{sorted(unknown)[0]}", "unknown field")
    try:
        return SpaceSpec(tag, **kwargs)
    except ValueError as exc:
        raise ConfigError("space", str(exc)) from exc


def _space_to_dict(space: SpaceSpec) -> dict:
    out: dict[str, Any] = {"tag": space.tag}
    for name in ("k", "alpha", "p", "q", "s"):
        value = getattr(space, name)
        if value is not None:
            out[name] = value
    return out


def _parse_output(spec: Any) -> dict:
    if not isinstance(spec, Mapping):
        raise ConfigError("output", "expected an object")
    unknown = set(spec) - {"path", "format"}
    if unknown:
        raise ConfigError(f"output.{sorted(unknown)[0]}", "unknown field")
    out: dict[str, Any] = {}
    if "path" in spec:
        out["path"] = _require(spec, "path", str, "output")
    if "format" in spec:
        fmt = _require(spec, "format", str, "output")
        if fmt not in ("csv", "json"):
            raise ConfigError("output.format", f"expected 'csv' or 'json', got {fmt!r}")
        out["format"] = fmt
    return out


# ---------------------------------------------------------------------------
# Building runnable problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemSetup:
    """A config resolved into solver-ready objects."""

    config: ProblemConfig
    partition: AffinePartition
    params: RBParams | CliffordRBParams

    @property
    def scalar_mode(self) -> bool:
        return self.config.scalar_mode


def _build_partition(spec: dict) -> AffinePartition:
    lo, hi = spec["interval"]
    if "N" in spec:
        return uniform_partition(lo, hi, spec["N"])
    return from_knots(spec["knots"])


def _build_field(spec: Any, partition: AffinePartition, grid_m: int, label: str) -> Field:
    if isinstance(spec, float):
        return spec
    if "const" in spec:
        return spec["const"]
    if "poly" in spec:
        return Poly(tuple(spec["poly"]))
    samples = spec["samples"]
    if len(samples) != grid_m + 1:
        raise ConfigError(label, f"expected grid_M+1 = {grid_m + 1} samples, got {len(samples)}")
    return GridFunction(partition, np.asarray(samples))


def build_problem(config: ProblemConfig) -> ProblemSetup:
    """Resolve a parsed config into partition and parameters, rechecking sizes."""
    if config.fif is not None:
        x = config.fif["x"]
        s = [float(v) for v in config.s]
        if any(abs(v) >= 1.0 for v in s):
            raise ConfigError("s", "interpolation multipliers must satisfy |s_i| < 1")
        if config.scalar_mode:
            params: RBParams | CliffordRBParams = fif_from_data(x, config.fif["y"], s)
            return ProblemSetup(config, params.partition, params)
        params = clifford_fif_from_data(config.n, x, config.fif["y"], s)
        return ProblemSetup(config, params.partition, params)

    partition = _build_partition(config.partition)
    n_maps = partition.size
    if len(config.s) != n_maps or len(config.q) != n_maps:
        raise ConfigError("q", f"expected {n_maps} q and s entries")
    if config.grid_m < n_maps:
        raise ConfigError("grid_M", f"must be >= N = {n_maps}")
    s_fields = tuple(
        _build_field(entry, partition, config.grid_m, f"s[{i}]")
        for i, entry in enumerate(config.s)
    )
    if config.scalar_mode:
        q_fields = tuple(
            _build_field(entry, partition, config.grid_m, f"q[{i}]")
            for i, entry in enumerate(config.q)
        )
        return ProblemSetup(config, partition, RBParams(partition, q_fields, s_fields))
    q_blades = tuple(
        {
            key: _build_field(spec, partition, config.grid_m, f"q[{i}].{key or '<scalar>'}")
            for key, spec in entry.items()
        }
        for i, entry in enumerate(config.q)
    )
    params = CliffordRBParams(config.n, partition, q_blades, s_fields)
    return ProblemSetup(config, partition, params)

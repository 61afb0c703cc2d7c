import hashlib
import json
import os
import platform
from dataclasses import dataclass
from importlib import resources
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .model import (
    Bundle,
    CoherenceTransfer,
    EvolutionModel,
    ExcitonSystem,
    FieldConfig,
    IntraCoherence,
    validate_system,
)

APP_NAME = "twinphoton"
LOG_DIR_ENV = "TWINPHOTON_LOG_DIR"
BUILTIN_CONFIGS = ("two_level", "dimer_transfer", "dimer_coherence")

_MISSING = object()


def _mac_paths() -> Tuple[str, str]:
    home = os.path.expanduser("~")
    support = os.path.join(home, "Library", "Application Support", APP_NAME)
    logs = os.path.join(home, "Library", "Logs", APP_NAME)
    return support, logs


def _linux_paths() -> Tuple[str, str]:
    home = os.path.expanduser("~")
    config_home = os.environ.get("XDG_CONFIG_HOME", os.path.join(home, ".config"))
    state_home = os.environ.get("XDG_STATE_HOME", os.path.join(home, ".local", "state"))
    support = os.path.join(config_home, APP_NAME)
    logs = os.path.join(state_home, APP_NAME, "logs")
    return support, logs


def get_app_paths() -> Tuple[str, str]:
    if platform.system() == "Darwin":
        return _mac_paths()
    return _linux_paths()


def get_logs_dir() -> str:
    logs = os.environ.get(LOG_DIR_ENV) or get_app_paths()[1]
    os.makedirs(logs, exist_ok=True)
    return logs


@dataclass(frozen=True)
class RunConfig:
    source: str
    raw: dict
    bundle: Bundle
    digest: str
    grid: Optional[Tuple[float, float, int]] = None

    def omega_grid(self) -> Optional[np.ndarray]:
        if self.grid is None:
            return None
        start, stop, points = self.grid
        return np.linspace(start, stop, points)


def config_digest(data: dict) -> str:
    """sha256 of the canonical JSON form; key order and whitespace do not matter."""
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def builtin_config_text(name: str) -> str:
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUILTIN_CONFIGS:
        raise ConfigError("config", f"no built-in config named {name!r}; choose from {', '.join(BUILTIN_CONFIGS)}")
    return resources.files(__package__).joinpath("configs", f"{stem}.json").read_text(encoding="utf-8")


def _read(path_or_name: str) -> Tuple[str, dict]:
    if os.path.exists(path_or_name):
        try:
            with open(path_or_name, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ConfigError("config", f"cannot read {path_or_name}: {e}") from e
        source = os.path.abspath(path_or_name)
    else:
        text = builtin_config_text(os.path.basename(path_or_name))
        source = f"builtin:{path_or_name}"
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"not valid JSON ({e.msg} at line {e.lineno})") from e
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    return source, data


def _get(data: dict, key: str, default=_MISSING):
    node = data
    for part in key.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is _MISSING:
                raise ConfigError(key, "missing required key")
            return default
        node = node[part]
    return node


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    return float(value)


def _vector(value, key: str) -> List[float]:
    if not isinstance(value, list):
        raise ConfigError(key, f"expected a list of numbers, got {value!r}")
    return [_number(v, f"{key}[{i}]") for i, v in enumerate(value)]


def _matrix(value, key: str) -> List[List[float]]:
    if not isinstance(value, list):
        raise ConfigError(key, f"expected a list of rows, got {value!r}")
    return [_vector(row, f"{key}[{i}]") for i, row in enumerate(value)]


def _pair(value, key: str) -> Tuple[int, int]:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value)):
        raise ConfigError(key, f"expected a pair of state indices, got {value!r}")
    return int(value[0]), int(value[1])


def _system(data: dict) -> ExcitonSystem:
    doubles = _vector(_get(data, "system.double_energies", []), "system.double_energies")
    dipoles_ef = _get(data, "system.dipoles_ef") if doubles else _get(data, "system.dipoles_ef", [])
    labels = _get(data, "system.labels", None)
    return ExcitonSystem.build(
        single_energies=_vector(_get(data, "system.single_energies"), "system.single_energies"),
        double_energies=doubles,
        dipoles_ge=_vector(_get(data, "system.dipoles_ge"), "system.dipoles_ge"),
        dipoles_ef=_matrix(dipoles_ef, "system.dipoles_ef"),
        labels=[str(v) for v in labels] if labels else None,
    )


def _field(data: dict) -> FieldConfig:
    def num(name, default=_MISSING):
        return _number(_get(data, f"field.{name}", default), f"field.{name}")

    return FieldConfig(
        pump_frequency=num("pump_frequency"),
        signal_center=num("signal_center"),
        idler_center=num("idler_center"),
        entanglement_time=num("entanglement_time", 0.0),
        delay=num("delay", 0.0),
        conversion_scale=num("conversion_scale", 1.0),
    )


def _model(data: dict, system: ExcitonSystem) -> EvolutionModel:
    n, m = system.n_single, system.n_double
    dephasing = _get(data, "model.dephasing")
    if isinstance(dephasing, (int, float)) and not isinstance(dephasing, bool):
        rate = float(dephasing)
        ge = [rate] * n
        ef = [[rate] * n for _ in range(m)]
    elif isinstance(dephasing, dict):
        ge = _vector(_get(data, "model.dephasing.ge"), "model.dephasing.ge")
        ef = _matrix(_get(data, "model.dephasing.ef"), "model.dephasing.ef") if m else []
    else:
        raise ConfigError("model.dephasing", "expected a number or an object with 'ge' and 'ef'")

    coherences = []
    for i, item in enumerate(_get(data, "model.intra_coherences", []) or []):
        key = f"model.intra_coherences[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(key, "expected an object with 'pair' and 'decay'")
        a, b = _pair(item.get("pair"), f"{key}.pair")
        if "decay" not in item:
            raise ConfigError(f"{key}.decay", "missing required key")
        freq = item.get("frequency")
        coherences.append(
            IntraCoherence(
                a,
                b,
                _number(item["decay"], f"{key}.decay"),
                None if freq is None else _number(freq, f"{key}.frequency"),
            )
        )

    transfers = []
    for i, item in enumerate(_get(data, "model.coherence_transfer", []) or []):
        key = f"model.coherence_transfer[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(key, "expected an object with 'from', 'to' and 'rate'")
        if "rate" not in item:
            raise ConfigError(f"{key}.rate", "missing required key")
        transfers.append(
            CoherenceTransfer(
                _pair(item.get("from"), f"{key}.from"),
                _pair(item.get("to"), f"{key}.to"),
                _number(item["rate"], f"{key}.rate"),
            )
        )

    return EvolutionModel.build(
        rates=_matrix(_get(data, "model.rates"), "model.rates"),
        ground_recovery=_vector(_get(data, "model.ground_recovery"), "model.ground_recovery"),
        dephasing_ge=ge,
        dephasing_ef=ef,
        intra_coherences=coherences,
        coherence_transfer=transfers,
    )


def _grid(data: dict) -> Optional[Tuple[float, float, int]]:
    block = _get(data, "grid", None)
    if block is None:
        return None
    start = _number(_get(data, "grid.start"), "grid.start")
    stop = _number(_get(data, "grid.stop"), "grid.stop")
    points = _get(data, "grid.points")
    if not isinstance(points, int) or points < 2:
        raise ConfigError("grid.points", f"expected an integer >= 2, got {points!r}")
    if stop <= start:
        raise ConfigError("grid.stop", "must exceed grid.start")
    return start, stop, points


def bundle_from_dict(data: dict) -> Bundle:
    """Build and validate the physics bundle; ValidationError lists every issue."""
    system = _system(data)
    return validate_system(system, _field(data), _model(data, system))


def load_run_config(path_or_name: str) -> RunConfig:
    """Load a JSON run config from a path, or a shipped example by bare name."""
    source, data = _read(path_or_name)
    digest = config_digest(data)
    bundle = bundle_from_dict(data)
    return RunConfig(source=source, raw=data, bundle=bundle, digest=digest, grid=_grid(data))


def parse_grid(text: str, flag: str = "--grid") -> np.ndarray:
    """'start:stop:points' to a linspace."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(flag, f"expected start:stop:points, got {text!r}")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(flag, f"expected start:stop:points, got {text!r}") from None
    if points < 2 or stop <= start:
        raise ConfigError(flag, "needs stop > start and at least 2 points")
    return np.linspace(start, stop, points)


def parse_sweep(text: str, flag: str = "--wp") -> np.ndarray:
    """'start:stop:step' to an inclusive range of values."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(flag, f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(flag, f"expected start:stop:step, got {text!r}") from None
    if step <= 0:
        raise ConfigError(flag, "step must be > 0")
    if stop < start:
        raise ConfigError(flag, "empty sweep range")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def parse_delays(text: str, flag: str = "--dt") -> List[float]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise ConfigError(flag, "empty delay list")
    try:
        delays = [float(v) for v in values]
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated numbers, got {text!r}") from None
    if any(d < 0 for d in delays):
        raise ConfigError(flag, "delays must be >= 0")
    return delays

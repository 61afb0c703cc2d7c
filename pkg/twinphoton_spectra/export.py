"""Data tables and manifest sidecars.

Tables are tab-separated with a commented header; nothing time-dependent goes
into them, so identical inputs give byte-identical files. Timestamps and wall
time live in the JSON manifest next to each table.
"""
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field as dc_field
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import ExportError
from .signal import COMPONENTS, Spectrum1D, component_table
from .twod import CorrespondenceReport

FLOAT_FMT = "%.12e"
MANIFEST_SUFFIX = ".manifest.json"


def run_key(config_digest: str, command: str, flags: Dict[str, object]) -> str:
    """Deterministic short hash of what produced an output."""
    payload = json.dumps(
        {"config": config_digest, "command": command, "flags": flags, "version": __version__},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


@dataclass
class RunManifest:
    config_path: str
    config_hash: str
    command: str
    flags: Dict[str, object]
    grids: Dict[str, object]
    run_key: str
    outputs: List[str] = dc_field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__
    timestamp: str = ""
    warnings: List[str] = dc_field(default_factory=list)

    def stamp(self) -> None:
        self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(parent, exist_ok=True)
    except OSError as e:
        raise ExportError(f"cannot create directory {parent}: {e}") from e


def write_table(path: str, columns: Sequence[str], data: np.ndarray, key: str, extra: Sequence[str] = ()) -> str:
    _ensure_parent(path)
    header = [f"columns: {' '.join(columns)}", f"run-key: {key}"] + list(extra)
    try:
        np.savetxt(path, np.atleast_2d(data), fmt=FLOAT_FMT, delimiter="\t", header="\n".join(header), comments="# ")
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e
    return path


def write_spectrum(path: str, spectrum: Spectrum1D, key: str) -> str:
    """One row per omega: omega, total, then every pathway component."""
    columns = ["omega", "total"] + list(COMPONENTS)
    meta = spectrum.meta
    extra = [f"delay: {meta.get('delay', 0.0)!r}", f"mode: {meta.get('mode', '')}"]
    extra += [f"warning: {w}" for w in meta.get("warnings", [])]
    return write_table(path, columns, component_table(spectrum), key, extra)


def write_sweep(path: str, pumps: np.ndarray, omega: np.ndarray, values: np.ndarray, key: str, delay: float) -> str:
    """Matrix of Delta S with one row per pump frequency and one column per omega."""
    columns = ["omega_p"] + [f"S@{FLOAT_FMT % w}" for w in omega]
    data = np.column_stack([np.asarray(pumps, dtype=float), np.asarray(values, dtype=float)])
    return write_table(path, columns, data, key, [f"delay: {delay!r}"])


def report_dict(report: CorrespondenceReport, key: str) -> dict:
    return {
        "run_key": key,
        "pump_frequency": report.pump_frequency,
        "tolerance": report.tolerance,
        "passed": report.passed,
        "checks": [asdict(c) for c in report.checks],
    }


def write_json(path: str, payload: dict) -> str:
    _ensure_parent(path)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e
    return path


def write_manifest(table_path: str, manifest: RunManifest, sidecar: Optional[str] = None) -> str:
    """Write the manifest next to a table (or at an explicit sidecar path)."""
    manifest.stamp()
    return write_json(sidecar or table_path + MANIFEST_SUFFIX, asdict(manifest))

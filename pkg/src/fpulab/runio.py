"""On-disk run format: manifest.json + series.bin + a one-writer lock.

The manifest is strict JSON (schema_version 1, unknown fields rejected) so
two implementations cannot silently disagree about a run. The series file is
raw float64 little-endian with no header: for each retained snapshot the N
positions are followed by the N momenta, which makes the expected byte count
a pure function of the manifest.
"""

import json
import os
from dataclasses import dataclass

import numpy as np

from .chain import ModelParams

SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"
SERIES_NAME = "series.bin"
LOCK_NAME = "lock"

_TOP_FIELDS = {"schema_version", "params", "dt", "seed", "warmup_steps",
               "sample_every", "samples", "horizon", "created_utc",
               "producer"}
_PARAM_FIELDS = {"n", "beta", "energy", "edensity"}


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce and to size a stored run."""
    params: ModelParams
    dt: float
    seed: int
    warmup_steps: int
    sample_every: int
    samples: int
    horizon: float
    created_utc: str
    producer: str
    schema_version: int = SCHEMA_VERSION

    def expected_bytes(self):
        return self.samples * 2 * self.params.n * 8

    def to_json(self):
        doc = {
            "schema_version": self.schema_version,
            "params": {
                "n": self.params.n,
                "beta": self.params.beta,
                "energy": self.params.energy,
                "edensity": self.params.edensity,
            },
            "dt": self.dt,
            "seed": self.seed,
            "warmup_steps": self.warmup_steps,
            "sample_every": self.sample_every,
            "samples": self.samples,
            "horizon": self.horizon,
            "created_utc": self.created_utc,
            "producer": self.producer,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def manifest_from_json(text):
    """Parse and validate a manifest document (strict: no unknown fields)."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("manifest must be a JSON object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise ValueError("unknown manifest fields: %s" % sorted(unknown))
    missing = _TOP_FIELDS - set(doc)
    if missing:
        raise ValueError("missing manifest fields: %s" % sorted(missing))
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValueError("unsupported schema_version %r (this reader handles %d)"
                         % (doc["schema_version"], SCHEMA_VERSION))
    pdoc = doc["params"]
    unknown = set(pdoc) - _PARAM_FIELDS
    if unknown:
        raise ValueError("unknown params fields: %s" % sorted(unknown))
    params = ModelParams(n=int(pdoc["n"]), beta=float(pdoc["beta"]),
                         energy=float(pdoc["energy"]))
    if "edensity" in pdoc and not np.isclose(pdoc["edensity"], params.edensity,
                                             rtol=1e-12, atol=0.0):
        raise ValueError("params.edensity inconsistent with energy/n")
    man = RunManifest(params=params, dt=float(doc["dt"]), seed=int(doc["seed"]),
                      warmup_steps=int(doc["warmup_steps"]),
                      sample_every=int(doc["sample_every"]),
                      samples=int(doc["samples"]),
                      horizon=float(doc["horizon"]),
                      created_utc=str(doc["created_utc"]),
                      producer=str(doc["producer"]))
    span = (man.samples - 1) * man.sample_every * man.dt
    if abs(span - man.horizon) > man.sample_every * man.dt + 1e-9:
        raise ValueError("declared horizon %.6g inconsistent with "
                         "samples*sample_every*dt = %.6g" % (man.horizon, span))
    return man


def load_manifest(run_dir):
    with open(os.path.join(run_dir, MANIFEST_NAME), "r", encoding="utf-8") as fh:
        return manifest_from_json(fh.read())


def save_manifest(run_dir, manifest):
    with open(os.path.join(run_dir, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json())


def write_series(path, qs, ps):
    """Store snapshot rows as raw little-endian float64, q block then p block."""
    qs = np.asarray(qs, dtype=np.float64)
    ps = np.asarray(ps, dtype=np.float64)
    if qs.shape != ps.shape or qs.ndim != 2:
        raise ValueError("qs and ps must be matching [samples x n] matrices")
    inter = np.stack([qs, ps], axis=1)  # [samples, 2, n]
    with open(path, "wb") as fh:
        fh.write(inter.astype("<f8").tobytes())


def read_series(path, manifest):
    """Load (qs, ps) back; the byte count must match the manifest exactly."""
    expected = manifest.expected_bytes()
    actual = os.path.getsize(path)
    if actual != expected:
        raise ValueError("series file holds %d bytes, manifest requires %d"
                         % (actual, expected))
    raw = np.fromfile(path, dtype="<f8")
    inter = raw.reshape(manifest.samples, 2, manifest.params.n)
    return np.ascontiguousarray(inter[:, 0]), np.ascontiguousarray(inter[:, 1])


def load_run(run_dir):
    """(manifest, qs, ps) of a stored run directory."""
    man = load_manifest(run_dir)
    qs, ps = read_series(os.path.join(run_dir, SERIES_NAME), man)
    return man, qs, ps


class RunLock:
    """Exclusive advisory lock: a `lock` file created O_EXCL in the run dir."""

    def __init__(self, run_dir):
        self.path = os.path.join(run_dir, LOCK_NAME)
        self._fd = None

    def __enter__(self):
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise RuntimeError(
                "run directory is locked by another writer (%s exists)"
                % self.path) from None
        os.write(self._fd, ("%d\n" % os.getpid()).encode())
        return self

    def __exit__(self, exc_type, exc, tb):
        if self._fd is not None:
            os.close(self._fd)
            os.unlink(self.path)
        return False

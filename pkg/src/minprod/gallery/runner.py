"""Run experiments into reports whose hashed payload is reproducible."""

from __future__ import annotations

import hashlib
import json
import time
import traceback
from dataclasses import dataclass, field

from ..report import jsonable
from ..symreal import CATALOG
from .catalog import GALLERY, gallery
from .config import ConfigError, Experiment, declare_registry, evaluate
from .ops import ANALYSES, Context


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def blob_hash(obj) -> str:
    """Content hash in the style of a git blob: sha1 of a header plus canonical JSON."""
    data = canonical(obj).encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


@dataclass
class RunReport:
    experiment: str
    params_hash: str
    analyses: list[dict]
    status: str
    wall_clock: float = 0.0
    claim: str = ""
    seed: int = 0
    timings: list[float] = field(default_factory=list)

    def payload(self) -> dict:
        """Everything that must reproduce exactly; wall-clock fields are left out."""
        return {"experiment": self.experiment, "params_hash": self.params_hash, "seed": self.seed,
                "claim": self.claim, "analyses": self.analyses, "status": self.status}

    @property
    def payload_hash(self) -> str:
        return blob_hash(self.payload())

    def to_json(self) -> dict:
        return {**self.payload(), "payload_hash": self.payload_hash, "wall_clock": round(self.wall_clock, 3),
                "timings": [round(t, 3) for t in self.timings]}


def run_experiment(e: Experiment, seed: int | None = None) -> RunReport:
    """Build the system, run each analysis in order and compare with its expected verdict.

    Builder failures raise ConfigError; a failing analysis is recorded with
    verdict ``error`` and counts as a mismatch.
    """
    e.validate()
    declare_registry(CATALOG)
    seed = e.seed if seed is None else seed
    t0 = time.perf_counter()
    config = e.to_json()
    config["seed"] = seed
    try:
        system = evaluate(e.builder) if e.builder is not None else None
    except Exception as exc:
        raise ConfigError(f"{e.name}: builder failed: {exc}") from exc
    ctx = Context(seed)
    rows, timings = [], []
    ok = True
    for a in e.plan:
        t1 = time.perf_counter()
        try:
            row = ANALYSES[a.op](system, a.params, ctx).to_json()
        except Exception as exc:
            row = {"op": a.op, "params": jsonable(a.params), "verdict": "error",
                   "evidence": {"error": f"{type(exc).__name__}: {exc}",
                                "where": traceback.extract_tb(exc.__traceback__)[-1].name}}
        row["expect"] = a.expect
        row["matched"] = row["verdict"] == a.expect
        ok &= row["matched"]
        rows.append(row)
        timings.append(time.perf_counter() - t1)
    return RunReport(e.name, blob_hash(config), rows, "pass" if ok else "fail", time.perf_counter() - t0, e.claim,
                     seed, timings)


def list_gallery() -> list[dict]:
    return [{"name": e.name, "claim": e.claim, "analyses": [a.op for a in e.plan]} for e in GALLERY]


def get_experiment(name: str) -> Experiment:
    try:
        return gallery()[name]
    except KeyError:
        raise ConfigError(f"no gallery experiment named {name!r}") from None


def merge_reports(docs: list) -> dict:
    """Combine report documents (single reports or merged bundles), sorted by experiment name."""
    runs = {}
    for d in docs:
        for r in d.get("runs", [d]):
            if "experiment" not in r:
                raise ConfigError("not a run report")
            name = r["experiment"]
            if name in runs and runs[name].get("payload_hash") != r.get("payload_hash"):
                raise ConfigError(f"conflicting reports for {name!r}")
            runs[name] = r
    merged = [runs[k] for k in sorted(runs)]
    status = "pass" if all(r["status"] == "pass" for r in merged) else "fail"
    return {"runs": merged, "status": status}

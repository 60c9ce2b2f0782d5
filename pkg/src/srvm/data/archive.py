"""Versioned JSON model archives.

Floats go through ``repr``-exact JSON, so every coefficient survives a
save/load cycle bit for bit.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ArchiveVersionError, DeserializationError
from ..kernels import AnchorSet, KernelSpec
from ..pipeline.preprocess import ScalingSpec
from ..replica import Ensemble, KernelGroup, ReplicaModel, VotingRule

FORMAT = "srvm-model"
VERSION = 1


def _replica_dict(m: ReplicaModel) -> dict:
    out = {
        "spec": m.spec.to_dict(),
        "coefficients": m.coefficients.tolist(),
        "training_energy": m.training_energy,
        "seed": m.seed,
        "dim": m.dim,
        "anchors": None,
    }
    if m.anchors is not None:
        out["anchors"] = {
            "points": m.anchors.anchors.tolist(),
            "seed": m.anchors.seed,
            "bounds": m.anchors.bounds.tolist(),
        }
    return out


def save_model(ensemble: Ensemble, scaling: ScalingSpec | None = None, meta: dict | None = None) -> bytes:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "voting": {"transform": ensemble.voting.transform, "scale": ensemble.voting.scale},
        "groups": None
        if not ensemble.groups
        else [{"name": g.name, "weight": g.weight, "indices": list(g.indices)} for g in ensemble.groups],
        "replicas": [_replica_dict(m) for m in ensemble.replicas],
        "scaling": scaling.to_dict() if scaling is not None else None,
        "meta": meta or {},
    }
    return json.dumps(doc, allow_nan=False).encode("utf-8")


def _replica(d: dict) -> ReplicaModel:
    anchors = None
    if d["anchors"] is not None:
        a = d["anchors"]
        anchors = AnchorSet(
            np.array(a["points"], dtype=float).reshape(-1, int(d["dim"])),
            int(a["seed"]),
            np.array(a["bounds"], dtype=float),
        )
    return ReplicaModel(
        KernelSpec.from_dict(d["spec"]),
        anchors,
        np.array(d["coefficients"], dtype=float),
        float(d["training_energy"]),
        int(d["seed"]),
        int(d["dim"]),
    )


def load_model(data: bytes) -> tuple[Ensemble, ScalingSpec | None]:
    """Inverse of :func:`save_model`; nothing partial is ever returned."""
    try:
        doc = json.loads(data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DeserializationError(f"archive is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise DeserializationError("not an srvm model archive")
    if doc.get("version") != VERSION:
        raise ArchiveVersionError(f"archive version {doc.get('version')!r} is not supported (expected {VERSION})")
    try:
        replicas = [_replica(r) for r in doc["replicas"]]
        voting = VotingRule(doc["voting"]["transform"], float(doc["voting"]["scale"]))
        groups = None
        if doc["groups"]:
            groups = [KernelGroup(g["name"], float(g["weight"]), tuple(g["indices"])) for g in doc["groups"]]
        scaling = ScalingSpec.from_dict(doc["scaling"]) if doc["scaling"] is not None else None
        return Ensemble(replicas, voting, groups), scaling
    except DeserializationError:
        raise
    except Exception as exc:
        raise DeserializationError(f"malformed archive: {exc}") from None


def archive_meta(data: bytes) -> dict:
    """The free-form ``meta`` block of an archive."""
    try:
        doc = json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DeserializationError(f"archive is not valid JSON: {exc}") from None
    return doc.get("meta", {}) if isinstance(doc, dict) else {}

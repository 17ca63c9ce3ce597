"""Model and divisor-specification files.

Models travel as plain JSON documents with nested arrays (row-major); the
matrices are desk scale, so diffability beats compactness.  Floats are
serialized with Python's shortest round-trip representation, which restores
the exact double on read; rewriting a canonically formatted file is
bit-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .divisors import SubspaceSpec, continuum_angle_basis
from .matnum import ToleranceConfig, eigen_blocks
from .statespace import Realization

__all__ = [
    "ModelFileError",
    "SpecFileError",
    "ModelDocument",
    "read_model",
    "write_model",
    "read_spec_entries",
    "expand_spec_entries",
]


class ModelFileError(ValueError):
    """The model file cannot be parsed into a realization."""


class SpecFileError(ValueError):
    """The divisor specification file is malformed."""


@dataclass(frozen=True)
class ModelDocument:
    name: str
    realization: Realization
    tolerances: ToleranceConfig | None


def _matrix(doc, key):
    if key not in doc:
        raise ModelFileError(f"missing matrix {key!r}")
    try:
        arr = np.asarray(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFileError(f"matrix {key!r} is not numeric") from exc
    if arr.size == 0:
        return arr.reshape((0, arr.shape[-1]) if arr.ndim == 2 else (0, 0))
    if arr.ndim != 2:
        raise ModelFileError(f"matrix {key!r} must be a nested array")
    if not np.all(np.isfinite(arr)):
        raise ModelFileError(f"matrix {key!r} contains non-finite entries")
    return arr


def read_model(path) -> ModelDocument:
    """Read a model file.  Raises ModelFileError on any structural problem."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFileError("model file must be a JSON object")
    name = str(doc.get("name", "model"))
    mats = {k: _matrix(doc, k) for k in ("A", "B", "C", "D")}
    try:
        realization = Realization(mats["A"], mats["B"], mats["C"], mats["D"])
    except Exception as exc:
        raise ModelFileError(f"inconsistent matrix dimensions: {exc}") from exc
    tolerances = None
    if "tolerances" in doc:
        t = doc["tolerances"]
        if not isinstance(t, dict):
            raise ModelFileError("tolerances must be an object")
        try:
            tolerances = ToleranceConfig(
                rank_rel_tol=float(t.get("rank_rel_tol", ToleranceConfig.rank_rel_tol)),
                residual_tol=float(t.get("residual_tol", ToleranceConfig.residual_tol)),
                circle_samples=int(t.get("circle_samples", ToleranceConfig.circle_samples)),
            )
        except (TypeError, ValueError) as exc:
            raise ModelFileError(f"bad tolerances: {exc}") from exc
    return ModelDocument(name=name, realization=realization,
                         tolerances=tolerances)


def write_model(path, realization: Realization, name: str = "model",
                tolerances: ToleranceConfig | None = None) -> None:
    """Write a model file in canonical form (fixed key order, two-space
    indent, LF endings, shortest round-trip floats)."""
    doc = {
        "name": name,
        "A": realization.a.tolist(),
        "B": realization.b.tolist(),
        "C": realization.c.tolist(),
        "D": realization.d.tolist(),
    }
    if tolerances is not None:
        doc["tolerances"] = {
            "rank_rel_tol": tolerances.rank_rel_tol,
            "residual_tol": tolerances.residual_tol,
            "circle_samples": tolerances.circle_samples,
        }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_spec_entries(path) -> list[dict]:
    """Read the raw entries of a divisor specification file.

    The file is a JSON object with a ``specs`` list; each entry gives, per
    block, exactly one of ``gamma_select``/``gamma_basis`` and one of
    ``a_select``/``a_basis`` (missing means empty selection), plus an
    optional ``theta_grid`` count for sampling a selected two-dimensional
    repeated eigenspace.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFileError(f"cannot read spec file {path}: {exc}") from exc
    if isinstance(doc, list):
        entries = doc
    elif isinstance(doc, dict) and isinstance(doc.get("specs"), list):
        entries = doc["specs"]
    else:
        raise SpecFileError("spec file must be a JSON list or {\"specs\": [...]}")
    allowed = {"gamma_select", "gamma_basis", "a_select", "a_basis",
               "theta_grid", "name"}
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise SpecFileError(f"spec entry {i} must be an object")
        unknown = set(entry) - allowed
        if unknown:
            raise SpecFileError(f"spec entry {i} has unknown keys {sorted(unknown)}")
        for part in ("gamma", "a"):
            if f"{part}_select" in entry and f"{part}_basis" in entry:
                raise SpecFileError(
                    f"spec entry {i}: give {part}_select or {part}_basis, not both"
                )
        if "theta_grid" in entry and (not isinstance(entry["theta_grid"], int)
                                      or entry["theta_grid"] < 1):
            raise SpecFileError(f"spec entry {i}: theta_grid must be a positive int")
    return entries


def _entry_to_spec(entry) -> SubspaceSpec:
    kwargs = {}
    if "gamma_select" in entry:
        kwargs["gamma_select"] = tuple(int(i) for i in entry["gamma_select"])
    if "gamma_basis" in entry:
        kwargs["gamma_basis"] = np.asarray(entry["gamma_basis"], dtype=float)
    if "a_select" in entry:
        kwargs["a_select"] = tuple(int(i) for i in entry["a_select"])
    if "a_basis" in entry:
        kwargs["a_basis"] = np.asarray(entry["a_basis"], dtype=float)
    return SubspaceSpec(**kwargs)


def _expand_theta(entry, cp, config) -> list[SubspaceSpec]:
    """Expand a theta_grid entry into one spec per sampled angle.

    The sampled eigenspace is the unique two-dimensional repeated eigenvalue
    cluster covered by the entry's selections; its selected indices are
    replaced by explicit one-dimensional angle bases while other selected
    blocks keep their invariant bases.
    """
    count = entry["theta_grid"]
    sides = {"gamma": cp.gamma, "a": cp.a_inv_t}
    target = None
    fixed = {"gamma": [], "a": []}
    for part, matrix in sides.items():
        select = set(int(i) for i in entry.get(f"{part}_select", ()))
        if not select:
            continue
        for blk in eigen_blocks(matrix, config):
            hit = select & set(blk.indices)
            if not hit:
                continue
            if hit != set(blk.indices):
                raise SpecFileError(
                    f"selection splits the eigenvalue cluster at "
                    f"{blk.eigenvalues[0]}"
                )
            if blk.dim >= 2 and blk.kind == "repeated":
                if blk.dim != 2:
                    raise SpecFileError(
                        "theta_grid sampling needs a two-dimensional eigenspace"
                    )
                if target is not None:
                    raise SpecFileError(
                        "theta_grid entry selects more than one repeated "
                        "eigenspace"
                    )
                target = (part, blk)
            else:
                fixed[part].append(blk.basis)
    if target is None:
        raise SpecFileError(
            "theta_grid entry does not select a repeated eigenspace"
        )
    part, blk = target
    out = []
    for j in range(count):
        theta = np.pi * j / count
        angle = continuum_angle_basis(blk.basis, theta)
        kwargs = {}
        for p in ("gamma", "a"):
            cols = list(fixed[p])
            if p == part:
                cols.append(angle)
            if cols:
                kwargs[f"{p}_basis"] = np.hstack(cols)
            elif f"{p}_basis" in entry:
                kwargs[f"{p}_basis"] = np.asarray(entry[f"{p}_basis"],
                                                  dtype=float)
        out.append(SubspaceSpec(**kwargs))
    return out


def expand_spec_entries(entries, cp, config) -> list[SubspaceSpec]:
    """Resolve raw spec entries into subspace specifications, expanding
    theta grids against the given conjugate phase structure."""
    specs = []
    for entry in entries:
        if "theta_grid" in entry:
            specs.extend(_expand_theta(entry, cp, config))
        else:
            specs.append(_entry_to_spec(entry))
    return specs

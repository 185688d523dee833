"""JSON spec-file ingestion and artifact serialization.

A spec document is a JSON object with any of the blocks

- ``"space"``: ``{"atoms": [...], "probs": [...]}``
- ``"generators"``: ``[["a"], ["a", "b"], ...]``
- ``"kernels"``: list of
  ``{"name": ..., "arity": m, "values": {"a,b": 0.7, ...},
  "symmetric": true, "value_space": "unit" | "real" | {"labels": K}}``
- ``"cdfs"``: ``{name: {"kind": "step" | "pwl", "points": [[x, c], ...]}}``
- ``"partition"``: ``{"breakpoints": [...], "cells": [...]}`` with the
  kernels keyed by cell indices (``"values": {"0,1": 0.7}``) -- the
  form :func:`dump_represented` writes and ``represent`` emits.

Table keys join atom ids (or cell indices) with commas, so atom ids in
spec files must be comma-free strings.  When a kernel is flagged
symmetric, its ``values`` may list one representative per orbit; the
loader completes the orbit and rejects inconsistent duplicates.

Errors raise :class:`~unirep.errors.SpecError` with a field path
locating the offending entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import permutations
from pathlib import Path

from .errors import SpecError
from .kernels import Kernel, KernelFamily, ValueSpace
from .spaces import Cdf, DiscreteSpace, IntervalPartition, validate_space

__all__ = ["SpecDocument", "load_spec", "loads_spec", "dump_represented"]


@dataclass(frozen=True)
class SpecDocument:
    """Validated domain objects parsed from one spec file."""

    space: DiscreteSpace | None
    partition: IntervalPartition | None
    generators: tuple[tuple[str, ...], ...] | None
    family: KernelFamily | None
    cdfs: dict[str, Cdf]

    @property
    def domain(self):
        return self.space if self.space is not None else self.partition

    def require(self, attr: str):
        value = getattr(self, attr)
        if value is None:
            raise SpecError(f"spec file is missing the {attr!r} block", field=attr)
        return value


def load_spec(path) -> SpecDocument:
    """Parse and validate a spec file from disk."""
    text = Path(path).read_text(encoding="utf-8")
    return loads_spec(text, source=str(path))


def loads_spec(text: str, source: str = "<spec>") -> SpecDocument:
    """Parse and validate a spec document from a JSON string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError(f"{source} must be a JSON object")
    return parse_spec(doc)


def parse_spec(doc: dict) -> SpecDocument:
    space = _parse_space(doc["space"]) if "space" in doc else None
    partition = _parse_partition(doc["partition"]) if "partition" in doc else None
    if space is not None and partition is not None:
        raise SpecError("a spec file carries either a space or a partition, not both")

    generators = None
    if "generators" in doc:
        gens = doc["generators"]
        if not isinstance(gens, list) or not all(isinstance(g, list) for g in gens):
            raise SpecError("must be a list of atom-id lists", field="generators")
        generators = tuple(tuple(g) for g in gens)

    family = None
    if "kernels" in doc:
        if space is None and partition is None:
            raise SpecError("kernels need a space or partition block", field="kernels")
        domain = space if space is not None else partition
        kernels = doc["kernels"]
        if not isinstance(kernels, list) or not kernels:
            raise SpecError("must be a nonempty list", field="kernels")
        parsed = tuple(
            _parse_kernel(k, domain, f"kernels[{i}]") for i, k in enumerate(kernels)
        )
        family = KernelFamily(parsed)

    cdf_blocks = doc.get("cdfs", {})
    if not isinstance(cdf_blocks, dict):
        raise SpecError("must be an object of named CDFs", field="cdfs")
    cdfs = {}
    for name, block in cdf_blocks.items():
        cdfs[name] = _parse_cdf(block, f"cdfs[{name!r}]")

    return SpecDocument(space, partition, generators, family, cdfs)


def _parse_space(block, path: str = "space") -> DiscreteSpace:
    if not isinstance(block, dict):
        raise SpecError("must be an object with atoms and probs", field=path)
    try:
        atoms = block["atoms"]
        probs = block["probs"]
    except KeyError as exc:
        raise SpecError(f"missing field {exc.args[0]!r}", field=path) from None
    if not isinstance(atoms, list):
        raise SpecError("must be a list", field=f"{path}.atoms")
    for a in atoms:
        if not isinstance(a, str) or "," in a:
            raise SpecError(
                f"atom ids in spec files are comma-free strings, got {a!r}",
                field=f"{path}.atoms",
            )
    if not isinstance(probs, list):
        raise SpecError("must be a list", field=f"{path}.probs")
    try:
        return validate_space(atoms, probs)
    except SpecError as exc:
        raise SpecError(exc.message, field=f"{path}.{exc.field or 'probs'}") from None


def _parse_partition(block, path: str = "partition") -> IntervalPartition:
    if not isinstance(block, dict):
        raise SpecError("must be an object with breakpoints and cells", field=path)
    try:
        bp = block["breakpoints"]
        cells = block["cells"]
    except KeyError as exc:
        raise SpecError(f"missing field {exc.args[0]!r}", field=path) from None
    try:
        return IntervalPartition(tuple(float(b) for b in bp), tuple(cells))
    except SpecError as exc:
        raise SpecError(exc.message, field=path) from None


def _parse_cdf(block, path: str) -> Cdf:
    if not isinstance(block, dict) or "kind" not in block or "points" not in block:
        raise SpecError("must be an object with kind and points", field=path)
    kind = block["kind"]
    points = block["points"]
    if not isinstance(points, list) or not all(
        isinstance(p, list) and len(p) == 2 for p in points
    ):
        raise SpecError("points must be a list of [x, c] pairs", field=f"{path}.points")
    try:
        return Cdf(kind, tuple((float(x), float(c)) for x, c in points))
    except SpecError as exc:
        raise SpecError(exc.message, field=f"{path}.{exc.field or 'points'}") from None


def _parse_value_space(obj, path: str) -> ValueSpace:
    if obj == "real":
        return ValueSpace("real")
    if obj == "unit":
        return ValueSpace("unit")
    if isinstance(obj, dict) and set(obj) == {"labels"}:
        count = obj["labels"]
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise SpecError(f"label count must be a positive integer, got {count!r}", field=path)
        return ValueSpace("labels", count)
    raise SpecError(
        f"value_space must be \"unit\", \"real\" or {{\"labels\": K}}, got {obj!r}",
        field=path,
    )


def _parse_kernel(block, domain, path: str) -> Kernel:
    if not isinstance(block, dict):
        raise SpecError("must be an object", field=path)
    for required in ("name", "arity", "values", "value_space"):
        if required not in block:
            raise SpecError(f"missing field {required!r}", field=path)
    name = block["name"]
    if not isinstance(name, str) or not name:
        raise SpecError("kernel name must be a nonempty string", field=f"{path}.name")
    arity = block["arity"]
    value_space = _parse_value_space(block["value_space"], f"{path}.value_space")
    symmetric = bool(block.get("symmetric", False))
    raw = block["values"]
    if not isinstance(raw, dict):
        raise SpecError("values must be an object", field=f"{path}.values")

    by_cells = isinstance(domain, IntervalPartition)
    table: dict[tuple, object] = {}
    for key_text, v in raw.items():
        parts = key_text.split(",") if key_text else [""]
        if by_cells:
            try:
                key = tuple(int(p) for p in parts)
            except ValueError:
                raise SpecError(
                    f"cell-table key {key_text!r} is not a comma-joined index tuple",
                    field=f"{path}.values",
                ) from None
        else:
            key = tuple(parts)
        if value_space.kind == "labels" and isinstance(v, float) and v.is_integer():
            v = int(v)
        if symmetric:
            for perm in permutations(key):
                if perm in table and table[perm] != v:
                    raise SpecError(
                        f"symmetric orbit of {key_text!r} lists conflicting values",
                        field=f"{path}.values",
                    )
                table[perm] = v
        else:
            if key in table:
                raise SpecError(f"duplicate key {key_text!r}", field=f"{path}.values")
            table[key] = v
    try:
        return Kernel(
            name=name,
            arity=arity,
            value_space=value_space,
            domain=domain,
            table=table,
            symmetric=symmetric,
        )
    except SpecError as exc:
        raise SpecError(exc.message, field=f"{path}.values") from None


def _dump_value_space(vs: ValueSpace):
    if vs.kind == "labels":
        return {"labels": vs.num_labels}
    return vs.kind


def dump_represented(family: KernelFamily) -> dict:
    """Serialize a step family (with its partition) to the artifact form
    accepted back by :func:`load_spec`."""
    if not isinstance(family.domain, IntervalPartition):
        raise SpecError("dump_represented expects a family of step kernels")
    partition = family.domain
    kernels = []
    for k in family:
        values = {
            ",".join(str(c) for c in key): v for key, v in sorted(k.table.items())
        }
        kernels.append(
            {
                "name": k.name,
                "arity": k.arity,
                "value_space": _dump_value_space(k.value_space),
                "symmetric": k.symmetric,
                "values": values,
            }
        )
    return {
        "partition": {
            "breakpoints": list(partition.breakpoints),
            "cells": list(partition.cell_labels),
        },
        "kernels": kernels,
    }

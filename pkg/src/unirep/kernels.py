"""Multivariate function families over a discrete space or an interval partition.

A :class:`Kernel` is an arity-m function given by a full table: either
over atom-id tuples of a :class:`~unirep.spaces.DiscreteSpace` (a table
kernel) or over cell-index tuples of an
:class:`~unirep.spaces.IntervalPartition` (a step kernel, i.e. a
function on [0,1]^m constant on cell boxes).  Values are stored and
compared bit-exactly: every downstream equivalence test draws both of
its sides from the same tables, so exact equality is the correct
comparison for joint-law support points.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import ArityError, RangeError, SpecError, SymmetryError, UnsupportedError
from .spaces import DiscreteSpace, IntervalPartition, lookup_cell

__all__ = [
    "ValueSpace",
    "Kernel",
    "KernelFamily",
    "eval_kernel",
    "check_symmetry",
]


@dataclass(frozen=True)
class ValueSpace:
    """Value space of a kernel: the reals, a finite label set, or [0,1]."""

    kind: str  # "real" | "unit" | "labels"
    num_labels: int | None = None

    def __post_init__(self):
        if self.kind not in ("real", "unit", "labels"):
            raise SpecError(f"unknown value space {self.kind!r}", field="value_space")
        if self.kind == "labels":
            if not isinstance(self.num_labels, int) or self.num_labels < 1:
                raise SpecError(
                    f"label count must be a positive integer, got {self.num_labels!r}",
                    field="value_space",
                )
        elif self.num_labels is not None:
            raise SpecError("num_labels only applies to kind 'labels'", field="value_space")

    def check_value(self, v, where: str):
        if self.kind == "labels":
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise SpecError(f"{where}: label value must be an integer, got {v!r}")
            if not 0 <= v < self.num_labels:
                raise RangeError(f"{where}: label {v} outside 0..{self.num_labels - 1}")
        else:
            if isinstance(v, bool) or not isinstance(v, (int, float, np.floating, np.integer)):
                raise SpecError(f"{where}: value must be a number, got {v!r}")
            if not np.isfinite(v):
                raise RangeError(f"{where}: value {v} is not finite")
            if self.kind == "unit" and not 0.0 <= v <= 1.0:
                raise RangeError(f"{where}: value {v} outside [0,1]")


REAL = ValueSpace("real")
UNIT = ValueSpace("unit")


def labels(k: int) -> ValueSpace:
    return ValueSpace("labels", k)


@dataclass(frozen=True)
class Kernel:
    """An arity-m function given by a full table over its domain.

    Parameters
    ----------
    name : str
    arity : int
        Positive and finite; infinite arities are out of scope.
    value_space : ValueSpace
    domain : DiscreteSpace or IntervalPartition
        Table kernels live on a discrete space (keys are atom-id
        tuples); step kernels live on an interval partition (keys are
        0-based cell-index tuples).
    table : mapping
        Must cover every tuple of the domain, ``len(domain)**arity``
        entries in total.
    symmetric : bool
        Declared flag; verified eagerly, never trusted.
    """

    name: str
    arity: int
    value_space: ValueSpace
    domain: DiscreteSpace | IntervalPartition
    table: Mapping[tuple, object]
    symmetric: bool = False

    def __post_init__(self):
        if self.arity == float("inf"):
            raise UnsupportedError("infinite arity is out of scope")
        if not isinstance(self.arity, int) or isinstance(self.arity, bool) or self.arity < 1:
            raise ArityError(f"arity must be a positive integer, got {self.arity!r}")
        if not isinstance(self.domain, (DiscreteSpace, IntervalPartition)):
            raise SpecError(f"unsupported kernel domain {type(self.domain).__name__}")
        keyset = self._domain_keys()
        table = dict(self.table)
        m = self.arity
        expected = len(keyset) ** m
        where = f"kernel {self.name!r}"
        for key, v in table.items():
            if not isinstance(key, tuple) or len(key) != m:
                raise SpecError(f"{where}: table key {key!r} is not an arity-{m} tuple")
            for coord in key:
                if coord not in keyset:
                    raise SpecError(f"{where}: table key {key!r} references unknown {coord!r}")
            self.value_space.check_value(v, f"{where} at {key!r}")
        if len(table) != expected:
            raise SpecError(
                f"{where}: table has {len(table)} entries, needs all {expected} tuples"
            )
        object.__setattr__(self, "table", MappingProxyType(table))
        if self.symmetric:
            ok, witness = check_symmetry(self)
            if not ok:
                raise SymmetryError(
                    f"{where} declared symmetric but "
                    f"{witness[0]} -> {table[witness[0]]!r} while "
                    f"{witness[1]} -> {table[witness[1]]!r}"
                )

    def _domain_keys(self) -> set:
        if isinstance(self.domain, DiscreteSpace):
            return set(self.domain.atom_ids)
        return set(range(len(self.domain)))

    @property
    def is_step(self) -> bool:
        return isinstance(self.domain, IntervalPartition)


@dataclass(frozen=True)
class KernelFamily:
    """An ordered collection of named kernels over one common domain."""

    kernels: tuple[Kernel, ...]

    def __post_init__(self):
        if not self.kernels:
            raise SpecError("a kernel family needs at least one kernel", field="kernels")
        names = [k.name for k in self.kernels]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate kernel names in {names}", field="kernels")
        d0 = self.kernels[0].domain
        for k in self.kernels[1:]:
            if k.domain != d0:
                raise SpecError(
                    f"kernel {k.name!r} lives on a different domain than "
                    f"{self.kernels[0].name!r}"
                )

    def __iter__(self):
        return iter(self.kernels)

    def __len__(self) -> int:
        return len(self.kernels)

    def __getitem__(self, name: str) -> Kernel:
        for k in self.kernels:
            if k.name == name:
                return k
        raise SpecError(f"no kernel named {name!r}", field="kernels")

    @property
    def domain(self):
        return self.kernels[0].domain

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(k.name for k in self.kernels)


def eval_kernel(kernel: Kernel, point: tuple):
    """Evaluate a kernel at a point of its domain.

    Table kernels take a tuple of atom ids; step kernels take a tuple
    of numbers in [0,1), each mapped to its cell before the lookup.

    Raises
    ------
    ArityError
        If ``point`` has the wrong length.
    SpecError
        If a coordinate names an unknown atom.
    """
    point = tuple(point)
    if len(point) != kernel.arity:
        raise ArityError(
            f"kernel {kernel.name!r} has arity {kernel.arity}, got {len(point)} coordinates"
        )
    if kernel.is_step:
        key = tuple(lookup_cell(kernel.domain, u) for u in point)
    else:
        space = kernel.domain
        for a in point:
            space.index(a)  # raises SpecError on unknown atoms
        key = point
    return kernel.table[key]


def check_symmetry(kernel: Kernel):
    """Exhaustively check invariance under coordinate permutations.

    Returns
    -------
    (bool, tuple or None)
        ``(True, None)`` if the table is symmetric, otherwise
        ``(False, (key, permuted_key))`` with a witness pair of tuples
        carrying different values.
    """
    if kernel.arity == 1:
        return True, None
    table = kernel.table
    for key, v in table.items():
        for perm in permutations(key):
            if table[perm] != v:
                return False, (key, perm)
    return True, None


def value_array(kernel: Kernel) -> np.ndarray:
    """Dense ndarray of shape ``(K,) * arity`` holding the table values,
    indexed by atom position (table kernels) or cell index (step kernels)."""
    if isinstance(kernel.domain, DiscreteSpace):
        pos = {a: i for i, a in enumerate(kernel.domain.atom_ids)}
        keymap = lambda key: tuple(pos[a] for a in key)  # noqa: E731
        size = len(kernel.domain)
    else:
        keymap = lambda key: key  # noqa: E731
        size = len(kernel.domain)
    dtype = np.int64 if kernel.value_space.kind == "labels" else np.float64
    out = np.empty((size,) * kernel.arity, dtype=dtype)
    for key, v in kernel.table.items():
        out[keymap(key)] = v
    return out

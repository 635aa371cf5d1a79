"""Machine states: classical stores, and distributions of partial density operators.

A program state is a finite map from classical stores to partial density
operators whose traces sum to at most one.  Missing mass records the
probability of non-termination or of a pruned branch.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

import numpy as np

from . import qmath
from .errors import ValidationError

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


def check_int64(value: int) -> int:
    if not (INT_MIN <= value <= INT_MAX):
        from .errors import ArithmeticOverflowError

        raise ArithmeticOverflowError(f"value {value} leaves the signed 64-bit range")
    return value


class ClassicalState:
    """Total map from variable names to integers, zero almost everywhere.

    Only nonzero entries are stored, so equal functions compare and hash
    equal regardless of how they were built.
    """

    __slots__ = ("_items",)

    def __init__(self, mapping: Mapping[str, int] | Iterable[tuple[str, int]] | None = None):
        pairs = []
        if mapping is not None:
            items = mapping.items() if isinstance(mapping, Mapping) else mapping
            for name, value in items:
                value = check_int64(int(value))
                if value != 0:
                    pairs.append((name, value))
        pairs.sort()
        names = [n for n, _ in pairs]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate variable in classical state")
        self._items = tuple(pairs)

    def get(self, name: str) -> int:
        for n, v in self._items:
            if n == name:
                return v
        return 0

    def update(self, name: str, value: int) -> "ClassicalState":
        value = check_int64(int(value))
        rest = [(n, v) for n, v in self._items if n != name]
        if value != 0:
            rest.append((name, value))
        return ClassicalState(rest)

    def update_many(self, names, values) -> "ClassicalState":
        if len(names) != len(values):
            raise ValidationError("update arity mismatch")
        out = self
        for n, v in zip(names, values):
            out = out.update(n, v)
        return out

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def as_dict(self) -> dict[str, int]:
        return dict(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassicalState) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{n}={v}" for n, v in self._items)
        return "{" + body + "}"


def update(sigma: ClassicalState, name: str, value: int) -> ClassicalState:
    return sigma.update(name, value)


class POVD:
    """Finite-support map from classical states to partial density operators."""

    __slots__ = ("qubits", "entries")

    def __init__(self, qubits: Iterable[str], entries: Mapping[ClassicalState, np.ndarray],
                 *, validate: bool = True):
        self.qubits = tuple(qubits)
        dim = 2 ** len(self.qubits)
        kept: dict[ClassicalState, np.ndarray] = {}
        total = 0.0
        for sigma, rho in entries.items():
            if rho.shape != (dim, dim):
                raise ValidationError(
                    f"entry for {sigma} has dimension {rho.shape}, expected {dim}x{dim}"
                )
            if validate:
                qmath.check_density(rho)
            tr = qmath.trace_real(rho)
            if tr < qmath.EPS_PRUNE:
                continue
            kept[sigma] = rho
            total += tr
        if total > 1 + qmath.EPS_NUM:
            raise ValidationError(f"total mass {total} exceeds 1")
        self.entries = kept

    @property
    def dim(self) -> int:
        return 2 ** len(self.qubits)

    def support(self) -> tuple[ClassicalState, ...]:
        return tuple(self.entries.keys())

    def entry(self, sigma: ClassicalState) -> np.ndarray:
        got = self.entries.get(sigma)
        return got if got is not None else qmath.zeros(self.dim)

    def total_mass(self) -> float:
        return sum(qmath.trace_real(rho) for rho in self.entries.values())

    def is_empty(self) -> bool:
        return not self.entries

    def __repr__(self) -> str:
        return f"POVD(qubits={self.qubits}, support={len(self.entries)}, mass={self.total_mass():.6g})"


def empty_povd(qubits: Iterable[str]) -> POVD:
    return POVD(qubits, {})


def point_povd(qubits: Iterable[str], sigma: ClassicalState, rho: np.ndarray) -> POVD:
    return POVD(qubits, {sigma: rho})


def ket_zero_povd(qubits: Iterable[str], classical: Mapping[str, int] | None = None) -> POVD:
    """All qubits in the ground state, with the given classical store."""
    qubits = tuple(qubits)
    dim = 2 ** len(qubits)
    return POVD(qubits, {ClassicalState(classical or {}): qmath.ket_bra(dim, 0, 0)})


def povd_add(m1: POVD, m2: POVD) -> POVD:
    if m1.qubits != m2.qubits:
        raise ValidationError("cannot add distributions over different qubit lists")
    merged = dict(m1.entries)
    for sigma, rho in m2.entries.items():
        if sigma in merged:
            merged[sigma] = merged[sigma] + rho
        else:
            merged[sigma] = rho
    return POVD(m1.qubits, merged)


def povd_scale(m: POVD, factor: float) -> POVD:
    if factor < 0:
        raise ValidationError("negative scaling of a distribution")
    return POVD(m.qubits, {s: factor * rho for s, rho in m.entries.items()})


def restrict(m: POVD, condition) -> POVD:
    """Keep exactly the entries whose classical state satisfies the condition.

    ``condition`` is either a predicate on classical states or a boolean
    program expression.
    """
    if not callable(condition):
        from . import opsem

        bexp = condition
        condition = lambda sigma: opsem.eval_bexp(bexp, sigma)
    kept = {s: rho for s, rho in m.entries.items() if condition(s)}
    return POVD(m.qubits, kept, validate=False)


def total_mass(m: POVD) -> float:
    return m.total_mass()


def povd_eq(m1: POVD, m2: POVD, tol: float = qmath.EPS_NUM) -> bool:
    if m1.qubits != m2.qubits:
        return False
    for sigma in set(m1.entries) | set(m2.entries):
        if qmath.maxnorm(m1.entry(sigma) - m2.entry(sigma)) > tol:
            return False
    return True


def povd_distance(m1: POVD, m2: POVD) -> float:
    """Summed per-state max-norm difference."""
    total = 0.0
    for sigma in set(m1.entries) | set(m2.entries):
        total += qmath.maxnorm(m1.entry(sigma) - m2.entry(sigma))
    return total


def combined_operator(m: POVD) -> np.ndarray:
    """Sum of all density operators in the distribution."""
    out = qmath.zeros(m.dim)
    for rho in m.entries.values():
        out = out + rho
    return out


def _sort_key(sigma: ClassicalState):
    return sigma.items()


def povd_to_json(m: POVD) -> dict:
    # full float precision so that dumped distributions reload exactly
    entries = []
    for sigma in sorted(m.entries, key=_sort_key):
        entries.append(
            {"cstate": sigma.as_dict(), "rho": qmath.format_matrix(m.entries[sigma], 17)}
        )
    return {"qubits": list(m.qubits), "entries": entries}


def povd_from_json(data: dict) -> POVD:
    if not isinstance(data, dict) or "qubits" not in data or "entries" not in data:
        raise ValidationError("distribution JSON needs 'qubits' and 'entries'")
    qubits = [str(q) for q in data["qubits"]]
    entries: dict[ClassicalState, np.ndarray] = {}
    for item in data["entries"]:
        sigma = ClassicalState({str(k): int(v) for k, v in item.get("cstate", {}).items()})
        rho = qmath.parse_matrix(item["rho"])
        if sigma in entries:
            raise ValidationError(f"duplicate classical state {sigma} in JSON input")
        entries[sigma] = rho
    return POVD(qubits, entries)


def random_povd(
    qubits: Iterable[str],
    classical_vars: Iterable[str],
    rng: np.random.Generator,
    max_states: int = 4,
) -> POVD:
    """Random full-mass distribution for witness generation.

    Quantum parts are projectors onto normalized complex Gaussian vectors;
    classical stores draw bit values so that equality-style postconditions
    over measurement outcomes stay expressible.
    """
    qubits = tuple(qubits)
    names = sorted(set(classical_vars))
    dim = 2 ** len(qubits)
    limit = 2 ** len(names) if names else 1
    count = min(int(rng.integers(1, max_states + 1)), limit)
    sigmas: set[ClassicalState] = set()
    while len(sigmas) < count:
        sigmas.add(ClassicalState({n: int(rng.integers(0, 2)) for n in names}))
    weights = rng.random(count) + 0.05
    weights /= weights.sum()
    entries = {
        sigma: w * qmath.random_pure_density(dim, rng)
        for sigma, w in zip(sorted(sigmas, key=_sort_key), weights)
    }
    return POVD(qubits, entries)

"""Dense complex linear algebra for few-qubit density-operator semantics.

Conventions used throughout the package:

* complex scalars are pairs of 64-bit floats (numpy complex128);
* ``EPS_NUM`` (1e-9) is the tolerance for every equality, positivity and
  completeness check;
* qubit index 0 is the leftmost tensor factor, so for two qubits the basis
  order is ``|00> |01> |10> |11>`` and qubit 0 is the most significant bit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

EPS_NUM = 1e-9
EPS_PRUNE = 1e-12


def mat(rows) -> np.ndarray:
    """Build a complex matrix and check all entries are finite."""
    a = np.array(rows, dtype=np.complex128)
    if a.ndim != 2:
        raise ValidationError("matrix literal must be two-dimensional")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValidationError("matrix contains a non-finite entry")
    return a


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def zeros(dim: int) -> np.ndarray:
    return np.zeros((dim, dim), dtype=np.complex128)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def conjugate_by(m: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Return m @ rho @ m-adjoint."""
    if m.shape[1] != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise ValidationError(
            f"dimension mismatch: operator {m.shape} against state {rho.shape}"
        )
    return m @ rho @ m.conj().T


def maxnorm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def mat_eq(a: np.ndarray, b: np.ndarray, tol: float = EPS_NUM) -> bool:
    if a.shape != b.shape:
        return False
    return maxnorm(a - b) <= tol


def is_hermitian(a: np.ndarray, tol: float = EPS_NUM) -> bool:
    return a.shape[0] == a.shape[1] and maxnorm(a - a.conj().T) <= tol


def min_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of a (nearly) Hermitian matrix."""
    sym = (a + a.conj().T) / 2
    return float(np.linalg.eigvalsh(sym)[0])


def is_psd(a: np.ndarray, tol: float = EPS_NUM) -> bool:
    return is_hermitian(a, tol) and min_eigenvalue(a) >= -tol


def loewner_leq(a: np.ndarray, b: np.ndarray, tol: float = EPS_NUM) -> bool:
    """Operator order: true iff b - a is positive semidefinite within tol."""
    if a.shape != b.shape:
        raise ValidationError("operator order needs matrices of equal shape")
    if not is_hermitian(a, tol) or not is_hermitian(b, tol):
        raise ValidationError("operator order is defined on Hermitian matrices only")
    return min_eigenvalue(b - a) >= -tol


def trace_real(a: np.ndarray) -> float:
    return float(np.trace(a).real)


def check_density(rho: np.ndarray, tol: float = EPS_NUM) -> None:
    """Raise unless rho is Hermitian, positive semidefinite, with trace <= 1."""
    if rho.shape[0] != rho.shape[1]:
        raise ValidationError("density operator must be square")
    if not is_hermitian(rho, tol):
        raise ValidationError("density operator is not Hermitian")
    if min_eigenvalue(rho) < -tol:
        raise ValidationError("density operator has a negative eigenvalue")
    tr = np.trace(rho)
    if abs(tr.imag) > tol or tr.real > 1 + tol:
        raise ValidationError(f"density operator trace {tr} exceeds 1")


def _bit(index: int, pos: int, total: int) -> int:
    return (index >> (total - 1 - pos)) & 1


def embed(op: np.ndarray, targets, total_qubits: int) -> np.ndarray:
    """Lift an operator on the listed qubits to the full space.

    ``targets`` gives the qubit positions the operator's own tensor factors
    act on, in order; the remaining qubits are acted on by the identity.
    """
    targets = list(targets)
    k = len(targets)
    if op.shape != (2**k, 2**k):
        raise ValidationError(f"operator shape {op.shape} does not fit {k} qubit(s)")
    if len(set(targets)) != k:
        raise ValidationError("embedding targets must be distinct")
    if any(t < 0 or t >= total_qubits for t in targets):
        raise ValidationError("embedding target out of range")
    rest = [p for p in range(total_qubits) if p not in targets]
    dim = 2**total_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    for row in range(dim):
        for col in range(dim):
            if any(_bit(row, p, total_qubits) != _bit(col, p, total_qubits) for p in rest):
                continue
            i = j = 0
            for t in targets:
                i = (i << 1) | _bit(row, t, total_qubits)
                j = (j << 1) | _bit(col, t, total_qubits)
            out[row, col] = op[i, j]
    return out


def basis_ket(dim: int, index: int) -> np.ndarray:
    v = np.zeros((dim, 1), dtype=np.complex128)
    v[index, 0] = 1.0
    return v


def ket_bra(dim: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def proj(vec: np.ndarray) -> np.ndarray:
    v = vec.reshape(-1, 1)
    return v @ v.conj().T


I2 = identity(2)
H_GATE = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
X_GATE = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Z_GATE = np.array([[1, 0], [0, -1]], dtype=np.complex128)
CNOT_GATE = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    """A named unitary on a fixed number of qubits."""

    name: str
    arity: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 2**self.arity
        if self.matrix.shape != (dim, dim):
            raise ValidationError(f"gate {self.name}: matrix does not fit {self.arity} qubit(s)")
        if maxnorm(self.matrix @ self.matrix.conj().T - identity(dim)) > EPS_NUM:
            raise ValidationError(f"gate {self.name}: matrix is not unitary")


BUILTIN_GATES = {
    "I": UnitaryGate("I", 1, I2),
    "H": UnitaryGate("H", 1, H_GATE),
    "X": UnitaryGate("X", 1, X_GATE),
    "Z": UnitaryGate("Z", 1, Z_GATE),
    "CNOT": UnitaryGate("CNOT", 2, CNOT_GATE),
}


@dataclass(frozen=True, eq=False)
class GeneralMeasurement:
    """A measurement-operator list plus a labelling of outcomes.

    Labels are integer tuples so that composed measurements, whose outcomes
    pair up the outcomes of their factors, stay expressible.  The plain
    identity labelling maps outcome i to the one-element label (i,).
    """

    ops: tuple
    labels: tuple
    arity: int
    name: str | None = None
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "labels", tuple(tuple(l) for l in self.labels))
        if len(self.ops) == 0:
            raise ValidationError("measurement needs at least one operator")
        if len(self.ops) != len(self.labels):
            raise ValidationError("measurement labelling must cover every operator")
        dim = 2**self.arity
        for op in self.ops:
            if op.shape != (dim, dim):
                raise ValidationError("measurement operator has wrong dimension")
        widths = {len(l) for l in self.labels}
        if len(widths) != 1 or 0 in widths:
            raise ValidationError("measurement labels must share a positive width")
        if self.validate and not check_measurement(self):
            raise ValidationError(
                f"measurement {self.name or ''} violates completeness "
                f"(defect {completeness_defect(self):.3g})"
            )

    @property
    def label_width(self) -> int:
        return len(self.labels[0])

    @property
    def dim(self) -> int:
        return 2**self.arity


def completeness_defect(m: GeneralMeasurement) -> float:
    total = zeros(m.dim)
    for op in m.ops:
        total += op.conj().T @ op
    return maxnorm(total - identity(m.dim))


def check_measurement(m: GeneralMeasurement, tol: float = EPS_NUM) -> bool:
    return completeness_defect(m) <= tol


def embed_measurement(m: GeneralMeasurement, targets, total_qubits: int) -> GeneralMeasurement:
    ops = tuple(embed(op, targets, total_qubits) for op in m.ops)
    return GeneralMeasurement(ops, m.labels, total_qubits, m.name)


def computational_measurement(arity: int = 1, name: str = "M") -> GeneralMeasurement:
    """Projective measurement in the computational basis with identity labels."""
    dim = 2**arity
    ops = tuple(ket_bra(dim, i, i) for i in range(dim))
    if arity == 1:
        labels = tuple((i,) for i in range(dim))
    else:
        labels = tuple(tuple((i >> (arity - 1 - k)) & 1 for k in range(arity)) for i in range(dim))
    return GeneralMeasurement(ops, labels, arity, name)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_pure_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Projector onto a normalized complex Gaussian vector."""
    v = rng.normal(size=(dim, 1)) + 1j * rng.normal(size=(dim, 1))
    v /= np.linalg.norm(v)
    return v @ v.conj().T


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state of the given rank (trace 1)."""
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    weights = rng.random(rank)
    weights /= weights.sum()
    rho = zeros(dim)
    for w in weights:
        rho += w * random_pure_density(dim, rng)
    return rho


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PART = re.compile(rf"[+-]?(?:{_NUM}i?|i)")


def parse_complex(text: str) -> complex:
    """Parse one scalar of a matrix literal, e.g. ``1``, ``-0.5i``, ``1+2i``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValidationError("empty matrix entry")
    pos = 0
    real = 0.0
    imag = 0.0
    seen_real = seen_imag = False
    while pos < len(s):
        m = _PART.match(s, pos)
        if not m:
            raise ValidationError(f"bad matrix entry {text!r}")
        part = m.group(0)
        pos = m.end()
        if part.endswith("i"):
            if seen_imag:
                raise ValidationError(f"bad matrix entry {text!r}")
            body = part[:-1]
            if body in ("", "+"):
                imag = 1.0
            elif body == "-":
                imag = -1.0
            else:
                imag = float(body)
            seen_imag = True
        else:
            if seen_real:
                raise ValidationError(f"bad matrix entry {text!r}")
            real = float(part)
            seen_real = True
    return complex(real, imag)


def parse_matrix(text: str) -> np.ndarray:
    """Parse the bracketed matrix literal format ``[[re+imi, ...], ...]``."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValidationError("matrix literal must be bracketed")
    body = s[1:-1].strip()
    rows = []
    pos = 0
    while pos < len(body):
        if body[pos] in ", \t\n":
            pos += 1
            continue
        if body[pos] != "[":
            raise ValidationError(f"expected '[' at offset {pos} of matrix literal")
        end = body.find("]", pos)
        if end < 0:
            raise ValidationError("unterminated row in matrix literal")
        row_src = body[pos + 1 : end]
        entries = [parse_complex(e) for e in row_src.split(",")] if row_src.strip() else []
        if not entries:
            raise ValidationError("empty row in matrix literal")
        rows.append(entries)
        pos = end + 1
    if not rows:
        raise ValidationError("empty matrix literal")
    if len({len(r) for r in rows}) != 1:
        raise ValidationError("ragged rows in matrix literal")
    return mat(rows)


def _fmt_real(v: float, precision: int) -> str:
    if v == 0:
        v = 0.0
    return f"{v:.{precision}g}"


def format_complex(z: complex, precision: int = 6) -> str:
    """Render one scalar with the given significant digits and no negative zero."""
    re_s = _fmt_real(z.real, precision)
    im_s = _fmt_real(z.imag, precision)
    if im_s in ("0", "-0"):
        return re_s
    suffix = f"{im_s}i" if im_s.startswith("-") else f"+{im_s}i"
    if re_s == "0":
        return im_s + "i"
    return re_s + suffix


def format_matrix(a: np.ndarray, precision: int = 6) -> str:
    rows = []
    for row in a:
        rows.append("[" + ", ".join(format_complex(z, precision) for z in row) + "]")
    return "[" + ", ".join(rows) + "]"

"""Measurements, the teleportation equation and its security corollary.

Scalar convention: the shared resource is a normalized state (trace 1) and
the classical record created on the right-hand side is the uniform
distribution ``(1/n) sum_i e_i``.  With these factors both sides of the
teleportation equation are trace-preserving channels, so the check is an
exact equality rather than equality up to a scalar.

Systems are single matrix blocks ``M_k`` or commutative ``C^k``.  Either way
they sit inside operators on ``C^k`` (the commutative case as diagonal
matrices), and message, resource halves and measurement live on tensor
products of that space in left-most-significant order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpstar import (
    CPMap,
    CStarAlgebra,
    conjugation,
    is_completely_positive,
    permutation_map,
    trace_preservation_deviation,
)
from .groupoid import FiniteGroupoid, validate_groupoid
from .linalg import (
    DEFAULT_TOL,
    ShapeError,
    TwoCPError,
    Verdict,
    VerificationError,
    as_matrix,
    dagger,
    kron,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    psd_deviation,
)

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _check_system(a: CStarAlgebra) -> None:
    if not (len(a.blocks) == 1 or a.is_commutative):
        raise ShapeError(f"system must be one matrix block or commutative, got blocks {a.blocks}")


@dataclass(frozen=True, eq=False)
class Measurement:
    system: CStarAlgebra
    outcomes: int
    map: CPMap

    def __post_init__(self):
        _check_system(self.system)
        if self.map.dom != self.system or self.map.cod != CStarAlgebra.commutative(self.outcomes):
            raise ShapeError("measurement map must go from the system to C^outcomes")

    def to_json(self) -> dict:
        return {"system": self.system.to_json(), "outcomes": self.outcomes, "map": self.map.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Measurement":
        try:
            return cls(CStarAlgebra.from_json(obj["system"]), int(obj["outcomes"]),
                       CPMap.from_json(obj["map"]))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed measurement: {exc}") from exc


@dataclass(frozen=True, eq=False)
class POVM:
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        els = tuple(as_matrix(p) for p in self.elements)
        if not els or len({p.shape for p in els}) != 1 or els[0].shape[0] != els[0].shape[1]:
            raise ShapeError("POVM needs a nonempty family of equal square matrices")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


def check_povm(p: POVM, tol: float = DEFAULT_TOL) -> tuple[Verdict, Verdict]:
    """(positivity, completeness) of a POVM."""
    pos = max(psd_deviation(e, tol) for e in p.elements)
    tot = max_abs(sum(p.elements) - np.eye(p.dim))
    return Verdict("positive", pos <= tol, pos), Verdict("sums_to_identity", tot <= tol, tot)


def is_measurement(m: Measurement, tol: float = DEFAULT_TOL) -> Verdict:
    """Counit preservation: summing outcome probabilities gives the trace."""
    dev = trace_preservation_deviation(m.map)
    return Verdict("counit_preserving", dev <= tol, dev)


def require_measurement(m: Measurement, tol: float = DEFAULT_TOL) -> None:
    cp = is_completely_positive(m.map, tol)
    if not cp:
        raise VerificationError(f"measurement map is not CP (Choi eigenvalue {cp.min_eigenvalue:.3g})",
                                cp.deviation)
    v = is_measurement(m, tol)
    if not v:
        raise VerificationError(f"measurement is not counit-preserving (defect {v.deviation:.3g})",
                                v.deviation)


def povm_from_measurement(m: Measurement, tol: float = DEFAULT_TOL) -> POVM:
    """``P_i`` is the adjoint of the measurement applied to the outcome ``e_i``."""
    adj = dagger(m.map.map)
    els = []
    for i in range(m.outcomes):
        p = m.system.to_operator(adj[:, [i]])
        dev = psd_deviation(p, tol)
        if dev > tol:
            raise VerificationError(f"POVM element {i} is not positive (deviation {dev:.3g})", dev)
        els.append(p)
    return POVM(tuple(els))


def measurement_from_povm(p: POVM, system: CStarAlgebra | None = None) -> Measurement:
    """``rho -> sum_i tr(P_i rho) e_i``; ``system`` defaults to ``M_d``."""
    system = system or CStarAlgebra.matrix(p.dim)
    _check_system(system)
    if system.hilbert_dim != p.dim:
        raise ShapeError(f"POVM acts on C^{p.dim} but the system lives on C^{system.hilbert_dim}")
    rows = [e.T.reshape(1, -1) @ system.embedding for e in p.elements]
    n = len(rows)
    return Measurement(system, n, CPMap(system, CStarAlgebra.commutative(n), np.vstack(rows)))


# -- teleportation ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TeleportationData:
    """Outcome ``i`` of ``measurement`` (on message (x) first resource half) selects ``corrections[i]``."""

    n: int
    system: CStarAlgebra
    resource: np.ndarray
    measurement: Measurement
    corrections: tuple[CPMap, ...]

    def __post_init__(self):
        _check_system(self.system)
        object.__setattr__(self, "resource", as_matrix(self.resource))
        object.__setattr__(self, "corrections", tuple(self.corrections))
        k = self.system.hilbert_dim
        if self.resource.shape != (k * k, k * k):
            raise ShapeError(f"resource must be {(k * k, k * k)}, got {self.resource.shape}")
        if self.measurement.system != self.system.tensor(self.system):
            raise ShapeError("measurement must act on message (x) first resource half")
        if self.measurement.outcomes != self.n or len(self.corrections) != self.n:
            raise ShapeError("need exactly n outcomes and n corrections")
        for c in self.corrections:
            if c.dom != self.system or c.cod != self.system:
                raise ShapeError("corrections must be endomorphisms of the system")

    @property
    def record_algebra(self) -> CStarAlgebra:
        return CStarAlgebra.commutative(self.n)

    def with_correction(self, i: int, c: CPMap) -> "TeleportationData":
        cs = list(self.corrections)
        cs[i] = c
        return TeleportationData(self.n, self.system, self.resource, self.measurement, tuple(cs))

    def with_resource(self, resource) -> "TeleportationData":
        return TeleportationData(self.n, self.system, resource, self.measurement, self.corrections)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "system": self.system.to_json(),
            "resource": matrix_to_json(self.resource),
            "measurement": self.measurement.to_json(),
            "corrections": [c.to_json() for c in self.corrections],
        }

    @classmethod
    def from_json(cls, obj) -> "TeleportationData":
        try:
            return cls(
                int(obj["n"]),
                CStarAlgebra.from_json(obj["system"]),
                matrix_from_json(obj["resource"]),
                Measurement.from_json(obj["measurement"]),
                tuple(CPMap.from_json(c) for c in obj["corrections"]),
            )
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed teleportation instance: {exc}") from exc


@dataclass(frozen=True, eq=False)
class ChannelWithRecord:
    """CP map ``input -> C^outcomes (x) input``."""

    input: CStarAlgebra
    outcomes: int
    map: CPMap


def certify_teleportation(t: TeleportationData, tol: float = DEFAULT_TOL) -> None:
    """Raise :class:`VerificationError` unless every ingredient is certified."""
    dev = psd_deviation(t.resource, tol)
    if dev > tol:
        raise VerificationError(f"resource is not positive (deviation {dev:.3g})", dev)
    require_measurement(t.measurement, tol)
    for i, c in enumerate(t.corrections):
        cp = is_completely_positive(c, tol)
        if not cp:
            raise VerificationError(f"correction {i} is not CP", cp.deviation)
        s = np.linalg.svd(c.map, compute_uv=False)
        if s[-1] <= tol:
            raise VerificationError(f"correction {i} is not invertible", float(s[-1]))


def _branches(t: TeleportationData) -> list[np.ndarray]:
    """For each outcome ``i`` the linear map ``x -> tr_12[(P_i (x) 1)(x (x) resource)]``.

    Returned as ``d x d`` matrices on system coordinates, before correction.
    """
    k = t.system.hilbert_dim
    d = t.system.dim
    povm = povm_from_measurement(t.measurement, tol=np.inf)
    outs = [np.zeros((d, d), dtype=complex) for _ in range(t.n)]
    for x in range(d):
        e = np.zeros((d, 1), dtype=complex)
        e[x, 0] = 1.0
        joint = kron(t.system.to_operator(e), t.resource)
        for i, p in enumerate(povm.elements):
            big = (kron(p, np.eye(k)) @ joint).reshape(k * k, k, k * k, k)
            sigma = np.einsum("aiaj->ij", big)
            outs[i][:, x] = t.system.from_operator(sigma)[:, 0]
    return outs


def lhs_teleportation(t: TeleportationData) -> ChannelWithRecord:
    """Create the resource, measure, record the outcome, correct the second half."""
    d = t.system.dim
    m = np.zeros((t.n * d, d), dtype=complex)
    for i, (branch, corr) in enumerate(zip(_branches(t), t.corrections)):
        m[i * d:(i + 1) * d] = corr.map @ branch
    cod = t.record_algebra.tensor(t.system)
    return ChannelWithRecord(t.system, t.n, CPMap(t.system, cod, m))


def uniform_record_channel(system: CStarAlgebra, n: int) -> ChannelWithRecord:
    """Fresh uniform record on ``n`` outcomes alongside the untouched input."""
    m = kron(np.full((n, 1), 1.0 / n), np.eye(system.dim))
    cod = CStarAlgebra.commutative(n).tensor(system)
    return ChannelWithRecord(system, n, CPMap(system, cod, m))


def rhs_teleportation(t: TeleportationData) -> ChannelWithRecord:
    return uniform_record_channel(t.system, t.n)


def check_teleportation(t: TeleportationData, tol: float = DEFAULT_TOL) -> Verdict:
    certify_teleportation(t, tol)
    dev = max_abs(lhs_teleportation(t).map.map - rhs_teleportation(t).map.map)
    return Verdict("teleportation", dev <= tol, dev)


def security_sides(t: TeleportationData) -> tuple[CPMap, CPMap]:
    """(measure and discard the second half, discard the message and emit a uniform record)."""
    rec = t.record_algebra
    lhs = np.vstack([t.system.trace @ b for b in _branches(t)])
    rhs = kron(np.full((t.n, 1), 1.0 / t.n), t.system.trace)
    return CPMap(t.system, rec, lhs), CPMap(t.system, rec, rhs)


def check_security(t: TeleportationData, tol: float = DEFAULT_TOL) -> Verdict:
    certify_teleportation(t, tol)
    lhs, rhs = security_sides(t)
    dev = max_abs(lhs.map - rhs.map)
    return Verdict("security", dev <= tol, dev)


# -- solution families --------------------------------------------------------

def bell_teleportation(unitaries) -> TeleportationData:
    """Teleportation from a unitary error basis ``W_0..W_{d^2-1}`` on ``C^d``.

    Resource is the normalized maximally entangled state; outcome ``i`` is
    the Bell state ``(W_i (x) 1)|Phi>``; the correction is conjugation by
    ``W_i``.
    """
    ws = [as_matrix(w) for w in unitaries]
    d = ws[0].shape[0]
    if len(ws) != d * d:
        raise ShapeError(f"a unitary error basis on C^{d} has {d * d} elements, got {len(ws)}")
    phi = np.eye(d, dtype=complex).reshape(d * d, 1) / np.sqrt(d)
    bells = [kron(w, np.eye(d)) @ phi for w in ws]
    povm = POVM(tuple(b @ dagger(b) for b in bells))
    system = CStarAlgebra.matrix(d)
    meas = measurement_from_povm(povm, system.tensor(system))
    return TeleportationData(d * d, system, phi @ dagger(phi), meas,
                             tuple(conjugation(w) for w in ws))


def standard_qubit_teleportation() -> TeleportationData:
    """Bell measurement with Pauli corrections I, X, Y, Z."""
    return bell_teleportation(PAULIS)


def weyl_basis(d: int) -> list[np.ndarray]:
    """Shift-and-clock operators ``X^a Z^b``, ``a, b < d``."""
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(d) for b in range(d)]


def qudit_teleportation(d: int) -> TeleportationData:
    return bell_teleportation(weyl_basis(d))


def one_time_pad(group: FiniteGroupoid, key_state=None) -> TeleportationData:
    """Encrypted classical communication over a finite group.

    The message ``m`` and key ``g`` are read jointly and the ciphertext
    ``c = m g`` is recorded; the receiver holds ``g`` and maps it to
    ``c g^-1 = m``.  ``key_state`` overrides the shared key distribution
    (default uniform, perfectly correlated between the halves).
    """
    if group.objects != 1:
        raise TwoCPError("one-time pad needs a group (one-object groupoid)")
    rep = validate_groupoid(group)
    if not rep:
        raise TwoCPError("invalid group: " + "; ".join(rep.violations))
    n = group.n
    probs = np.full(n, 1.0 / n) if key_state is None else np.asarray(key_state, dtype=float)
    resource = np.zeros((n * n, n * n), dtype=complex)
    for g in range(n):
        resource[g * n + g, g * n + g] = probs[g]
    system = CStarAlgebra.commutative(n)
    joint = system.tensor(system)
    mu = np.zeros((n, n * n), dtype=complex)
    for m in range(n):
        for g in range(n):
            mu[group.comp[(m, g)], m * n + g] = 1.0
    meas = Measurement(joint, n, CPMap(joint, CStarAlgebra.commutative(n), mu))
    corrections = tuple(
        permutation_map([group.comp[(c, group.inv[x])] for x in range(n)]) for c in range(n)
    )
    return TeleportationData(n, system, resource, meas, corrections)


def constant_key_pad(group: FiniteGroupoid, key: int | None = None) -> TeleportationData:
    """One-time pad whose key is always the same element (identity by default)."""
    key = group.ids[0] if key is None else key
    probs = np.zeros(group.n)
    probs[key] = 1.0
    return one_time_pad(group, probs)

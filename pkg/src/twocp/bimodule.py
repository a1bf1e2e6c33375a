"""Dagger bimodules, their homomorphisms, and composition by idempotent splitting.

An action of ``C`` on the left and ``D`` on the right of ``M`` is a matrix
``M x (C (x) M (x) D)``.  Internally it is handled as the 4-index array
``act[m_out, c, m_in, d]`` obtained by reshaping; the flat column index is
``(c * dim_M + m_in) * dim_D + d``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frobenius import FrobeniusAlgebra, check_frobenius, classical_structure
from .linalg import (
    DEFAULT_TOL,
    ShapeError,
    TwoCPError,
    Verdict,
    VerificationError,
    as_matrix,
    dagger,
    idempotent_deviation,
    kron,
    kron_all,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    split_projection,
    swap,
)


def _same_algebra(a: FrobeniusAlgebra, b: FrobeniusAlgebra, tol: float = DEFAULT_TOL) -> bool:
    return (a is b) or (
        a.dim == b.dim and max_abs(a.mult - b.mult) <= tol and max_abs(a.unit - b.unit) <= tol
    )


@dataclass(frozen=True, eq=False)
class DaggerBimodule:
    """``left``-``right`` bimodule on ``C^carrier_dim``.

    ``carrier_mult`` optionally records the C*-algebra product of the carrier
    (``n x n^2``).  It is not part of the bimodule axioms; it is only used to
    recover block structures in the matrix model.
    """

    left: FrobeniusAlgebra
    right: FrobeniusAlgebra
    carrier_dim: int
    action: np.ndarray
    carrier_mult: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "action", as_matrix(self.action))
        n, c, d = self.carrier_dim, self.left.dim, self.right.dim
        if self.action.shape != (n, c * n * d):
            raise ShapeError(f"action must be {(n, c * n * d)}, got {self.action.shape}")
        if self.carrier_mult is not None:
            cm = as_matrix(self.carrier_mult)
            if cm.shape != (n, n * n):
                raise ShapeError(f"carrier_mult must be {(n, n * n)}, got {cm.shape}")
            object.__setattr__(self, "carrier_mult", cm)

    @property
    def tensor4(self) -> np.ndarray:
        n = self.carrier_dim
        return self.action.reshape(n, self.left.dim, n, self.right.dim)

    def right_action(self) -> np.ndarray:
        """``M (x) D -> M``: the action with the left algebra's unit plugged in."""
        n = self.carrier_dim
        return self.action @ kron_all([self.left.unit, np.eye(n), np.eye(self.right.dim)])

    def left_action(self) -> np.ndarray:
        """``C (x) M -> M``: the action with the right algebra's unit plugged in."""
        n = self.carrier_dim
        return self.action @ kron_all([np.eye(self.left.dim), np.eye(n), self.right.unit])

    def to_json(self) -> dict:
        out = {
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "carrier_dim": self.carrier_dim,
            "action": matrix_to_json(self.action),
        }
        if self.carrier_mult is not None:
            out["carrier_mult"] = matrix_to_json(self.carrier_mult)
        return out

    @classmethod
    def from_json(cls, obj) -> "DaggerBimodule":
        try:
            cm = obj.get("carrier_mult")
            return cls(
                FrobeniusAlgebra.from_json(obj["left"]),
                FrobeniusAlgebra.from_json(obj["right"]),
                int(obj["carrier_dim"]),
                matrix_from_json(obj["action"]),
                None if cm is None else matrix_from_json(cm),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ShapeError(f"malformed bimodule: {exc}") from exc


@dataclass(frozen=True)
class BimoduleReport:
    associative: Verdict
    unital: Verdict
    dagger: Verdict

    @property
    def passed(self) -> bool:
        return all((self.associative, self.unital, self.dagger))

    def __bool__(self) -> bool:
        return self.passed

    def verdicts(self) -> list[Verdict]:
        return [self.associative, self.unital, self.dagger]


def check_bimodule(b: DaggerBimodule, tol: float = DEFAULT_TOL) -> BimoduleReport:
    """Evaluate the three bimodule equations as explicit tensors.

    1. ``act(c1, act(c2, m, d1), d2) = act(c1 c2, m, d1 d2)``
    2. ``act(unit, m, unit) = m``
    3. ``act^dag = (id (x) act (x) id)(cup_C (x) id (x) cup_D)`` where ``cup`` is
       ``comult(unit)`` with its outer leg left open.
    """
    C, D = b.left, b.right
    n, c, d = b.carrier_dim, C.dim, D.dim
    A = b.tensor4
    mc = C.mult.reshape(c, c, c)
    md = D.mult.reshape(d, d, d)

    lhs = np.einsum("mxpz,pyqw->mxyqwz", A, A, optimize=True)
    rhs = np.einsum("mcqe,cxy,ewz->mxyqwz", A, mc, md, optimize=True)
    assoc = max_abs(lhs - rhs)

    plugged = np.einsum("mcqe,c,e->mq", A, C.unit[:, 0], D.unit[:, 0], optimize=True)
    unital = max_abs(plugged - np.eye(n))

    adj = A.conj().transpose(2, 1, 0, 3)  # act^dag[(c, m_out, d), m_in] as [m_out, c, m_in, d]
    folded = np.einsum("xc,mcqe,ey->mxqy", C.cup, A, D.cup, optimize=True)
    dag = max_abs(adj - folded)

    return BimoduleReport(
        Verdict("associative", assoc <= tol, assoc),
        Verdict("unital", unital <= tol, unital),
        Verdict("dagger", dag <= tol, dag),
    )


def identity_bimodule(a: FrobeniusAlgebra) -> DaggerBimodule:
    """``A`` acting on itself from both sides: ``mult (mult (x) id)``."""
    n = a.dim
    action = a.mult @ kron(a.mult, np.eye(n))
    return DaggerBimodule(a, a, n, action)


def trivial_bimodule(n: int) -> DaggerBimodule:
    """``C^n`` as a bimodule over the one-dimensional algebra on both sides."""
    one = classical_structure(1)
    return DaggerBimodule(one, one, n, np.eye(n, dtype=complex))


def boundary_bimodules(a: FrobeniusAlgebra) -> tuple[DaggerBimodule, DaggerBimodule]:
    """The boundaries ``L: A -> I`` and ``R: I -> A``, both acting by multiplication."""
    one = classical_structure(1)
    L = DaggerBimodule(a, one, a.dim, a.mult)
    R = DaggerBimodule(one, a, a.dim, a.mult)
    return L, R


@dataclass(frozen=True, eq=False)
class BimoduleHom:
    source: DaggerBimodule
    target: DaggerBimodule
    map: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.map)
        if m.shape != (self.target.carrier_dim, self.source.carrier_dim):
            raise ShapeError(
                f"hom must be {(self.target.carrier_dim, self.source.carrier_dim)}, got {m.shape}"
            )
        object.__setattr__(self, "map", m)


def check_hom(h: BimoduleHom, tol: float = DEFAULT_TOL) -> Verdict:
    """Residual of ``f act = act' (id (x) f (x) id)``."""
    s, t = h.source, h.target
    if not (_same_algebra(s.left, t.left) and _same_algebra(s.right, t.right)):
        raise TwoCPError("homomorphism endpoints act by different algebras")
    lhs = h.map @ s.action
    rhs = t.action @ kron_all([np.eye(s.left.dim), h.map, np.eye(s.right.dim)])
    dev = max_abs(lhs - rhs)
    return Verdict("intertwines", dev <= tol, dev)


def identity_hom(b: DaggerBimodule) -> BimoduleHom:
    return BimoduleHom(b, b, np.eye(b.carrier_dim, dtype=complex))


def vertical_compose_homs(g: BimoduleHom, f: BimoduleHom) -> BimoduleHom:
    """``g after f``."""
    if f.target is not g.source and f.target.carrier_dim != g.source.carrier_dim:
        raise ShapeError("homomorphisms are not composable")
    return BimoduleHom(f.source, g.target, g.map @ f.map)


def _check_middle(mb: DaggerBimodule, nb: DaggerBimodule) -> None:
    if not _same_algebra(mb.right, nb.left):
        raise TwoCPError(
            f"middle algebras differ: right of first has dim {mb.right.dim}, "
            f"left of second has dim {nb.left.dim}"
        )


def _joined_pair(mb: DaggerBimodule, nb: DaggerBimodule) -> np.ndarray:
    """Both actions side by side with the shared wire closed by ``D``'s cup.

    Returns ``T[m, n, c, m0, n0, e]``.
    """
    cup = mb.right.cup
    return np.einsum("mcpx,xy,nyqe->mncpqe", mb.tensor4, cup, nb.tensor4, optimize=True)


def composite_idempotent(mb: DaggerBimodule, nb: DaggerBimodule,
                         tol: float = DEFAULT_TOL) -> np.ndarray:
    """The dagger idempotent on ``M (x) N`` whose image is the composite bimodule."""
    _check_middle(mb, nb)
    T = _joined_pair(mb, nb)
    p = np.einsum("mncpqe,c,e->mnpq", T, mb.left.unit[:, 0], nb.right.unit[:, 0], optimize=True)
    dm, dn = mb.carrier_dim, nb.carrier_dim
    p = p.reshape(dm * dn, dm * dn)
    dev = idempotent_deviation(p)
    if dev > tol:
        raise VerificationError(f"composite is not a dagger idempotent (deviation {dev:.3g})", dev)
    return p


@dataclass(frozen=True, eq=False)
class Composite:
    """A composite bimodule together with the isometry it was split by."""

    bimodule: DaggerBimodule
    isometry: np.ndarray

    def __iter__(self):
        return iter((self.bimodule, self.isometry))


def compose_bimodules(mb: DaggerBimodule, nb: DaggerBimodule,
                      tol: float = DEFAULT_TOL) -> Composite:
    """Horizontal composite ``M . N`` over the shared algebra, with its image isometry."""
    p = composite_idempotent(mb, nb, tol)
    i = split_projection(p, tol)
    r = i.shape[1]
    C, E = mb.left, nb.right
    dm, dn = mb.carrier_dim, nb.carrier_dim
    T = _joined_pair(mb, nb).reshape(dm * dn, C.dim, dm * dn, E.dim)
    act = np.einsum("xs,scte,ty->xcye", dagger(i), T, i, optimize=True)
    act = act.reshape(r, C.dim * r * E.dim)

    carrier_mult = None
    if mb.carrier_mult is not None and nb.carrier_mult is not None:
        mu = mb.carrier_mult.reshape(dm, dm, dm)
        nu = nb.carrier_mult.reshape(dn, dn, dn)
        iso = i.reshape(dm, dn, r)
        # pairwise contraction keeps the intermediates small
        x = np.einsum("mns,mab->nsab", iso.conj(), mu, optimize=True)
        x = np.einsum("nsab,ncd->sabcd", x, nu, optimize=True)
        x = np.einsum("sabcd,act->sbdt", x, iso, optimize=True)
        carrier_mult = np.einsum("sbdt,bdu->stu", x, iso, optimize=True).reshape(r, r * r)
    return Composite(DaggerBimodule(C, E, r, act, carrier_mult), i)


def horizontal_compose_homs(f: BimoduleHom, g: BimoduleHom, i, i_prime,
                            source: DaggerBimodule | None = None,
                            target: DaggerBimodule | None = None) -> BimoduleHom:
    """``i'^dag (f (x) g) i`` between the composites split by ``i`` and ``i'``.

    ``source``/``target`` are the composite bimodules; when omitted they are
    recomputed from the endpoints of ``f`` and ``g``.
    """
    i, ip = as_matrix(i), as_matrix(i_prime)
    fg = kron(f.map, g.map)
    if i.shape[0] != fg.shape[1] or ip.shape[0] != fg.shape[0]:
        raise ShapeError(
            f"isometries {i.shape}, {ip.shape} do not match f (x) g of shape {fg.shape}"
        )
    if source is None:
        source = compose_bimodules(f.source, g.source).bimodule
    if target is None:
        target = compose_bimodules(f.target, g.target).bimodule
    if source.carrier_dim != i.shape[1] or target.carrier_dim != ip.shape[1]:
        raise ShapeError("isometries do not split the given composites")
    return BimoduleHom(source, target, dagger(ip) @ fg @ i)


def coequalizer_deviation(mb: DaggerBimodule, nb: DaggerBimodule, i) -> float:
    """``max | i^dag (rightaction_M (x) id) - i^dag (id (x) leftaction_N) |``.

    Both maps go ``M (x) D (x) N -> M (x) N``.
    """
    i = as_matrix(i)
    dn = nb.carrier_dim
    dm = mb.carrier_dim
    left = kron(mb.right_action(), np.eye(dn))
    right = kron(np.eye(dm), nb.left_action())
    return max_abs(dagger(i) @ left - dagger(i) @ right)


def unitor_comparisons(mb: DaggerBimodule,
                       tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Canonical maps ``id_C . M -> M`` and ``M . id_D -> M``.

    Each is the one-sided action restricted to the split image; both are
    unitary whenever ``M`` satisfies the bimodule equations.
    """
    left = compose_bimodules(identity_bimodule(mb.left), mb, tol)
    right = compose_bimodules(mb, identity_bimodule(mb.right), tol)
    return mb.left_action() @ left.isometry, mb.right_action() @ right.isometry


def associator_comparison(mb: DaggerBimodule, nb: DaggerBimodule, pb: DaggerBimodule,
                          tol: float = DEFAULT_TOL) -> np.ndarray:
    """Map ``(M . N) . P -> M . (N . P)`` through the common ambient ``M (x) N (x) P``."""
    mn = compose_bimodules(mb, nb, tol)
    mn_p = compose_bimodules(mn.bimodule, pb, tol)
    np_ = compose_bimodules(nb, pb, tol)
    m_np = compose_bimodules(mb, np_.bimodule, tol)
    left = kron(mn.isometry, np.eye(pb.carrier_dim)) @ mn_p.isometry
    right = kron(np.eye(mb.carrier_dim), np_.isometry) @ m_np.isometry
    return dagger(right) @ left


def tensor_bimodules(mb: DaggerBimodule, nb: DaggerBimodule) -> DaggerBimodule:
    """Monoidal product: carriers and actions tensored, algebras tensored."""
    from .frobenius import FrobeniusAlgebra as FA

    def tens(a: FA, b: FA) -> FA:
        mult = kron(a.mult, b.mult) @ kron_all([np.eye(a.dim), swap(b.dim, a.dim), np.eye(b.dim)])
        return FA(a.dim * b.dim, mult, kron(a.unit, b.unit))

    C = tens(mb.left, nb.left)
    D = tens(mb.right, nb.right)
    dm, dn = mb.carrier_dim, nb.carrier_dim
    A = np.einsum("mcpd,nxqy->mncxpqdy", mb.tensor4, nb.tensor4, optimize=True)
    act = A.reshape(dm * dn, C.dim * dm * dn * D.dim)
    return DaggerBimodule(C, D, dm * dn, act)


def require_bimodule(b: DaggerBimodule, tol: float = DEFAULT_TOL) -> BimoduleReport:
    """Certify the bimodule and both algebras, raising on failure."""
    for name, alg in (("left", b.left), ("right", b.right)):
        rep = check_frobenius(alg, tol)
        if not rep.structural:
            worst = max(v.deviation for v in rep.verdicts()[:4])
            raise VerificationError(f"{name} algebra is not special dagger Frobenius", worst)
    rep = check_bimodule(b, tol)
    if not rep:
        raise VerificationError(
            "bimodule equations fail: " + ", ".join(
                f"{v.name} ({v.deviation:.3g})" for v in rep.verdicts() if not v),
            max(v.deviation for v in rep.verdicts()),
        )
    return rep


@dataclass(frozen=True)
class BoundaryReport:
    verdicts: tuple[Verdict, ...]

    @property
    def passed(self) -> bool:
        return all(self.verdicts)

    def __bool__(self) -> bool:
        return self.passed

    def __getitem__(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)


def check_topological_boundary(a: FrobeniusAlgebra, tol: float = DEFAULT_TOL) -> BoundaryReport:
    """Zig-zag and hole-elimination equations for the boundary of ``a``.

    Copying/comparing across the boundary are ``comult``/``mult``; creating and
    deleting a region are ``unit``/``counit``.  The zig-zags reduce to the
    unit laws, the plain hole to specialness, the twisted hole to specialness
    plus commutativity.
    """
    rep = check_frobenius(a, tol)
    if not rep.commutative:
        raise TwoCPError(
            f"topological boundary needs a commutative algebra "
            f"(deviation {rep.commutative.deviation:.3g})"
        )
    n = a.dim
    eye = np.eye(n)
    cup = a.comult @ a.unit
    cap = a.counit @ a.mult
    zz_r = kron(eye, cap) @ kron(cup, eye)
    zz_l = kron(cap, eye) @ kron(eye, cup)
    checks = (
        ("zigzag_right", zz_r, eye),
        ("zigzag_left", zz_l, eye),
        ("hole", a.mult @ a.comult, eye),
        ("twisted_hole", a.mult @ swap(n, n) @ a.comult, eye),
    )
    out = []
    for name, lhs, rhs in checks:
        dev = max_abs(lhs - rhs)
        out.append(Verdict(name, dev <= tol, dev))
    return BoundaryReport(tuple(out))

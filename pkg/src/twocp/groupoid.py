"""Finite groupoids and their 0/1 convolution algebras."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frobenius import FrobeniusAlgebra
from .linalg import DEFAULT_TOL, ShapeError, TwoCPError


class GroupoidError(TwoCPError):
    """A groupoid (or an algebra read as one) violates the groupoid axioms."""


@dataclass(frozen=True)
class FiniteGroupoid:
    """Morphisms are ``0..n-1``; ``comp[(g, h)]`` is ``g after h`` (defined iff ``src g == tgt h``)."""

    objects: int
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    comp: dict = field(hash=False)
    ids: tuple[int, ...]
    inv: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.src)

    def compose(self, g: int, h: int) -> int | None:
        return self.comp.get((g, h))

    @property
    def is_group(self) -> bool:
        return self.objects == 1

    def to_json(self) -> dict:
        return {
            "objects": self.objects,
            "morphisms": [{"src": s, "tgt": t} for s, t in zip(self.src, self.tgt)],
            "comp": [[g, h, k] for (g, h), k in sorted(self.comp.items())],
            "ids": list(self.ids),
            "inv": list(self.inv),
        }

    @classmethod
    def from_json(cls, obj) -> "FiniteGroupoid":
        try:
            morphs = obj["morphisms"]
            return cls(
                int(obj["objects"]),
                tuple(int(m["src"]) for m in morphs),
                tuple(int(m["tgt"]) for m in morphs),
                {(int(g), int(h)): int(k) for g, h, k in obj["comp"]},
                tuple(int(x) for x in obj["ids"]),
                tuple(int(x) for x in obj["inv"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed groupoid: {exc}") from exc


@dataclass(frozen=True)
class GroupoidReport:
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


def validate_groupoid(g: FiniteGroupoid) -> GroupoidReport:
    """Exhaustively check every groupoid axiom; collect all violations."""
    bad: list[str] = []
    n = g.n
    if len(g.tgt) != n or len(g.inv) != n or len(g.ids) != g.objects:
        return GroupoidReport(("table lengths are inconsistent",))
    in_range = lambda x, top: isinstance(x, int) and 0 <= x < top  # noqa: E731
    for f in range(n):
        if not (in_range(g.src[f], g.objects) and in_range(g.tgt[f], g.objects)):
            bad.append(f"morphism {f} has an out-of-range endpoint")
    for (a, b), c in g.comp.items():
        if not (in_range(a, n) and in_range(b, n) and in_range(c, n)):
            bad.append(f"composite ({a},{b}) -> {c} is out of range")
    if bad:
        return GroupoidReport(tuple(bad))

    for a in range(n):
        for b in range(n):
            c = g.comp.get((a, b))
            if (g.src[a] == g.tgt[b]) != (c is not None):
                bad.append(f"composite of ({a},{b}) defined iff src({a}) == tgt({b}) fails")
            elif c is not None and (g.src[c], g.tgt[c]) != (g.src[b], g.tgt[a]):
                bad.append(f"composite {a}.{b} = {c} has the wrong endpoints")
    for x, e in enumerate(g.ids):
        if not in_range(e, n) or (g.src[e], g.tgt[e]) != (x, x):
            bad.append(f"identity of object {x} is not a loop at {x}")
            continue
        for f in range(n):
            if g.tgt[f] == x and g.comp.get((e, f)) != f:
                bad.append(f"identity {e} is not a left unit for {f}")
            if g.src[f] == x and g.comp.get((f, e)) != f:
                bad.append(f"identity {e} is not a right unit for {f}")
    for a in range(n):
        for b in range(n):
            ab = g.comp.get((a, b))
            if ab is None:
                continue
            for c in range(n):
                bc = g.comp.get((b, c))
                if bc is None:
                    continue
                if g.comp.get((ab, c)) != g.comp.get((a, bc)):
                    bad.append(f"associativity fails on ({a},{b},{c})")
    for f in range(n):
        h = g.inv[f]
        if not in_range(h, n):
            bad.append(f"inverse of {f} is out of range")
            continue
        if g.comp.get((f, h)) != g.ids[g.tgt[f]] or g.comp.get((h, f)) != g.ids[g.src[f]]:
            bad.append(f"inv[{f}] = {h} is not an inverse")
    return GroupoidReport(tuple(bad))


def is_commutative(g: FiniteGroupoid) -> bool:
    return all(g.comp.get((a, b)) == g.comp.get((b, a)) for a in range(g.n) for b in range(g.n))


# -- constructors -------------------------------------------------------------

def discrete_groupoid(n: int) -> FiniteGroupoid:
    return FiniteGroupoid(n, tuple(range(n)), tuple(range(n)),
                          {(i, i): i for i in range(n)}, tuple(range(n)), tuple(range(n)))


def cyclic_group(n: int) -> FiniteGroupoid:
    """``Z_n`` on one object; morphism ``k`` is the residue ``k``, identity is ``0``."""
    comp = {(a, b): (a + b) % n for a in range(n) for b in range(n)}
    return FiniteGroupoid(1, (0,) * n, (0,) * n, comp, (0,), tuple((-a) % n for a in range(n)))


def group_from_table(table) -> FiniteGroupoid:
    """One-object groupoid from a Cayley table ``table[a][b] = a * b``; identity must be 0."""
    n = len(table)
    comp = {(a, b): int(table[a][b]) for a in range(n) for b in range(n)}
    inv = []
    for a in range(n):
        right = [b for b in range(n) if comp[(a, b)] == 0]
        if not right:
            raise GroupoidError(f"element {a} has no inverse in the table")
        inv.append(right[0])
    return FiniteGroupoid(1, (0,) * n, (0,) * n, comp, (0,), tuple(inv))


def pair_groupoid(n: int) -> FiniteGroupoid:
    """Exactly one arrow ``x -> y`` for every pair; arrow ``(x, y)`` has index ``y * n + x``."""
    idx = lambda x, y: y * n + x  # noqa: E731
    src, tgt, comp = [0] * (n * n), [0] * (n * n), {}
    for x in range(n):
        for y in range(n):
            src[idx(x, y)], tgt[idx(x, y)] = x, y
    for x in range(n):
        for y in range(n):
            for z in range(n):
                comp[(idx(y, z), idx(x, y))] = idx(x, z)
    ids = tuple(idx(x, x) for x in range(n))
    inv = [0] * (n * n)
    for x in range(n):
        for y in range(n):
            inv[idx(x, y)] = idx(y, x)
    return FiniteGroupoid(n, tuple(src), tuple(tgt), comp, ids, tuple(inv))


def disjoint_union(a: FiniteGroupoid, b: FiniteGroupoid) -> FiniteGroupoid:
    sh, so = a.n, a.objects
    comp = dict(a.comp)
    comp.update({(g + sh, h + sh): k + sh for (g, h), k in b.comp.items()})
    return FiniteGroupoid(
        a.objects + b.objects,
        a.src + tuple(s + so for s in b.src),
        a.tgt + tuple(t + so for t in b.tgt),
        comp,
        a.ids + tuple(e + sh for e in b.ids),
        a.inv + tuple(i + sh for i in b.inv),
    )


# -- the correspondence ------------------------------------------------------

def groupoid_to_algebra(g: FiniteGroupoid) -> FrobeniusAlgebra:
    """Convolution algebra: ``e_a e_b = e_{a.b}`` when composable, else 0."""
    rep = validate_groupoid(g)
    if not rep:
        raise GroupoidError("invalid groupoid: " + "; ".join(rep.violations))
    n = g.n
    mult = np.zeros((n, n * n), dtype=complex)
    for (a, b), c in g.comp.items():
        mult[c, a * n + b] = 1.0
    unit = np.zeros((n, 1), dtype=complex)
    unit[list(g.ids), 0] = 1.0
    return FrobeniusAlgebra(n, mult, unit)


def _zero_one(name: str, arr: np.ndarray, tol: float) -> np.ndarray:
    for idx, z in np.ndenumerate(arr):
        if abs(z.imag) > tol or min(abs(z.real), abs(z.real - 1)) > tol:
            raise GroupoidError(f"{name}[{idx[0]}, {idx[1]}] = {z.real:g}{z.imag:+g}j is not 0 or 1")
    return np.abs(arr.real - 1) <= tol


def algebra_to_groupoid(f: FrobeniusAlgebra, tol: float = DEFAULT_TOL) -> FiniteGroupoid:
    """Read a groupoid off an algebra whose structure constants are all 0 or 1."""
    n = f.dim
    ones = _zero_one("mult", f.mult, tol)
    unit_ones = _zero_one("unit", f.unit, tol)
    comp = {}
    for col in range(n * n):
        rows = np.flatnonzero(ones[:, col])
        if rows.size > 1:
            raise GroupoidError(f"column {col} of mult has {rows.size} nonzero entries")
        if rows.size == 1:
            comp[divmod(col, n)] = int(rows[0])
    ids = tuple(int(i) for i in np.flatnonzero(unit_ones[:, 0]))
    obj_of = {e: x for x, e in enumerate(ids)}
    src, tgt, inv = [], [], []
    for a in range(n):
        s = [obj_of[e] for e in ids if comp.get((a, e)) == a]
        t = [obj_of[e] for e in ids if comp.get((e, a)) == a]
        if len(s) != 1 or len(t) != 1:
            raise GroupoidError(f"arrow {a} does not have a unique source and target identity")
        src.append(s[0])
        tgt.append(t[0])
    idset = set(ids)
    for a in range(n):
        cands = [b for b in range(n) if comp.get((a, b)) in idset and comp.get((b, a)) in idset]
        if len(cands) != 1:
            raise GroupoidError(f"arrow {a} has {len(cands)} candidate inverses")
        inv.append(cands[0])
    g = FiniteGroupoid(len(ids), tuple(src), tuple(tgt), comp, ids, tuple(inv))
    rep = validate_groupoid(g)
    if not rep:
        raise GroupoidError("relational structure is not a groupoid: " + "; ".join(rep.violations))
    return g


def find_isomorphism(a: FiniteGroupoid, b: FiniteGroupoid) -> list[int] | None:
    """Morphism bijection ``phi`` with ``phi(x.y) = phi(x).phi(y)``, or None.

    Backtracking search; fine up to about eight morphisms.
    """
    if (a.n, a.objects, len(a.comp)) != (b.n, b.objects, len(b.comp)):
        return None
    n = a.n
    ida, idb = set(a.ids), set(b.ids)
    phi: list[int] = [-1] * n
    used = [False] * n

    def consistent(x: int) -> bool:
        for y in range(x + 1):
            for p, q in ((x, y), (y, x)):
                ra = a.comp.get((p, q))
                rb = b.comp.get((phi[p], phi[q]))
                if (ra is None) != (rb is None):
                    return False
                if ra is not None and phi[ra] != -1 and phi[ra] != rb:
                    return False
        return True

    def extend(x: int) -> bool:
        if x == n:
            return all(b.comp.get((phi[p], phi[q])) == phi[r] for (p, q), r in a.comp.items())
        for y in range(n):
            if used[y] or ((x in ida) != (y in idb)):
                continue
            phi[x], used[y] = y, True
            if consistent(x) and extend(x + 1):
                return True
            phi[x], used[y] = -1, False
        return False

    return list(phi) if extend(0) else None

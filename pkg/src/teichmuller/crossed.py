"""Crossed modules and crossed 2-fold extensions.

A crossed 2-fold extension 0 -> M -> C -> Gamma -> G -> 1 carries a class in
H^3(G, M); the class is extracted by the classical obstruction formula: choose
a set section s of Gamma ->> G with s(1) = 1 and a normalized lift
h: G x G -> C of the section defect, then

    xi(x, y, z) = h(x,y) h(xy,z) ( s(x).h(y,z) * h(x,yz) )^{-1}

lands in M and is a normalized 3-cocycle whose class does not depend on the
choices.  Congruence questions are always decided at the class level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gmod_cohomology import Cochain, GModule
from .groups import (
    FiniteGroup,
    GroupAction,
    GroupError,
    GroupHom,
    abelian_group_from_factors,
    abelian_structure,
    direct_product,
    fiber_product,
    quotient_group,
    subgroup_of,
)


class CrossedModuleError(ValueError):
    pass


@dataclass(frozen=True)
class CrossedModule:
    C: FiniteGroup
    Gamma: FiniteGroup
    boundary: GroupHom           # C -> Gamma
    action: GroupAction          # Gamma acting on C by automorphisms


def validate_crossed_module(cm: CrossedModule) -> list[str]:
    """Every violated instance of equivariance or the Peiffer identity."""
    report = []
    C, Gamma = cm.C, cm.Gamma
    if not cm.boundary.is_valid():
        report.append("boundary is not a homomorphism")
        return report
    try:
        cm.action.validate()
    except GroupError as exc:
        report.append(f"action invalid: {exc}")
        return report
    act = np.array(cm.action.table, dtype=np.int64)
    bnd = np.array(cm.boundary.images, dtype=np.int64)
    gmul = np.array(Gamma.mul, dtype=np.int64)
    ginv = np.array(Gamma.inv, dtype=np.int64)
    cmul = np.array(C.mul, dtype=np.int64)
    cinv = np.array(C.inv, dtype=np.int64)
    # equivariance: bnd[act[g, c]] == g * bnd[c] * g^-1
    lhs = bnd[act]
    rhs = gmul[gmul[np.arange(Gamma.order)[:, None], bnd[None, :]],
               ginv[:, None]]
    for g, c in zip(*np.nonzero(lhs != rhs)):
        report.append(
            f"equivariance fails at gamma={Gamma.label(int(g))}, c={C.label(int(c))}")
    # Peiffer: b c b^-1 == act[bnd[b], c]
    lhs = cmul[cmul, cinv[:, None]]  # lhs[b, c] = (b c) b^-1
    rhs = act[bnd]
    for b, c in zip(*np.nonzero(lhs != rhs)):
        report.append(
            f"Peiffer identity fails at b={C.label(int(b))}, c={C.label(int(c))}")
    return report


@dataclass(frozen=True)
class Crossed2Extension:
    """Exact sequence 0 -> M -> C -> Gamma -> G -> 1 with crossed structure."""

    M: FiniteGroup
    C: FiniteGroup
    Gamma: FiniteGroup
    G: FiniteGroup
    iota: GroupHom               # M -> C
    boundary: GroupHom           # C -> Gamma
    pi: GroupHom                 # Gamma -> G
    action: GroupAction          # Gamma on C

    def crossed_module(self) -> CrossedModule:
        return CrossedModule(self.C, self.Gamma, self.boundary, self.action)

    def validate(self) -> list[str]:
        report = validate_crossed_module(self.crossed_module())
        for hom, name in ((self.iota, "iota"), (self.pi, "pi")):
            if not hom.is_valid():
                report.append(f"{name} is not a homomorphism")
        if not self.iota.is_injective():
            report.append("M does not inject into C")
        if not self.pi.is_surjective():
            report.append("Gamma does not surject onto G")
        if sorted(self.iota.images) != sorted(self.boundary.kernel()):
            report.append("exactness fails at C")
        if sorted(set(self.boundary.images)) != sorted(self.pi.kernel()):
            report.append("exactness fails at Gamma")
        if not self.M.is_abelian():
            report.append("M is not abelian")
        # centrality of M in C
        for m in range(self.M.order):
            im = self.iota(m)
            for c in range(self.C.order):
                if self.C.mul[im][c] != self.C.mul[c][im]:
                    report.append(f"M is not central in C (element {self.M.label(m)})")
                    break
        return report

    def gmodule(self):
        """M as a G-module (action induced through lifts), plus translation maps.

        Returns (GModule, elem_to_coords, coords_to_elem).
        """
        pres, elem_to_coords, coords_to_elem = abelian_structure(self.M)
        into_c = {self.iota(m): m for m in range(self.M.order)}
        k = len(pres.invariant_factors)
        # one lift per element of G
        lifts = {}
        for gamma in range(self.Gamma.order):
            lifts.setdefault(self.pi(gamma), gamma)
        mats = []
        basis_elems = []
        for i in range(k):
            coord = tuple(1 if j == i else 0 for j in range(k))
            basis_elems.append(coords_to_elem[coord])
        for g in range(self.G.order):
            gamma = lifts[g]
            cols = []
            for i in range(k):
                acted = self.action.act(gamma, self.iota(basis_elems[i]))
                cols.append(elem_to_coords[into_c[acted]])
            mat = tuple(tuple(cols[j][i] for j in range(k)) for i in range(k))
            mats.append(mat)
        module = GModule(self.G, pres.invariant_factors, tuple(mats))
        return module, elem_to_coords, coords_to_elem


def cocycle_of_crossed2(e2: Crossed2Extension, section_seed: int = 0) -> Cochain:
    """The degree-3 obstruction cocycle of a crossed 2-fold extension.

    The section and the defect lifts depend on ``section_seed``; the class of
    the result does not.
    """
    G, Gamma, C = e2.G, e2.Gamma, e2.C
    module, elem_to_coords, _ = e2.gmodule()
    into_m = {e2.iota(m): m for m in range(e2.M.order)}
    # seeded set-section of pi with s(1) = 1
    fibers: dict[int, list[int]] = {}
    for gamma in range(Gamma.order):
        fibers.setdefault(e2.pi(gamma), []).append(gamma)
    sect = [0] * G.order
    for g, fib in fibers.items():
        sect[g] = Gamma.identity if g == G.identity else fib[(section_seed + 7 * g) % len(fib)]
    # seeded normalized lift h with boundary(h(x,y)) = s(x)s(y)s(xy)^-1
    dfibers: dict[int, list[int]] = {}
    for c in range(C.order):
        dfibers.setdefault(e2.boundary(c), []).append(c)
    h = [[0] * G.order for _ in range(G.order)]
    for x in range(G.order):
        for y in range(G.order):
            if x == G.identity or y == G.identity:
                h[x][y] = C.identity
                continue
            defect = Gamma.mul[Gamma.mul[sect[x]][sect[y]]][Gamma.inv[sect[G.mul[x][y]]]]
            fib = dfibers.get(defect)
            if not fib:
                raise CrossedModuleError(
                    "section defect has no boundary preimage (corrupted extension)")
            h[x][y] = fib[(section_seed + 3 * x + 11 * y) % len(fib)]
    k = module.rank
    table = np.zeros((G.order,) * 3 + (k,), dtype=np.int64)
    for x, y, z in itertools.product(range(G.order), repeat=3):
        if G.identity in (x, y, z):
            continue
        xy, yz = G.mul[x][y], G.mul[y][z]
        acted = e2.action.act(sect[x], h[y][z])
        tail = C.mul[acted][h[x][yz]]
        val = C.mul[C.mul[h[x][y]][h[xy][z]]][C.inv[tail]]
        if val not in into_m:
            raise CrossedModuleError("obstruction landed outside M (corrupted extension)")
        table[x, y, z] = elem_to_coords[into_m[val]]
    return Cochain(module, 3, table)


def trivial_crossed2(Q: FiniteGroup, M: GModule) -> Crossed2Extension:
    """e_0: 0 -> M = M -> 0 -> Q = Q -> 1 with the module action as structure."""
    if M.group.mul != Q.mul:
        raise CrossedModuleError("module must be over Q")
    Mgrp = abelian_group_from_factors(M.invariant_factors)

    def encode(coords):
        i = 0
        for x, d in zip(coords, M.invariant_factors):
            i = i * d + (x % d)
        return i

    def decode(i):
        out = []
        for d in reversed(M.invariant_factors):
            out.append(i % d)
            i //= d
        return tuple(reversed(out))

    rows = []
    for q in range(Q.order):
        rows.append(tuple(encode(M.act(q, decode(i))) for i in range(Mgrp.order)))
    action = GroupAction(Q, Mgrp, tuple(rows))
    iota = GroupHom(Mgrp, Mgrp, tuple(range(Mgrp.order)))
    boundary = GroupHom(Mgrp, Q, tuple(Q.identity for _ in range(Mgrp.order)))
    pi = GroupHom(Q, Q, tuple(range(Q.order)))
    return Crossed2Extension(M=Mgrp, C=Mgrp, Gamma=Q, G=Q,
                             iota=iota, boundary=boundary, pi=pi, action=action)


def baer_sum(a: Crossed2Extension, b: Crossed2Extension) -> Crossed2Extension:
    """Baer sum over the same (G, M): middle terms C_a x^M C_b and
    Gamma_a x_G Gamma_b; the class of the result is the sum of the classes."""
    if a.G.mul != b.G.mul:
        raise CrossedModuleError("extensions end at different groups")
    if a.M.mul != b.M.mul:
        raise CrossedModuleError("extensions start at different modules")
    mod_a, _, _ = a.gmodule()
    mod_b, _, _ = b.gmodule()
    if mod_a.invariant_factors != mod_b.invariant_factors or mod_a.action != mod_b.action:
        raise CrossedModuleError("induced module structures differ")
    M, G = a.M, a.G
    CC = direct_product(a.C, b.C)
    anti = sorted({a.iota(m) * b.C.order + b.iota(M.inv[m]) for m in range(M.order)})
    Cq, proj_c = quotient_group(CC, anti)
    Gm, p1, p2 = fiber_product(a.pi, b.pi)
    iota = GroupHom.checked(M, Cq, tuple(proj_c(a.iota(m) * b.C.order + b.C.identity)
                                         for m in range(M.order)))
    # boundary on the quotient: pick a representative in CC for each class
    reps = [None] * Cq.order
    for cc in range(CC.order):
        cls = proj_c(cc)
        if reps[cls] is None:
            reps[cls] = cc
    pair_index = {}
    for i in range(Gm.order):
        pair_index[(p1(i), p2(i))] = i
    bnd = []
    for cls in range(Cq.order):
        ca, cb = divmod(reps[cls], b.C.order)
        bnd.append(pair_index[(a.boundary(ca), b.boundary(cb))])
    boundary = GroupHom.checked(Cq, Gm, tuple(bnd))
    pi = GroupHom.checked(Gm, G, tuple(a.pi(p1(i)) for i in range(Gm.order)))
    rows = []
    for i in range(Gm.order):
        ga, gb = p1(i), p2(i)
        row = []
        for cls in range(Cq.order):
            ca, cb = divmod(reps[cls], b.C.order)
            acted = a.action.act(ga, ca) * b.C.order + b.action.act(gb, cb)
            row.append(proj_c(acted))
        rows.append(tuple(row))
    action = GroupAction(Gm, Cq, tuple(rows))
    return Crossed2Extension(M=M, C=Cq, Gamma=Gm, G=G,
                             iota=iota, boundary=boundary, pi=pi, action=action)

"""Q-normal structures on finite algebras, their Teichmuller cocycles, the
structure-transport operations, crossed products, and the constructive
Deuring-embedding direction.

A Q-normal structure is represented concretely by a lift table: one algebra
automorphism matrix w_q per q in Q, semilinear of grade q over the base, with
w_1 = 1 and every defect w_p w_q w_{pq}^{-1} inner.  Out(A) is never
materialized; inner-ness is decided by solving the conjugator equations.

The Teichmuller cocycle is extracted exactly like the crossed-module
obstruction: choose units f(p,q) trivializing the defects, then

    xi(p,q,r) = f(p,q) f(pq,r) ( w_p(f(q,r)) f(p,qr) )^{-1}

lands in the units of the base ring and is a normalized 3-cocycle whose class
is independent of every choice made.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .groups import (
    FiniteGroup,
    GroupAction,
    GroupError,
    GroupExtension,
    GroupHom,
    abelian_structure,
)
from .gmod_cohomology import Cochain, GModule
from .finrings import (
    Algebra,
    AlgebraMap,
    FinCommRing,
    RingError,
    UnitsGroup,
    conjugation_matrix,
    diagonalize_mod,
    find_conjugator,
    fixed_subring,
    is_algebra_morphism,
    is_ring_morphism_matrix,
    inverse_mod,
    kernel_mod,
    ring_as_algebra,
    subring_from_module,
    units_group,
    _expand_over_subring,
    _module_basis_over_subring,
)
from .modlinalg import colspans_equal, invertible_mod, solve_matrix_mod, submodule_size


class NormalStructureError(ValueError):
    pass


@dataclass(frozen=True)
class BaseAction:
    """kappa_Q: an action of Q on the commutative ring S (not nec. injective)."""

    Q: FiniteGroup
    S: FinCommRing
    matrices: tuple

    def mat(self, q: int) -> np.ndarray:
        return np.asarray(self.matrices[q], dtype=np.int64)

    def validate(self) -> None:
        m = self.S.modulus
        if len(self.matrices) != self.Q.order:
            raise NormalStructureError("need one matrix per group element")
        ident = self.mat(self.Q.identity)
        if not np.array_equal(ident % m, np.eye(self.S.rank, dtype=np.int64)):
            raise NormalStructureError("identity must act trivially on S")
        for q in range(self.Q.order):
            if not is_ring_morphism_matrix(self.S, self.mat(q) % m):
                raise NormalStructureError(f"kappa({q}) is not a ring automorphism")
        for p in range(self.Q.order):
            for q in range(self.Q.order):
                if not np.array_equal((self.mat(p) @ self.mat(q)) % m,
                                      self.mat(self.Q.mul[p][q]) % m):
                    raise NormalStructureError("kappa is not a homomorphism")

    def fixed_ring(self):
        return fixed_subring(self.S, [self.mat(q) for q in range(self.Q.order)],
                             name=f"{self.S.name}^Q")


def trivial_base_action(Q: FiniteGroup, S: FinCommRing) -> BaseAction:
    eye = np.eye(S.rank, dtype=np.int64)
    return BaseAction(Q, S, tuple(eye for _ in range(Q.order)))


@dataclass(frozen=True)
class OutRep:
    """A Q-normal structure: lift table q -> automorphism of A of grade q."""

    base_action: BaseAction
    A: Algebra
    lifts: tuple                # q -> flat matrix
    name: str = ""

    @property
    def Q(self) -> FiniteGroup:
        return self.base_action.Q

    def lift(self, q: int) -> np.ndarray:
        return np.asarray(self.lifts[q], dtype=np.int64)

    def lift_map(self, q: int) -> AlgebraMap:
        return AlgebraMap.from_array(self.A, self.A, self.lift(q), grade=q)

    def defect(self, p: int, q: int) -> np.ndarray:
        """w_p w_q w_{pq}^{-1}, an automorphism over S."""
        m = self.A.modulus
        inv = inverse_mod(self.lift(self.Q.mul[p][q]), m)
        return (self.lift(p) @ self.lift(q) @ inv) % m

    def validate(self, seed: int = 0) -> None:
        Q, A = self.Q, self.A
        m = A.modulus
        self.base_action.validate()
        if len(self.lifts) != Q.order:
            raise NormalStructureError("need one lift per group element")
        if not np.array_equal(self.lift(Q.identity) % m, np.eye(A.flat_rank, dtype=np.int64)):
            raise NormalStructureError("w_1 must be the identity")
        emb = A.base_embedding()
        for q in range(Q.order):
            w = self.lift(q) % m
            if not is_algebra_morphism(A, A, w):
                raise NormalStructureError(f"lift {q} is not an algebra morphism")
            if not invertible_mod(w, m):
                raise NormalStructureError(f"lift {q} is not invertible")
            if not np.array_equal((w @ emb) % m, (emb @ self.base_action.mat(q)) % m):
                raise NormalStructureError(f"lift {q} has the wrong grade on S")
        for p in range(Q.order):
            for q in range(Q.order):
                if find_conjugator(A, self.defect(p, q), seed=seed) is None:
                    raise NormalStructureError(
                        f"defect at ({p},{q}) is not inner: not a Q-normal structure")

    def is_equivariant(self) -> bool:
        m = self.A.modulus
        return all(
            np.array_equal((self.lift(p) @ self.lift(q)) % m,
                           self.lift(self.Q.mul[p][q]) % m)
            for p in range(self.Q.order) for q in range(self.Q.order))


def equivariant_rep(base_action: BaseAction, A: Algebra, lifts, name: str = "") -> OutRep:
    """An OutRep whose lift table is an exact homomorphism."""
    rep = OutRep(base_action=base_action, A=A,
                 lifts=tuple(np.asarray(w, dtype=np.int64) % A.modulus for w in lifts),
                 name=name)
    if not rep.is_equivariant():
        raise NormalStructureError("lift table is not an exact homomorphism")
    return rep


# ---------------------------------------------------------------------------
# U(S) as a Q-module

@dataclass(frozen=True)
class UnitModule:
    """U(S) in invariant-factor coordinates with the Q-action from kappa."""

    units: UnitsGroup
    module: GModule
    elem_to_coords: tuple
    coords_to_elem: dict

    def coords_of_unit_vec(self, vec) -> tuple[int, ...]:
        return self.elem_to_coords[self.units.index_of(vec)]

    def unit_vec_of_coords(self, coords) -> np.ndarray:
        return self.units.element(self.coords_to_elem[tuple(coords)])


def unit_module(base_action: BaseAction) -> UnitModule:
    S, Q = base_action.S, base_action.Q
    units = units_group(S)
    pres, e2c, c2e = abelian_structure(units.group)
    k = len(pres.invariant_factors)
    mats = []
    basis_elems = []
    for i in range(k):
        coord = tuple(1 if j == i else 0 for j in range(k))
        basis_elems.append(c2e[coord])
    for q in range(Q.order):
        mat_q = base_action.mat(q)
        cols = []
        for i in range(k):
            u_vec = units.element(basis_elems[i])
            acted = (mat_q @ u_vec) % S.modulus
            cols.append(e2c[units.index_of(acted)])
        mats.append(tuple(tuple(cols[j][i] for j in range(k)) for i in range(k)))
    module = GModule(Q, pres.invariant_factors, tuple(mats))
    return UnitModule(units=units, module=module, elem_to_coords=tuple(e2c),
                      coords_to_elem=c2e)


# ---------------------------------------------------------------------------
# Teichmuller cocycle

@dataclass
class TeichWitness:
    rep: OutRep
    unit_mod: UnitModule
    f: list                      # f[p][q]: flat unit of A
    cocycle: Cochain


def teichmuller_cocycle(rep: OutRep, seed: int = 0,
                        unit_mod: Optional[UnitModule] = None) -> TeichWitness:
    """xi in Z^3(Q, U(S)) measuring the failure of the lift table to compose.

    Chooses (via the conjugator solver, seed-dependent) units f(p,q) with
    w_p w_q = Inn(f(p,q)) w_{pq}, normalized f(1,.) = f(.,1) = 1, and returns

        xi(p,q,r) = f(p,q) f(pq,r) ( w_p(f(q,r)) f(p,qr) )^{-1}

    read in U(S) through the base embedding.  Raises when some defect is not
    inner ("not Q-normal").
    """
    Q, A = rep.Q, rep.A
    m = A.modulus
    if unit_mod is None:
        unit_mod = unit_module(rep.base_action)
    one = A.flat_unit()
    f = [[None] * Q.order for _ in range(Q.order)]
    for p in range(Q.order):
        for q in range(Q.order):
            if p == Q.identity or q == Q.identity:
                f[p][q] = one.copy()
                continue
            u = find_conjugator(A, rep.defect(p, q), seed=seed)
            if u is None:
                raise NormalStructureError(
                    f"defect at ({p},{q}) is not inner: not a Q-normal structure")
            f[p][q] = u
    emb = A.base_embedding()
    emb_diag = diagonalize_mod(emb, m)
    k = unit_mod.module.rank
    table = np.zeros((Q.order,) * 3 + (k,), dtype=np.int64)
    for p, q, r in itertools.product(range(Q.order), repeat=3):
        if Q.identity in (p, q, r):
            continue
        pq, qr = Q.mul[p][q], Q.mul[q][r]
        head = A.mul(f[p][q], f[pq][r])
        tail = A.mul((rep.lift(p) @ f[q][r]) % m, f[p][qr])
        val = A.mul(head, A.inv(tail))
        s_coords = emb_diag.solve(val)
        if s_coords is None:
            raise NormalStructureError(
                "teichmuller value escaped the base ring (corrupted input)")
        table[p, q, r] = unit_mod.coords_of_unit_vec(s_coords)
    z = Cochain(unit_mod.module, 3, table)
    return TeichWitness(rep=rep, unit_mod=unit_mod, f=f, cocycle=z)


# ---------------------------------------------------------------------------
# transport of normal structures: opposite, matrix, tensor

def opposite_rep(rep: OutRep) -> OutRep:
    from .finrings import opposite_algebra
    Aop = opposite_algebra(rep.A)
    return OutRep(base_action=rep.base_action, A=Aop, lifts=rep.lifts,
                  name=f"{rep.name}^op" if rep.name else "op")


def matrix_algebra_over(A: Algebra, k: int, name: str = "") -> Algebra:
    """M_k(A): basis E_pq (x) e_i at (p*k + q)*rank_A + i."""
    S = A.base
    n = A.rank
    rank = k * k * n
    zero = tuple([0] * S.rank)
    st = np.array(A.structure, dtype=np.int64).reshape(n, n, n, S.rank)
    struct = [[None] * rank for _ in range(rank)]
    for p, q, i in itertools.product(range(k), range(k), range(n)):
        for r, s2, j in itertools.product(range(k), range(k), range(n)):
            vec = [zero] * rank
            if q == r:
                for c in range(n):
                    coef = st[i, j, c]
                    if coef.any():
                        vec[(p * k + s2) * n + c] = tuple(int(x) for x in coef)
            struct[(p * k + q) * n + i][(r * k + s2) * n + j] = tuple(vec)
    unitA = A.unit
    unit = [zero] * rank
    for p in range(k):
        for c in range(n):
            unit[(p * k + p) * n + c] = tuple(int(x) for x in unitA[c])
    return Algebra(base=S, rank=rank, structure=tuple(tuple(r) for r in struct),
                   unit=tuple(unit), name=name or f"M_{k}({A.name})")


def matrix_rep(rep: OutRep, k: int) -> OutRep:
    MA = matrix_algebra_over(rep.A, k)
    lifts = tuple(np.kron(np.eye(k * k, dtype=np.int64), rep.lift(q)) % rep.A.modulus
                  for q in range(rep.Q.order))
    return OutRep(base_action=rep.base_action, A=MA, lifts=lifts,
                  name=f"M_{k}({rep.name})" if rep.name else f"M_{k}")


def tensor_flat_element(A: Algebra, B: Algebra, AB: Algebra, a, b) -> np.ndarray:
    """The image of a (x) b in the tensor algebra's flat coordinates."""
    S = A.base
    m = S.modulus
    sR = S.rank
    nA, nB = A.rank, B.rank
    av = np.asarray(a, dtype=np.int64).reshape(nA, sR)
    bv = np.asarray(b, dtype=np.int64).reshape(nB, sR)
    out = np.einsum("iu,jv,uvw->ijw", av, bv, S.tensor) % m
    return out.reshape(nA * nB * sR)


def tensor_rep(rep1: OutRep, rep2: OutRep) -> tuple[OutRep, Algebra]:
    """(A1 (x) A2, w1 (x) w2); requires the same base action."""
    from .finrings import tensor_algebra
    if rep1.base_action is not rep2.base_action and \
            rep1.base_action.matrices != rep2.base_action.matrices:
        raise NormalStructureError("tensor needs a common base action")
    A, B = rep1.A, rep2.A
    AB = tensor_algebra(A, B)
    m = AB.modulus
    nA, nB, sR = A.rank, B.rank, A.base.rank
    lifts = []
    one = B.base.one()
    for q in range(rep1.Q.order):
        cols = []
        for i in range(nA):
            for j in range(nB):
                for u in range(sR):
                    # flat basis element (e_i s_u) (x) f_j
                    a = np.zeros(A.flat_rank, dtype=np.int64)
                    a[i * sR + u] = 1
                    b = np.zeros(B.flat_rank, dtype=np.int64)
                    b[j * sR:(j + 1) * sR] = one
                    wa = (rep1.lift(q) @ a) % m
                    wb = (rep2.lift(q) @ b) % m
                    cols.append(tensor_flat_element(A, B, AB, wa, wb))
        lifts.append(np.stack(cols, axis=1) % m)
    out = OutRep(base_action=rep1.base_action, A=AB, lifts=tuple(lifts),
                 name=f"({rep1.name})(x)({rep2.name})")
    return out, AB


def transform_normal(rep: OutRep, op: str, arg=None):
    """Structure transport: op in {"opposite", "matrix", "tensor"}."""
    if op == "opposite":
        return opposite_rep(rep)
    if op == "matrix":
        return matrix_rep(rep, int(arg))
    if op == "tensor":
        out, _ = tensor_rep(rep, arg)
        return out
    raise NormalStructureError(f"unknown transport {op!r}")


# ---------------------------------------------------------------------------
# crossed products

@dataclass(frozen=True)
class CrossedProductSpec:
    """(A, Q, e_Q, theta): extension K >-> Gamma ->> Q with a morphism of
    crossed modules (i, theta): (K, Gamma, j) -> (U(A), Aut(A), inner)."""

    A: Algebra
    base_action: BaseAction
    ext: GroupExtension
    i_images: tuple             # K-element -> flat unit vector of A
    theta: tuple                # Gamma-element -> flat automorphism matrix

    @property
    def Q(self) -> FiniteGroup:
        return self.ext.quotient_group

    @property
    def Gamma(self) -> FiniteGroup:
        return self.ext.middle

    @property
    def K(self) -> FiniteGroup:
        return self.ext.kernel_group

    def theta_mat(self, g: int) -> np.ndarray:
        return np.asarray(self.theta[g], dtype=np.int64)

    def i_vec(self, y: int) -> np.ndarray:
        return np.array(self.i_images[y], dtype=np.int64)

    def validate(self) -> None:
        A, Q, Gamma, K = self.A, self.Q, self.Gamma, self.K
        m = A.modulus
        self.ext.validate()
        self.base_action.validate()
        emb = A.base_embedding()
        for g in range(Gamma.order):
            th = self.theta_mat(g) % m
            if not is_algebra_morphism(A, A, th) or not invertible_mod(th, m):
                raise NormalStructureError(f"theta({g}) is not an algebra automorphism")
            q = self.ext.quotient_hom(g)
            if not np.array_equal((th @ emb) % m, (emb @ self.base_action.mat(q)) % m):
                raise NormalStructureError(f"theta({g}) has the wrong grade")
        for g in range(Gamma.order):
            for h in range(Gamma.order):
                if not np.array_equal((self.theta_mat(g) @ self.theta_mat(h)) % m,
                                      self.theta_mat(Gamma.mul[g][h]) % m):
                    raise NormalStructureError("theta is not a homomorphism")
        seen = set()
        for y in range(K.order):
            v = self.i_vec(y)
            if not A.is_unit(v):
                raise NormalStructureError("i(K) contains a non-unit")
            key = tuple(int(x) for x in v)
            if key in seen:
                raise NormalStructureError("i is not injective")
            seen.add(key)
        for y in range(K.order):
            for z in range(K.order):
                lhs = A.mul(self.i_vec(y), self.i_vec(z))
                if not np.array_equal(lhs, self.i_vec(K.mul[y][z])):
                    raise NormalStructureError("i is not multiplicative")
        # crossed-module morphism conditions
        for y in range(K.order):
            jy = self.ext.kernel_hom(y)
            if not np.array_equal(self.theta_mat(jy) % m,
                                  conjugation_matrix(A, self.i_vec(y))):
                raise NormalStructureError("theta(j(y)) differs from Inn(i(y))")
        for g in range(Gamma.order):
            for y in range(K.order):
                conj = None
                gy = Gamma.mul[Gamma.mul[g][self.ext.kernel_hom(y)]][Gamma.inv[g]]
                # g j(y) g^-1 lies in j(K)
                pre = [z for z in range(K.order) if self.ext.kernel_hom(z) == gy]
                if len(pre) != 1:
                    raise NormalStructureError("kernel is not normal in Gamma")
                lhs = self.i_vec(pre[0])
                rhs = (self.theta_mat(g) @ self.i_vec(y)) % m
                if not np.array_equal(lhs % m, rhs):
                    raise NormalStructureError("i is not Gamma-equivariant")

    def induced_out_rep(self, seed: int = 0) -> OutRep:
        """The Q-normal structure sigma_theta induced by the morphism."""
        sec = self.ext.section(seed)
        lifts = tuple(self.theta_mat(sec[q]) % self.A.modulus for q in range(self.Q.order))
        return OutRep(base_action=self.base_action, A=self.A, lifts=lifts,
                      name="sigma_theta")


@dataclass
class CrossedProductResult:
    spec: CrossedProductSpec
    form: str
    C: Algebra                   # the crossed product, over R = S^Q
    R: FinCommRing
    r_embed: np.ndarray          # R -> S
    s_basis: np.ndarray          # S-basis over R (columns, S-coords)
    section: list                # Q -> Gamma (v_q)
    phi: list                    # phi[p][q] in K
    a_to_c: np.ndarray           # flat embedding A -> C
    v_units: list                # flat C-vectors
    checks: dict

    def s_to_c(self) -> np.ndarray:
        return (self.a_to_c @ self.spec.A.base_embedding()) % self.C.modulus

    def c_basis_layout(self) -> tuple[int, int, int, int]:
        """(|Q|, rank_A, sigma, rank_R) block layout of C's basis."""
        return (self.spec.Q.order, self.spec.A.rank, self.s_basis.shape[1], self.R.rank)


def _sde_flat(A: Algebra, s_vec, i: int) -> np.ndarray:
    """Flat A-vector of (s * e_i) for an S-element s."""
    out = np.zeros(A.flat_rank, dtype=np.int64)
    sR = A.base.rank
    out[i * sR:(i + 1) * sR] = np.asarray(s_vec, dtype=np.int64) % A.modulus
    return out


def crossed_product(spec: CrossedProductSpec, form: str = "v2", seed: int = 0,
                    validate: bool = True) -> CrossedProductResult:
    """Build the crossed product algebra; both constructions are available.

    v2 builds directly on the left-A-basis {v_q}; v1 builds the twisted group
    algebra A^t Gamma, forms the two-sided ideal <y - j(y)>, and takes the
    linear-span quotient (the checks record that the Prop-3.1 basis map is an
    isomorphism onto the v2 algebra).
    """
    if form not in ("v1", "v2"):
        raise NormalStructureError("form must be 'v1' or 'v2'")
    if validate:
        spec.validate()
    A, Q, Gamma = spec.A, spec.Q, spec.Gamma
    S = A.base
    m = A.modulus
    R, r_embed = spec.base_action.fixed_ring()
    s_basis = _module_basis_over_subring(S, R, r_embed)
    if s_basis is None:
        raise NormalStructureError("S is not free over the fixed ring R")
    sigma = s_basis.shape[1]
    expand_s = _expand_over_subring(S, R, r_embed, s_basis)
    sec = spec.ext.section(seed)
    into_k = {spec.ext.kernel_hom(y): y for y in range(spec.K.order)}
    phi = [[0] * Q.order for _ in range(Q.order)]
    for p in range(Q.order):
        for q in range(Q.order):
            g = Gamma.mul[Gamma.mul[sec[p]][sec[q]]][Gamma.inv[sec[Q.mul[p][q]]]]
            phi[p][q] = into_k[g]
    n = A.rank
    sR = S.rank
    rR = R.rank
    dimC = Q.order * n * sigma

    def c_index(q, i, d):
        return (q * n + i) * sigma + d

    def expand_a_to_blocks(x_flat):
        """A-element -> list of R-coord vectors indexed by (i, d)."""
        out = [None] * (n * sigma)
        for i in range(n):
            coords = expand_s(x_flat[i * sR:(i + 1) * sR])
            if coords is None:
                raise NormalStructureError("element escaped the R-span (S not free?)")
            for d in range(sigma):
                out[i * sigma + d] = coords[d]
        return out

    zero_r = tuple([0] * rR)
    struct = [[None] * dimC for _ in range(dimC)]
    kappa = spec.base_action
    for p, i, d in itertools.product(range(Q.order), range(n), range(sigma)):
        u1 = _sde_flat(A, s_basis[:, d], i)
        th_p = spec.theta_mat(sec[p])
        kap_p = kappa.mat(p)
        for q, j, e in itertools.product(range(Q.order), range(n), range(sigma)):
            # (s_d e_i v_p)(s_e e_j v_q)
            #   = s_d e_i (p.s_e) theta_p(e_j) i(phi(p,q)) v_{pq}
            se_acted = (kap_p @ s_basis[:, e]) % m
            ej = _sde_flat(A, S.one(), j)
            x = A.mul(u1, A.scalar_mul(se_acted, (th_p @ ej) % m))
            x = A.mul(x, spec.i_vec(phi[p][q]))
            blocks = expand_a_to_blocks(x)
            vec = [zero_r] * dimC
            pq = Q.mul[p][q]
            for b_idx in range(n * sigma):
                vec[c_index(pq, b_idx // sigma, b_idx % sigma)] = \
                    tuple(int(v) for v in blocks[b_idx])
            struct[c_index(p, i, d)][c_index(q, j, e)] = tuple(vec)
    unit_blocks = expand_a_to_blocks(A.flat_unit())
    unit = [zero_r] * dimC
    for b_idx in range(n * sigma):
        unit[c_index(Q.identity, b_idx // sigma, b_idx % sigma)] = \
            tuple(int(v) for v in unit_blocks[b_idx])
    C = Algebra(base=R, rank=dimC, structure=tuple(tuple(r) for r in struct),
                unit=tuple(unit), name=f"({A.name}) xt {Q.order}")
    if validate:
        C.validate()
    # A -> C and the v_q units
    a_cols = []
    for i in range(n):
        for u in range(sR):
            su = np.zeros(sR, dtype=np.int64)
            su[u] = 1
            blocks = expand_a_to_blocks(_sde_flat(A, su, i))
            col = np.zeros(dimC * rR, dtype=np.int64)
            for b_idx in range(n * sigma):
                ci = c_index(Q.identity, b_idx // sigma, b_idx % sigma)
                col[ci * rR:(ci + 1) * rR] = blocks[b_idx]
            a_cols.append(col)
    a_to_c = np.stack(a_cols, axis=1) % m
    v_units = []
    for q in range(Q.order):
        blocks = expand_a_to_blocks(A.flat_unit())
        vec = np.zeros(dimC * rR, dtype=np.int64)
        for b_idx in range(n * sigma):
            ci = c_index(q, b_idx // sigma, b_idx % sigma)
            vec[ci * rR:(ci + 1) * rR] = blocks[b_idx]
        v_units.append(vec % m)
    checks: dict = {}
    result = CrossedProductResult(spec=spec, form=form, C=C, R=R, r_embed=r_embed,
                                  s_basis=s_basis, section=sec, phi=phi,
                                  a_to_c=a_to_c, v_units=v_units, checks=checks)
    if form == "v1":
        checks.update(_v1_quotient_checks(spec, result))
        if not checks["prop31_isomorphism"]:
            raise NormalStructureError("v1 quotient does not match the v2 algebra")
    return result


def _v1_quotient_checks(spec: CrossedProductSpec, res: CrossedProductResult) -> dict:
    """Build A^t Gamma / <y - j(y)> and certify the Prop-3.1 basis map.

    The twisted group algebra is materialized as an algebra over R; the ideal
    is closed as a linear span with a fixed reduction order; the map
    x |-> (x v_{pi(x)}^{-1}) v_{pi(x)} is checked to be a surjective algebra
    morphism with kernel exactly the ideal.
    """
    A, Q, Gamma = spec.A, spec.Q, spec.Gamma
    S, R = A.base, res.R
    m = A.modulus
    sigma = res.s_basis.shape[1]
    n = A.rank
    sR, rR = S.rank, R.rank
    expand_s = _expand_over_subring(S, R, res.r_embed, res.s_basis)
    dimT = Gamma.order * n * sigma

    def t_index(g, i, d):
        return (g * n + i) * sigma + d

    zero_r = tuple([0] * rR)

    def expand_blocks(x_flat):
        out = [None] * (n * sigma)
        for i in range(n):
            coords = expand_s(x_flat[i * sR:(i + 1) * sR])
            for d in range(sigma):
                out[i * sigma + d] = coords[d]
        return out

    struct = [[None] * dimT for _ in range(dimT)]
    for g, i, d in itertools.product(range(Gamma.order), range(n), range(sigma)):
        u1 = _sde_flat(A, res.s_basis[:, d], i)
        th = spec.theta_mat(g)
        for h, j, e in itertools.product(range(Gamma.order), range(n), range(sigma)):
            u2 = _sde_flat(A, res.s_basis[:, e], j)
            x = A.mul(u1, (th @ u2) % m)
            blocks = expand_blocks(x)
            vec = [zero_r] * dimT
            gh = Gamma.mul[g][h]
            for b in range(n * sigma):
                vec[t_index(gh, b // sigma, b % sigma)] = tuple(int(v) for v in blocks[b])
            struct[t_index(g, i, d)][t_index(h, j, e)] = tuple(vec)
    unit_blocks = expand_blocks(A.flat_unit())
    unit = [zero_r] * dimT
    for b in range(n * sigma):
        unit[t_index(Gamma.identity, b // sigma, b % sigma)] = \
            tuple(int(v) for v in unit_blocks[b])
    TG = Algebra(base=R, rank=dimT, structure=tuple(tuple(r) for r in struct),
                 unit=tuple(unit), name=f"({A.name})^t Gamma")
    flatT = TG.flat_rank
    tensor = TG.flat_tensor
    # ideal generators: j(y)-basis-element minus the embedded unit i(y)
    gens = []
    for y in range(spec.K.order):
        vec = np.zeros(flatT, dtype=np.int64)
        g = spec.ext.kernel_hom(y)
        blocks = expand_blocks(A.flat_unit())
        for b in range(n * sigma):
            ti = t_index(g, b // sigma, b % sigma)
            vec[ti * rR:(ti + 1) * rR] += np.array(blocks[b], dtype=np.int64)
        blocks = expand_blocks(spec.i_vec(y))
        for b in range(n * sigma):
            ti = t_index(Gamma.identity, b // sigma, b % sigma)
            vec[ti * rR:(ti + 1) * rR] -= np.array(blocks[b], dtype=np.int64)
        gens.append(vec % m)
    span = np.stack(gens, axis=1)
    size = submodule_size(span, m)
    while True:
        # close under left and right multiplication by all basis vectors
        prods = []
        for b in range(flatT):
            Lb = tensor[b]          # (x -> e_b * x): [j, c] at fixed a=b -> transpose
            prods.append((tensor[b].T @ span) % m)      # e_b * span
            prods.append((np.einsum("ac,ak->ck", tensor[:, b, :], span)) % m)  # span * e_b
        new_span = np.hstack([span] + prods) % m
        new_size = submodule_size(new_span, m)
        # compress back to a manageable generator count via diagonalization
        dg = diagonalize_mod(new_span, m, want_inverses=True)
        keep = []
        for idx in range(len(dg.d)):
            scale = int(dg.d[idx])
            if scale % m == 0:
                continue
            keep.append((dg.U_inv[:, idx] * scale) % m)
        span = np.stack(keep, axis=1) if keep else np.zeros((flatT, 0), dtype=np.int64)
        if new_size == size:
            break
        size = new_size
    ideal = span
    checks = {"ideal_dim_log": size, "tg_dim": flatT}
    # Prop 3.1 map on the basis: (s_d e_i g) -> s_d e_i i(g v_{pi g}^{-1}) v_{pi g}
    dimC = res.C.rank
    flatC = res.C.flat_rank
    into_k = {spec.ext.kernel_hom(y): y for y in range(spec.K.order)}
    cols = []
    for g, i, d in itertools.product(range(Gamma.order), range(n), range(sigma)):
        q = spec.ext.quotient_hom(g)
        k_elt = into_k[Gamma.mul[g][Gamma.inv[res.section[q]]]]
        a_part = A.mul(_sde_flat(A, res.s_basis[:, d], i), spec.i_vec(k_elt))
        c_vec = (res.a_to_c @ a_part) % m
        c_vec = _c_mul(res, c_vec, res.v_units[q])
        cols.append((t_index(g, i, d), c_vec))
    Phi = np.zeros((flatC, flatT), dtype=np.int64)
    for (ti, c_vec) in cols:
        # extend R-linearly over the rR coordinates of the source block
        for u in range(rR):
            ru = np.zeros(rR, dtype=np.int64)
            ru[u] = 1
            scaled = res.C.scalar_mul(ru, c_vec)
            Phi[:, ti * rR + u] = scaled
    # checks: kills the ideal, multiplicative, surjective, kernel = ideal
    kills = not ((Phi @ ideal) % m).any()
    mult_ok = True
    for a in range(flatT):
        lhs = (Phi @ tensor[a].T) % m                  # Phi(e_a * e_b) columns
        ea_img = Phi[:, a]
        rhs = np.stack([res.C.mul(ea_img, Phi[:, b]) for b in range(flatT)], axis=1)
        if not np.array_equal(lhs, rhs):
            mult_ok = False
            break
    surj = submodule_size(Phi, m) == res.C.size
    ker = kernel_mod(Phi, m)
    ker_eq = colspans_equal(ker, ideal, m)
    checks.update({"prop31_kills_ideal": bool(kills),
                   "prop31_multiplicative": bool(mult_ok),
                   "prop31_surjective": bool(surj),
                   "prop31_kernel_is_ideal": bool(ker_eq)})
    checks["prop31_isomorphism"] = bool(kills and mult_ok and surj and ker_eq)
    return checks


def _c_mul(res: CrossedProductResult, x, y) -> np.ndarray:
    return res.C.mul(x, y)


# ---------------------------------------------------------------------------
# the endomorphism side: _A End(M_e) and the induced structures

@dataclass
class EndSide:
    """_A End(C) = M_{|Q|}(A^op) for a crossed product C, with translations.

    ``E`` is the endomorphism algebra over S on the basis f_{p,q,i} sending
    v_q to e_i v_p; ``to_matrix`` and ``from_matrix`` translate between E and
    actual C-endomorphism matrices.
    """

    product: CrossedProductResult
    E: Algebra
    basis_matrices: list         # E flat basis index -> C-matrix

    def to_matrix(self, e_vec) -> np.ndarray:
        m = self.E.modulus
        out = np.zeros_like(self.basis_matrices[0])
        for idx, coef in enumerate(np.asarray(e_vec, dtype=np.int64) % m):
            if coef:
                out = (out + coef * self.basis_matrices[idx]) % m
        return out

    def from_matrix(self, mat) -> Optional[np.ndarray]:
        cols = np.stack([bm.reshape(-1) for bm in self.basis_matrices], axis=1)
        return diagonalize_mod(cols, self.E.modulus).solve(
            np.asarray(mat, dtype=np.int64).reshape(-1))


def end_algebra_of_crossed_product(res: CrossedProductResult) -> EndSide:
    """Build _A End(C) on the left-A-basis {v_q} of the crossed product."""
    spec = res.spec
    A, Q = spec.A, spec.Q
    S = A.base
    m = A.modulus
    n = A.rank
    sR = S.rank
    nq = Q.order
    rank = nq * nq * n
    zero = tuple([0] * sR)
    st = np.array(A.structure, dtype=np.int64).reshape(n, n, n, sR)
    struct = [[None] * rank for _ in range(rank)]

    def e_index(p, q, i):
        return (p * nq + q) * n + i

    for p, q, i in itertools.product(range(nq), range(nq), range(n)):
        for r, s2, j in itertools.product(range(nq), range(nq), range(n)):
            vec = [zero] * rank
            if q == r:
                # f_{p,q,i} o f_{r,s2,j} : v_s2 -> e_j e_i v_p (A acts on the left)
                for c in range(n):
                    coef = st[j, i, c]
                    if coef.any():
                        vec[e_index(p, s2, c)] = tuple(int(x) for x in coef)
            struct[e_index(p, q, i)][e_index(r, s2, j)] = tuple(vec)
    unit = [zero] * rank
    ua = np.array(A.unit, dtype=np.int64)
    for q in range(nq):
        for c in range(n):
            unit[e_index(q, q, c)] = tuple(int(x) for x in ua[c])
    E = Algebra(base=S, rank=rank, structure=tuple(tuple(r) for r in struct),
                unit=tuple(unit), name=f"End_A({res.C.name})")
    # basis C-matrices: f_{p,q,i}(s_d e_k v_l) = delta_{lq} s_d e_k e_i v_p
    C = res.C
    flatC = C.flat_rank
    basis_matrices = []
    emb_cols = res.a_to_c        # flat A -> flat C at v_identity
    sigma = res.s_basis.shape[1]
    rR = res.R.rank
    s_img = res.s_to_c()
    for p, q, i in itertools.product(range(nq), range(nq), range(n)):
        mat = np.zeros((flatC, flatC), dtype=np.int64)
        for l, k2, d in itertools.product(range(nq), range(n), range(sigma)):
            ci = ((l * n + k2) * sigma + d)
            for u in range(rR):
                src = ci * rR + u
                if l != q:
                    continue
                # source vector = r_u s_d e_k2 v_q  ->  r_u s_d e_k2 e_i v_p
                ru = np.zeros(rR, dtype=np.int64)
                ru[u] = 1
                s_val = S.mul((res.r_embed @ ru) % m, res.s_basis[:, d])
                a_elt = A.mul(_sde_flat(A, s_val, k2), _sde_flat(A, S.one(), i))
                c_elt = (res.a_to_c @ a_elt) % m
                c_elt = C.mul(c_elt, res.v_units[p])
                mat[:, src] = c_elt
        # the flat basis carries S-coordinates: (s_u . f)(b) = s_u f(b)
        for u in range(sR):
            basis_matrices.append((C.left_mul_matrix(s_img[:, u]) @ mat) % m)
    return EndSide(product=res, E=E, basis_matrices=basis_matrices)


def end_equivariant_structure(side: EndSide) -> OutRep:
    """tau_{e_Q}: the exact Q-action (f -> x f(x^-1 .)) on _A End(C)."""
    res = side.product
    spec = res.spec
    C, Q = res.C, spec.Q
    m = C.modulus
    taus = []
    for q in range(Q.order):
        x = res.v_units[q]
        Lx = C.left_mul_matrix(x)
        Lxi = C.left_mul_matrix(C.inv(x))
        cols = []
        for idx in range(side.E.flat_rank):
            e_vec = np.zeros(side.E.flat_rank, dtype=np.int64)
            e_vec[idx] = 1
            img = (Lx @ side.to_matrix(e_vec) @ Lxi) % m
            coords = side.from_matrix(img)
            if coords is None:
                raise NormalStructureError("tau image escaped End_A (internal error)")
            cols.append(coords)
        taus.append(np.stack(cols, axis=1) % m)
    rep = OutRep(base_action=spec.base_action, A=side.E, lifts=tuple(taus),
                 name="tau_endside")
    if not rep.is_equivariant():
        raise NormalStructureError("tau is not an exact action (tpf(ii) violated)")
    return rep


def end_fixed_subalgebra_check(side: EndSide, tau: OutRep) -> dict:
    """tpf(viii): u^op -> (b -> b u) identifies C^op with the tau-fixed part."""
    res = side.product
    C = res.C
    m = C.modulus
    flatC = C.flat_rank
    # image of the right-multiplication map, in E-coordinates
    cols = []
    for a in range(flatC):
        ea = np.zeros(flatC, dtype=np.int64)
        ea[a] = 1
        coords = side.from_matrix(C.right_mul_matrix(ea))
        if coords is None:
            return {"right_mult_lands_in_end": False}
        cols.append(coords)
    rmap = np.stack(cols, axis=1) % m
    # fixed submodule of tau
    eye = np.eye(side.E.flat_rank, dtype=np.int64)
    stacked = np.vstack([(tau.lift(q) - eye) % m for q in range(tau.Q.order)])
    fixed = kernel_mod(stacked, m)
    fixed_ok = colspans_equal(rmap, fixed, m)
    # multiplicative from C^op: map(x .op y) = map(y x) = map(x) * map(y) in E
    mult_ok = True
    for a in range(flatC):
        ea = np.zeros(flatC, dtype=np.int64)
        ea[a] = 1
        for b in range(flatC):
            eb = np.zeros(flatC, dtype=np.int64)
            eb[b] = 1
            lhs = side.from_matrix(C.right_mul_matrix(C.mul(eb, ea)))
            rhs = side.E.mul(rmap[:, a], rmap[:, b])
            if lhs is None or not np.array_equal(lhs % m, rhs):
                mult_ok = False
                break
        if not mult_ok:
            break
    inj = submodule_size(rmap, m) == C.size
    return {"right_mult_lands_in_end": True,
            "image_is_fixed_subalgebra": bool(fixed_ok),
            "multiplicative_from_opposite": bool(mult_ok),
            "injective": bool(inj)}


def end_entrywise_lift(side: EndSide, w: np.ndarray) -> np.ndarray:
    """The entrywise action of an A-automorphism on M_{|Q|}(A^op) = E."""
    nq = side.product.spec.Q.order
    return np.kron(np.eye(nq * nq, dtype=np.int64), np.asarray(w, dtype=np.int64)) \
        % side.E.modulus


# ---------------------------------------------------------------------------
# Deuring embedding

@dataclass
class DeuringWitness:
    rep: OutRep
    product: CrossedProductResult
    chi_units: list              # q -> unit of C representing chi(q)
    checks: dict


def deuring_embedding_from_splitting(rep: OutRep, ext: GroupExtension,
                                     i_images, theta, seed: int = 0
                                     ) -> tuple[DeuringWitness, OutRep]:
    """C = crossed product over the splitting data; chi(q) = class of v_q.

    Validates that the splitting induces the given normal structure, verifies
    the normalizer/grade/multiplicativity properties of chi elementwise, and
    returns the induced exact Q-structure on the endomorphism side.
    """
    A = rep.A
    m = A.modulus
    spec = CrossedProductSpec(A=A, base_action=rep.base_action, ext=ext,
                              i_images=tuple(tuple(int(x) for x in v) for v in i_images),
                              theta=tuple(theta))
    spec.validate()
    Q = spec.Q
    sec = ext.section(seed)
    for q in range(Q.order):
        diff = (spec.theta_mat(sec[q]) @ inverse_mod(rep.lift(q), m)) % m
        if find_conjugator(A, diff) is None:
            raise NormalStructureError(
                "splitting induces a different Q-normal structure than the rep")
    res = crossed_product(spec, form="v2", seed=seed)
    C = res.C
    checks: dict = {}
    # chi(q) = v_q normalizes A and induces the right grade on S
    a_img_diag = diagonalize_mod(res.a_to_c, m)
    s_img = res.s_to_c()
    normal_ok = True
    grade_ok = True
    for q in range(Q.order):
        v = res.v_units[q]
        vinv = C.inv(v)
        for col in range(res.a_to_c.shape[1]):
            conj = C.mul(C.mul(v, res.a_to_c[:, col]), vinv)
            if a_img_diag.solve(conj) is None:
                normal_ok = False
        for u in range(s_img.shape[1]):
            conj = C.mul(C.mul(v, s_img[:, u]), vinv)
            expect = (s_img @ rep.base_action.mat(q)[:, u]) % m
            if not np.array_equal(conj, expect):
                grade_ok = False
    mult_ok = True
    for p in range(Q.order):
        for q in range(Q.order):
            pq = Q.mul[p][q]
            w = C.mul(C.mul(res.v_units[p], res.v_units[q]), C.inv(res.v_units[pq]))
            sol = a_img_diag.solve(w)
            if sol is None or not A.is_unit(sol):
                mult_ok = False
    checks["chi_normalizes_A"] = bool(normal_ok)
    checks["chi_has_grades"] = bool(grade_ok)
    checks["chi_multiplicative_mod_UA"] = bool(mult_ok)
    checks["rank_over_R"] = C.rank
    checks["expected_rank"] = Q.order * A.rank * res.s_basis.shape[1]
    side = end_algebra_of_crossed_product(res)
    tau = end_equivariant_structure(side)
    checks["end_action_exact"] = tau.is_equivariant()
    # tpf(vii)/Thm fouro: tau agrees with the entrywise lift up to inner
    vii_ok = True
    for q in range(Q.order):
        lift_w = end_entrywise_lift(side, rep.lift(q))
        diff = (tau.lift(q) @ inverse_mod(lift_w, m)) % m
        if find_conjugator(side.E, diff) is None:
            vii_ok = False
    checks["tau_matches_matrix_structure_mod_inner"] = bool(vii_ok)
    witness = DeuringWitness(rep=rep, product=res, chi_units=list(res.v_units),
                             checks=checks)
    return witness, tau


def semidirect_splitting(rep: OutRep, cap: int = 256):
    """The split extension U(A) x| Q with theta(u,q) = Inn(u) w_q.

    Only valid when the rep is equivariant (the split extension realizes the
    vanishing certificate f = 1); sizes capped by the group-table limit.
    """
    if not rep.is_equivariant():
        raise NormalStructureError("semidirect splitting needs an equivariant rep")
    return _twisted_unit_extension(rep, phi_units=None, cap=cap)


def splitting_from_coboundary(witness: TeichWitness, c: Cochain, cap: int = 256):
    """Splitting data from a certificate dc = xi.

    Corrects the conjugator table f by the central units gamma = c so that the
    corrected factor set satisfies the exact cocycle condition, then builds
    the extension U(A) >-> Gamma ->> Q by the twisted product.
    """
    rep = witness.rep
    from .gmod_cohomology import coboundary
    if not np.array_equal(coboundary(c).table, witness.cocycle.table):
        raise NormalStructureError("certificate does not bound the cocycle")
    Q = rep.Q
    A = rep.A
    m = A.modulus
    emb = A.base_embedding()
    phi_units = [[None] * Q.order for _ in range(Q.order)]
    for p in range(Q.order):
        for q in range(Q.order):
            gamma_coords = c.table[p, q]
            s_unit = witness.unit_mod.unit_vec_of_coords(tuple(int(x) for x in gamma_coords))
            gamma_in_A = (emb @ s_unit) % m
            phi_units[p][q] = A.mul(witness.f[p][q], gamma_in_A)
    return _twisted_unit_extension(rep, phi_units=phi_units, cap=cap)


def _twisted_unit_extension(rep: OutRep, phi_units, cap: int):
    """Gamma = U(A) x Q with (u,p)(v,q) = (u w_p(v) phi(p,q), pq)."""
    A, Q = rep.A, rep.Q
    m = A.modulus
    units = units_group(A)
    nu = units.group.order
    if nu * Q.order > cap:
        raise NormalStructureError("unit extension exceeds the table cap")
    one = A.flat_unit()

    def phi(p, q):
        if phi_units is None:
            return one
        return phi_units[p][q]

    def idx(u, q):
        return u * Q.order + q

    mul = [[0] * (nu * Q.order) for _ in range(nu * Q.order)]
    for u, p in itertools.product(range(nu), range(Q.order)):
        for v, q in itertools.product(range(nu), range(Q.order)):
            w = A.mul(A.mul(units.element(u), (rep.lift(p) @ units.element(v)) % m),
                      phi(p, q))
            mul[idx(u, p)][idx(v, q)] = idx(units.index_of(w), Q.mul[p][q])
    from .groups import FiniteGroup as FG
    Gamma = FG.from_table(mul, cap=max(cap, 256))
    K = units.group
    kernel_hom = GroupHom.checked(K, Gamma, tuple(idx(u, Q.identity) for u in range(nu)))
    quotient_hom = GroupHom.checked(Gamma, Q, tuple(g % Q.order for g in range(nu * Q.order)))
    ext = GroupExtension(kernel_hom, quotient_hom)
    ext.validate()
    i_images = tuple(tuple(int(x) for x in units.element(u)) for u in range(nu))
    theta = []
    for g in range(nu * Q.order):
        u, q = divmod(g, Q.order)
        theta.append((conjugation_matrix(A, units.element(u)) @ rep.lift(q)) % m)
    return ext, i_images, tuple(theta)

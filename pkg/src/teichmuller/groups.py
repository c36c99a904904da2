"""Finite groups as explicit multiplication tables.

Element are integer indices 0..order-1.  Construction goes through
``FiniteGroup.from_table`` which checks associativity/identity/inverses
(vectorized, so full validation stays cheap up to the table-size cap).
Homomorphisms, extensions, actions, subgroup/quotient plumbing, the
metacyclic family, extensions from 2-cocycles, and small-scale isomorphism
and automorphism searches all live here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

DEFAULT_ORDER_CAP = 256
ISO_SEARCH_CAP = 128
AUT_SEARCH_CAP = 64


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    mul: tuple[tuple[int, ...], ...]
    identity: int
    inv: tuple[int, ...]
    labels: Optional[tuple[str, ...]] = None
    generators: Optional[tuple[int, ...]] = None

    @staticmethod
    def from_table(mul: Sequence[Sequence[int]], labels=None, generators=None,
                   cap: int = DEFAULT_ORDER_CAP) -> "FiniteGroup":
        n = len(mul)
        if n == 0:
            raise GroupError("empty table")
        if n > cap:
            raise GroupError(f"order {n} exceeds cap {cap}")
        t = np.array(mul, dtype=np.int64)
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise GroupError("malformed multiplication table")
        # identity
        ident = None
        for e in range(n):
            if np.array_equal(t[e], np.arange(n)) and np.array_equal(t[:, e], np.arange(n)):
                ident = e
                break
        if ident is None:
            raise GroupError("no identity element")
        # associativity: t[t[a,b],c] == t[a,t[b,c]], chunked to bound memory
        step = n if n <= 128 else max(1, (1 << 21) // (n * n))
        for lo in range(0, n, step):
            blk = slice(lo, min(lo + step, n))
            left = t[t[blk], :]
            right = t[np.arange(lo, blk.stop)[:, None, None], t[None, :, :]]
            if not np.array_equal(left, right):
                raise GroupError("multiplication table is not associative")
        inv = [-1] * n
        for a in range(n):
            hits = np.where(t[a] == ident)[0]
            if len(hits) != 1:
                raise GroupError("element without unique inverse")
            inv[a] = int(hits[0])
        return FiniteGroup(order=n, mul=tuple(tuple(int(x) for x in row) for row in mul),
                           identity=ident, inv=tuple(inv),
                           labels=tuple(labels) if labels else None,
                           generators=tuple(generators) if generators else None)

    def op(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def conj(self, a: int, b: int) -> int:
        """a b a^-1."""
        return self.mul[self.mul[a][b]][self.inv[a]]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv[a], -k)
        r = self.identity
        while k:
            if k & 1:
                r = self.mul[r][a]
            a = self.mul[a][a]
            k >>= 1
        return r

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul[x][a]
            k += 1
        return k

    def order_profile(self) -> dict[int, int]:
        prof: dict[int, int] = {}
        for a in range(self.order):
            o = self.element_order(a)
            prof[o] = prof.get(o, 0) + 1
        return prof

    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in range(self.order) for b in range(a))

    def closure(self, gens: Sequence[int]) -> list[int]:
        seen = {self.identity}
        out = [self.identity]
        frontier = [self.identity]
        while frontier:
            x = frontier.pop()
            for g in gens:
                for y in (self.mul[x][g], self.mul[g][x]):
                    if y not in seen:
                        seen.add(y)
                        out.append(y)
                        frontier.append(y)
        return sorted(out)

    def minimal_generators(self) -> list[int]:
        gens: list[int] = []
        span = [self.identity]
        for a in sorted(range(self.order), key=lambda x: (-self.element_order(x), x)):
            if a not in span:
                gens.append(a)
                span = self.closure(gens)
                if len(span) == self.order:
                    break
        return gens

    def center(self) -> list[int]:
        return [a for a in range(self.order)
                if all(self.mul[a][b] == self.mul[b][a] for b in range(self.order))]

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != self.source.order:
            raise GroupError("image table has wrong length")

    @staticmethod
    def checked(source, target, images) -> "GroupHom":
        hom = GroupHom(source, target, tuple(int(x) for x in images))
        if not hom.is_valid():
            raise GroupError("not a homomorphism")
        return hom

    def is_valid(self) -> bool:
        src, im = self.source, self.images
        if im[src.identity] != self.target.identity:
            return False
        tmul = self.target.mul
        return all(im[src.mul[a][b]] == tmul[im[a]][im[b]]
                   for a in range(src.order) for b in range(src.order))

    def __call__(self, a: int) -> int:
        return self.images[a]

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.source.order

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order

    def kernel(self) -> list[int]:
        return [a for a in range(self.source.order) if self.images[a] == self.target.identity]

    def image(self) -> list[int]:
        return sorted(set(self.images))

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self after other."""
        if other.target is not self.source and other.target.mul != self.source.mul:
            raise GroupError("composition mismatch")
        return GroupHom(other.source, self.target, tuple(self.images[x] for x in other.images))


def identity_hom(G: FiniteGroup) -> GroupHom:
    return GroupHom(G, G, tuple(range(G.order)))


@dataclass(frozen=True)
class GroupExtension:
    """N >--> G -->> Q encoded by the two homomorphisms."""

    kernel_hom: GroupHom
    quotient_hom: GroupHom

    def __post_init__(self):
        if self.kernel_hom.target is not self.quotient_hom.source:
            if self.kernel_hom.target.mul != self.quotient_hom.source.mul:
                raise GroupError("extension maps do not share the middle group")

    @property
    def kernel_group(self) -> FiniteGroup:
        return self.kernel_hom.source

    @property
    def middle(self) -> FiniteGroup:
        return self.quotient_hom.source

    @property
    def quotient_group(self) -> FiniteGroup:
        return self.quotient_hom.target

    def validate(self) -> None:
        if not self.kernel_hom.is_valid() or not self.quotient_hom.is_valid():
            raise GroupError("extension maps are not homomorphisms")
        if not self.kernel_hom.is_injective():
            raise GroupError("kernel map not injective")
        if not self.quotient_hom.is_surjective():
            raise GroupError("quotient map not surjective")
        if sorted(self.kernel_hom.images) != sorted(self.quotient_hom.kernel()):
            raise GroupError("image of kernel differs from kernel of quotient")

    def section(self, seed: int = 0) -> list[int]:
        """A set section of the quotient map with s(1) = 1, seed-dependent."""
        G, Q = self.middle, self.quotient_group
        fibers: dict[int, list[int]] = {}
        for g in range(G.order):
            fibers.setdefault(self.quotient_hom(g), []).append(g)
        sec = [0] * Q.order
        for q, fiber in fibers.items():
            if q == Q.identity:
                sec[q] = G.identity
            else:
                sec[q] = fiber[(seed + 13 * q) % len(fiber)]
        return sec


@dataclass(frozen=True)
class GroupAction:
    """Action of ``actor`` on a carrier, stored as one permutation per element.

    When the carrier is a FiniteGroup the permutations must be automorphisms.
    """

    actor: FiniteGroup
    carrier: FiniteGroup | int
    table: tuple[tuple[int, ...], ...]

    @property
    def carrier_size(self) -> int:
        return self.carrier.order if isinstance(self.carrier, FiniteGroup) else self.carrier

    def act(self, g: int, x: int) -> int:
        return self.table[g][x]

    def validate(self) -> None:
        n = self.carrier_size
        G = self.actor
        if len(self.table) != G.order:
            raise GroupError("action table has wrong length")
        arr = np.array(self.table, dtype=np.int64)
        if arr.shape != (G.order, n):
            raise GroupError("action table has wrong shape")
        if not np.array_equal(np.sort(arr, axis=1), np.tile(np.arange(n), (G.order, 1))):
            raise GroupError("action entry is not a permutation")
        if not np.array_equal(arr[G.identity], np.arange(n)):
            raise GroupError("identity does not act trivially")
        mul = np.array(G.mul, dtype=np.int64)
        # composed[g, h, x] = table[g][table[h][x]] must equal table[mul[g,h]][x]
        composed = arr[np.arange(G.order)[:, None, None], arr[None, :, :]]
        if not np.array_equal(composed, arr[mul]):
            raise GroupError("action is not a homomorphism")
        if isinstance(self.carrier, FiniteGroup):
            C = self.carrier
            cmul = np.array(C.mul, dtype=np.int64)
            for g in range(G.order):
                perm = arr[g]
                if not np.array_equal(perm[cmul], cmul[perm[:, None], perm[None, :]]):
                    raise GroupError("action is not by automorphisms")


def trivial_action(G: FiniteGroup, carrier: FiniteGroup | int) -> GroupAction:
    n = carrier.order if isinstance(carrier, FiniteGroup) else carrier
    row = tuple(range(n))
    return GroupAction(G, carrier, tuple(row for _ in range(G.order)))


# ---------------------------------------------------------------------------
# standard constructions

def cyclic(n: int) -> FiniteGroup:
    mul = [[(i + j) % n for j in range(n)] for i in range(n)]
    labels = [f"t^{i}" if i else "1" for i in range(n)]
    return FiniteGroup.from_table(mul, labels=labels, generators=[1 % n])


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    n, m = G.order, H.order
    mul = [[0] * (n * m) for _ in range(n * m)]
    for a, b, c, d in itertools.product(range(n), range(m), range(n), range(m)):
        mul[a * m + b][c * m + d] = G.mul[a][c] * m + H.mul[b][d]
    labels = None
    if G.labels and H.labels:
        labels = [f"({G.labels[a]},{H.labels[b]})" for a in range(n) for b in range(m)]
    return FiniteGroup.from_table(mul, labels=labels)


def pair_index(G: FiniteGroup, H: FiniteGroup, a: int, b: int) -> int:
    return a * H.order + b


def subgroup_of(G: FiniteGroup, elements: Sequence[int]) -> tuple[FiniteGroup, GroupHom]:
    """The subgroup on the given (closed) element set, with its inclusion."""
    elems = sorted(set(elements))
    index = {g: i for i, g in enumerate(elems)}
    for a in elems:
        for b in elems:
            if G.mul[a][b] not in index:
                raise GroupError("element set is not closed under multiplication")
    mul = [[index[G.mul[a][b]] for b in elems] for a in elems]
    labels = [G.label(g) for g in elems] if G.labels else None
    H = FiniteGroup.from_table(mul, labels=labels)
    return H, GroupHom(H, G, tuple(elems))


def quotient_group(G: FiniteGroup, normal_elements: Sequence[int]) -> tuple[FiniteGroup, GroupHom]:
    """G / N for a normal subgroup given by its element set, with projection."""
    nset = set(normal_elements)
    if G.identity not in nset:
        raise GroupError("normal subgroup must contain the identity")
    for g in range(G.order):
        for n in nset:
            if G.conj(g, n) not in nset:
                raise GroupError("subgroup is not normal")
    coset_of = [-1] * G.order
    reps = []
    for g in range(G.order):
        if coset_of[g] != -1:
            continue
        idx = len(reps)
        reps.append(g)
        for n in nset:
            coset_of[G.mul[g][n]] = idx
    k = len(reps)
    mul = [[coset_of[G.mul[reps[a]][reps[b]]] for b in range(k)] for a in range(k)]
    Q = FiniteGroup.from_table(mul)
    return Q, GroupHom(G, Q, tuple(coset_of))


def fiber_product(f: GroupHom, g: GroupHom) -> tuple[FiniteGroup, GroupHom, GroupHom]:
    """{(a, b) : f(a) = g(b)} with its two projections."""
    if f.target.mul != g.target.mul:
        raise GroupError("fiber product needs a common target")
    A, B = f.source, g.source
    pairs = [(a, b) for a in range(A.order) for b in range(B.order) if f(a) == g(b)]
    index = {p: i for i, p in enumerate(pairs)}
    mul = [[index[(A.mul[a1][a2], B.mul[b1][b2])] for (a2, b2) in pairs] for (a1, b1) in pairs]
    P = FiniteGroup.from_table(mul, cap=max(DEFAULT_ORDER_CAP, len(pairs)))
    proj1 = GroupHom(P, A, tuple(p[0] for p in pairs))
    proj2 = GroupHom(P, B, tuple(p[1] for p in pairs))
    return P, proj1, proj2


def abelian_group_from_factors(factors: Sequence[int]) -> FiniteGroup:
    """The group Z/d_1 + ... + Z/d_k with mixed-radix element indexing."""
    factors = [int(d) for d in factors]
    n = 1
    for d in factors:
        n *= d
    if n > DEFAULT_ORDER_CAP:
        raise GroupError("abelian group too large for a table")

    def decode(i):
        out = []
        for d in reversed(factors):
            out.append(i % d)
            i //= d
        return tuple(reversed(out))

    def encode(v):
        i = 0
        for x, d in zip(v, factors):
            i = i * d + (x % d)
        return i

    mul = [[encode(tuple(a + b for a, b in zip(decode(i), decode(j)))) for j in range(n)]
           for i in range(n)]
    labels = ["+".join(f"{x}" for x in decode(i)) for i in range(n)] if factors else ["0"]
    return FiniteGroup.from_table(mul, labels=labels)


def abelian_structure(M: FiniteGroup):
    """Invariant-factor presentation of an abelian table group.

    Returns (presentation, elem_to_coords, coords_to_elem): coordinates are
    tuples in prod Z/d_i, additive for the group law.
    """
    from .exact_linalg import IntMatrix, abelian_quotient

    if not M.is_abelian():
        raise GroupError("abelian_structure needs an abelian group")
    gens = M.minimal_generators()
    if not gens:
        gens = []
    g = len(gens)
    # exponent vectors: build the subgroup chain, recording how each element
    # is written in the generators
    expo = {M.identity: tuple([0] * g)}
    relations = []
    for j, gen in enumerate(gens):
        # minimal k with gen^k in the previous span
        k = 1
        x = gen
        while x not in expo:
            k += 1
            x = M.mul[x][gen]
        base = expo[x]
        rel = [0] * g
        for i in range(g):
            rel[i] = -base[i]
        rel[j] = k
        relations.append(tuple(rel))
        # extend the span by powers of gen
        current = list(expo.items())
        x = M.identity
        for e in range(1, k):
            x = M.mul[x][gen]
            for elem, vec in current:
                nv = list(vec)
                nv[j] = e
                expo[M.mul[elem][x]] = tuple(nv)
    if len(expo) != M.order:
        raise GroupError("generator closure failed (group not abelian?)")
    rel_mat = IntMatrix.from_rows([[relations[c][r] for c in range(g)] for r in range(g)]) \
        if g else IntMatrix(0, 0, ())
    pres = abelian_quotient(rel_mat, g)
    elem_to_coords = [pres.coords(expo[e]) for e in range(M.order)]
    coords_to_elem = {c: e for e, c in enumerate(elem_to_coords)}
    if len(coords_to_elem) != M.order:
        raise GroupError("presentation does not separate elements")
    return pres, elem_to_coords, coords_to_elem


# ---------------------------------------------------------------------------
# metacyclic groups G(r, s, t, f)

def metacyclic(r: int, s: int, t: int, f: int) -> tuple[FiniteGroup, GroupExtension]:
    """The group <x, y | y^r = 1, x^s = y^f, x y x^-1 = y^t> of order r*s.

    Elements are indexed as y^i x^j  ->  i + r*j.  Returns the group together
    with its defining extension C_r >--> G -->> C_s.
    """
    if r <= 1 or s <= 1:
        raise GroupError("need r > 1 and s > 1")
    if pow(t, s, r) != 1 % r:
        raise GroupError("t^s = 1 (mod r) violated")
    if (t * f - f) % r:
        raise GroupError("t*f = f (mod r) violated")
    n = r * s
    tpow = [pow(t, j, r) for j in range(s)]
    mul = [[0] * n for _ in range(n)]
    for i, j, k, l in itertools.product(range(r), range(s), range(r), range(s)):
        # (y^i x^j)(y^k x^l) = y^(i + k t^j) x^(j+l), with x^s = y^f
        e = (i + k * tpow[j]) % r
        jl = j + l
        if jl >= s:
            e = (e + f) % r
            jl -= s
        mul[i + r * j][k + r * l] = e + r * jl
    labels = [None] * n
    for i in range(r):
        for j in range(s):
            yi = f"y^{i}" if i else ""
            xj = f"x^{j}" if j else ""
            labels[i + r * j] = (yi + xj) or "1"
    G = FiniteGroup.from_table(mul, labels=labels, generators=[1, r])
    Cr = cyclic(r)
    Cs = cyclic(s)
    kernel_hom = GroupHom.checked(Cr, G, tuple(i for i in range(r)))
    quotient_hom = GroupHom.checked(G, Cs, tuple(g // r for g in range(n)))
    ext = GroupExtension(kernel_hom, quotient_hom)
    ext.validate()
    return G, ext


def quaternion_table() -> FiniteGroup:
    """Q8 written directly on {1,-1,i,-i,j,-j,k,-k}; independent of metacyclic."""
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    idx = {s: n for n, s in enumerate(names)}

    def neg(s):
        return s[1:] if s.startswith("-") else "-" + s

    base = {("i", "j"): "k", ("j", "k"): "i", ("k", "i"): "j",
            ("j", "i"): "-k", ("k", "j"): "-i", ("i", "k"): "-j",
            ("i", "i"): "-1", ("j", "j"): "-1", ("k", "k"): "-1"}

    def mul_sym(a, b):
        sign = 1
        if a.startswith("-"):
            sign, a = -sign, a[1:]
        if b.startswith("-"):
            sign, b = -sign, b[1:]
        if a == "1":
            out = b
        elif b == "1":
            out = a
        else:
            out = base[(a, b)]
        if sign == -1:
            out = neg(out) if not out.startswith("-") else out[1:]
        return out

    mul = [[idx[mul_sym(a, b)] for b in names] for a in names]
    return FiniteGroup.from_table(mul, labels=names)


# ---------------------------------------------------------------------------
# extensions from 2-cocycles

def is_two_cocycle(Q: FiniteGroup, M: FiniteGroup, action: GroupAction, f) -> Optional[tuple]:
    """None when f satisfies the (multiplicative) 2-cocycle identity, else a witness."""
    for p, q, r in itertools.product(range(Q.order), repeat=3):
        lhs = M.mul[action.act(p, f[q][r])][f[p][Q.mul[q][r]]]
        rhs = M.mul[f[p][q]][f[Q.mul[p][q]][r]]
        if lhs != rhs:
            return (p, q, r)
    return None


def group_from_2cocycle(Q: FiniteGroup, M: FiniteGroup, action: GroupAction, f) -> GroupExtension:
    """The extension M >--> E -->> Q twisted by the normalized 2-cocycle f.

    f is an order x order table of M-element indices; the set E is M x Q with
    (m, p)(n, q) = (m + p.n + f(p, q), pq) and index(m, q) = m + |M|*q.
    """
    if not M.is_abelian():
        raise GroupError("cocycle extension needs an abelian kernel")
    for q in range(Q.order):
        if f[Q.identity][q] != M.identity or f[q][Q.identity] != M.identity:
            raise GroupError("cocycle is not normalized")
    witness = is_two_cocycle(Q, M, action, f)
    if witness is not None:
        raise GroupError(f"2-cocycle identity fails at {witness}")
    nm, nq = M.order, Q.order
    mul = [[0] * (nm * nq) for _ in range(nm * nq)]
    for m, p, n2, q in itertools.product(range(nm), range(nq), range(nm), range(nq)):
        val = M.mul[M.mul[m][action.act(p, n2)]][f[p][q]]
        mul[m + nm * p][n2 + nm * q] = val + nm * Q.mul[p][q]
    E = FiniteGroup.from_table(mul)
    kernel_hom = GroupHom.checked(M, E, tuple(m + nm * Q.identity for m in range(nm)))
    quotient_hom = GroupHom.checked(E, Q, tuple(g // nm for g in range(nm * nq)))
    ext = GroupExtension(kernel_hom, quotient_hom)
    ext.validate()
    return ext


def two_cocycle_of_extension(ext: GroupExtension, seed: int = 0):
    """Read a normalized 2-cocycle off an extension with abelian kernel.

    Returns (f, action) where f[p][q] is a kernel-group element index and the
    action is the conjugation action of the quotient on the kernel.
    """
    M, G, Q = ext.kernel_group, ext.middle, ext.quotient_group
    if not M.is_abelian():
        raise GroupError("kernel must be abelian")
    into = {ext.kernel_hom(m): m for m in range(M.order)}
    sec = ext.section(seed)
    act_rows = []
    for q in range(Q.order):
        g = sec[q]
        act_rows.append(tuple(into[G.conj(g, ext.kernel_hom(m))] for m in range(M.order)))
    action = GroupAction(Q, M, tuple(act_rows))
    f = [[0] * Q.order for _ in range(Q.order)]
    for p, q in itertools.product(range(Q.order), repeat=2):
        g = G.mul[sec[p]][sec[q]]
        f[p][q] = into[G.mul[g][G.inv[sec[Q.mul[p][q]]]]]
    return f, action


# ---------------------------------------------------------------------------
# isomorphism / automorphism search

def _close_partial(G: FiniteGroup, H: FiniteGroup, gens: Sequence[int], images: Sequence[int]):
    """Extend gen |-> image to a full hom table by closing under products.

    Returns the image table or None on conflict.
    """
    table = [-1] * G.order
    table[G.identity] = H.identity
    frontier = [G.identity]
    for g, h in zip(gens, images):
        if table[g] == -1:
            table[g] = h
            frontier.append(g)
        elif table[g] != h:
            return None
    known = [g for g in range(G.order) if table[g] != -1]
    changed = True
    while changed:
        changed = False
        known = [g for g in range(G.order) if table[g] != -1]
        for a in known:
            for b in known:
                ab = G.mul[a][b]
                im = H.mul[table[a]][table[b]]
                if table[ab] == -1:
                    table[ab] = im
                    changed = True
                elif table[ab] != im:
                    return None
    if any(x == -1 for x in table):
        return None
    return tuple(table)


def find_isomorphism(G: FiniteGroup, H: FiniteGroup, cap: int = ISO_SEARCH_CAP) -> Optional[GroupHom]:
    """A bijective homomorphism G -> H found by generator-image backtracking."""
    if G.order > cap or H.order > cap:
        raise GroupError(f"isomorphism search capped at order {cap}")
    if G.order != H.order:
        return None
    if G.order_profile() != H.order_profile():
        return None
    gens = G.minimal_generators()
    orders = [G.element_order(g) for g in gens]
    candidates = [[h for h in range(H.order) if H.element_order(h) == o] for o in orders]

    def backtrack(i, chosen):
        if i == len(gens):
            table = _close_partial(G, H, gens, chosen)
            if table and len(set(table)) == G.order:
                return table
            return None
        for h in candidates[i]:
            res = backtrack(i + 1, chosen + [h])
            if res:
                return res
        return None

    table = backtrack(0, [])
    if table is None:
        return None
    return GroupHom.checked(G, H, table)


def automorphism_group(G: FiniteGroup, cap: int = AUT_SEARCH_CAP) -> tuple[FiniteGroup, tuple[tuple[int, ...], ...]]:
    """Aut(G) as a table group plus each element's permutation of G.

    The search backtracks over generator images, pruned by element order; the
    found automorphisms are sorted so the output is canonical.
    """
    if G.order > cap:
        raise GroupError(f"automorphism search capped at order {cap}")
    gens = G.minimal_generators()
    orders = [G.element_order(g) for g in gens]
    candidates = [[h for h in range(G.order) if G.element_order(h) == o] for o in orders]
    found = []

    def backtrack(i, chosen):
        if i == len(gens):
            table = _close_partial(G, G, gens, chosen)
            if table and len(set(table)) == G.order:
                found.append(table)
            return
        for h in candidates[i]:
            backtrack(i + 1, chosen + [h])

    backtrack(0, [])
    perms = sorted(set(found))
    index = {p: i for i, p in enumerate(perms)}
    k = len(perms)
    mul = [[0] * k for _ in range(k)]
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            comp = tuple(p[q[x]] for x in range(G.order))  # p after q
            mul[i][j] = index[comp]
    A = FiniteGroup.from_table(mul, cap=max(DEFAULT_ORDER_CAP, k))
    return A, tuple(perms)

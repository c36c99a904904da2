"""Linear algebra over Z/m for composite m, vectorized with numpy.

Z/m is a principal ideal ring, so every matrix is equivalent to a diagonal one
by invertible transformations; that diagonalization drives kernels, solving,
image membership, cokernel presentations and invertibility tests.  All
matrices are int64 numpy arrays with entries reduced into [0, m).

This is internal plumbing shared by the cohomology and finite-ring modules;
the integer-exact interface lives in exact_linalg.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np


def as_mod_array(data, m: int) -> np.ndarray:
    a = np.array(data, dtype=np.int64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return np.mod(a, m)


def unit_multiplier(a: int, m: int) -> int:
    """A unit u mod m with u*a = gcd(a, m) mod m."""
    a %= m
    g = gcd(a, m)
    if g == 0:
        return 1
    b = a // g
    step = m // g
    # b + k*step is coprime to m for some k < number of prime divisors of m
    cand = b
    while gcd(cand, m) != 1:
        cand += step
    return pow(cand, -1, m)


@dataclass
class ModDiagonalization:
    """U @ A @ V = diag(d) over Z/m, with U, V invertible mod m.

    Each d_i divides m and d_i | d_{i+1}; trailing entries may equal 0 (=m).
    """

    m: int
    rows: int
    cols: int
    d: np.ndarray          # length min(rows, cols), entries divide m
    U: np.ndarray
    V: np.ndarray
    U_inv: np.ndarray
    V_inv: np.ndarray

    def solve(self, b: np.ndarray):
        """One x with A x = b (mod m), or None."""
        m = self.m
        y = (self.U @ np.mod(b, m)) % m
        x = np.zeros(self.cols, dtype=np.int64)
        nd = len(self.d)
        for i in range(self.rows):
            rhs = int(y[i])
            if i < nd and i < self.cols:
                di = int(self.d[i])
                g = gcd(di, m)
                if rhs % g:
                    return None
                mg = m // g
                x[i] = ((rhs // g) * pow(di // g, -1, mg)) % mg if mg > 1 else 0
            elif rhs % m:
                return None
        return (self.V @ x) % m

    def kernel(self) -> np.ndarray:
        """Columns generate {x : A x = 0 mod m}."""
        m = self.m
        cols = []
        for j in range(self.cols):
            dj = int(self.d[j]) if j < len(self.d) else 0
            scale = m // gcd(dj, m)
            if scale % m == 0:
                continue
            v = (self.V[:, j] * scale) % m
            if v.any():
                cols.append(v)
        if not cols:
            return np.zeros((self.cols, 0), dtype=np.int64)
        return np.stack(cols, axis=1)

    def image_size(self) -> int:
        m = self.m
        n = 1
        for i in range(len(self.d)):
            n *= m // gcd(int(self.d[i]), m)
        return n

    def is_invertible(self) -> bool:
        return self.rows == self.cols and all(gcd(int(x), self.m) == 1 for x in self.d)


def diagonalize_mod(A, m: int, want_inverses: bool = False, want_U: bool = True,
                    want_V: bool = True) -> ModDiagonalization:
    """Diagonalize A over Z/m by invertible row/column operations.

    Pivots are chosen by smallest gcd with m (then position), every diagonal
    entry is normalized to a divisor of m, and the divisibility chain
    gcd(d_i, m) | gcd(d_{i+1}, m) is enforced, so the diagonal is canonical.
    U or V tracking can be disabled to halve the work on large one-sided
    problems (kernels need only V).
    """
    A = as_mod_array(A, m)
    rows, cols = A.shape
    U = np.eye(rows, dtype=np.int64) if want_U else None
    V = np.eye(cols, dtype=np.int64) if want_V else None
    Ui = np.eye(rows, dtype=np.int64) if want_inverses and want_U else None
    Vi = np.eye(cols, dtype=np.int64) if want_inverses and want_V else None
    gcd_table = np.gcd(np.arange(m if m > 1 else 2, dtype=np.int64), m)
    t = 0
    limit = min(rows, cols)
    gcds = gcd_table[A]
    while t < limit:
        sub = gcds[t:, t:]
        if not A[t:, t:].any():
            break
        # pivot: minimal gcd(entry, m) among nonzero entries, then position
        masked = np.where(A[t:, t:] != 0, sub, m + 1)
        flat = int(np.argmin(masked))
        pi, pj = divmod(flat, cols - t)
        pi += t
        pj += t
        if pi != t:
            A[[t, pi]] = A[[pi, t]]
            gcds[[t, pi]] = gcds[[pi, t]]
            if want_U:
                U[[t, pi]] = U[[pi, t]]
            if Ui is not None:
                Ui[:, [t, pi]] = Ui[:, [pi, t]]
        if pj != t:
            A[:, [t, pj]] = A[:, [pj, t]]
            gcds[:, [t, pj]] = gcds[:, [pj, t]]
            if want_V:
                V[:, [t, pj]] = V[:, [pj, t]]
            if Vi is not None:
                Vi[[t, pj]] = Vi[[pj, t]]
        # normalize pivot to gcd(pivot, m)
        u = unit_multiplier(int(A[t, t]), m)
        if u != 1:
            A[t] = (A[t] * u) % m
            if want_U:
                U[t] = (U[t] * u) % m
            if Ui is not None:
                Ui[:, t] = (Ui[:, t] * pow(u, -1, m)) % m
        g = int(A[t, t])
        # clear column t below, row t to the right
        q = A[t + 1:, t] // g
        if q.any():
            A[t + 1:] = (A[t + 1:] - np.outer(q, A[t])) % m
            if want_U:
                U[t + 1:] = (U[t + 1:] - np.outer(q, U[t])) % m
            if Ui is not None:
                Ui[:, t] = (Ui[:, t] + Ui[:, t + 1:] @ q) % m
        q = A[t, t + 1:] // g
        if q.any():
            A[:, t + 1:] = (A[:, t + 1:] - np.outer(A[:, t], q)) % m
            if want_V:
                V[:, t + 1:] = (V[:, t + 1:] - np.outer(V[:, t], q)) % m
            if Vi is not None:
                Vi[t] = (Vi[t] + q @ Vi[t + 1:]) % m
        gcds[t:, t:] = gcd_table[A[t:, t:]]
        if A[t + 1:, t].any() or A[t, t + 1:].any():
            continue  # residues left a smaller pivot candidate
        # divisibility of the remaining block by the pivot gcd
        if t + 1 < limit:
            rem = gcds[t + 1:, t + 1:] % g
            if rem.any():
                bad = int(np.argmax(rem.any(axis=1)))
                A[t] = (A[t] + A[t + 1 + bad]) % m
                gcds[t] = gcd_table[A[t]]
                if want_U:
                    U[t] = (U[t] + U[t + 1 + bad]) % m
                if Ui is not None:
                    Ui[:, t + 1 + bad] = (Ui[:, t + 1 + bad] - Ui[:, t]) % m
                continue
        t += 1
    d = np.array([gcd(int(A[i, i]), m) for i in range(limit)], dtype=np.int64)
    return ModDiagonalization(m=m, rows=rows, cols=cols, d=d,
                              U=U % m if want_U else None,
                              V=V % m if want_V else None,
                              U_inv=Ui % m if Ui is not None else None,
                              V_inv=Vi % m if Vi is not None else None)


def kernel_mod(A, m: int) -> np.ndarray:
    """Columns generating the kernel of A over Z/m."""
    return diagonalize_mod(A, m, want_U=False).kernel()


def solve_matrix_mod(diag: ModDiagonalization, B) -> np.ndarray | None:
    """Solve A X = B columnwise against a stored diagonalization."""
    B = as_mod_array(np.asarray(B, dtype=np.int64), diag.m)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    cols = []
    for j in range(B.shape[1]):
        x = diag.solve(B[:, j])
        if x is None:
            return None
        cols.append(x)
    if not cols:
        return np.zeros((diag.cols, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


@dataclass
class ModCokernel:
    """Presentation of (Z/m)^n / colspan(R) with canonical coordinates.

    ``factors`` lists the nontrivial cyclic orders in ascending divisibility;
    coords(v) gives the class of v; lift(c) returns a representative.
    """

    m: int
    n: int
    factors: tuple[int, ...]
    _U: np.ndarray
    _U_inv: np.ndarray
    _keep: tuple[int, ...]

    @property
    def order(self) -> int:
        o = 1
        for f in self.factors:
            o *= f
        return o

    def coords(self, v) -> tuple[int, ...]:
        v = np.mod(np.asarray(v, dtype=np.int64), self.m)
        y = (self._U @ v) % self.m
        return tuple(int(y[i]) % f for i, f in zip(self._keep, self.factors))

    def lift(self, coords) -> np.ndarray:
        y = np.zeros(self.n, dtype=np.int64)
        for i, c in zip(self._keep, coords):
            y[i] = c
        return (self._U_inv @ y) % self.m


def cokernel_mod(R, m: int, n: int | None = None) -> ModCokernel:
    """Structure of (Z/m)^n modulo the column span of R."""
    R = as_mod_array(np.asarray(R, dtype=np.int64), m)
    if R.ndim == 1:
        R = R.reshape(-1, 1)
    rows = R.shape[0] if n is None else n
    if R.shape[0] != rows:
        raise ValueError("ambient dimension mismatch")
    diag = diagonalize_mod(R, m, want_inverses=True)
    full = [gcd(int(diag.d[i]), m) if i < len(diag.d) else m for i in range(rows)]
    keep = tuple(i for i in range(rows) if full[i] != 1)
    factors = tuple(full[i] for i in keep)
    return ModCokernel(m=m, n=rows, factors=factors, _U=diag.U, _U_inv=diag.U_inv, _keep=keep)


def _prime_factors(m: int) -> list[int]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def _full_rank_gf2(A: np.ndarray) -> bool:
    """Full column rank of a square 0/1 matrix over GF(2), bit-packed."""
    n = A.shape[0]
    W = (n + 63) // 64
    bits = np.zeros((n, W), dtype=np.uint64)
    rr, cc = np.nonzero(A & 1)
    np.bitwise_or.at(bits, (rr, cc // 64), np.uint64(1) << (cc % 64).astype(np.uint64))
    for col in range(n):
        w, b = divmod(col, 64)
        mask = np.uint64(1) << np.uint64(b)
        cand = np.nonzero(bits[col:, w] & mask)[0]
        if cand.size == 0:
            return False
        piv = col + int(cand[0])
        if piv != col:
            bits[[col, piv]] = bits[[piv, col]]
        below = col + 1 + np.nonzero(bits[col + 1:, w] & mask)[0]
        if below.size:
            bits[below] ^= bits[col]
    return True


def _full_rank_mod_p(A: np.ndarray, p: int) -> bool:
    """Full rank of a square matrix over the prime field F_p."""
    if p == 2:
        return _full_rank_gf2(A % 2)
    A = (A % p).astype(np.int64).copy()
    n = A.shape[0]
    for col in range(n):
        cand = np.nonzero(A[col:, col])[0]
        if cand.size == 0:
            return False
        piv = col + int(cand[0])
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
        inv = pow(int(A[col, col]), -1, p)
        A[col, col:] = (A[col, col:] * inv) % p
        below = col + 1 + np.nonzero(A[col + 1:, col])[0]
        if below.size:
            A[below, col:] = (A[below, col:] - np.outer(A[below, col], A[col, col:])) % p
    return True


def invertible_mod(A, m: int) -> bool:
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] != A.shape[1]:
        return False
    # invertible over Z/m iff invertible over F_p for every prime p | m
    return all(_full_rank_mod_p(A, p) for p in _prime_factors(m))


def inverse_mod(A, m: int) -> np.ndarray | None:
    """Matrix inverse over Z/m, or None when singular."""
    A = as_mod_array(A, m)
    diag = diagonalize_mod(A, m, want_inverses=False)
    if not diag.is_invertible():
        return None
    # A = U^-1 D V^-1  =>  A^-1 = V D^-1 U
    dinv = np.array([pow(int(x), -1, m) if m > 1 else 0 for x in diag.d], dtype=np.int64)
    return (diag.V @ (dinv[:, None] * diag.U)) % m


def submodule_size(A, m: int) -> int:
    """Cardinality of the column span of A over Z/m."""
    return diagonalize_mod(A, m).image_size()


def in_colspan(diag: ModDiagonalization, v) -> bool:
    return diag.solve(np.asarray(v, dtype=np.int64)) is not None


def colspans_equal(A, B, m: int) -> bool:
    A = as_mod_array(np.asarray(A, dtype=np.int64), m)
    B = as_mod_array(np.asarray(B, dtype=np.int64), m)
    da = diagonalize_mod(A, m)
    db = diagonalize_mod(B, m)
    if da.image_size() != db.image_size():
        return False
    return solve_matrix_mod(da, B) is not None


def enumerate_colspan(A, m: int, cap: int = 1 << 16):
    """All elements of the column span of A over Z/m (deterministic order)."""
    A = as_mod_array(np.asarray(A, dtype=np.int64), m)
    diag = diagonalize_mod(A, m)
    size = diag.image_size()
    if size > cap:
        raise ValueError(f"span of size {size} exceeds cap {cap}")
    # independent generators from the diagonal form: columns of U^-1 scaled
    elems = {tuple(np.zeros(A.shape[0], dtype=np.int64))}
    order = [tuple(np.zeros(A.shape[0], dtype=np.int64))]
    gens = [A[:, j] for j in range(A.shape[1])]
    frontier = list(order)
    while frontier:
        cur = np.array(frontier.pop(), dtype=np.int64)
        for g in gens:
            nxt = tuple((cur + g) % m)
            if nxt not in elems:
                elems.add(nxt)
                order.append(nxt)
                frontier.append(nxt)
    return order

"""Character tables by Dixon's method.

The class sums act on the centre of the group algebra with structure
constants a_ijk. Their common eigenvectors over F_l, l = 1 mod exp(G), are
the central characters omega_chi. Degrees follow from the norm relation and
values are lifted to cyclotomic integers through the eigenvalue multiplicities
on each cyclic subgroup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import modp
from ..cyclo import Cyclotomic
from ..tables.validate import ValidationReport, validate
from .classes import ClassData, conjugacy_classes, structure_constants
from .groups import OracleGroup


class DixonError(ArithmeticError):
    pass


@dataclass(frozen=True)
class OracleChar:
    index: int
    degree: int

    @property
    def label(self) -> str:
        return f"chi{self.index + 1}"


@dataclass(frozen=True)
class OracleClass:
    index: int
    size: int
    order: int
    ptype: str

    @property
    def p_singular(self) -> bool:
        return self.ptype in ("unipotent", "mixed")

    @property
    def label(self) -> str:
        return f"{self.order}{chr(ord('a') + self.index % 26)}{self.index // 26 or ''}"


@dataclass
class OracleTable:
    """An exact character table computed from a concrete group."""

    family: str
    order: int
    p: int | None
    chars: list[OracleChar]
    classes: list[OracleClass]
    values: list[list]  # Fraction when rational, else Cyclotomic
    ell: int
    residues: np.ndarray  # values modulo ell under the embedding used by the computation
    identity: int = 0
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def label(self) -> str:
        return self.family

    @property
    def degrees(self) -> list[int]:
        return [c.degree for c in self.chars]

    def value(self, i: int, j: int) -> Cyclotomic:
        v = self.values[i][j]
        return v if isinstance(v, Cyclotomic) else Cyclotomic.rational(v)

    def trivial_index(self) -> int:
        return next(i for i, row in enumerate(self.values) if all(v == 1 for v in row))

    def to_json(self) -> dict:
        return {
            "group": self.family,
            "order": self.order,
            "classes": [{"size": c.size, "order": c.order, "ptype": c.ptype} for c in self.classes],
            "degrees": self.degrees,
            "values": [[self.value(i, j).to_json() for j in range(len(row))] for i, row in enumerate(self.values)],
        }


def exponent(cd: ClassData) -> int:
    e = 1
    for o in cd.orders:
        e = e * o // math.gcd(e, o)
    return e


def dixon_prime(order: int, e: int) -> int:
    """Smallest prime l = 1 mod e with l > 2 sqrt(|G|), l not dividing |G|."""
    lo = 2 * math.isqrt(order) + 2
    t = max(1, (lo - 1) // e)
    while True:
        ell = 1 + t * e
        if ell > lo and order % ell and modp.is_prime(ell):
            return ell
        t += 1


def _nullspace(A: list[list[int]], ell: int) -> list[list[int]]:
    """Basis of {x : A x = 0} over F_l."""
    rows = [list(r) for r in A]
    n = len(rows[0]) if rows else 0
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % ell), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, ell)
        rows[r] = [x * inv % ell for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % ell:
                f = rows[i][c]
                rows[i] = [(a - f * b) % ell for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(n) if c not in piv_cols]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(piv_cols):
            v[pc] = (-rows[i][fc]) % ell
        basis.append(v)
    return basis


def _charpoly(A: list[list[int]], ell: int) -> list[int]:
    """Coefficients c_0..c_d (c_d = 1) by Faddeev-LeVerrier over F_l."""
    d = len(A)
    An = np.array(A, dtype=object)
    M = np.zeros((d, d), dtype=object)
    coeffs = [0] * (d + 1)
    coeffs[d] = 1
    ident = np.identity(d, dtype=object)
    for k in range(1, d + 1):
        M = (An.dot(M) + ident * coeffs[d - k + 1]) % ell
        tr = int(np.trace(An.dot(M))) % ell
        coeffs[d - k] = (-tr * pow(k, -1, ell)) % ell
    return coeffs


def _roots(coeffs: list[int], ell: int) -> list[int]:
    xs = np.arange(ell, dtype=object)
    acc = np.zeros(ell, dtype=object)
    for c in reversed(coeffs):
        acc = (acc * xs + c) % ell
    return [int(x) for x in np.nonzero(acc == 0)[0]]


def _split(spaces: list[list[list[int]]], M: np.ndarray, ell: int) -> list[list[list[int]]]:
    """Refine invariant subspaces (given by basis vectors) into eigenspaces of M."""
    out = []
    for basis in spaces:
        d = len(basis)
        if d == 1:
            out.append(basis)
            continue
        B = np.array(basis, dtype=object).T  # columns span the space
        MB = (M.astype(object).dot(B)) % ell
        # coordinates of M b_i in the basis: solve B X = MB
        X = _solve_in_basis(B, MB, ell)
        pieces = []
        for lam in _roots(_charpoly(X, ell), ell):
            shifted = [[(X[i][j] - (lam if i == j else 0)) % ell for j in range(d)] for i in range(d)]
            ns = _nullspace(shifted, ell)
            if ns:
                pieces.append([[int(x) for x in (B.dot(np.array(c, dtype=object)) % ell)] for c in ns])
        if sum(len(p) for p in pieces) != d:
            raise DixonError("class matrix is not diagonalizable over F_l")
        out.extend(pieces)
    return out


def _solve_in_basis(B: np.ndarray, Y: np.ndarray, ell: int) -> list[list[int]]:
    """X with B X = Y, where B has independent columns."""
    r, d = B.shape
    aug = [[int(B[i, j]) for j in range(d)] + [int(Y[i, j]) for j in range(Y.shape[1])] for i in range(r)]
    piv_row = 0
    pivots = []
    for c in range(d):
        piv = next((i for i in range(piv_row, r) if aug[i][c] % ell), None)
        if piv is None:
            raise DixonError("basis is not independent")
        aug[piv_row], aug[piv] = aug[piv], aug[piv_row]
        inv = pow(aug[piv_row][c], -1, ell)
        aug[piv_row] = [x * inv % ell for x in aug[piv_row]]
        for i in range(r):
            if i != piv_row and aug[i][c] % ell:
                f = aug[i][c]
                aug[i] = [(a - f * b) % ell for a, b in zip(aug[i], aug[piv_row])]
        pivots.append(piv_row)
        piv_row += 1
    return [[aug[i][d + j] for j in range(Y.shape[1])] for i in range(d)]


def dixon_table(G: OracleGroup, check: bool = True) -> OracleTable:
    hit = G.cache.get("dixon")
    if hit is not None:
        return hit
    cd = conjugacy_classes(G)
    r = len(cd)
    if r > 64:
        raise DixonError(f"{G.tag} has {r} classes, more than 64")
    order = G.order
    e = exponent(cd)
    ell = dixon_prime(order, e)
    a = structure_constants(G, cd)
    sizes = cd.sizes
    inv = cd.inverse

    spaces = [[[1 if i == j else 0 for i in range(r)] for j in range(r)]]
    for i in range(r):
        if all(len(s) == 1 for s in spaces):
            break
        spaces = _split(spaces, a[i] % ell, ell)
    if not all(len(s) == 1 for s in spaces):
        rng = np.random.default_rng(0)
        for _ in range(20):
            comb = sum(int(c) * a[i] for i, c in enumerate(rng.integers(0, ell, r))) % ell
            spaces = _split(spaces, comb, ell)
            if all(len(s) == 1 for s in spaces):
                break
        else:
            raise DixonError("eigenspaces did not split")

    z = pow(modp.primitive_root(ell), (ell - 1) // e, ell)
    rows = []
    res = []
    root = math.isqrt(order)
    for (v,) in spaces:
        v = [x * pow(v[0], -1, ell) % ell for x in v]
        s = sum(v[i] * v[inv[i]] * pow(sizes[i], -1, ell) for i in range(r)) % ell
        d2 = order * pow(s, -1, ell) % ell
        deg = next((d for d in range(1, root + 1) if d * d % ell == d2), None)
        if deg is None:
            raise DixonError("no degree matches the norm relation")
        chi = [v[i] * deg * pow(sizes[i], -1, ell) % ell for i in range(r)]
        vals = []
        for c in range(r):
            o = cd.orders[c]
            zo = pow(z, e // o, ell)
            inv_o = pow(o, -1, ell)
            mult = {}
            for k in range(o):
                t = sum(chi[cd.powers[c][j]] * pow(zo, (-k * j) % o, ell) for j in range(o)) * inv_o % ell
                if t > deg:
                    raise DixonError("eigenvalue multiplicity out of range")
                if t:
                    mult[k] = t
            if sum(mult.values()) != deg:
                raise DixonError("multiplicities do not add up to the degree")
            x = Cyclotomic(o, mult).reduced()
            vals.append(x.to_fraction() if x.is_rational() else x)
        rows.append((deg, vals, chi))

    rows.sort(key=lambda t: (t[0], [Cyclotomic._coerce(x).canonical() for x in t[1]]))
    classes = [OracleClass(c, sizes[c], cd.orders[c], cd.ptypes[c]) for c in range(r)]
    chars = [OracleChar(i, t[0]) for i, t in enumerate(rows)]
    ot = OracleTable(G.tag, order, G.p, chars, classes, [t[1] for t in rows], ell,
                     np.array([t[2] for t in rows], dtype=np.int64))
    if check:
        rep = validate(ot)
        if not rep.ok:
            raise DixonError(f"{G.tag}: table fails its own checks: {rep.details}")
    G.cache["dixon"] = ot
    return ot


def check_table(ot: OracleTable) -> ValidationReport:
    return validate(ot)


def burnside_consistent(G: OracleGroup) -> bool:
    """sum_k a_ijk |C_k| = |C_i| |C_j| for all i, j."""
    cd = conjugacy_classes(G)
    a = structure_constants(G, cd)
    S = np.array(cd.sizes, dtype=np.int64)
    lhs = np.einsum("ijk,k->ij", a, S)
    return bool(np.array_equal(lhs, np.outer(S, S)))

"""Concrete matrix groups enumerated element by element."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..ff import GF, factor_prime_power, field as gf

DEFAULT_CAP = 10 ** 6


class GroupTooLarge(RuntimeError):
    pass


class SpecError(ValueError):
    pass


class FieldArith:
    """Batched matrix arithmetic over GF(q) through the field's tables."""

    def __init__(self, F: GF):
        self.F = F
        self.q = F.q

    def mul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A, B = np.broadcast_arrays(A, B)
        add, mul = self.F.add_t, self.F.mul_t
        n = A.shape[-1]
        acc = mul[A[..., :, 0][..., :, None], B[..., 0, :][..., None, :]]
        for k in range(1, n):
            acc = add[acc, mul[A[..., :, k][..., :, None], B[..., k, :][..., None, :]]]
        return acc

    def det(self, A: np.ndarray) -> int:
        F = self.F
        M = [[int(x) for x in row] for row in A]
        n = len(M)
        d = 1
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c]), None)
            if piv is None:
                return 0
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                d = F.neg(d)
            d = F.mul(d, M[c][c])
            inv = F.inv(M[c][c])
            for r in range(c + 1, n):
                if M[r][c]:
                    f = F.mul(M[r][c], inv)
                    M[r] = [F.sub(a, F.mul(f, b)) for a, b in zip(M[r], M[c])]
        return d


class IntArith:
    """Batched integer matrix arithmetic (reflection groups)."""

    q = None

    def mul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return np.matmul(A, B)


def _key(M: np.ndarray) -> bytes:
    return M.astype(np.int16).tobytes()


@dataclass
class OracleGroup:
    """A finite group given by all of its elements as matrices."""

    tag: str
    q: int | None
    p: int | None
    arith: object
    gens: list[np.ndarray]
    elements: np.ndarray
    index: dict[bytes, int]
    parity: np.ndarray | None = None
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return 0

    def lookup(self, mats: np.ndarray) -> np.ndarray:
        idx = self.index
        return np.fromiter((idx[_key(m)] for m in mats), dtype=np.int64, count=len(mats))

    def mul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return self.arith.mul(A, B)

    def __repr__(self) -> str:
        return f"OracleGroup({self.tag}, order={self.order})"


def closure(gens: Sequence[np.ndarray], arith, cap: int = DEFAULT_CAP,
            track_parity: bool = False) -> tuple[np.ndarray, dict, np.ndarray | None]:
    """Breadth-first closure under right multiplication by the generators."""
    n = gens[0].shape[0]
    one = np.eye(n, dtype=np.int64)
    elems = [one]
    index = {_key(one): 0}
    parity = [0]
    frontier = [0]
    while frontier:
        F = np.array([elems[i] for i in frontier])
        new = []
        for g in gens:
            P = arith.mul(F, g[None])
            for src, M in zip(frontier, P):
                k = _key(M)
                j = index.get(k)
                if j is None:
                    index[k] = j = len(elems)
                    elems.append(M)
                    parity.append(parity[src] ^ 1)
                    new.append(j)
                    if len(elems) > cap:
                        raise GroupTooLarge(f"more than {cap} elements")
                elif track_parity and parity[j] != parity[src] ^ 1:
                    raise ValueError("generators do not define a sign character")
        frontier = new
    arr = np.array(elems, dtype=np.int64)
    return arr, index, (np.array(parity, dtype=np.int64) if track_parity else None)


def _filter(cands: np.ndarray, pred: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    return cands[pred(cands)]


def _all_matrices(q: int, n: int, shape_mask: np.ndarray | None = None) -> np.ndarray:
    """Every n x n matrix over GF(q), optionally with some entries fixed by a mask."""
    cells = n * n
    grid = np.indices((q,) * cells).reshape(cells, -1).T
    return grid.reshape(-1, n, n).astype(np.int64)


# generators


def _elementary(F: GF, n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                for a in range(1, F.q):
                    M = np.eye(n, dtype=np.int64)
                    M[i, j] = a
                    out.append(M)
    return out


def _diag(F: GF, n: int, det_one: bool) -> list[np.ndarray]:
    g = F.gen
    M = np.eye(n, dtype=np.int64)
    M[0, 0] = g
    if det_one:
        M[1, 1] = F.inv(g)
    return [M]


def _linear(n: int, q: int, special: bool, cap: int) -> tuple[np.ndarray, dict, list]:
    F = gf(q)
    gens = _elementary(F, n) + ([] if special and q == 2 else _diag(F, n, special))
    elems, index, _ = closure(gens, FieldArith(F), cap)
    return elems, index, gens


def _unitary_gens(q: int, special: bool) -> list[np.ndarray]:
    """Unitary root elements and diagonal elements over GF(q^2), form J = antidiag(1,1,1)."""
    F = gf(q * q)
    ar = FieldArith(F)
    conj = np.array([F.pow(x, q) for x in range(F.q)], dtype=np.int64)
    J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=np.int64)

    def unitary(A: np.ndarray) -> np.ndarray:
        Ab = conj[A].transpose(0, 2, 1)
        P = ar.mul(ar.mul(A, J[None]), Ab)
        return np.all(P == J[None], axis=(1, 2))

    Q = F.q
    vals = np.arange(Q)
    a, b, c = np.meshgrid(vals, vals, vals, indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    up = np.zeros((len(a), 3, 3), dtype=np.int64)
    up[:, 0, 0] = up[:, 1, 1] = up[:, 2, 2] = 1
    up[:, 0, 1], up[:, 0, 2], up[:, 1, 2] = a, b, c
    up = up[unitary(up)]
    low = up.transpose(0, 2, 1).copy()
    low = low[unitary(low)]
    nz = np.arange(1, Q)
    x, y, z = np.meshgrid(nz, nz, nz, indexing="ij")
    dg = np.zeros((x.size, 3, 3), dtype=np.int64)
    dg[:, 0, 0], dg[:, 1, 1], dg[:, 2, 2] = x.ravel(), y.ravel(), z.ravel()
    dg = dg[unitary(dg)]
    gens = [m for m in np.concatenate([up, low, dg]) if not np.array_equal(m, np.eye(3, dtype=np.int64))]
    if special:
        gens = [m for m in gens if ar.det(m) == 1]
    return gens


def _unitary(q: int, special: bool, cap: int) -> tuple[np.ndarray, dict, list]:
    F = gf(q * q)
    ar = FieldArith(F)
    if q == 2:
        # direct predicate filtering over all 3 x 3 matrices over GF(4)
        conj = np.array([F.pow(x, q) for x in range(F.q)], dtype=np.int64)
        J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=np.int64)
        cands = _all_matrices(F.q, 3)
        P = ar.mul(ar.mul(cands, J[None]), conj[cands].transpose(0, 2, 1))
        elems = cands[np.all(P == J[None], axis=(1, 2))]
        if special:
            elems = np.array([m for m in elems if ar.det(m) == 1])
        one = np.eye(3, dtype=np.int64)
        rest = [m for m in elems if not np.array_equal(m, one)]
        elems = np.array([one] + rest)
        index = {_key(m): i for i, m in enumerate(elems)}
        return elems, index, _unitary_gens(q, special)
    gens = _unitary_gens(q, special)
    elems, index, _ = closure(gens, ar, cap)
    return elems, index, gens


def _suzuki(q2: int, cap: int) -> tuple[np.ndarray, dict, list]:
    """Sz(q2), q2 = 2^(2m+1), from its lower unitriangular subgroup and the antidiagonal."""
    p, f = factor_prime_power(q2)
    if p != 2 or f % 2 == 0:
        raise SpecError(f"Suzuki groups need q^2 an odd power of 2, got {q2}")
    F = gf(q2)
    m = (f - 1) // 2
    theta = lambda x: F.pow(x, 2 ** (m + 1))
    add, mul = F.add, F.mul
    gens = []
    for a in range(q2):
        for b in range(q2):
            if a == 0 and b == 0:
                continue
            ta = theta(a)
            a2 = mul(a, a)
            M = np.eye(4, dtype=np.int64)
            M[1, 0] = a
            M[2, 0] = add(mul(a, ta), b)
            M[2, 1] = ta
            M[3, 0] = add(add(mul(a2, ta), mul(a, b)), theta(b))
            M[3, 1] = b
            M[3, 2] = a
            gens.append(M)
    T = np.fliplr(np.eye(4, dtype=np.int64)).copy()
    gens.append(T)
    elems, index, _ = closure(gens, FieldArith(F), cap)
    return elems, index, gens


# Weyl groups

CARTAN = {
    "A2": [[2, -1], [-1, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "B2": [[2, -2], [-1, 2]],
    "B3": [[2, -1, 0], [-1, 2, -2], [0, -1, 2]],
    "G2": [[2, -1], [-3, 2]],
    "F4": [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]],
}

WEYL_ORDERS = {"A2": 6, "A3": 24, "B2": 8, "B3": 48, "G2": 12, "I2(8)": 16, "F4": 1152}


def reflections(cartan: Sequence[Sequence[int]]) -> list[np.ndarray]:
    """Simple reflections in the basis of simple roots: s_i(a_j) = a_j - A_ij a_i."""
    A = np.array(cartan, dtype=np.int64)
    n = len(A)
    out = []
    for i in range(n):
        S = np.eye(n, dtype=np.int64)
        S[i, :] -= A[i, :]
        out.append(S)
    return out


def _dihedral_reflections(m: int) -> list[np.ndarray]:
    """The dihedral group of order 2m acting on Z[x]/(x^k + 1), m = 2k a power of 2."""
    k = m // 2
    if k & (k - 1):
        raise SpecError("only I2(m) with m a power of 2 is supported")
    r = np.zeros((k, k), dtype=np.int64)
    for i in range(k - 1):
        r[i + 1, i] = 1
    r[0, k - 1] = -1  # x * x^(k-1) = x^k = -1
    s = np.zeros((k, k), dtype=np.int64)
    s[0, 0] = 1
    for i in range(1, k):
        s[k - i, i] = -1  # x^i -> x^(-i) = -x^(k-i)
    return [s, s @ r]


def weyl_generators(typ: str) -> list[np.ndarray]:
    if typ in CARTAN:
        return reflections(CARTAN[typ])
    m = re.fullmatch(r"I2\((\d+)\)", typ)
    if m:
        return _dihedral_reflections(int(m.group(1)))
    raise SpecError(f"unsupported Weyl type {typ!r}")


# specs


@dataclass(frozen=True)
class GroupSpec:
    family: str  # sl2, gl2, gl3, sl3, u3, su3, sz, weyl
    q: int | None = None
    weyl_type: str | None = None

    @property
    def tag(self) -> str:
        if self.family == "weyl":
            return f"W({self.weyl_type})"
        if self.family == "sz":
            return f"Sz({self.q})"
        names = {"sl2": "SL(2,{})", "gl2": "GL(2,{})", "gl3": "GL(3,{})", "sl3": "SL(3,{})",
                 "u3": "U(3,{})", "su3": "SU(3,{})"}
        return names[self.family].format(self.q)


SUPPORTED = {
    "sl2": {2, 3, 4, 5, 7, 8, 9, 11, 13},
    "gl2": {2, 3, 4, 5, 7},
    "gl3": {2},
    "sl3": {2, 3},
    "u3": {2},
    "su3": {2, 3},
    "sz": {8},
}

_ALIASES = {"sz8": ("sz", 8), "2b2": ("sz", None)}


def parse_spec(text: str) -> GroupSpec:
    """Accepts 'sl2:5', 'SL(2,5)', 'su3:3', 'sz8', 'sz:8', 'weyl:F4', 'W(F4)', 'F4'."""
    t = text.strip()
    m = re.fullmatch(r"(?i)(weyl:|W\()?\s*([ABFG]\d|I2\(\d+\))\)?", t)
    if m:
        return GroupSpec("weyl", weyl_type=m.group(2).upper())
    m = re.fullmatch(r"(?i)(S?U|S?L|GL)\((\d),\s*(\d+)\)", t)
    if m:
        fam = m.group(1).lower() + m.group(2)
        return _checked(GroupSpec(fam, int(m.group(3))))
    m = re.fullmatch(r"(?i)sz\(?(\d+)\)?", t)
    if m:
        return _checked(GroupSpec("sz", int(m.group(1))))
    m = re.fullmatch(r"([a-z0-9]+)[:\-@](\d+)", t.lower())
    if m:
        fam = {"2b2": "sz"}.get(m.group(1), m.group(1))
        return _checked(GroupSpec(fam, int(m.group(2))))
    raise SpecError(f"cannot read group spec {text!r}")


def _checked(spec: GroupSpec) -> GroupSpec:
    if spec.family not in SUPPORTED:
        raise SpecError(f"unsupported group family {spec.family!r}")
    if spec.q not in SUPPORTED[spec.family]:
        raise SpecError(f"{spec.tag} is not among the supported groups")
    return spec


def expected_order(spec: GroupSpec) -> int:
    q = spec.q
    if spec.family == "weyl":
        return WEYL_ORDERS[spec.weyl_type]
    if spec.family == "sz":
        return q * q * (q - 1) * (q * q + 1)
    formulas = {
        "sl2": q * (q * q - 1),
        "gl2": q * (q - 1) * (q * q - 1),
        "gl3": q ** 3 * (q - 1) * (q * q - 1) * (q ** 3 - 1),
        "sl3": q ** 3 * (q * q - 1) * (q ** 3 - 1),
        "u3": q ** 3 * (q + 1) * (q * q - 1) * (q ** 3 + 1),
        "su3": q ** 3 * (q * q - 1) * (q ** 3 + 1),
    }
    return formulas[spec.family]


_BUILT: dict[str, OracleGroup] = {}


def build_group(spec: GroupSpec | str, cap: int = DEFAULT_CAP) -> OracleGroup:
    """Enumerate the group and check its order against the classical formula.

    Groups are cached by tag, so classes and tables computed once are reused.
    """
    if isinstance(spec, str):
        spec = parse_spec(spec)
    want = expected_order(spec)
    if want > cap:
        raise GroupTooLarge(f"{spec.tag} has order {want} > cap {cap}")
    hit = _BUILT.get(spec.tag)
    if hit is not None:
        return hit
    parity = None
    if spec.family == "weyl":
        gens = weyl_generators(spec.weyl_type)
        arith = IntArith()
        elems, index, parity = closure(gens, arith, cap, track_parity=True)
        p, q = None, None
    else:
        q = spec.q
        if spec.family in ("sl2", "gl2", "gl3", "sl3"):
            n = int(spec.family[-1])
            elems, index, gens = _linear(n, q, spec.family.startswith("s"), cap)
            arith = FieldArith(gf(q))
        elif spec.family in ("u3", "su3"):
            elems, index, gens = _unitary(q, spec.family == "su3", cap)
            arith = FieldArith(gf(q * q))
        else:
            elems, index, gens = _suzuki(q, cap)
            arith = FieldArith(gf(q))
        p = factor_prime_power(q)[0]
    if len(elems) != want:
        raise SpecError(f"{spec.tag}: enumerated {len(elems)} elements, expected {want}")
    G = OracleGroup(spec.tag, q, p, arith, list(gens), elems, index, parity)
    _BUILT[spec.tag] = G
    return G

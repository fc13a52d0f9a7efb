"""Conjugacy classes, power maps and class-algebra structure constants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import OracleGroup


@dataclass
class ClassData:
    reps: list[int]            # element index of each representative
    sizes: list[int]
    orders: list[int]
    class_of: np.ndarray       # class number of every element
    powers: list[list[int]]    # powers[c][j] = class of rep_c^j, 0 <= j < order
    ptypes: list[str]

    def __len__(self) -> int:
        return len(self.reps)

    @property
    def inverse(self) -> list[int]:
        return [pw[-1] if len(pw) > 1 else c for c, pw in enumerate(self.powers)]

    def p_singular(self) -> list[bool]:
        return [t in ("unipotent", "mixed") for t in self.ptypes]


def _ptype(order: int, p: int | None) -> str:
    if order == 1:
        return "identity"
    if p is None:
        return "semisimple"
    m = order
    while m % p == 0:
        m //= p
    if m == 1:
        return "unipotent"
    return "mixed" if m != order else "semisimple"


def _inverses_of(G: OracleGroup, mats: list[np.ndarray]) -> list[np.ndarray]:
    out = []
    for g in mats:
        x, prev = g, None
        one = G.elements[0]
        while not np.array_equal(x, one):
            prev = x
            x = G.mul(x, g)
        out.append(prev if prev is not None else one)
    return out


def conjugacy_classes(G: OracleGroup) -> ClassData:
    hit = G.cache.get("classes")
    if hit is not None:
        return hit
    E = G.elements
    N = len(E)
    perms = []
    for g, gi in zip(G.gens, _inverses_of(G, G.gens)):
        perms.append(G.lookup(G.mul(G.mul(gi[None], E), g[None])).tolist())
    class_of = np.full(N, -1, dtype=np.int64)
    orbits = []
    for start in range(N):
        if class_of[start] >= 0:
            continue
        cid = len(orbits)
        class_of[start] = cid
        members = [start]
        stack = [start]
        while stack:
            x = stack.pop()
            for P in perms:
                y = P[x]
                if class_of[y] < 0:
                    class_of[y] = cid
                    members.append(y)
                    stack.append(y)
        orbits.append(min(members))
    sizes0 = np.bincount(class_of, minlength=len(orbits)).tolist()

    orders0, powers_raw = [], []
    for rep in orbits:
        g = E[rep]
        seq = [0]
        x = g
        while not np.array_equal(x, E[0]):
            seq.append(G.index[x.astype(np.int16).tobytes()])
            x = G.mul(x, g)
        orders0.append(len(seq))
        powers_raw.append([int(class_of[i]) for i in seq])

    order = sorted(range(len(orbits)), key=lambda c: (orders0[c], sizes0[c], orbits[c]))
    renum = {old: new for new, old in enumerate(order)}
    data = ClassData(
        reps=[orbits[c] for c in order],
        sizes=[sizes0[c] for c in order],
        orders=[orders0[c] for c in order],
        class_of=np.array([renum[c] for c in class_of.tolist()], dtype=np.int64),
        powers=[[renum[x] for x in powers_raw[c]] for c in order],
        ptypes=[_ptype(orders0[c], G.p) for c in order],
    )
    G.cache["classes"] = data
    return data


def structure_constants(G: OracleGroup, cd: ClassData | None = None) -> np.ndarray:
    """a[i, j, k] = #{(x, y) in C_i x C_j : x y = z_k} for the representative z_k."""
    hit = G.cache.get("structure")
    if hit is not None:
        return hit
    cd = cd or conjugacy_classes(G)
    r = len(cd)
    E = G.elements
    inv = cd.inverse
    a = np.zeros((r, r, r), dtype=np.int64)
    # x^-1 ranges over C_i* as x ranges over C_i, so count u in C_i* with u z in C_j
    for k, rep in enumerate(cd.reps):
        v = cd.class_of[G.lookup(G.mul(E, E[rep][None]))]
        M = np.bincount(cd.class_of * r + v, minlength=r * r).reshape(r, r)
        for i in range(r):
            a[inv[i], :, k] = M[i, :]
    G.cache["structure"] = a
    return a


def element_orders(G: OracleGroup) -> np.ndarray:
    cd = conjugacy_classes(G)
    return np.array(cd.orders)[cd.class_of]

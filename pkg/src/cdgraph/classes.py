"""Conjugacy classes, p-regular classes, sigma-parts and class products."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .permgroup import Group, Permutation, PrimeSet, element_order


@dataclass(frozen=True, eq=False)
class ConjClass:
    """One conjugacy class; ``members`` are element indices into ``group``."""

    group: Group
    index: int
    rep_index: int
    members: np.ndarray
    order: int  # element order shared by every member

    @property
    def size(self) -> int:
        return int(self.members.size)

    @cached_property
    def rep(self) -> Permutation:
        return self.group.element(self.rep_index)

    @cached_property
    def primes(self) -> PrimeSet:
        return PrimeSet.of(self.size)

    @property
    def is_central(self) -> bool:
        return self.size == 1

    def elements(self) -> set[Permutation]:
        return {self.group.element(i) for i in self.members}

    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[self.members] = True
        return m

    def __repr__(self):
        return f"<ConjClass #{self.index} size={self.size} rep={self.rep.cycle_string()}>"


class ClassTable:
    """All classes of a group, sorted by (size, representative)."""

    def __init__(self, group: Group, classes: list[ConjClass], class_of: np.ndarray):
        self.group = group
        self.classes = classes
        self.class_of = class_of

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, i) -> ConjClass:
        return self.classes[i]

    def sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    def lookup(self, g: Permutation | int) -> ConjClass:
        i = self.group.index_of(g) if isinstance(g, Permutation) else int(g)
        return self.classes[int(self.class_of[i])]


def conjugacy_classes(G: Group) -> ClassTable:
    """Partition ``G`` into conjugacy classes (cached on the group)."""
    if "classes" in G.cache:
        return G.cache["classes"]
    n = G.order
    src = [np.arange(n)]
    dst = []
    for s in G.generators:
        dst.append(G.conj_map(s))
    if dst:
        src = np.concatenate(src * len(dst))
        dst = np.concatenate(dst)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
    labels = _kernels.active.component_labels(n, src, dst)
    # labels are the least index in each orbit == lexicographically least member
    reps, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
    order = np.lexsort((reps, counts))
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    class_of = rank[inverse]
    by_class = np.argsort(class_of, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(counts[order])])
    classes = []
    for k, r in enumerate(order):
        members = by_class[bounds[k]:bounds[k + 1]]
        classes.append(ConjClass(G, k, int(reps[r]), members, int(G.orders[reps[r]])))
    table = ClassTable(G, classes, class_of)
    G.cache["classes"] = table
    return table


def is_p_regular(g: Permutation, p: int) -> bool:
    return element_order(g) % p != 0


def p_regular_classes(table: ClassTable, p: int | None) -> list[ConjClass]:
    """Classes of elements of order prime to ``p``; ``None`` keeps all classes."""
    if p is None:
        return list(table.classes)
    return [c for c in table.classes if c.order % p != 0]


def _sigma_exponents(orders: np.ndarray, sigma: PrimeSet) -> np.ndarray:
    out = np.empty(orders.size, dtype=np.int64)
    for o in np.unique(orders):
        a = sigma.part(int(o))
        b = int(o) // a
        # m = 1 mod a, m = 0 mod b
        m = b * pow(b, -1, a) if a > 1 else 0
        out[orders == o] = m % int(o) if o > 1 else 0
    return out


def sigma_part_indices(G: Group, idx, sigma) -> np.ndarray:
    """Vectorised sigma-part of the elements ``idx`` of ``G``."""
    sigma = sigma if isinstance(sigma, PrimeSet) else PrimeSet(sigma)
    idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
    exps = _sigma_exponents(G.orders[idx], sigma)
    return G.power(idx, exps)


def sigma_part(g: Permutation, sigma) -> Permutation:
    """The sigma-part of ``g``: the power of ``g`` whose order is o(g)_sigma."""
    sigma = sigma if isinstance(sigma, PrimeSet) else PrimeSet(sigma)
    o = element_order(g)
    m = _sigma_exponents(np.array([o]), sigma)[0]
    return g ** int(m)


def class_product_indices(B: ConjClass, C: ConjClass) -> np.ndarray:
    G = B.group
    a = np.repeat(B.members, C.size)
    b = np.tile(C.members, B.size)
    return np.unique(G.mul(a, b))


def class_product(B: ConjClass, C: ConjClass) -> tuple[set[Permutation], bool]:
    """The product set BC and whether it is exactly one conjugacy class."""
    G = B.group
    prod = class_product_indices(B, C)
    return {G.element(i) for i in prod}, _is_single_class(G, prod)


def _is_single_class(G: Group, prod: np.ndarray) -> bool:
    table = conjugacy_classes(G)
    ks = np.unique(table.class_of[prod])
    return ks.size == 1 and table[int(ks[0])].size == prod.size


def generated_by_quotients_mask(C: ConjClass):
    G = C.group
    c0inv = G.inv[C.members[0]]
    seeds = G.mul(C.members, c0inv)
    return G.generate(seeds)


def generated_by_quotients(C: ConjClass) -> Group:
    """The subgroup generated by all c1*c2^-1 with c1, c2 in C (normal)."""
    mask, gens = generated_by_quotients_mask(C)
    return C.group.subgroup(mask, gens)


# --------------------------------------------------------------------------
# lemma property suites; each returns a list of violation dicts


def lemma_class_divisibility(G: Group, normals=None, primes=None) -> list[dict]:
    """Exhaustive check of the four standard class-size facts for normal subgroups.

    (a) |x^N| divides |x^G| for x in N; (b) |(xN)^{G/N}| divides |x^G|;
    (c) a p-regular coset xN contains a p-regular y with yN = xN;
    (d) commuting x, y of coprime orders have C(xy) = C(x) & C(y).
    """
    from .structure import normal_lattice, quotient

    table = conjugacy_classes(G)
    rep_idx = np.array([c.rep_index for c in table])
    sizes = np.array([c.size for c in table])
    elem_size = sizes[table.class_of]
    out = []
    normals = normal_lattice(G) if normals is None else normals
    primes = G.primes if primes is None else primes
    for N in normals:
        nmask = N.mask
        NG = N.group()
        ntable = conjugacy_classes(NG)
        n_idx = G.index(NG.perms)
        nsizes = np.array([c.size for c in ntable])[ntable.class_of]
        bad = (elem_size[n_idx] % nsizes) != 0
        if bad.any():
            out.append({"lemma": "a", "normal_order": N.order,
                        "element": int(n_idx[np.flatnonzero(bad)[0]])})
        Q, proj = quotient(G, nmask)
        qtable = conjugacy_classes(Q)
        qsizes = np.array([c.size for c in qtable])[qtable.class_of]
        bad = (elem_size % qsizes[proj]) != 0
        if bad.any():
            out.append({"lemma": "b", "normal_order": N.order,
                        "element": int(np.flatnonzero(bad)[0])})
        for p in primes:
            preg = (Q.orders[proj] % p) != 0
            xs = np.flatnonzero(preg)
            ys = sigma_part_indices(G, xs, PrimeSet([p]).complement(G.primes))
            ok = (G.orders[ys] % p != 0) & (proj[ys] == proj[xs])
            if not ok.all():
                out.append({"lemma": "c", "normal_order": N.order, "prime": int(p),
                            "element": int(xs[np.flatnonzero(~ok)[0]])})
    # (d): x over class representatives suffices (conjugation invariance)
    cmasks = {}

    def cmask(i):
        if i not in cmasks:
            cmasks[i] = G.commuting_mask(int(i))
        return cmasks[i]

    for x in rep_idx:
        cx = cmask(x)
        ys = np.flatnonzero(cx)
        ox = int(G.orders[x])
        ys = ys[np.gcd(G.orders[ys], ox) == 1]
        if ys.size == 0:
            continue
        xy = G.mul(np.full(ys.size, x), ys)
        for y, z in zip(ys, xy):
            lhs = cmask(z)
            rhs = cx & cmask(y)
            if not np.array_equal(lhs, rhs):
                out.append({"lemma": "d", "x": int(x), "y": int(y)})
                break
    return out


def lemma_coprime_products(G: Group, p: int, graph=None) -> list[dict]:
    """Products of p-regular classes of coprime lengths.

    (a) BC is a single p-regular class of length != 1 dividing |B||C|;
    (b) if d(D, C) >= 3 and |C| < |D| then |DC| = |D|,
        <CC^-1> <= <DD^-1> and |<CC^-1>| divides |D|.
    Assumes ``G`` is p-separable.
    """
    from .graph import build_graph

    table = conjugacy_classes(G)
    graph = build_graph(table, p) if graph is None else graph
    verts = graph.classes
    out = []
    quot = {}

    def quotients(c):
        if c.index not in quot:
            quot[c.index] = generated_by_quotients_mask(c)[0]
        return quot[c.index]

    for i, B in enumerate(verts):
        for j in range(i + 1, len(verts)):
            C = verts[j]
            if math.gcd(B.size, C.size) != 1:
                continue
            prod = class_product_indices(B, C)
            single = _is_single_class(G, prod)
            k = table[int(table.class_of[prod[0]])]
            ok = single and k.order % p != 0 and k.size != 1 and (B.size * C.size) % k.size == 0
            if not ok:
                out.append({"lemma": "coprime_product", "B": B.index, "C": C.index, "BC_size": int(prod.size)})
                continue
            dist = graph.dist[i, j]
            if dist >= 3 or dist < 0:
                small, big = (B, C) if B.size < C.size else (C, B)
                if small.size == big.size:
                    continue
                qs, qb = quotients(small), quotients(big)
                n_small = int(qs.sum())
                if not (k.size == big.size and not (qs & ~qb).any() and big.size % n_small == 0):
                    out.append({"lemma": "far_product", "D": big.index, "C": small.index})
    return out

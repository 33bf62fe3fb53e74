"""Normal structure: lattice of normal subgroups, O_pi, quotients, Sylow and
Hall subgroups, separability, p-nilpotency and quasi-Frobenius analysis.

Subgroups of a fixed group are handled as :class:`Sub` (an element mask
plus a short generator list) and promoted to a standalone :class:`Group`
only when something has to be computed *inside* them.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from . import _kernels
from .classes import conjugacy_classes
from .permgroup import PERM_DTYPE, Group, PrimeSet, center_mask, is_normal_mask
from .verdict import FAILS, HOLDS, INCONCLUSIVE, NOT_APPLICABLE, Verdict

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 1_000_000


def default_budget() -> int:
    raw = os.environ.get("CDGRAPH_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class NotNormal(ValueError):
    pass


class NotFound(RuntimeError):
    """A budgeted search ran out of nodes; dependent checks are inconclusive."""


class ComplementSearchExhausted(NotFound):
    pass


def _key(mask: np.ndarray) -> bytes:
    return np.packbits(mask).tobytes()


@dataclass(eq=False)
class Sub:
    """A subgroup of ``parent`` given by membership mask and generators."""

    parent: Group
    mask: np.ndarray
    gens: list[int]
    _group: Group | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def group(self) -> Group:
        if self._group is None:
            self._group = self.parent.subgroup(self.mask, self.gens)
        return self._group

    def contains(self, other: "Sub | np.ndarray") -> bool:
        m = other.mask if isinstance(other, Sub) else other
        return not (m & ~self.mask).any()

    def is_abelian(self) -> bool:
        G = self.parent
        for i, a in enumerate(self.gens):
            for b in self.gens[i + 1:]:
                if G.mul(a, b) != G.mul(b, a):
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, Sub) and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash(_key(self.mask))


def trivial(G: Group) -> Sub:
    return Sub(G, G.identity_mask(), [])


def whole(G: Group) -> Sub:
    return Sub(G, np.ones(G.order, dtype=bool), [int(g) for g in G.generators])


def sub_from_mask(G: Group, mask: np.ndarray) -> Sub:
    if mask.sum() == 1:
        return trivial(G)
    return Sub(G, mask, [int(g) for g in G._pick_generators(mask)])


def sub_of(G: Group, H: Group) -> Sub:
    """View a standalone subgroup ``H`` as a :class:`Sub` of ``G``."""
    gens = [int(i) for i in G.index(H.perms[H.generators], strict=True)]
    s = Sub(G, G.mask_of(H), gens)
    s._group = H
    return s


def generate_sub(G: Group, seeds: Iterable[int], base: Sub | None = None,
                 cap: int | None = None) -> Sub | None:
    base = trivial(G) if base is None else base
    res = G.extend(base.mask, base.gens, seeds, cap)
    if res is None:
        return None
    return Sub(G, res[0], res[1])


# --------------------------------------------------------------------------
# normal subgroups


def normal_lattice(G: Group) -> list[Sub]:
    """All normal subgroups of ``G`` sorted by order.

    Every normal subgroup is generated by the classes it contains, so the
    lattice is the join-closure of the normal closures of single classes.
    """
    if "normal_lattice" in G.cache:
        return G.cache["normal_lattice"]
    table = conjugacy_classes(G)
    atoms: dict[bytes, Sub] = {}
    for c in table.classes[1:]:
        s = generate_sub(G, c.members)
        atoms.setdefault(_key(s.mask), s)
    found: dict[bytes, Sub] = {_key(trivial(G).mask): trivial(G)}
    found.update(atoms)
    queue = list(atoms.values())
    atom_list = list(atoms.values())
    while queue:
        M = queue.pop()
        for A in atom_list:
            if M.contains(A):
                continue
            J = generate_sub(G, A.gens, base=M)
            k = _key(J.mask)
            if k not in found:
                found[k] = J
                queue.append(J)
    out = sorted(found.values(), key=lambda s: (s.order, tuple(s.members)))
    G.cache["normal_lattice"] = out
    return out


def normal_subgroups(G: Group) -> list[Group]:
    return [s.group() for s in normal_lattice(G)]


def center_sub(G: Group) -> Sub:
    if "center_sub" not in G.cache:
        G.cache["center_sub"] = sub_from_mask(G, center_mask(G))
    return G.cache["center_sub"]


def _as_primes(pi) -> PrimeSet:
    return pi if isinstance(pi, PrimeSet) else PrimeSet(pi)


def o_pi_sub(G: Group, pi, above: Sub | None = None) -> Sub:
    """Largest normal subgroup M (containing ``above``) with |M : above| a pi-number.

    With ``above`` trivial this is O_pi(G); in general it is the preimage of
    O_pi(G/above).
    """
    pi = _as_primes(pi)
    above = trivial(G) if above is None else above
    best = above
    for M in normal_lattice(G):
        if M.order > best.order and M.contains(above) and pi.is_number(M.order // above.order):
            best = M
    return best


def o_pi(G: Group, pi) -> Group:
    return o_pi_sub(G, pi).group()


def quotient(G: Group, N) -> tuple[Group, np.ndarray]:
    """``G/N`` acting on the cosets of ``N`` and the projection (index map)."""
    nmask = N.mask if isinstance(N, Sub) else (
        G.mask_of(N) if isinstance(N, Group) else np.asarray(N, dtype=bool))
    if not is_normal_mask(G, nmask):
        raise NotNormal("quotient needs a normal subgroup")
    ngens = N.gens if isinstance(N, Sub) else [int(g) for g in G._pick_generators(nmask)]
    n = G.order
    if ngens:
        src = np.tile(np.arange(n), len(ngens))
        dst = np.concatenate([G.right_mul(np.arange(n), g) for g in ngens])
    else:
        src = dst = np.zeros(0, dtype=np.int64)
    labels = _kernels.active.component_labels(n, src, dst)
    reps, coset_of = np.unique(labels, return_inverse=True)
    m = reps.size
    rows = np.empty((m, m), dtype=PERM_DTYPE)
    for c, r in enumerate(reps):
        rows[c] = coset_of[G.right_mul(reps, r)]
    Q = Group(rows)
    proj_by_coset = Q.index(rows, strict=True)
    return Q, proj_by_coset[coset_of]


# --------------------------------------------------------------------------
# separability


@dataclass
class SeparabilityReport:
    pi: PrimeSet
    separable: bool
    series: list[tuple[int, str]]


def is_pi_separable(G: Group, pi) -> SeparabilityReport:
    """Climb the O_pi / O_pi' series using the normal lattice of ``G``."""
    pi = _as_primes(pi)
    key = ("separable", pi)
    if key in G.cache:
        return G.cache[key]
    comp = pi.complement(G.primes)
    cur = trivial(G)
    series: list[tuple[int, str]] = []
    while cur.order < G.order:
        step = o_pi_sub(G, pi, cur)
        kind = "O_pi"
        if step.order == cur.order:
            step = o_pi_sub(G, comp, cur)
            kind = "O_pi'"
        if step.order == cur.order:
            break
        series.append((step.order, kind))
        cur = step
    rep = SeparabilityReport(pi, cur.order == G.order, series)
    G.cache[key] = rep
    return rep


def is_p_separable(G: Group, p: int) -> bool:
    return is_pi_separable(G, [p]).separable


def pi_length_at_most_one(G: Group, pi) -> bool:
    """Is there a normal series 1 <= A <= B <= G with A, G/B pi'-groups and B/A a pi-group?"""
    pi = _as_primes(pi)
    comp = pi.complement(G.primes)
    lat = normal_lattice(G)
    for A in lat:
        if not comp.is_number(A.order):
            continue
        for B in lat:
            if (B.order % A.order == 0 and B.contains(A) and pi.is_number(B.order // A.order)
                    and comp.is_number(G.order // B.order)):
                return True
    return False


# --------------------------------------------------------------------------
# Sylow and Hall


def normalizer_mask(G: Group, H: Sub) -> np.ndarray:
    m = np.ones(G.order, dtype=bool)
    for s in H.gens:
        m &= H.mask[G.conjugates_of(s)]
    return m


def sylow_sub(G: Group, p: int, start: int | None = None) -> Sub:
    """A Sylow p-subgroup grown from ``<start>`` inside successive normalizers."""
    target = PrimeSet([p]).part(G.order)
    if target == 1:
        return trivial(G)
    ppower = PrimeSet([p]).is_number
    is_pel = np.array([ppower(int(o)) for o in G.orders]) & (G.orders > 1)
    if start is None:
        cand = np.flatnonzero(is_pel)
        start = int(cand[np.argmax(G.orders[cand])])
    P = generate_sub(G, [start])
    while P.order < target:
        cand = np.flatnonzero(normalizer_mask(G, P) & is_pel & ~P.mask)
        g = int(cand[np.argmax(G.orders[cand])])
        P = generate_sub(G, [g], base=P)
    return P


def sylow_subgroup(G: Group, p: int) -> Group:
    return sylow_sub(G, p).group()


def conjugate_sub(G: Group, H: Sub, g: int) -> Sub:
    mask = np.zeros(G.order, dtype=bool)
    mask[G.conjugate_elements(H.members, g)] = True
    gens = [int(x) for x in G.conjugate_elements(np.asarray(H.gens, dtype=np.int64), g)] if H.gens else []
    return Sub(G, mask, gens)


def conjugates(G: Group, H: Sub) -> list[Sub]:
    """All distinct conjugates of ``H`` (in order of first appearance)."""
    norm = normalizer_mask(G, H)
    want = G.order // int(norm.sum())
    seen: dict[bytes, Sub] = {}
    covered = np.zeros(G.order, dtype=bool)
    for g in range(G.order):
        if covered[g]:
            continue
        C = conjugate_sub(G, H, g)
        seen.setdefault(_key(C.mask), C)
        # the right coset N_G(H) g gives the same conjugate
        covered[G.mul(np.flatnonzero(norm), g)] = True
        if len(seen) == want:
            break
    return list(seen.values())


@dataclass
class HallResult:
    status: str  # "found" | "exhausted" | "none"
    sub: Sub | None
    nodes: int


def _budgeted_search(G: Group, primes: list[int], base: Sub, target: int, budget: int) -> HallResult:
    """Find a subgroup of order ``target`` generated by ``base`` and one Sylow
    q-subgroup of ``G`` per prime q in ``primes``.

    The first Sylow subgroup is fixed (every candidate is conjugate to one
    containing it); later ones range over all conjugates. Partial
    generations whose order fails to divide ``target`` are pruned.
    """
    nodes = 0
    if base.order == target:
        return HallResult("found", base, 0)
    primes = sorted(primes, key=lambda q: -PrimeSet([q]).part(G.order))
    sylows = [sylow_sub(G, q) for q in primes]
    options = [[sylows[0]]] + [conjugates(G, P) for P in sylows[1:]]
    seen: set[tuple[int, bytes]] = set()

    def rec(depth: int, cur: Sub):
        nonlocal nodes
        if depth == len(options):
            return cur if cur.order == target else None
        for P in options[depth]:
            if nodes >= budget:
                raise NotFound
            nodes += 1
            nxt = generate_sub(G, P.gens, base=cur, cap=target)
            if nxt is None or target % nxt.order:
                continue
            k = (depth, _key(nxt.mask))
            if k in seen:
                continue
            seen.add(k)
            if nxt.order == target:
                return nxt
            got = rec(depth + 1, nxt)
            if got is not None:
                return got
        return None

    try:
        found = rec(0, base)
    except NotFound:
        return HallResult("exhausted", None, nodes)
    return HallResult("found" if found is not None else "none", found, nodes)


def find_hall(G: Group, pi, budget: int | None = None) -> HallResult:
    pi = _as_primes(pi)
    budget = default_budget() if budget is None else budget
    key = ("hall", pi)
    if key in G.cache:
        return G.cache[key]
    target = pi.part(G.order)
    if target == G.order:
        res = HallResult("found", whole(G), 0)
    elif target == 1:
        res = HallResult("found", trivial(G), 0)
    else:
        is_pi = np.array([pi.is_number(int(o)) for o in G.orders])
        res = None
        if int(is_pi.sum()) == target:
            S = generate_sub(G, np.flatnonzero(is_pi), cap=target)
            if S is not None and S.order == target:
                res = HallResult("found", S, 1)
        if res is None:
            primes = [q for q in pi if G.order % q == 0]
            res = _budgeted_search(G, primes, trivial(G), target, budget)
    if res.status != "exhausted":
        G.cache[key] = res
    return res


def hall_pi_subgroup(G: Group, pi, budget: int | None = None) -> Group | None:
    """A Hall pi-subgroup; ``None`` if none exists, ``NotFound`` if the budget ran out."""
    res = find_hall(G, pi, budget)
    if res.status == "exhausted":
        raise NotFound(f"Hall {_as_primes(pi)}-subgroup search exhausted its budget")
    return None if res.sub is None else res.sub.group()


def p_nilpotent_complement(G: Group, p: int) -> Sub | None:
    """The normal p-complement (the p-regular elements) when they form a subgroup."""
    key = ("p_nilpotent", p)
    if key in G.cache:
        return G.cache[key]
    target = G.order // PrimeSet([p]).part(G.order)
    preg = np.flatnonzero(G.orders % p != 0)
    out = None
    if preg.size == target:
        S = generate_sub(G, preg, cap=target)
        if S is not None and S.order == target:
            out = S
    G.cache[key] = out
    return out


def is_p_nilpotent(G: Group, p: int) -> tuple[bool, Group | None]:
    S = p_nilpotent_complement(G, p)
    return (S is not None, None if S is None else S.group())


# --------------------------------------------------------------------------
# quasi-Frobenius groups


@dataclass
class FrobeniusAnalysis:
    is_quasi_frobenius: bool
    kernel: Sub | None = None
    complement: Sub | None = None
    kernel_abelian: bool = False
    complement_abelian: bool = False
    status: str = "complete"  # or "exhausted"
    center_order: int = 1

    @property
    def abelian_kernel_and_complement(self) -> bool:
        return self.is_quasi_frobenius and self.kernel_abelian and self.complement_abelian

    def quotient_orders(self) -> tuple[int, int]:
        """Orders of the kernel and complement of G/Z(G)."""
        z = self.center_order
        return self.kernel.order // z, self.complement.order // z

    def summary(self) -> dict:
        if not self.is_quasi_frobenius:
            return {"quasi_frobenius": False, "status": self.status}
        return {
            "quasi_frobenius": True,
            "kernel_order": self.kernel.order,
            "complement_order": self.complement.order,
            "kernel_abelian": self.kernel_abelian,
            "complement_abelian": self.complement_abelian,
            "center_order": self.center_order,
            "status": self.status,
        }


def _is_frobenius_kernel(G: Group, K: Sub, Z: Sub) -> bool:
    """K/Z is a Frobenius kernel of G/Z, tested on preimages in G."""
    if math.gcd(K.order // Z.order, G.order // K.order) != 1:
        return False
    table = conjugacy_classes(G)
    for c in table:
        k = c.rep_index
        if not K.mask[k] or Z.mask[k]:
            continue
        # preimage of C_{G/Z}(kZ) = {g : k^g in kZ}
        kz = np.zeros(G.order, dtype=bool)
        kz[G.mul(np.full(Z.order, k), Z.members)] = True
        cstar = kz[G.conjugates_of(k)]
        if (cstar & ~K.mask).any():
            return False
    return True


def quasi_frobenius_analysis(G: Group, budget: int | None = None) -> FrobeniusAnalysis:
    """Decide whether G/Z(G) is a Frobenius group; return kernel and complement preimages."""
    if "qf" in G.cache:
        return G.cache["qf"]
    budget = default_budget() if budget is None else budget
    Z = center_sub(G)
    kernel = None
    for K in normal_lattice(G):
        if K.order <= Z.order or K.order == G.order or not K.contains(Z):
            continue
        if _is_frobenius_kernel(G, K, Z):
            if kernel is not None:
                raise RuntimeError(
                    f"two Frobenius kernel candidates of orders {kernel.order} and {K.order}")
            kernel = K
    if kernel is None:
        res = FrobeniusAnalysis(False, center_order=Z.order)
        G.cache["qf"] = res
        return res
    index = G.order // kernel.order
    found = _budgeted_search(G, list(PrimeSet.of(index)), Z, Z.order * index, budget)
    if found.status == "exhausted":
        return FrobeniusAnalysis(True, kernel, None, kernel.is_abelian(), False,
                                 status="exhausted", center_order=Z.order)
    if found.sub is None:
        raise RuntimeError("coprime kernel without a complement")
    H = found.sub
    res = FrobeniusAnalysis(True, kernel, H, kernel.is_abelian(), H.is_abelian(),
                            center_order=Z.order)
    G.cache["qf"] = res
    return res


# --------------------------------------------------------------------------
# property checks built on the above


def pi_elements_mask(G: Group, pi) -> np.ndarray:
    pi = _as_primes(pi)
    return np.array([pi.is_number(int(o)) for o in G.orders])


def class_sizes_by_element(G: Group) -> np.ndarray:
    table = conjugacy_classes(G)
    return np.array(table.sizes())[table.class_of]


def wielandt_check(G: Group, pi, budget: int | None = None, name: str = "") -> Verdict:
    """Every x in a Hall pi-subgroup with |x^G| a pi-number lies in O_pi(G)."""
    pi = _as_primes(pi)
    v = Verdict("WIELANDT", name, sorted(pi))
    res = find_hall(G, pi, budget)
    if res.status == "exhausted":
        v.hypothesis = INCONCLUSIVE
        v.conclusion = INCONCLUSIVE
        return v
    if res.sub is None:
        v.hypothesis = FAILS
        v.conclusion = NOT_APPLICABLE
        v.witnesses["hall"] = "none"
        return v
    H = res.sub
    sizes = class_sizes_by_element(G)
    opi = o_pi_sub(G, pi)
    xs = H.members
    qualifying = xs[np.array([pi.is_number(int(s)) for s in sizes[xs]], dtype=bool)]
    bad = qualifying[~opi.mask[qualifying]]
    v.witnesses.update(hall_order=H.order, o_pi_order=opi.order, qualifying=int(qualifying.size))
    if bad.size:
        v.conclusion = FAILS
        x = int(bad[0])
        v.witnesses["counterexample"] = {"element": G.element(x).cycle_string(),
                                         "class_size": int(sizes[x])}
    else:
        v.conclusion = HOLDS
    return v


def fms_statements(G: Group, pi, budget: int | None = None) -> dict:
    """Evaluate the three statements of the pi-element class-size trichotomy.

    (a) each pi-element has class size a pi-number or a pi'-number;
    (b) G = O_pi x O_pi', or Hall pi-subgroups are abelian and pi-length <= 1;
    (c) the pi-element class sizes are all pi-numbers, or all pi'-numbers.
    (b) is ``None`` when the Hall search ran out of budget.
    """
    pi = _as_primes(pi)
    comp = pi.complement(G.primes)
    table = conjugacy_classes(G)
    sizes = [c.size for c in table if pi.is_number(c.order)]
    is_pi = [pi.is_number(s) for s in sizes]
    is_comp = [comp.is_number(s) for s in sizes]
    a = all(x or y for x, y in zip(is_pi, is_comp))
    c = all(is_pi) or all(is_comp)
    o1, o2 = o_pi_sub(G, pi), o_pi_sub(G, comp)
    split = o1.order * o2.order == G.order
    out = {"a": a, "c": c, "split": split, "o_pi": o1.order, "o_pi_prime": o2.order}
    if split:
        out["b"] = True
        return out
    res = find_hall(G, pi, budget)
    if res.status == "exhausted":
        out["b"] = None
        return out
    hall_abelian = res.sub is not None and res.sub.is_abelian()
    length1 = pi_length_at_most_one(G, pi)
    out.update(b=hall_abelian and length1, hall_abelian=hall_abelian, pi_length_le_1=length1)
    return out


def pi_separable_from_class_sizes(G: Group, p: int, q: int) -> dict:
    """Hypothesis and conclusion of the {p,q}-separability criterion.

    If G is p-separable and no {p,q}'-element has class size divisible by q,
    then G is {p,q}-separable.
    """
    pq = PrimeSet({p, q})
    comp = pq.complement(G.primes)
    table = conjugacy_classes(G)
    hyp = is_p_separable(G, p) and all(
        c.size % q for c in table if comp.is_number(c.order))
    return {"hypothesis": hyp, "separable": is_pi_separable(G, pq).separable}


def subsets(primes: Iterable[int]) -> list[PrimeSet]:
    primes = sorted(primes)
    return [PrimeSet(c) for r in range(len(primes) + 1) for c in combinations(primes, r)]

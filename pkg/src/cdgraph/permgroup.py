"""Permutation groups held as fully enumerated element arrays.

A :class:`Group` stores every element as a row of an ``(order, degree)``
integer array, sorted lexicographically, so element ``0`` is always the
identity. Group operations work on element *indices* into that array;
:class:`Permutation` is the small immutable value type used at the edges
(construction, display, user-facing results).

Products are read left to right: ``(g*h)(x) == h(g(x))``.
"""
from __future__ import annotations

import functools
import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

DEFAULT_CAP = 200_000
PERM_DTYPE = np.int32


class CapExceeded(RuntimeError):
    """Raised when an enumeration grows past the configured element cap."""


# --------------------------------------------------------------------------
# primes


@functools.lru_cache(maxsize=4096)
def prime_factors(n: int) -> tuple[int, ...]:
    """Sorted distinct prime divisors of ``n`` (empty for 1)."""
    n = int(n)
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == (n,)


class PrimeSet(frozenset):
    """An immutable set of primes, printed in ascending order."""

    def __new__(cls, primes: Iterable[int] = ()):
        primes = [int(p) for p in primes]
        for p in primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        return super().__new__(cls, primes)

    @classmethod
    def of(cls, n: int) -> "PrimeSet":
        return cls(prime_factors(n))

    def sorted(self) -> list[int]:
        return sorted(self)

    def complement(self, universe: Iterable[int]) -> "PrimeSet":
        return PrimeSet(set(universe) - set(self))

    def part(self, n: int) -> int:
        """The largest divisor of ``n`` whose primes all lie in this set."""
        n = int(n)
        out = 1
        for p in self:
            while n % p == 0:
                n //= p
                out *= p
        return out

    def is_number(self, n: int) -> bool:
        return self.part(n) == int(n)

    def __and__(self, other):
        return PrimeSet(frozenset.__and__(self, frozenset(other)))

    def __or__(self, other):
        return PrimeSet(frozenset.__or__(self, frozenset(other)))

    def __sub__(self, other):
        return PrimeSet(frozenset.__sub__(self, frozenset(other)))

    __rand__ = __and__
    __ror__ = __or__

    def __repr__(self):
        return "{" + ",".join(map(str, self.sorted())) + "}"

    __str__ = __repr__


# --------------------------------------------------------------------------
# permutations


@functools.total_ordering
class Permutation:
    """A bijection on ``{0, ..., degree-1}`` stored as its image sequence."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> "Permutation":
        images = list(range(degree))
        touched = set()
        for cycle in cycles:
            cycle = [int(c) for c in cycle]
            for c in cycle:
                if not 0 <= c < degree:
                    raise ValueError(f"point {c} outside 0..{degree - 1}")
                if c in touched:
                    raise ValueError(f"point {c} appears in two cycles")
                touched.add(c)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                images[a] = b
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation(other.images[i] for i in self.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its least point."""
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self.images[x]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return element_order(self)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycle_string(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({self.cycle_string()}, degree={self.degree})"


def element_order(g: Permutation) -> int:
    """Least k >= 1 with g**k the identity (lcm of cycle lengths)."""
    return math.lcm(1, *(len(c) for c in g.cycles()))


# --------------------------------------------------------------------------
# groups


def _sort_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return rows
    order = np.lexsort(rows.T[::-1])
    return rows[order]


class Group:
    """A permutation group with every element enumerated.

    ``perms`` holds the elements sorted lexicographically by image
    sequence; ``generators`` holds indices into ``perms``. Derived data
    (inverses, element orders, class tables, normal subgroups) is computed
    lazily and cached on the instance.
    """

    def __init__(self, perms: np.ndarray, generators: np.ndarray | None = None,
                 name: str | None = None, *, _sorted: bool = False):
        perms = np.ascontiguousarray(perms, dtype=PERM_DTYPE)
        if perms.ndim != 2 or perms.shape[0] == 0:
            raise ValueError("a group needs a non-empty 2-d element array")
        if not _sorted:
            perms = _sort_rows(perms)
        perms.setflags(write=False)
        self.perms = perms
        self.name = name
        self.cache: dict = {}
        self._build_lookup()
        if generators is None:
            self.generators = self._pick_generators(np.ones(self.order, dtype=bool))
        else:
            gens = np.atleast_2d(np.asarray(generators, dtype=PERM_DTYPE))
            if gens.size == 0:
                self.generators = np.zeros(0, dtype=np.int64)
            else:
                idx = self.index(gens, strict=True)
                if (idx < 0).any():
                    raise ValueError("generator outside the element set")
                self.generators = np.unique(idx[idx != 0])

    # -- lookup ------------------------------------------------------------

    def _build_lookup(self):
        n, d = self.perms.shape
        if n == 1:
            base = []
        else:
            base = []
            for x in range(d):
                trial = base + [x]
                if not _kernels.key_radix_fits(d, len(trial)):
                    base = None
                    break
                keys = _kernels.active.row_keys(self.perms, trial, d)
                distinct = np.unique(keys).size
                if not base or distinct > self._distinct:
                    base = trial
                    self._distinct = distinct
                if distinct == n:
                    break
        if base is None:
            # too many points for exact mixed-radix keys: hash every point
            self._base = np.arange(d, dtype=np.int64)
            self._radix = 1_000_003
            self._exact = False
        else:
            self._base = np.asarray(base, dtype=np.int64)
            self._radix = max(d, 1)
            self._exact = True
        keys = _kernels.active.row_keys(self.perms, self._base, self._radix)
        order = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[order]
        self._key_order = order
        if n > 1 and (np.diff(self._sorted_keys) == 0).any():
            raise RuntimeError("element keys collide; lookup table is ambiguous")

    def index(self, rows: np.ndarray, strict: bool = False) -> np.ndarray:
        """Element indices of the given rows, ``-1`` for non-members.

        Without ``strict`` the rows are assumed to be group elements (for
        example products of members), and only the key is compared.
        """
        rows = np.atleast_2d(np.asarray(rows, dtype=PERM_DTYPE))
        keys = _kernels.active.row_keys(rows, self._base, self._radix)
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, self.order - 1)
        idx = np.where(self._sorted_keys[pos] == keys, self._key_order[pos], -1)
        if strict or not self._exact:
            hit = idx >= 0
            same = np.zeros(len(idx), dtype=bool)
            same[hit] = (self.perms[idx[hit]] == rows[hit]).all(axis=1)
            idx = np.where(same, idx, -1)
        return idx

    def index_of(self, g: Permutation) -> int:
        if g.degree != self.degree:
            return -1
        return int(self.index(np.array([g.images]), strict=True)[0])

    def __contains__(self, g: Permutation) -> bool:
        return self.index_of(g) >= 0

    # -- basic data --------------------------------------------------------

    @property
    def order(self) -> int:
        return self.perms.shape[0]

    @property
    def degree(self) -> int:
        return self.perms.shape[1]

    def __len__(self):
        return self.order

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<Group{label} order={self.order} degree={self.degree}>"

    def element(self, i: int) -> Permutation:
        return Permutation(self.perms[int(i)])

    @property
    def elements(self) -> list[Permutation]:
        return [Permutation(r) for r in self.perms]

    def generator_perms(self) -> list[Permutation]:
        return [self.element(i) for i in self.generators]

    @cached_property
    def inv(self) -> np.ndarray:
        n, d = self.perms.shape
        inv_rows = np.empty_like(self.perms)
        inv_rows[np.arange(n)[:, None], self.perms] = np.arange(d, dtype=PERM_DTYPE)
        return self.index(inv_rows)

    @cached_property
    def orders(self) -> np.ndarray:
        return _kernels.active.orders(self.perms)

    @cached_property
    def primes(self) -> PrimeSet:
        return PrimeSet.of(self.order)

    def is_abelian(self) -> bool:
        gens = self.generators
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                if self.mul(a, b) != self.mul(b, a):
                    return False
        return True

    # -- arithmetic on indices --------------------------------------------

    def mul(self, a, b):
        """Index of the product(s) ``a*b``; scalars or broadcastable arrays."""
        scalar = np.isscalar(a) and np.isscalar(b)
        a = np.atleast_1d(np.asarray(a, dtype=np.int64))
        b = np.atleast_1d(np.asarray(b, dtype=np.int64))
        a, b = np.broadcast_arrays(a, b)
        if b.size and (b == b[0]).all():
            rows = self.perms[b[0]][self.perms[a]]
        else:
            rows = _kernels.active.compose(self.perms[a], self.perms[b])
        out = self.index(rows)
        return int(out[0]) if scalar else out

    def right_mul(self, idx: np.ndarray, s: int) -> np.ndarray:
        return self.index(self.perms[s][self.perms[idx]])

    def conj_map(self, s: int) -> np.ndarray:
        """Index map ``i -> index(s^-1 * g_i * s)`` over all elements."""
        key = ("conj", int(s))
        if key not in self.cache:
            g = self.perms[s]
            ginv = self.perms[self.inv[s]]
            self.cache[key] = self.index(_kernels.active.conjugate(self.perms, g, ginv))
        return self.cache[key]

    def conjugate_elements(self, members: np.ndarray, s: int) -> np.ndarray:
        """Indices of ``s^-1 * x * s`` for each ``x`` in ``members``."""
        g = self.perms[s]
        ginv = self.perms[self.inv[s]]
        return self.index(_kernels.active.conjugate(self.perms[members], g, ginv))

    def conjugates_of(self, i: int) -> np.ndarray:
        """Index map ``g -> index(g^-1 * x_i * g)`` over all elements ``g``."""
        key = ("conjugates", int(i))
        if key not in self.cache:
            a = self.perms[i][self._inv_rows]
            self.cache[key] = self.index(_kernels.active.compose(a, self.perms))
        return self.cache[key]

    @cached_property
    def _inv_rows(self) -> np.ndarray:
        return self.perms[self.inv]

    def power(self, idx: np.ndarray, exps) -> np.ndarray:
        idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
        exps = np.broadcast_to(np.asarray(exps, dtype=np.int64), idx.shape)
        return self.index(_kernels.active.powers(self.perms[idx], np.ascontiguousarray(exps)))

    def commuting_mask(self, i: int) -> np.ndarray:
        return _kernels.active.commutes_with(self.perms, self.perms[i])

    # -- subgroups in index space -----------------------------------------

    def identity_mask(self) -> np.ndarray:
        m = np.zeros(self.order, dtype=bool)
        m[0] = True
        return m

    def extend(self, mask: np.ndarray, gens: Sequence[int], seeds: Iterable[int],
               cap: int | None = None):
        """Close ``mask`` (a subgroup generated by ``gens``) under ``seeds``.

        Returns ``(mask, gens)`` of the generated subgroup, or ``None`` when
        it would exceed ``cap`` elements. Redundant seeds are skipped, so
        ``gens`` stays short.
        """
        mask = mask.copy()
        gens = list(gens)
        count = int(mask.sum())
        for s in seeds:
            s = int(s)
            if mask[s]:
                continue
            gens.append(s)
            members = np.flatnonzero(mask)
            frontier = self.right_mul(members, s)
            frontier = np.unique(frontier[~mask[frontier]])
            while frontier.size:
                mask[frontier] = True
                count += frontier.size
                if cap is not None and count > cap:
                    return None
                nxt = np.concatenate([self.right_mul(frontier, g) for g in gens])
                frontier = np.unique(nxt[~mask[nxt]])
        return mask, gens

    def generate(self, seeds: Iterable[int], cap: int | None = None):
        return self.extend(self.identity_mask(), [], seeds, cap)

    def _pick_generators(self, mask: np.ndarray) -> np.ndarray:
        target = int(mask.sum())
        cur, gens = self.identity_mask(), []
        cand = np.flatnonzero(mask)
        # high-order elements first: fewer generators
        cand = cand[np.argsort(-self.orders[cand], kind="stable")]
        for c in cand:
            if cur[c]:
                continue
            cur, gens = self.extend(cur, gens, [c])
            if cur.sum() == target:
                break
        if cur.sum() != target or (cur & ~mask).any():
            raise ValueError("mask is not a subgroup")
        return np.asarray(sorted(gens), dtype=np.int64)

    def subgroup(self, mask: np.ndarray, gens: Sequence[int] | None = None,
                 name: str | None = None) -> "Group":
        """Wrap a subgroup (given as a boolean element mask) as its own Group."""
        mask = np.asarray(mask, dtype=bool)
        if gens is None:
            gens = self._pick_generators(mask)
        gens = [int(g) for g in gens if int(g) != 0]
        gen_rows = self.perms[gens] if gens else np.zeros((0, self.degree), dtype=PERM_DTYPE)
        return Group(self.perms[mask], gen_rows, name=name, _sorted=True)

    def mask_of(self, H: "Group") -> np.ndarray:
        """Membership mask in this group of the elements of ``H``."""
        idx = self.index(H.perms, strict=True)
        if (idx < 0).any():
            raise ValueError("not a subgroup of this group")
        m = np.zeros(self.order, dtype=bool)
        m[idx] = True
        return m

    def __eq__(self, other):
        return (isinstance(other, Group) and self.perms.shape == other.perms.shape
                and np.array_equal(self.perms, other.perms))

    def __hash__(self):
        return hash((self.perms.shape, self.perms[-1].tobytes()))


# --------------------------------------------------------------------------
# spec-level operations


def _as_rows(generators: Sequence[Permutation]) -> np.ndarray:
    degrees = {g.degree for g in generators}
    if len(degrees) > 1:
        raise ValueError(f"generators have mixed degrees {sorted(degrees)}")
    return np.array([g.images for g in generators], dtype=PERM_DTYPE)


def closure(generators: Sequence[Permutation], cap: int = DEFAULT_CAP,
            degree: int | None = None, name: str | None = None) -> Group:
    """Enumerate the group generated by ``generators``.

    Raises :class:`CapExceeded` as soon as more than ``cap`` elements
    have been found.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    generators = list(generators)
    if not generators:
        if degree is None:
            raise ValueError("degree is required when there are no generators")
        return Group(np.arange(degree, dtype=PERM_DTYPE)[None], [], name=name)
    gens = _as_rows(generators)
    d = gens.shape[1]
    ident = np.arange(d, dtype=PERM_DTYPE)
    seen = {ident.tobytes()}
    found = [ident[None]]
    frontier = ident[None]
    while frontier.shape[0]:
        batch = np.concatenate([g[frontier] for g in gens])
        batch = np.unique(batch, axis=0)
        fresh = []
        for row in batch:
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                fresh.append(row)
        if len(seen) > cap:
            raise CapExceeded(f"closure exceeds cap of {cap} elements")
        frontier = np.array(fresh, dtype=PERM_DTYPE).reshape(-1, d)
        found.append(frontier)
    return Group(np.concatenate(found), gens, name=name)


def centralizer(G: Group, g: Permutation | int) -> Group:
    i = G.index_of(g) if isinstance(g, Permutation) else int(g)
    if i < 0:
        raise ValueError("element not in group")
    return G.subgroup(centralizer_mask(G, i))


def centralizer_mask(G: Group, i: int) -> np.ndarray:
    key = ("centralizer", int(i))
    if key not in G.cache:
        G.cache[key] = G.commuting_mask(int(i))
    return G.cache[key]


def center_mask(G: Group) -> np.ndarray:
    if "center" not in G.cache:
        m = np.ones(G.order, dtype=bool)
        for s in G.generators:
            m &= G.commuting_mask(s)
        G.cache["center"] = m
    return G.cache["center"]


def center(G: Group) -> Group:
    return G.subgroup(center_mask(G))


def subgroup_generated(G: Group, seed: Iterable[Permutation | int]) -> Group:
    idx = []
    for s in seed:
        i = G.index_of(s) if isinstance(s, Permutation) else int(s)
        if i < 0:
            raise ValueError(f"{s} is not in the group")
        idx.append(i)
    mask, gens = G.generate(idx)
    return G.subgroup(mask, gens)


def is_normal_mask(G: Group, mask: np.ndarray) -> bool:
    members = np.flatnonzero(mask)
    for s in G.generators:
        if not mask[G.conj_map(s)[members]].all():
            return False
    return True


def is_subgroup_normal(G: Group, H: Group) -> bool:
    return is_normal_mask(G, G.mask_of(H))

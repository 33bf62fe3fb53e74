"""Declarative group specs, their JSON grammar, and the builtin corpus.

A spec is a JSON object with a ``"kind"`` discriminator::

    {"kind": "cyclic", "n": 6}
    {"kind": "dihedral", "order": 42}
    {"kind": "symmetric", "n": 4}
    {"kind": "alternating", "n": 5}
    {"kind": "extraspecial_plus", "p": 5}
    {"kind": "frobenius_metacyclic", "q": 7, "d": 6}
    {"kind": "direct", "parts": [<spec>, <spec>, ...]}
    {"kind": "semidirect", "normal": <spec>, "acting": <spec>,
     "action": [[<word>, ...], ...]}
    {"kind": "perm", "degree": 3, "generators": [[[0, 1]], [[0, 1, 2]]]}

README.md documents the grammar field by field.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Any

import numpy as np

from .permgroup import (
    DEFAULT_CAP,
    PERM_DTYPE,
    CapExceeded,
    Group,
    Permutation,
    closure,
    is_prime,
    prime_factors,
)

__all__ = [
    "ActionNotAutomorphism",
    "GroupSpec",
    "InvalidSpec",
    "ParseError",
    "build",
    "builtin_corpus",
    "parse_spec",
    "serialize_spec",
    "CapExceeded",
]

KINDS = (
    "cyclic", "dihedral", "symmetric", "alternating", "extraspecial_plus",
    "frobenius_metacyclic", "semidirect", "direct", "perm",
)


class InvalidSpec(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, msg: str, position: int):
        super().__init__(f"{msg} (at position {position})")
        self.position = position


class ActionNotAutomorphism(InvalidSpec):
    pass


def _freeze(value):
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    params: tuple[tuple[str, Any], ...] = ()
    parts: tuple["GroupSpec", ...] = field(default=())

    def __getitem__(self, key):
        return dict(self.params)[key]

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    # convenience constructors
    @classmethod
    def make(cls, kind: str, parts=(), **params) -> "GroupSpec":
        return cls(kind, tuple(sorted((k, _freeze(v)) for k, v in params.items())), tuple(parts))

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        for k, v in self.params:
            out[k] = _thaw(v)
        if self.kind == "direct":
            out["parts"] = [p.to_json() for p in self.parts]
        elif self.kind == "semidirect":
            out["normal"] = self.parts[0].to_json()
            out["acting"] = self.parts[1].to_json()
        return out

    def __str__(self):
        return serialize_spec(self)


def cyclic(n: int) -> GroupSpec:
    return GroupSpec.make("cyclic", n=n)


def dihedral(order: int) -> GroupSpec:
    return GroupSpec.make("dihedral", order=order)


def symmetric(n: int) -> GroupSpec:
    return GroupSpec.make("symmetric", n=n)


def alternating(n: int) -> GroupSpec:
    return GroupSpec.make("alternating", n=n)


def extraspecial_plus(p: int) -> GroupSpec:
    return GroupSpec.make("extraspecial_plus", p=p)


def frobenius_metacyclic(q: int, d: int) -> GroupSpec:
    return GroupSpec.make("frobenius_metacyclic", q=q, d=d)


def direct(*parts: GroupSpec) -> GroupSpec:
    return GroupSpec.make("direct", parts=parts)


def semidirect(normal: GroupSpec, acting: GroupSpec, action) -> GroupSpec:
    return GroupSpec.make("semidirect", parts=(normal, acting), action=action)


def perm(degree: int, generators) -> GroupSpec:
    return GroupSpec.make("perm", degree=degree, generators=generators)


# --------------------------------------------------------------------------
# parsing


def _need_int(obj: dict, key: str, lo: int = 1) -> int:
    if key not in obj:
        raise InvalidSpec(f"{obj.get('kind')!r} spec needs {key!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidSpec(f"{key!r} must be an integer, got {v!r}")
    if v < lo:
        raise InvalidSpec(f"{key!r} must be >= {lo}, got {v}")
    return v


def _check_keys(obj: dict, allowed: set[str]):
    extra = set(obj) - allowed - {"kind"}
    if extra:
        raise InvalidSpec(f"unknown field(s) {sorted(extra)} for kind {obj['kind']!r}")


def _from_obj(obj) -> GroupSpec:
    if not isinstance(obj, dict):
        raise InvalidSpec(f"spec must be a JSON object, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise InvalidSpec(f"unknown kind {kind!r}")
    if kind in ("cyclic", "symmetric", "alternating"):
        _check_keys(obj, {"n"})
        return GroupSpec.make(kind, n=_need_int(obj, "n"))
    if kind == "dihedral":
        _check_keys(obj, {"order"})
        order = _need_int(obj, "order", lo=2)
        if order % 2:
            raise InvalidSpec("dihedral order must be even")
        return dihedral(order)
    if kind == "extraspecial_plus":
        _check_keys(obj, {"p"})
        p = _need_int(obj, "p", lo=3)
        if not is_prime(p):
            raise InvalidSpec(f"extraspecial_plus needs an odd prime, got {p}")
        return extraspecial_plus(p)
    if kind == "frobenius_metacyclic":
        _check_keys(obj, {"q", "d"})
        q, d = _need_int(obj, "q", lo=2), _need_int(obj, "d", lo=2)
        if not is_prime(q):
            raise InvalidSpec(f"q must be prime, got {q}")
        if (q - 1) % d:
            raise InvalidSpec(f"d={d} does not divide q-1={q - 1}")
        return frobenius_metacyclic(q, d)
    if kind == "direct":
        _check_keys(obj, {"parts"})
        parts = obj.get("parts")
        if not isinstance(parts, list) or not parts:
            raise InvalidSpec("direct needs a non-empty 'parts' list")
        return direct(*(_from_obj(p) for p in parts))
    if kind == "semidirect":
        _check_keys(obj, {"normal", "acting", "action"})
        for key in ("normal", "acting", "action"):
            if key not in obj:
                raise InvalidSpec(f"semidirect needs {key!r}")
        action = obj["action"]
        if not (isinstance(action, list) and all(
                isinstance(a, list) and all(
                    isinstance(w, list) and all(isinstance(i, int) and i >= 0 for i in w)
                    for w in a)
                for a in action)):
            raise InvalidSpec("action must be a list (per acting generator) of word lists")
        return semidirect(_from_obj(obj["normal"]), _from_obj(obj["acting"]), action)
    # perm
    _check_keys(obj, {"degree", "generators"})
    degree = _need_int(obj, "degree")
    gens = obj.get("generators")
    if not isinstance(gens, list):
        raise InvalidSpec("perm needs a 'generators' list")
    for g in gens:
        if not (isinstance(g, list) and all(
                isinstance(c, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in c)
                for c in g)):
            raise InvalidSpec("each generator is a list of cycles of integer points")
        try:
            Permutation.from_cycles(g, degree)
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from None
    return perm(degree, gens)


def parse_spec(text: str) -> GroupSpec:
    """Parse the JSON group-spec grammar into a :class:`GroupSpec`."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from None
    return _from_obj(obj)


def spec_from_obj(obj) -> GroupSpec:
    return _from_obj(obj)


def serialize_spec(spec: GroupSpec) -> str:
    return json.dumps(spec.to_json(), separators=(",", ":"))


# --------------------------------------------------------------------------
# building


def _primitive_root(q: int) -> int:
    phi = q - 1
    for g in range(2, q):
        if all(pow(g, phi // r, q) != 1 for r in prime_factors(phi)):
            return g
    return 1


def _heisenberg_generators(p: int) -> list[Permutation]:
    # (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab'); right cosets of X = <(1,0,0)>
    # are labelled (b, c - ab); a point index is b*p + c.
    def act(a2, b2, c2):
        images = [0] * (p * p)
        for b in range(p):
            for c in range(p):
                nb = (b + b2) % p
                nc = (c + c2 - a2 * nb) % p
                images[b * p + c] = nb * p + nc
        return Permutation(images)

    return [act(1, 0, 0), act(0, 1, 0)]


def _word_to_index(G: Group, gens: list[int], word) -> int:
    cur = 0
    for i in word:
        if i >= len(gens):
            raise InvalidSpec(f"word uses generator {i}, only {len(gens)} exist")
        cur = G.mul(cur, gens[i])
    return cur


def _extend_hom(G: Group, gens: list[int], images: list[int], target: Group) -> np.ndarray | None:
    """Extend generator images to a map G -> target; None if not a homomorphism."""
    phi = np.full(G.order, -1, dtype=np.int64)
    phi[0] = 0
    frontier = np.array([0])
    while frontier.size:
        nxt = []
        for g, img in zip(gens, images):
            prod = G.right_mul(frontier, g)
            want = target.mul(phi[frontier], img)
            known = phi[prod] >= 0
            if (phi[prod[known]] != want[known]).any():
                return None
            fresh = ~known
            phi[prod[fresh]] = want[fresh]
            nxt.append(np.unique(prod[fresh]))
        frontier = np.unique(np.concatenate(nxt)) if nxt else np.array([], dtype=np.int64)
    everything = np.arange(G.order)
    for g, img in zip(gens, images):
        if (phi[G.right_mul(everything, g)] != target.mul(phi, img)).any():
            return None
    return phi


def _build_semidirect(spec: GroupSpec, cap: int) -> Group:
    N = _build(spec.parts[0], cap)
    H = _build(spec.parts[1], cap)
    action = spec["action"]
    n_gens = [int(g) for g in N.generators]
    h_gens = [int(g) for g in H.generators]
    if len(action) != len(h_gens):
        raise ActionNotAutomorphism(
            f"action lists {len(action)} entries, acting group has {len(h_gens)} generators")
    # each acting generator -> automorphism of N as an index permutation
    autos = []
    for words in action:
        if len(words) != len(n_gens):
            raise ActionNotAutomorphism("each action entry needs one word per normal generator")
        imgs = [_word_to_index(N, n_gens, w) for w in words]
        phi = _extend_hom(N, n_gens, imgs, N)
        if phi is None or (phi < 0).any() or np.unique(phi).size != N.order:
            raise ActionNotAutomorphism("generator images do not define an automorphism")
        autos.append(phi)
    # the assignment must extend to a homomorphism H -> Aut(N)
    auto_rows = np.array(autos, dtype=PERM_DTYPE)
    if autos:
        A = closure([Permutation(a) for a in autos], cap=cap)
        hom = _extend_hom(H, h_gens, list(A.index(auto_rows, strict=True)), A)
        if hom is None:
            raise ActionNotAutomorphism("action is not a homomorphism from the acting group")
    n, m = N.order, H.degree
    degree = n + m
    gens = []
    for g in n_gens:
        img = np.arange(degree)
        img[:n] = N.right_mul(np.arange(n), g)
        gens.append(Permutation(img))
    for g, phi in zip(h_gens, autos):
        img = np.arange(degree)
        img[:n] = phi
        img[n:] = n + H.perms[g]
        gens.append(Permutation(img))
    G = closure(gens, cap=cap, degree=degree)
    if G.order != N.order * H.order:
        raise ActionNotAutomorphism("product order mismatch; action is not faithful to spec")
    return G


def _direct_generators(groups: list[Group]) -> tuple[list[Permutation], int]:
    degree = sum(g.degree for g in groups)
    gens = []
    offset = 0
    for g in groups:
        for row in g.perms[g.generators]:
            img = list(range(degree))
            for x, y in enumerate(row):
                img[offset + x] = offset + int(y)
            gens.append(Permutation(img))
        offset += g.degree
    return gens, degree


def _build(spec: GroupSpec, cap: int) -> Group:
    kind = spec.kind
    if kind == "cyclic":
        n = spec["n"]
        gens = [Permutation([(x + 1) % n for x in range(n)])] if n > 1 else []
        return closure(gens, cap=cap, degree=n)
    if kind == "dihedral":
        order = spec["order"]
        n = order // 2
        if n == 1:
            return closure([Permutation([1, 0])], cap=cap)
        if n == 2:
            return closure([Permutation.from_cycles([[0, 1]], 4),
                            Permutation.from_cycles([[2, 3]], 4)], cap=cap)
        rot = Permutation([(x + 1) % n for x in range(n)])
        ref = Permutation([(-x) % n for x in range(n)])
        return closure([rot, ref], cap=cap)
    if kind == "symmetric":
        n = spec["n"]
        if math.factorial(n) > cap:
            raise CapExceeded(f"S{n} exceeds cap {cap}")
        if n <= 1:
            return closure([], degree=max(n, 1))
        gens = [Permutation.from_cycles([[0, 1]], n)]
        if n > 2:
            gens.append(Permutation.from_cycles([list(range(n))], n))
        return closure(gens, cap=cap)
    if kind == "alternating":
        n = spec["n"]
        if n <= 2:
            return closure([], degree=max(n, 1))
        gens = [Permutation.from_cycles([[0, 1, k]], n) for k in range(2, n)]
        return closure(gens, cap=cap)
    if kind == "extraspecial_plus":
        return closure(_heisenberg_generators(spec["p"]), cap=cap)
    if kind == "frobenius_metacyclic":
        q, d = spec["q"], spec["d"]
        r = pow(_primitive_root(q), (q - 1) // d, q)
        gens = [Permutation([(x + 1) % q for x in range(q)]),
                Permutation([(r * x) % q for x in range(q)])]
        return closure(gens, cap=cap)
    if kind == "direct":
        groups = [_build(p, cap) for p in spec.parts]
        total = math.prod(g.order for g in groups)
        if total > cap:
            raise CapExceeded(f"direct product of order {total} exceeds cap {cap}")
        gens, degree = _direct_generators(groups)
        return closure(gens, cap=cap, degree=degree)
    if kind == "semidirect":
        return _build_semidirect(spec, cap)
    if kind == "perm":
        degree = spec["degree"]
        gens = [Permutation.from_cycles(_thaw(c), degree) for c in spec["generators"]]
        return closure(gens, cap=cap, degree=degree)
    raise InvalidSpec(f"unknown kind {kind!r}")


def build(spec: GroupSpec | dict | str, cap: int = DEFAULT_CAP, name: str | None = None) -> Group:
    """Build the permutation group described by ``spec``."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    elif isinstance(spec, dict):
        spec = _from_obj(spec)
    else:
        # validate programmatic specs through the same path as parsed ones
        spec = _from_obj(spec.to_json())
    G = _build(spec, cap)
    G.name = name or G.name
    G.spec = spec
    return G


# --------------------------------------------------------------------------
# corpus

EX31A = direct(frobenius_metacyclic(7, 6), extraspecial_plus(5))
EX31B = direct(dihedral(42), extraspecial_plus(5))

# factors used for the direct-product part of the corpus
_PRODUCT_FACTORS = [
    ("C2", cyclic(2)),
    ("C3", cyclic(3)),
    ("C5", cyclic(5)),
    ("S3", symmetric(3)),
    ("D8", dihedral(8)),
    ("D10", dihedral(10)),
    ("A4", alternating(4)),
    ("F20", frobenius_metacyclic(5, 4)),
    ("F21", frobenius_metacyclic(7, 3)),
    ("F42", frobenius_metacyclic(7, 6)),
    ("E27", extraspecial_plus(3)),
    ("E125", extraspecial_plus(5)),
    ("S4", symmetric(4)),
]

_ORDERS = {
    "C2": 2, "C3": 3, "C5": 5, "S3": 6, "D8": 8, "D10": 10, "A4": 12, "F20": 20,
    "F21": 21, "F42": 42, "E27": 27, "E125": 125, "S4": 24,
}

CORPUS_MAX_ORDER = 10_000


def builtin_corpus() -> list[tuple[str, GroupSpec]]:
    """The deterministic verification corpus, sorted by name."""
    out: dict[str, GroupSpec] = {}
    for n in range(1, 51):
        out[f"C{n}"] = cyclic(n)
    for n in range(3, 51):
        out[f"D{2 * n}"] = dihedral(2 * n)
    for n in range(1, 6):
        out[f"S{n}"] = symmetric(n)
        out[f"A{n}"] = alternating(n)
    for q in range(3, 32):
        if not is_prime(q):
            continue
        for d in range(2, q):
            if (q - 1) % d == 0:
                out[f"F{q}_{d}"] = frobenius_metacyclic(q, d)
    out["E27"] = extraspecial_plus(3)
    out["E125"] = extraspecial_plus(5)
    out["ex31a"] = EX31A
    out["ex31b"] = EX31B
    taken = {serialize_spec(s) for s in out.values()}
    for (na, a), (nb, b) in combinations_with_replacement(_PRODUCT_FACTORS, 2):
        if _ORDERS[na] * _ORDERS[nb] > CORPUS_MAX_ORDER:
            continue
        spec = direct(a, b)
        if serialize_spec(spec) in taken:
            continue
        taken.add(serialize_spec(spec))
        out[f"{na}x{nb}"] = spec
    return sorted(out.items())

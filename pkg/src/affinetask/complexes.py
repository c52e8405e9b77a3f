"""Chromatic simplicial complexes and the standard set operators on them.

A vertex carries a color (a process id in 1..n) and an optional payload
describing what the vertex stands for inside a subdivision (its carrier).
Vertex identity is the canonical uid string, which is derived from color and
payload, so structural equality and uid equality coincide.

Complexes store facets only; faces are generated on demand.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, Iterator

MAX_PROCESSES = 5


class ComplexError(ValueError):
    """Malformed complex or operator precondition failure."""


@dataclass(frozen=True, eq=False, repr=False)
class Vertex:
    uid: str
    color: int
    payload: Any = None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vertex) and self.uid == other.uid

    def __hash__(self) -> int:
        return hash(self.uid)

    def __repr__(self) -> str:
        return f"V({self.uid})"

    def __lt__(self, other: "Vertex") -> bool:
        return self.uid < other.uid


@dataclass(frozen=True, eq=False, repr=False)
class Simplex:
    """Nonempty set of vertices with pairwise distinct colors."""

    vertices: tuple[Vertex, ...]

    def __post_init__(self):
        vs = tuple(sorted(set(self.vertices), key=lambda v: v.uid))
        if not vs:
            raise ComplexError("a simplex needs at least one vertex")
        if len({v.color for v in vs}) != len(vs):
            raise ComplexError(
                "repeated colors in simplex: %s" % [v.uid for v in vs])
        object.__setattr__(self, "vertices", vs)

    @cached_property
    def uids(self) -> tuple[str, ...]:
        return tuple(v.uid for v in self.vertices)

    @cached_property
    def vertex_set(self) -> frozenset[Vertex]:
        return frozenset(self.vertices)

    @cached_property
    def colors(self) -> frozenset[int]:
        return frozenset(v.color for v in self.vertices)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self.vertices)

    def __contains__(self, v: Vertex) -> bool:
        return v in self.vertex_set

    def faces(self) -> Iterator["Simplex"]:
        """All nonempty faces, self included."""
        for k in range(1, len(self.vertices) + 1):
            for combo in combinations(self.vertices, k):
                yield Simplex(combo)

    def has_face(self, other: "Simplex") -> bool:
        return other.vertex_set <= self.vertex_set

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Simplex) and self.uids == other.uids

    def __hash__(self) -> int:
        return hash(self.uids)

    def __repr__(self) -> str:
        return "S{%s}" % ", ".join(self.uids)


def _sort_key(s: Simplex) -> tuple:
    return (len(s.uids), s.uids)


@dataclass(frozen=True, eq=False, repr=False)
class ChromaticComplex:
    """Inclusion-closed simplex family, stored by its facets."""

    n: int
    facets: frozenset[Simplex]

    def __post_init__(self):
        for f in self.facets:
            bad = [v.color for v in f if not 1 <= v.color <= self.n]
            if bad:
                raise ComplexError(f"colors {bad} outside 1..{self.n}")

    @cached_property
    def vertices(self) -> frozenset[Vertex]:
        out: set[Vertex] = set()
        for f in self.facets:
            out.update(f.vertices)
        return frozenset(out)

    @cached_property
    def _simplex_set(self) -> frozenset[Simplex]:
        out: set[Simplex] = set()
        for f in self.facets:
            out.update(f.faces())
        return frozenset(out)

    def simplices(self) -> list[Simplex]:
        """Every simplex (all faces of all facets), canonically sorted."""
        return sorted(self._simplex_set, key=_sort_key)

    def __contains__(self, sigma: Simplex) -> bool:
        return sigma in self._simplex_set

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, ChromaticComplex)
                and self.n == other.n and self.facets == other.facets)

    def __hash__(self) -> int:
        return hash((self.n, self.facets))

    @property
    def dim(self) -> int:
        return max((f.dim for f in self.facets), default=-1)

    def __repr__(self) -> str:
        return f"ChromaticComplex(n={self.n}, facets={len(self.facets)})"

    def sorted_facets(self) -> list[Simplex]:
        return sorted(self.facets, key=_sort_key)


def _maximal(simplices: Iterable[Simplex]) -> set[Simplex]:
    unique = set(simplices)
    dims = {s.dim for s in unique}
    if len(dims) <= 1:
        # equal-dimension simplices cannot contain one another
        return unique
    by_size = sorted(unique, key=len, reverse=True)
    kept: list[Simplex] = []
    out: set[Simplex] = set()
    for s in by_size:
        if not any(t.has_face(s) for t in kept if len(t) > len(s)):
            kept.append(s)
            out.add(s)
    return out


def closure(simplices: Iterable[Simplex], n: int | None = None) -> ChromaticComplex:
    """Smallest complex containing every given simplex."""
    sims = set(simplices)
    if n is None:
        n = max((max(s.colors) for s in sims), default=0)
    return ChromaticComplex(n=n, facets=frozenset(_maximal(sims)))


def facets(K: ChromaticComplex) -> frozenset[Simplex]:
    return K.facets


def is_pure(K: ChromaticComplex) -> bool:
    """True when every facet has the complex's dimension."""
    dims = {f.dim for f in K.facets}
    return len(dims) <= 1


def star(simplices: Iterable[Simplex], K: ChromaticComplex) -> frozenset[Simplex]:
    """All simplices of K having some member of `simplices` as a face.

    Not inclusion-closed in general.
    """
    sims = list(simplices)
    for s in sims:
        if s not in K:
            raise ComplexError(f"star argument {s!r} is not a simplex of K")
    return frozenset(
        sigma for sigma in K._simplex_set
        if any(sigma.has_face(s) for s in sims))


def pure_complement(simplices: Iterable[Simplex], K: ChromaticComplex) -> ChromaticComplex:
    """Closure of the facets of K that avoid every given simplex.

    K must be pure.
    """
    if not is_pure(K):
        raise ComplexError("pure_complement requires a pure complex")
    sims = list(simplices)
    kept = [f for f in K.facets
            if not any(f.has_face(s) for s in sims)]
    return ChromaticComplex(n=K.n, facets=frozenset(kept))


def skeleton(k: int, K: ChromaticComplex) -> ChromaticComplex:
    """Sub-complex of all simplices of dimension at most k."""
    if k < 0:
        return ChromaticComplex(n=K.n, facets=frozenset())
    cand: set[Simplex] = set()
    for f in K.facets:
        if f.dim <= k:
            cand.add(f)
        else:
            cand.update(Simplex(c) for c in combinations(f.vertices, k + 1))
    return ChromaticComplex(n=K.n, facets=frozenset(_maximal(cand)))


# --- JSON form -------------------------------------------------------------
#
# {"n": int,
#  "vertices": [{"uid": str, "color": int, "payload": ...}, ...],
#  "facets": [[uid, ...], ...]}
#
# Payloads are encoded structurally: None for a corner of the base simplex,
# a sorted color list for a first-level subdivision vertex, and a sorted list
# of [color, sorted color list] pairs one level further down.


def _encode_payload(payload: Any) -> Any:
    if payload is None:
        return None
    assert isinstance(payload, Simplex)
    if all(v.payload is None for v in payload):
        return sorted(v.color for v in payload)
    return sorted([v.color, _encode_payload(v.payload)] for v in payload)


def complex_to_dict(K: ChromaticComplex) -> dict:
    verts = sorted(K.vertices, key=lambda v: (v.color, v.uid))
    return {
        "n": K.n,
        "vertices": [
            {"uid": v.uid, "color": v.color, "payload": _encode_payload(v.payload)}
            for v in verts
        ],
        "facets": sorted([list(f.uids) for f in K.facets]),
    }


def complex_from_dict(data: dict) -> ChromaticComplex:
    from .subdivision import chr_vertex, standard_simplex  # cycle-free at call time

    n = data["n"]
    base = {v.color: v for v in standard_simplex(n).vertices}

    def decode_vertex(color: int, enc: Any) -> Vertex:
        if enc is None:
            return base[color]
        if enc and isinstance(enc[0], int):
            carrier = Simplex(tuple(base[c] for c in enc))
            return chr_vertex(color, carrier)
        carrier = Simplex(tuple(decode_vertex(c, sub) for c, sub in enc))
        return chr_vertex(color, carrier)

    by_uid: dict[str, Vertex] = {}
    for item in data["vertices"]:
        v = decode_vertex(item["color"], item["payload"])
        if v.uid != item["uid"]:
            raise ComplexError(f"uid mismatch: {item['uid']!r} vs {v.uid!r}")
        by_uid[v.uid] = v
    facet_set = frozenset(
        Simplex(tuple(by_uid[u] for u in uids)) for uids in data["facets"])
    return ChromaticComplex(n=n, facets=facet_set)

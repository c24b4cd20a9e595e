"""Finite root systems, Weyl groups, toric points and the Kostant partition function.

Roots and weights are tuples in simple-root coordinates. Weights may have
rational entries (for instance the half-sum of positive roots). The invariant
form is normalized so that short roots have squared length 2.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from sympy import Matrix

from .qscalar import (
    ONE,
    ProjParam,
    as_scalar,
    monomial_lattice_test,
    parse_scalar,
    q_power,
)

Vector = tuple


class UnsupportedType(ValueError):
    pass


class NotParabolic(ValueError):
    pass


def _cartan_matrix(kind: str, rank: int) -> list[list[int]]:
    a = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j], a[j][i] = aij, aji

    if kind == "A":
        if rank < 1:
            raise UnsupportedType("A needs rank >= 1")
        for i in range(rank - 1):
            link(i, i + 1)
    elif kind in ("B", "C"):
        if rank < 2:
            raise UnsupportedType(f"{kind} needs rank >= 2")
        for i in range(rank - 2):
            link(i, i + 1)
        # a[i][j] = <alpha_j, alpha_i coroot>
        if kind == "B":
            link(rank - 2, rank - 1, aij=-1, aji=-2)
        else:
            link(rank - 2, rank - 1, aij=-2, aji=-1)
    elif kind == "D":
        if rank < 4:
            raise UnsupportedType("D needs rank >= 4")
        for i in range(rank - 2):
            link(i, i + 1)
        link(rank - 3, rank - 1)
    elif kind == "G":
        if rank != 2:
            raise UnsupportedType("G only exists in rank 2")
        link(0, 1, aij=-3, aji=-1)
    else:
        raise UnsupportedType(f"unsupported root system type {kind!r}")
    return a


def _symmetrizer(a: Sequence[Sequence[int]]) -> tuple[int, ...]:
    # d_i a_ij = d_j a_ji, propagated along the (connected) Dynkin diagram
    r = len(a)
    d: list[Optional[Fraction]] = [None] * r
    d[0] = Fraction(1)
    todo = [0]
    while todo:
        i = todo.pop()
        for j in range(r):
            if j != i and a[i][j] != 0 and d[j] is None:
                d[j] = d[i] * a[i][j] / a[j][i]
                todo.append(j)
    smallest = min(d)
    return tuple(int(x / smallest) for x in d)


def _add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def _sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def _scale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def _neg(v: Vector) -> Vector:
    return tuple(-a for a in v)


class RootSystem:
    """A reduced irreducible root system of type A, B, C, D or G."""

    def __init__(self, kind: str, rank: int):
        self.kind = kind.upper()
        self.rank = rank
        self.cartan = tuple(tuple(row) for row in _cartan_matrix(self.kind, rank))
        self.d = _symmetrizer(self.cartan)
        # (alpha_i, alpha_j) = d_i a_ij
        self.form = tuple(tuple(self.d[i] * self.cartan[i][j] for j in range(rank)) for i in range(rank))
        self.simple_roots = tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank))
        self.roots = self._enumerate_roots()
        self.positive_roots = tuple(sorted((r for r in self.roots if max(r) > 0), key=lambda r: (sum(r), r)))
        self.root_set = frozenset(self.roots)
        self.rho = tuple(Fraction(sum(r[i] for r in self.positive_roots), 2) for i in range(rank))

    def __repr__(self):
        return f"RootSystem({self.kind!r}, {self.rank})"

    def __eq__(self, other):
        return isinstance(other, RootSystem) and (self.kind, self.rank) == (other.kind, other.rank)

    def __hash__(self):
        return hash((self.kind, self.rank))

    def _enumerate_roots(self) -> tuple[Vector, ...]:
        seen = set(self.simple_roots)
        queue = deque(self.simple_roots)
        while queue:
            beta = queue.popleft()
            for i in range(self.rank):
                gamma = self.reflect(i, beta)
                if gamma not in seen:
                    seen.add(gamma)
                    queue.append(gamma)
        return tuple(sorted(seen))

    # bilinear data

    def pair(self, u: Vector, v: Vector):
        """The invariant form (u, v)."""
        total = 0
        for i, ui in enumerate(u):
            if ui:
                row = self.form[i]
                for j, vj in enumerate(v):
                    if vj:
                        total += ui * row[j] * vj
        return total

    def root_length(self, alpha: Vector) -> int:
        """d_alpha = (alpha, alpha) / 2."""
        return int(self.pair(alpha, alpha)) // 2

    def coroot_pair(self, lam: Vector, alpha: Vector):
        """(lam, alpha coroot) = (lam, alpha) / d_alpha."""
        value = Fraction(self.pair(lam, alpha)) / self.root_length(alpha)
        return int(value) if value.denominator == 1 else value

    def reflect(self, i: int, v: Vector) -> Vector:
        c = sum(self.cartan[i][j] * v[j] for j in range(self.rank))
        if c == 0:
            return tuple(v)
        return tuple(v[j] - (c if j == i else 0) for j in range(self.rank))

    def reflect_by(self, alpha: Vector, v: Vector) -> Vector:
        return _sub(v, _scale(self.coroot_pair(v, alpha), alpha))

    def is_positive(self, alpha: Vector) -> bool:
        return alpha in self.root_set and max(alpha) > 0

    @cached_property
    def fundamental_weights(self) -> tuple[Vector, ...]:
        inv = Matrix(self.form).inv()
        out = []
        for i in range(self.rank):
            col = inv[:, i] * self.d[i]
            out.append(tuple(Fraction(int(c.p), int(c.q)) for c in col))
        return tuple(out)

    def weight_from_fundamental(self, coords: Sequence[int]) -> Vector:
        total = tuple(Fraction(0) for _ in range(self.rank))
        for c, w in zip(coords, self.fundamental_weights):
            total = _add(total, _scale(c, w))
        return _normalize(total)

    def fundamental_coordinates(self, lam: Vector) -> tuple:
        return tuple(self.coroot_pair(lam, a) for a in self.simple_roots)

    def highest_root(self) -> Vector:
        return max(self.positive_roots, key=lambda r: (sum(r), r))

    # Weyl group

    @cached_property
    def identity(self) -> "WeylElement":
        return WeylElement(self, ())

    def simple_reflection(self, i: int) -> "WeylElement":
        return WeylElement(self, (i,))

    def weyl_from_image_of_rho(self, v: Vector) -> "WeylElement":
        word = []
        v = tuple(v)
        while True:
            for i in range(self.rank):
                if self.coroot_pair(v, self.simple_roots[i]) < 0:
                    word.append(i)
                    v = self.reflect(i, v)
                    break
            else:
                break
        return WeylElement._trusted(self, tuple(word))

    @cached_property
    def longest_element(self) -> "WeylElement":
        return self.weyl_from_image_of_rho(_neg(self.rho))

    def weyl_group(self) -> list["WeylElement"]:
        seen = {_normalize(self.rho): self.identity}
        queue = deque([self.rho])
        while queue:
            v = queue.popleft()
            for i in range(self.rank):
                u = _normalize(self.reflect(i, v))
                if u not in seen:
                    seen[u] = self.weyl_from_image_of_rho(u)
                    queue.append(u)
        return sorted(seen.values(), key=lambda w: (len(w.word), w.word))

    # partitions

    def kostant_partition(self, nu: Sequence[int]) -> int:
        """Number of multisets of positive roots summing to nu."""
        nu = tuple(nu)
        if any(c < 0 for c in nu) or any(Fraction(c).denominator != 1 for c in nu):
            return 0
        nu = tuple(int(c) for c in nu)
        boxes = list(product(*(range(c + 1) for c in nu)))
        ways = dict.fromkeys(boxes, 0)
        ways[tuple(0 for _ in nu)] = 1
        for beta in self.positive_roots:
            if any(b > c for b, c in zip(beta, nu)):
                continue
            for v in boxes:
                prev = _sub(v, beta)
                if min(prev) >= 0:
                    ways[v] += ways[prev]
        return ways[nu]

    def positive_system_from_parabolic(self, signs: Mapping[Vector, int]) -> tuple["WeylElement", frozenset]:
        """Find w with w(R+) contained in P = {sign > 0} u {positive roots with sign 0}.

        ``signs`` must cover every root, or every positive root (the rest is
        filled by antisymmetry).
        """
        full = dict(signs)
        for alpha in self.positive_roots:
            if alpha not in full:
                raise ValueError(f"missing sign for root {alpha}")
            full.setdefault(_neg(alpha), -full[alpha])
        parabolic = {a for a in self.roots if full[a] > 0 or (full[a] == 0 and self.is_positive(a))}
        for a in self.roots:
            if a not in parabolic and _neg(a) not in parabolic:
                raise NotParabolic(f"neither {a} nor its negative lies in P")
        for a in parabolic:
            for b in parabolic:
                c = _add(a, b)
                if c in self.root_set and c not in parabolic:
                    raise NotParabolic(f"P is not closed: {a} + {b} = {c}")
        w = self.identity
        for _ in range(len(self.positive_roots) + 1):
            bad = [i for i, a in enumerate(self.simple_roots) if w.act(a) not in parabolic]
            if not bad:
                break
            w = w * self.simple_reflection(bad[0])
        else:
            raise NotParabolic("no positive system inside P")
        positive = frozenset(w.act(a) for a in self.positive_roots)
        if not positive <= parabolic:
            raise NotParabolic("no positive system inside P")
        return w, positive

    # type A coordinates

    def e_vector_to_root_coords(self, lam: Sequence) -> Vector:
        """Class of an n-tuple modulo (1,...,1), as simple-root coordinates."""
        self._require_type_a()
        n = self.rank + 1
        total = sum(Fraction(x) for x in lam)
        out, running = [], Fraction(0)
        for i in range(1, n):
            running += Fraction(lam[i - 1])
            out.append(running - total * i / n)
        return _normalize(tuple(out))

    def root_coords_to_e_vector(self, v: Vector) -> tuple:
        """Traceless n-tuple representing the weight v."""
        self._require_type_a()
        padded = (0,) + tuple(v) + (0,)
        return _normalize(tuple(Fraction(padded[j]) - Fraction(padded[j - 1]) for j in range(1, len(padded))))

    def root_e(self, i: int, j: int) -> Vector:
        """The root e_i - e_j (1-based, i != j) in simple-root coordinates."""
        self._require_type_a()
        lo, hi = min(i, j), max(i, j)
        sign = 1 if i < j else -1
        return tuple(sign if lo <= k + 1 < hi else 0 for k in range(self.rank))

    def e_set(self, subset: Iterable[int]) -> Vector:
        """[e_S] in simple-root coordinates."""
        n = self.rank + 1
        vec = [0] * n
        for i in subset:
            vec[i - 1] += 1
        return self.e_vector_to_root_coords(vec)

    def _require_type_a(self):
        if self.kind != "A":
            raise UnsupportedType("e-coordinates are only available in type A")


def _normalize(v: Vector) -> Vector:
    return tuple(int(x) if Fraction(x).denominator == 1 else Fraction(x) for x in v)


@dataclass(frozen=True)
class WeylElement:
    """A Weyl group element stored as its normal-form reduced word.

    The word ``(i1, ..., ik)`` means ``s_i1 s_i2 ... s_ik``.
    """

    system: RootSystem = field(compare=False)
    word: tuple

    def __init__(self, system: RootSystem, word: Iterable[int]):
        word = tuple(word)
        v = system.rho
        for i in reversed(word):
            v = system.reflect(i, v)
        normal = system.weyl_from_image_of_rho(v).word
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "word", normal)

    @classmethod
    def _trusted(cls, system: RootSystem, word: tuple) -> "WeylElement":
        obj = object.__new__(cls)
        object.__setattr__(obj, "system", system)
        object.__setattr__(obj, "word", word)
        return obj

    def __len__(self):
        return len(self.word)

    @property
    def length(self) -> int:
        return len(self.word)

    def act(self, v: Vector) -> Vector:
        for i in reversed(self.word):
            v = self.system.reflect(i, v)
        return _normalize(v)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(self.system, self.word + other.word)

    def inverse(self) -> "WeylElement":
        return WeylElement(self.system, tuple(reversed(self.word)))

    def __repr__(self):
        return f"WeylElement({self.system.kind}{self.system.rank}, {list(self.word)})"


class ToricPoint:
    """A family of projective values chi_{2 alpha}, one for each root alpha."""

    def __init__(self, system: RootSystem, entries: Mapping[Vector, ProjParam]):
        self.system = system
        full: dict[Vector, ProjParam] = {}
        for root, value in entries.items():
            root = tuple(root)
            if root not in system.root_set:
                raise ValueError(f"{root} is not a root of {system}")
            full[root] = value
        for root in list(full):
            neg = _neg(root)
            if neg not in full:
                full[neg] = full[root].inverted()
        missing = [r for r in system.roots if r not in full]
        if missing:
            raise ValueError(f"toric point has no entry for roots {missing}")
        self.entries = full

    def __getitem__(self, root: Vector) -> ProjParam:
        return self.entries[tuple(root)]

    def __eq__(self, other):
        return isinstance(other, ToricPoint) and self.system == other.system and self.entries == other.entries

    def __repr__(self):
        body = ", ".join(f"{r}: {self.entries[r]}" for r in self.system.positive_roots)
        return f"ToricPoint({self.system.kind}{self.system.rank}, {{{body}}})"

    @classmethod
    def from_character(cls, system: RootSystem, values: Sequence) -> "ToricPoint":
        """chi_{2 alpha} = prod values[i]^{a_i} for alpha = sum a_i alpha_i."""
        vals = [as_scalar(v) for v in values]
        entries = {}
        for alpha in system.positive_roots:
            s = ONE
            for c, v in zip(alpha, vals):
                s = s * v ** c
            entries[alpha] = ProjParam(s, ONE)
        return cls(system, entries)

    def validate(self, require_regular: bool = False) -> dict:
        rs = self.system
        violations = []
        checked = 0
        for alpha in rs.roots:
            checked += 1
            if self.entries[_neg(alpha)] != self.entries[alpha].inverted():
                violations.append({"relation": "inversion", "roots": [list(alpha)]})
        for a in rs.roots:
            for b in rs.roots:
                c = _add(a, b)
                if c not in rs.root_set:
                    continue
                checked += 1
                xa, xb, xc = self.entries[a], self.entries[b], self.entries[c]
                if xa.x * xb.x * xc.y != xa.y * xb.y * xc.x:
                    violations.append({"relation": "cocycle", "roots": [list(a), list(b), list(c)]})
        if require_regular:
            for alpha in rs.positive_roots:
                checked += 1
                m = monomial_lattice_test(self.entries[alpha], rs.root_length(alpha))
                if m is not None:
                    violations.append({"relation": "regular", "roots": [list(alpha)], "exponent": m})
        return {"ok": not violations, "checked": checked, "violations": violations}

    def is_regular(self) -> bool:
        return all(
            monomial_lattice_test(self.entries[a], self.system.root_length(a)) is None
            for a in self.system.positive_roots
        )

    def shifted_weyl(self, w: WeylElement) -> "ToricPoint":
        """(w . chi)_{2 beta} = q^{(w rho - rho, 2 beta)} chi_{w^{-1}(2 beta)}."""
        rs = self.system
        shift = _sub(w.act(rs.rho), rs.rho)
        winv = w.inverse()
        entries = {}
        for beta in rs.roots:
            e = 2 * rs.pair(shift, beta)
            entries[beta] = self.entries[winv.act(beta)].scaled(q_power(e))
        return ToricPoint(rs, entries)

    # JSON

    def to_json(self) -> dict:
        return {
            "type": self.system.kind,
            "rank": self.system.rank,
            "entries": [
                {"root": list(r), "x": str(self.entries[r].x), "y": str(self.entries[r].y)}
                for r in self.system.positive_roots
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ToricPoint":
        rs = RootSystem(data["type"], int(data["rank"]))
        entries = {}
        for item in data["entries"]:
            root = tuple(int(c) for c in item["root"])
            value = ProjParam(parse_scalar(str(item["x"])), parse_scalar(str(item["y"])))
            if root in entries and entries[root] != value:
                raise ValueError(f"conflicting entries for root {root}")
            entries[root] = value
        # an explicit negative root entry must agree with inversion of its partner
        point = cls(rs, {r: v for r, v in entries.items() if rs.is_positive(r)} or entries)
        for r, v in entries.items():
            if point.entries[r] != v:
                raise ValueError(f"entry for {r} contradicts inversion symmetry")
        return point


def shifted_weyl_on_toric(w: WeylElement, chi: ToricPoint) -> ToricPoint:
    return chi.shifted_weyl(w)


def iter_root_pairs(system: RootSystem) -> Iterator[tuple[Vector, Vector, Vector]]:
    for a in system.roots:
        for b in system.roots:
            c = _add(a, b)
            if c in system.root_set:
                yield a, b, c


vector_add = _add
vector_sub = _sub
vector_scale = _scale
vector_neg = _neg
normalize_vector = _normalize

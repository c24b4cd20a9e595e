"""Quantum exterior powers for sl_n and the morphisms between their tensor products.

A tensor space is a tuple of signed sizes: ``k`` stands for the exterior power
of size k and ``-k`` for its dual. A basis vector is a tuple of sorted subsets
of ``{1..n}``, one per factor; for a dual factor the subset labels the dual
basis vector. Morphisms are sparse column maps.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .qscalar import ONE, ZERO, LaurentScalar, q_binomial, q_factorial, q_power

Space = tuple
Basis = tuple
Column = dict


class SizeOverflow(ValueError):
    pass


class TypeMismatch(ValueError):
    pass


class SpaceMismatch(ValueError):
    pass


MINUS_Q_POWERS: dict[int, LaurentScalar] = {}


def minus_q(e: int) -> LaurentScalar:
    """(-q)^e."""
    v = MINUS_Q_POWERS.get(e)
    if v is None:
        v = q_power(e) if e % 2 == 0 else -q_power(e)
        MINUS_Q_POWERS[e] = v
    return v


@lru_cache(maxsize=None)
def subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def space_basis(n: int, space: Space) -> tuple[Basis, ...]:
    for k in space:
        if abs(k) > n:
            raise SizeOverflow(f"factor {k} exceeds n = {n}")
    return tuple(product(*(subsets(n, abs(k)) for k in space)))


def _add_into(acc: dict, key, coeff: LaurentScalar):
    old = acc.get(key)
    if old is None:
        acc[key] = coeff
    else:
        new = old + coeff
        if new.is_zero():
            del acc[key]
        else:
            acc[key] = new


def _pairs_below(s: Sequence[int], t: Sequence[int]) -> int:
    """ell(S, T) = #{(i, j) in S x T : i < j}."""
    return sum(1 for i in s for j in t if i < j)


class SparseMor:
    """A linear map between tensor spaces, stored column by column."""

    __slots__ = ("n", "source", "target", "columns")

    def __init__(self, n: int, source: Space, target: Space, columns: Mapping[Basis, Column]):
        self.n = n
        self.source = tuple(source)
        self.target = tuple(target)
        self.columns = {b: dict(col) for b, col in columns.items() if col}

    def __repr__(self):
        return f"SparseMor(n={self.n}, {self.source} -> {self.target}, {len(self.columns)} columns)"

    # construction

    @classmethod
    def identity(cls, n: int, space: Space) -> "SparseMor":
        return cls(n, space, space, {b: {b: ONE} for b in space_basis(n, space)})

    @classmethod
    def from_function(cls, n: int, source: Space, target: Space, fn: Callable[[Basis], Iterable]) -> "SparseMor":
        cols = {}
        for b in space_basis(n, source):
            col: dict = {}
            for key, c in fn(b):
                if not c.is_zero():
                    _add_into(col, key, c)
            if col:
                cols[b] = col
        return cls(n, source, target, cols)

    # algebra

    def __matmul__(self, other: "SparseMor") -> "SparseMor":
        """self o other."""
        if other.target != self.source or other.n != self.n:
            raise TypeMismatch(f"cannot compose {self.source}->{self.target} after {other.source}->{other.target}")
        cols = {}
        mine = self.columns
        for b, col in other.columns.items():
            acc: dict = {}
            for mid, c in col.items():
                inner = mine.get(mid)
                if not inner:
                    continue
                for t, d in inner.items():
                    _add_into(acc, t, c * d)
            if acc:
                cols[b] = acc
        return SparseMor(self.n, other.source, self.target, cols)

    def tensor(self, other: "SparseMor") -> "SparseMor":
        if other.n != self.n:
            raise TypeMismatch("tensor factors over different n")
        cols = {}
        for b1, c1 in self.columns.items():
            for b2, c2 in other.columns.items():
                cols[b1 + b2] = {t1 + t2: a1 * a2 for t1, a1 in c1.items() for t2, a2 in c2.items()}
        return SparseMor(self.n, self.source + other.source, self.target + other.target, cols)

    def __add__(self, other: "SparseMor") -> "SparseMor":
        self._check_same_type(other)
        cols = {b: dict(c) for b, c in self.columns.items()}
        for b, col in other.columns.items():
            acc = cols.setdefault(b, {})
            for t, c in col.items():
                _add_into(acc, t, c)
        return SparseMor(self.n, self.source, self.target, cols)

    def __sub__(self, other: "SparseMor") -> "SparseMor":
        return self + other.scaled(-ONE)

    def scaled(self, s) -> "SparseMor":
        if s == 0:
            return SparseMor(self.n, self.source, self.target, {})
        return SparseMor(
            self.n, self.source, self.target, {b: {t: s * c for t, c in col.items()} for b, col in self.columns.items()}
        )

    def _check_same_type(self, other: "SparseMor"):
        if (self.n, self.source, self.target) != (other.n, other.source, other.target):
            raise TypeMismatch(f"{self.source}->{self.target} vs {other.source}->{other.target}")

    def __eq__(self, other):
        if not isinstance(other, SparseMor):
            return NotImplemented
        return (self.n, self.source, self.target) == (other.n, other.source, other.target) and self.columns == other.columns

    def first_difference(self, other: "SparseMor") -> Optional[dict]:
        self._check_same_type(other)
        for b in space_basis(self.n, self.source):
            lhs, rhs = self.columns.get(b, {}), other.columns.get(b, {})
            if lhs != rhs:
                return {"sourceIndex": _basis_json(b), "lhs": _column_json(lhs), "rhs": _column_json(rhs)}
        return None

    def apply(self, vec: Mapping[Basis, LaurentScalar]) -> dict:
        acc: dict = {}
        for b, c in vec.items():
            for t, d in self.columns.get(b, {}).items():
                _add_into(acc, t, c * d)
        return acc

    def entry(self, target: Basis, source: Basis) -> LaurentScalar:
        return self.columns.get(source, {}).get(target, ZERO)

    def collapse_top(self, position: int, side: str = "target") -> "SparseMor":
        """Identify a factor of full size n with the ground field.

        x_{1..n} is sent to q^{n(n+1)/4}.
        """
        space = self.target if side == "target" else self.source
        if space[position] != self.n:
            raise TypeMismatch(f"factor {position} of {space} is not the top exterior power")
        scale = top_normalization(self.n)
        reduced = space[:position] + space[position + 1:]
        if side == "target":
            cols = {}
            for b, col in self.columns.items():
                cols[b] = {t[:position] + t[position + 1:]: scale * c for t, c in col.items()}
            return SparseMor(self.n, self.source, reduced, cols)
        cols = {b[:position] + b[position + 1:]: {t: c / scale for t, c in col.items()} for b, col in self.columns.items()}
        return SparseMor(self.n, reduced, self.target, cols)


def _basis_json(b: Basis) -> list:
    return [list(s) for s in b]


def _column_json(col: Column) -> list:
    return [{"basis": _basis_json(t), "coeff": str(c)} for t, c in sorted(col.items())]


def top_normalization(n: int) -> LaurentScalar:
    return q_power(Fraction(n * (n + 1), 4))


def identity(n: int, space: Space) -> SparseMor:
    return SparseMor.identity(n, space)


def tensor_all(*mors: SparseMor) -> SparseMor:
    out = mors[0]
    for m in mors[1:]:
        out = out.tensor(m)
    return out


def compose(*mors: SparseMor) -> SparseMor:
    """compose(f, g, h) = f o g o h."""
    out = mors[-1]
    for m in reversed(mors[:-1]):
        out = m @ out
    return out


# generating morphisms


def _check_sizes(n: int, *sizes: int):
    if any(k < 0 for k in sizes) or sum(sizes) > n:
        raise SizeOverflow(f"sizes {sizes} do not fit in n = {n}")


@lru_cache(maxsize=None)
def wedge_multiply(k: int, l: int, n: int) -> SparseMor:
    """M_{k,l}(x_T (x) x_S) = (-q)^{ell(S,T)} x_{S u T}, |T| = k in the first slot."""
    _check_sizes(n, k, l)

    def column(b):
        t, s = b
        if set(t) & set(s):
            return
        yield (tuple(sorted(t + s)),), minus_q(_pairs_below(s, t))

    return SparseMor.from_function(n, (k, l), (k + l,), column)


@lru_cache(maxsize=None)
def wedge_comultiply(k: int, l: int, n: int) -> SparseMor:
    """M'_{k,l}(x_S) = (-1)^{kl} sum_{|T| = l} (-q)^{-ell(S-T, T)} x_{S-T} (x) x_T."""
    _check_sizes(n, k, l)
    sign = -1 if (k * l) % 2 else 1

    def column(b):
        (s,) = b
        for t in combinations(s, l):
            rest = tuple(i for i in s if i not in t)
            yield (rest, t), minus_q(-_pairs_below(rest, t)) * sign

    return SparseMor.from_function(n, (k + l,), (k, l), column)


def two_rho_pairing(n: int, s: Iterable[int]) -> int:
    """(2 rho, [e_S]) for sl_n."""
    return sum(n + 1 - 2 * j for j in s)


@lru_cache(maxsize=None)
def eval_coev(kind: str, i: int, n: int, twist: int = -1) -> SparseMor:
    """The evaluation and coevaluation maps; ``kind`` is one of
    epsPlus, etaPlus, epsMinus, etaMinus.

    epsMinus(v (x) f) = f(K_{2 twist rho} v) and etaPlus(1) = sum e^S (x) K_{-2 twist rho} x_S.
    Only twist = -1 gives module maps for the coproduct used here; twist = +1
    is kept for comparison.
    """
    if not 1 <= i <= n:
        raise SizeOverflow(f"evaluation index {i} outside 1..{n}")
    if twist not in (1, -1):
        raise ValueError("twist must be +1 or -1")
    basis = subsets(n, i)
    if kind == "epsPlus":
        return SparseMor(n, (-i, i), (), {(s, s): {(): ONE} for s in basis})
    if kind == "epsMinus":
        return SparseMor(n, (i, -i), (), {(s, s): {(): q_power(twist * two_rho_pairing(n, s))} for s in basis})
    if kind == "etaPlus":
        return SparseMor(n, (), (-i, i), {(): {(s, s): q_power(-twist * two_rho_pairing(n, s)) for s in basis}})
    if kind == "etaMinus":
        return SparseMor(n, (), (i, -i), {(): {(s, s): ONE for s in basis}})
    raise ValueError(f"unknown evaluation kind {kind!r}")


# quantum group action


def _alpha(i: int, s: Iterable[int]) -> int:
    """(alpha_i, [e_S]) with alpha_i = e_i - e_{i+1}."""
    s = set(s)
    return (i in s) - (i + 1 in s)


def _lambda_on(lam: Sequence[int], s: Iterable[int]) -> int:
    return sum(lam[j - 1] for j in s)


def _swap(s: tuple, old: int, new: int) -> tuple:
    return tuple(sorted(new if j == old else j for j in s))


def factor_action(gen: tuple, k: int, s: tuple) -> list[tuple[tuple, LaurentScalar]]:
    """Closed-form action of a generator on one basis vector of one factor.

    ``gen`` is ("E", i), ("F", i) or ("K", lam) with lam an integer n-tuple.
    """
    kind, arg = gen
    if k >= 0:
        if kind == "K":
            return [(s, q_power(_lambda_on(arg, s)))]
        i = arg
        if kind == "E":
            if i + 1 in s and i not in s:
                return [(_swap(s, i + 1, i), ONE)]
            return []
        if kind == "F":
            if i in s and i + 1 not in s:
                return [(_swap(s, i, i + 1), ONE)]
            return []
    else:
        # (x f)(v) = f(S(x) v)
        if kind == "K":
            return [(s, q_power(-_lambda_on(arg, s)))]
        i = arg
        if kind == "E":
            # S(E_i) = -K_i^{-1} E_i
            if i in s and i + 1 not in s:
                return [(_swap(s, i, i + 1), -q_power(-_alpha(i, s)))]
            return []
        if kind == "F":
            # S(F_i) = -F_i K_i
            if i + 1 in s and i not in s:
                u = _swap(s, i + 1, i)
                return [(u, -q_power(_alpha(i, u)))]
            return []
    raise ValueError(f"unknown generator {gen!r}")


def _k_simple(i: int, n: int, power: int = 1) -> tuple:
    lam = [0] * n
    lam[i - 1] = power
    lam[i] = -power
    return ("K", tuple(lam))


def generator_matrix(gen: tuple, n: int, space: Space, single: Callable = factor_action) -> SparseMor:
    """Action on a tensor space via the iterated coproduct

    E -> sum K..K E 1..1, F -> sum 1..1 F K^-1..K^-1, K -> K..K.
    """
    kind, arg = gen

    def column(b):
        if kind == "K":
            coeff = ONE
            for k, s in zip(space, b):
                ((_, c),) = single(gen, k, s)
                coeff = coeff * c
            yield b, coeff
            return
        kgen = _k_simple(arg, n, 1 if kind == "E" else -1)
        for pos, (k, s) in enumerate(zip(space, b)):
            for new, c in single(gen, k, s):
                coeff = c
                others = range(pos) if kind == "E" else range(pos + 1, len(space))
                for j in others:
                    ((_, d),) = single(kgen, space[j], b[j])
                    coeff = coeff * d
                yield b[:pos] + (new,) + b[pos + 1:], coeff

    return SparseMor.from_function(n, space, space, column)


def generators(n: int) -> list[tuple]:
    out = []
    for i in range(1, n):
        out.append(("E", i))
        out.append(("F", i))
        out.append(_k_simple(i, n))
    lam = [0] * n
    lam[0] = 1
    out.append(("K", tuple(lam)))
    return out


def generator_action(gen: tuple, n: int, space: Space, vec: Mapping[Basis, LaurentScalar]) -> dict:
    return generator_matrix(gen, n, space).apply(vec)


def is_equivariant(f: SparseMor, gens: Optional[list] = None) -> tuple[bool, Optional[dict]]:
    for gen in gens or generators(f.n):
        lhs = f @ generator_matrix(gen, f.n, f.source)
        rhs = generator_matrix(gen, f.n, f.target) @ f
        if lhs != rhs:
            return False, {"generator": [gen[0], list(gen[1]) if isinstance(gen[1], tuple) else gen[1]], **lhs.first_difference(rhs)}
    return True, None


# tensor-embedding oracle for the closed-form action


@lru_cache(maxsize=None)
def embed_into_vector_powers(k: int, n: int) -> SparseMor:
    """Iterated M': Lambda^k -> (Lambda^1)^{(x) k}."""
    out = SparseMor.identity(n, (k,))
    for j in range(k, 1, -1):
        step = wedge_comultiply(j - 1, 1, n).tensor(identity(n, (1,) * (k - j)))
        out = step @ out
    return out


@lru_cache(maxsize=None)
def project_from_vector_powers(k: int, n: int) -> SparseMor:
    """Iterated M: (Lambda^1)^{(x) k} -> Lambda^k."""
    out = SparseMor.identity(n, (1,) * k)
    for j in range(2, k + 1):
        step = wedge_multiply(j - 1, 1, n).tensor(identity(n, (1,) * (k - j)))
        out = step @ out
    return out


def vector_factor_action(gen: tuple, k: int, s: tuple):
    """The defining action on the vector representation only."""
    if abs(k) != 1 and not (k == 0):
        raise ValueError("oracle acts on vector factors only")
    return factor_action(gen, k, s)


def oracle_generator_matrix(gen: tuple, k: int, n: int) -> SparseMor:
    """Embed, act on (Lambda^1)^{(x) k} by the coproduct, project, divide by [k]!."""
    if k <= 1:
        return generator_matrix(gen, n, (k,), vector_factor_action)
    inner = generator_matrix(gen, n, (1,) * k, vector_factor_action)
    total = project_from_vector_powers(k, n) @ inner @ embed_into_vector_powers(k, n)
    return total.scaled(q_factorial(k).inverse())


# inner products and adjoints


def factor_norm(n: int, k: int, s: tuple) -> LaurentScalar:
    """<x_S, x_S> = q^{sum S}; the dual basis uses q^{-(2 rho, [e_S]) - sum S}."""
    if k >= 0:
        return q_power(sum(s))
    return q_power(-two_rho_pairing(n, s) - sum(s))


def basis_norm(n: int, space: Space, b: Basis) -> LaurentScalar:
    out = ONE
    for k, s in zip(space, b):
        out = out * factor_norm(n, k, s)
    return out


def inner_product(n: int, space: Space, a: Mapping[Basis, LaurentScalar], b: Mapping[Basis, LaurentScalar]) -> LaurentScalar:
    total = ZERO
    for key, c in a.items():
        d = b.get(key)
        if d is not None:
            total = total + c * d * basis_norm(n, space, key)
    return total


def adjoint(f: SparseMor) -> SparseMor:
    """The transpose with respect to the diagonal inner products on source and target."""
    cols: dict = {}
    for b, col in f.columns.items():
        nb = basis_norm(f.n, f.source, b)
        for t, c in col.items():
            cols.setdefault(t, {})[b] = c * basis_norm(f.n, f.target, t) / nb
    return SparseMor(f.n, f.target, f.source, cols)


def star_matrix(gen: tuple, n: int, space: Space) -> SparseMor:
    """Matrix of g* with E_i* = K_i F_i, F_i* = E_i K_i^{-1}, K* = K."""
    kind, arg = gen
    if kind == "K":
        return generator_matrix(gen, n, space)
    if kind == "E":
        return generator_matrix(_k_simple(arg, n), n, space) @ generator_matrix(("F", arg), n, space)
    return generator_matrix(("E", arg), n, space) @ generator_matrix(_k_simple(arg, n, -1), n, space)


# relation suite

RELATIONS = (
    "conjugation1",
    "conjugation2",
    "rotation",
    "associativityM",
    "associativityMprime",
    "bubble",
    "flipN",
    "squareSwitch",
)


def _fits(n: int, *sizes: int) -> bool:
    return all(0 <= k <= n for k in sizes)


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def relation_sides(relation: str, params: Sequence[int], n: int) -> tuple[SparseMor, SparseMor]:
    """Both sides of a relation as morphisms of the same type."""
    M, Mp, I = wedge_multiply, wedge_comultiply, identity
    if relation == "conjugation1":
        (k,) = params
        lhs = eval_coev("epsMinus", k, n).tensor(I(n, (k,))) @ I(n, (k,)).tensor(eval_coev("etaPlus", k, n))
        return lhs, I(n, (k,))
    if relation == "conjugation2":
        (k,) = params
        lhs = I(n, (k,)).tensor(eval_coev("epsPlus", k, n)) @ eval_coev("etaMinus", k, n).tensor(I(n, (k,)))
        return lhs, I(n, (k,))
    if relation == "rotation":
        (k,) = params
        j = n - k
        lhs = M(k, j, n).tensor(I(n, (-j,))) @ I(n, (k,)).tensor(eval_coev("etaMinus", j, n))
        rhs = I(n, (-j,)).tensor(M(j, k, n)) @ eval_coev("etaPlus", j, n).tensor(I(n, (k,)))
        return lhs.collapse_top(0), rhs.collapse_top(1).scaled(_sign(k * j))
    if relation == "associativityM":
        k, l, m = params
        lhs = M(k, l + m, n) @ I(n, (k,)).tensor(M(l, m, n))
        rhs = M(k + l, m, n) @ M(k, l, n).tensor(I(n, (m,)))
        return lhs, rhs
    if relation == "associativityMprime":
        k, l, m = params
        lhs = I(n, (k,)).tensor(Mp(l, m, n)) @ Mp(k, l + m, n)
        rhs = Mp(k, l, n).tensor(I(n, (m,))) @ Mp(k + l, m, n)
        return lhs, rhs
    if relation == "bubble":
        k, l = params
        return M(k, l, n) @ Mp(k, l, n), I(n, (k + l,)).scaled(q_binomial(k + l, k))
    if relation == "flipN":
        # the right-hand comultiplication must split off size l to type-check
        k, l = params
        lhs = M(n - k, k, n).tensor(I(n, (l,))) @ I(n, (n - k,)).tensor(Mp(k, l, n))
        rhs = I(n, (l,)).tensor(M(n - k - l, k + l, n)) @ Mp(l, n - k - l, n).tensor(I(n, (k + l,)))
        return lhs.collapse_top(0), rhs.collapse_top(1).scaled(_sign(l * (n - l)))
    if relation == "squareSwitch":
        k, l, r, s = params
        lhs = (
            I(n, (l + s - r,)).tensor(M(r, k - s, n))
            @ (Mp(l + s - r, r, n) @ M(l, s, n)).tensor(I(n, (k - s,)))
            @ I(n, (l,)).tensor(Mp(s, k - s, n))
        )
        rhs = SparseMor(n, (l, k), (l + s - r, k - s + r), {})
        for t in range(0, min(r, s) + 1):
            if not _fits(n, l - r + t, r - t, s - t, k + r - t):
                continue
            term = (
                M(l - r + t, s - t, n).tensor(I(n, (k - s + r,)))
                @ I(n, (l - r + t,)).tensor(Mp(s - t, k - s + r, n) @ M(r - t, k, n))
                @ Mp(l - r + t, r - t, n).tensor(I(n, (k,)))
            )
            rhs = rhs + term.scaled(q_binomial(k - l + r - s, t))
        return lhs, rhs
    raise ValueError(f"unknown relation {relation!r}")


def admissible_params(relation: str, n: int, max_size: Optional[int] = None) -> list[tuple]:
    top = n if max_size is None else min(n, max_size)
    rng = range(0, top + 1)
    if relation in ("conjugation1", "conjugation2"):
        return [(k,) for k in range(1, top + 1)]
    if relation == "rotation":
        return [(k,) for k in range(0, min(n - 1, top) + 1)]
    if relation in ("associativityM", "associativityMprime"):
        return [(k, l, m) for k in rng for l in rng for m in rng if k + l + m <= n]
    if relation == "bubble":
        return [(k, l) for k in rng for l in rng if k + l <= n]
    if relation == "flipN":
        return [(k, l) for k in rng for l in rng if k + l <= n]
    if relation == "squareSwitch":
        return [
            (k, l, r, s)
            for k in rng
            for l in rng
            for r in rng
            for s in range(0, k + 1)
            if l + s <= n and r <= l + s and k - s + r <= n
        ]
    raise ValueError(f"unknown relation {relation!r}")


def verify_relation(relation: str, params: Sequence[int], n: int) -> dict:
    lhs, rhs = relation_sides(relation, tuple(params), n)
    if (lhs.source, lhs.target) != (rhs.source, rhs.target):
        raise TypeMismatch(f"{relation}{tuple(params)}: {lhs.source}->{lhs.target} vs {rhs.source}->{rhs.target}")
    ok = lhs == rhs
    return {
        "relation": relation,
        "params": list(params),
        "n": n,
        "ok": ok,
        "witness": None if ok else lhs.first_difference(rhs),
    }


def verify_suite(ns: Iterable[int], relations: Optional[Iterable[str]] = None, max_size: Optional[int] = None, workers: int = 1) -> list[dict]:
    jobs = [
        (rel, p, n)
        for n in ns
        for rel in (relations or RELATIONS)
        for p in admissible_params(rel, n, max_size)
    ]
    if workers <= 1:
        return [verify_relation(*job) for job in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_verify_job, jobs, chunksize=8))


def _verify_job(job):
    return verify_relation(*job)

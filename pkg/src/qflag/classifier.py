"""Scalar systems gamma(S, T; lambda) for sl_n: construction, axioms, classification.

Weights are integer e-vectors of length n taken modulo (1, ..., 1); they are
stored normalized so that the last coordinate is 0.  Subsets are sorted
tuples of indices in 1..n.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .qscalar import ONE, ZERO, LaurentScalar, ProjParam, ZeroDenominator, as_scalar, bracket_ratio, monomial_lattice_test, parse_scalar, q_integer, serialize_scalar
from .rootdata import RootSystem, ToricPoint

MODES = ("quantum", "classical")


class NotRegular(ValueError):
    pass


class NotMultiplicative(ValueError):
    pass


class AxiomFailure(ValueError):
    pass


class InconsistentSequence(ValueError):
    pass


class RecurrenceViolated(ValueError):
    pass


class InconsistentSingletons(ValueError):
    pass


Weight = tuple
Subset = tuple


def normalize(lam: Iterable[int]) -> Weight:
    lam = tuple(int(c) for c in lam)
    return tuple(c - lam[-1] for c in lam)


def shift(lam: Weight, subset: Iterable[int], sign: int = 1) -> Weight:
    out = list(lam)
    for i in subset:
        out[i - 1] += sign
    return normalize(out)


def box_window(n: int, radius: int) -> frozenset:
    """Normalized weights whose first n - 1 coordinates lie in [-radius, radius]."""
    return frozenset(c + (0,) for c in itertools.product(range(-radius, radius + 1), repeat=n - 1))


def subset_pairs(n: int) -> list[tuple[Subset, Subset]]:
    out = []
    for labels in itertools.product((0, 1, 2), repeat=n):
        s = tuple(i + 1 for i, c in enumerate(labels) if c == 1)
        t = tuple(i + 1 for i, c in enumerate(labels) if c == 2)
        if s and t:
            out.append((s, t))
    return sorted(out)


def _two(mode: str) -> LaurentScalar:
    return q_integer(2) if mode == "quantum" else as_scalar(2)


def _three(mode: str) -> LaurentScalar:
    return q_integer(3) if mode == "quantum" else as_scalar(3)


@dataclass
class ScalarSystem:
    n: int
    window: frozenset
    entries: dict = field(default_factory=dict)
    mode: str = "quantum"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    def __call__(self, s: Iterable[int], t: Iterable[int], lam: Iterable[int]) -> Optional[LaurentScalar]:
        return self.entries.get((tuple(sorted(s)), tuple(sorted(t)), normalize(lam)))

    def __eq__(self, other):
        return (
            isinstance(other, ScalarSystem)
            and (self.n, self.mode, self.window) == (other.n, other.mode, other.window)
            and self.entries == other.entries
        )

    def singletons(self) -> dict:
        return {(s[0], t[0], lam): v for (s, t, lam), v in self.entries.items() if len(s) == len(t) == 1}

    def first_difference(self, other: "ScalarSystem") -> Optional[dict]:
        for key in sorted(set(self.entries) | set(other.entries)):
            a, b = self.entries.get(key), other.entries.get(key)
            if a != b:
                s, t, lam = key
                return {"S": list(s), "T": list(t), "lambda": list(lam), "lhs": str(a), "rhs": str(b)}
        return None

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "entries": [
                {"S": list(s), "T": list(t), "lambda": list(lam), "value": serialize_scalar(v)}
                for (s, t, lam), v in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ScalarSystem":
        n = int(data["n"])
        entries, window = {}, set()
        for item in data["entries"]:
            lam = normalize(item["lambda"])
            if len(lam) != n:
                raise ValueError(f"weight {item['lambda']} does not have length {n}")
            key = (tuple(sorted(int(i) for i in item["S"])), tuple(sorted(int(i) for i in item["T"])), lam)
            value = parse_scalar(str(item["value"]))
            if key in entries and entries[key] != value:
                raise ValueError(f"conflicting values for {key}")
            entries[key] = value
            window.add(lam)
        return cls(n, frozenset(window), entries, data.get("mode", "quantum"))


# the parameter behind a scalar system


class AdditivePoint:
    """Classical parameters x_{ij} in P^1 with x_{ij} + x_{jk} = x_{ik}."""

    def __init__(self, n: int, values: Mapping[tuple, ProjParam]):
        self.n = n
        full = {}
        for (i, j), v in values.items():
            full[(i, j)] = v
            full[(j, i)] = ProjParam(-v.x, v.y)
        missing = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j and (i, j) not in full]
        if missing:
            raise ValueError(f"no value for pairs {missing}")
        self.values = full

    @classmethod
    def from_simple(cls, values: Sequence) -> "AdditivePoint":
        n = len(values) + 1
        out = {}
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                out[(i, j)] = ProjParam(sum((as_scalar(v) for v in values[i - 1:j - 1]), ZERO), ONE)
        return cls(n, out)

    def __getitem__(self, pair) -> ProjParam:
        return self.values[tuple(pair)]

    def __eq__(self, other):
        return isinstance(other, AdditivePoint) and self.values == other.values

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [
                {"i": i, "j": j, "x": str(v.x), "y": str(v.y)} for (i, j), v in sorted(self.values.items()) if i < j
            ],
        }


def _pair_param(chi, i: int, j: int) -> ProjParam:
    if isinstance(chi, AdditivePoint):
        return chi[(i, j)]
    return chi[chi.system.root_e(i, j)]


def _singleton_value(chi, mode: str, i: int, j: int, ell: int) -> LaurentScalar:
    """[ell - 1; x]/[ell; x] (quantum) or (x + ell - 1)/(x + ell) (classical), x = x_{ij}."""
    p = _pair_param(chi, i, j)
    if mode == "quantum":
        return bracket_ratio(ell - 1, ell, p)
    den = p.x + p.y * ell
    if den.is_zero():
        raise ZeroDenominator(f"x_{i}{j} + {ell} vanishes")
    return (p.x + p.y * (ell - 1)) / den


def _is_regular_param(p: ProjParam, mode: str) -> bool:
    if mode == "quantum":
        return monomial_lattice_test(p, 1) is None
    if p.y.is_zero():
        return True
    v = p.x / p.y
    return not (v.is_constant() and v.constant_value().denominator == 1)


def _check_regular(chi, n: int, mode: str):
    bad = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if not _is_regular_param(_pair_param(chi, i, j), mode)]
    if bad:
        raise NotRegular(f"parameter is resonant at pairs {bad}")


def _system_rank(chi) -> int:
    if isinstance(chi, AdditivePoint):
        return chi.n
    rs = chi.system
    if rs.kind != "A":
        raise ValueError("scalar systems are defined for type A only")
    return rs.rank + 1


def _expand(n: int, window: frozenset, single, mode: str) -> ScalarSystem:
    """gamma(S, T; mu) = prod_{i in S, j in T} gamma(i, j; mu + e_T - e_j); the pairing
    of mu + e_T - e_j with e_i - e_j equals that of mu, so only ell = mu_i - mu_j enters."""
    entries, memo = {}, {}
    for lam in window:
        for s, t in subset_pairs(n):
            sig = tuple((i, j, lam[i - 1] - lam[j - 1]) for i in s for j in t)
            if sig not in memo:
                value = ONE
                for i, j, ell in sig:
                    value = value * single(i, j, ell)
                memo[sig] = value
            entries[(s, t, lam)] = memo[sig]
    return ScalarSystem(n, window, entries, mode)


def gamma_from_toric(chi, window: Iterable, n: Optional[int] = None, mode: Optional[str] = None) -> ScalarSystem:
    """The scalar system attached to a regular parameter; ``chi`` is a ToricPoint on
    A_{n-1} (quantum) or an AdditivePoint (classical)."""
    mode = mode or ("classical" if isinstance(chi, AdditivePoint) else "quantum")
    rank = _system_rank(chi)
    if n is not None and n != rank:
        raise ValueError(f"parameter has rank {rank}, expected {n}")
    if mode == "quantum" and not chi.validate()["ok"]:
        raise NotRegular("toric point fails the cocycle relations")
    _check_regular(chi, rank, mode)
    window = frozenset(normalize(lam) for lam in window)
    cache: dict = {}

    def single(i, j, ell):
        key = (i, j, ell)
        if key not in cache:
            cache[key] = _singleton_value(chi, mode, i, j, ell)
        return cache[key]

    return _expand(rank, window, single, mode)


# axioms


def _instances(n: int):
    idx = range(1, n + 1)
    for s, t in subset_pairs(n):
        yield "i", (s, t)
    for k in range(1, n - 1):
        for s in itertools.combinations(idx, k):
            rest = [x for x in idx if x not in s]
            for i, j in itertools.permutations(rest, 2):
                if i < j:
                    yield "ii", (s, i, j)
                yield "iii", (s, i, j)
    for s, t in subset_pairs(n):
        rest = [x for x in idx if x not in s and x not in t]
        for k in range(1, len(rest) + 1):
            for u in itertools.combinations(rest, k):
                yield "iv", (s, t, u)
    for i, j in itertools.combinations(idx, 2):
        yield "v", (i, j)
    for i, j, k in itertools.combinations(idx, 3):
        yield "vi", (i, j, k)


def _u(*parts) -> Subset:
    out = set()
    for p in parts:
        out |= set(p) if isinstance(p, tuple) else {p}
    return tuple(sorted(out))


def _axiom_terms(axiom: str, data, lam: Weight, mode: str):
    """Return (lhs, rhs) as lists of products, each product a list of (S, T, weight)."""
    if axiom == "i":
        s, t = data
        return [[(s, t, lam), (t, s, shift(lam, s, -1))]], "one"
    if axiom == "ii":
        s, i, j = data
        m = shift(lam, s, -1)
        return [[(_u(s, i), (j,), lam), ((j,), s, m)], [(_u(s, j), (i,), lam), ((i,), s, m)]], "two"
    if axiom == "iii":
        s, i, j = data
        sj = _u(s, j)
        low = shift(lam, sj, -1)
        lhs = [[(s, (i,), lam), ((i,), sj, low)]]
        rhs = [[(_u(s, i), (j,), shift(lam, (j,), -1)), ((j,), s, low)]]
        return lhs, rhs
    if axiom == "iv":
        s, t, u = data
        lhs = [[(s, t, shift(lam, u)), (_u(s, t), u, lam)]]
        rhs = [[(s, _u(t, u), lam), (t, u, lam)]]
        return lhs, rhs
    if axiom == "v":
        i, j = data
        return [[((i,), (j,), lam)], [((j,), (i,), lam)]], "two"
    if axiom == "vi":
        i, j, k = data
        return [[((i,), (j, k), lam)], [((j,), _u(i, k), lam)], [((k,), (i, j), lam)]], "three"
    raise ValueError(axiom)


def _lookup(gamma: ScalarSystem, products) -> Optional[tuple]:
    out = []
    for prod in products:
        row = []
        for s, t, lam in prod:
            entry = gamma.entries.get((s, t, lam))
            if entry is None:
                return None
            row.append(entry)
        out.append(tuple(row))
    return tuple(out)


def _evaluate(rows: tuple) -> LaurentScalar:
    total = ZERO
    for row in rows:
        value = ONE
        for entry in row:
            value = value * entry
        total = total + value
    return total


def verify_scalar_axioms(gamma: ScalarSystem, axioms: Optional[Iterable[str]] = None) -> dict:
    wanted = set(axioms or ("i", "ii", "iii", "iv", "v", "vi"))
    passed, failed, skipped = {}, {}, {}
    violations = []
    constants = {"one": ONE, "two": _two(gamma.mode), "three": _three(gamma.mode)}
    # an instance is decided by the values it reads; equal readings share one evaluation
    memo: dict = {}
    for lam in sorted(gamma.window):
        for axiom, data in _instances(gamma.n):
            if axiom not in wanted:
                continue
            lhs_terms, rhs_terms = _axiom_terms(axiom, data, lam, gamma.mode)
            lhs_rows = _lookup(gamma, lhs_terms)
            rhs_rows = rhs_terms if isinstance(rhs_terms, str) else _lookup(gamma, rhs_terms)
            if lhs_rows is None or rhs_rows is None:
                skipped[axiom] = skipped.get(axiom, 0) + 1
                continue
            key = (lhs_rows, rhs_rows)
            if key not in memo:
                lhs = _evaluate(lhs_rows)
                rhs = constants[rhs_rows] if isinstance(rhs_rows, str) else _evaluate(rhs_rows)
                memo[key] = (lhs == rhs, lhs, rhs)
            ok, lhs, rhs = memo[key]
            if ok:
                passed[axiom] = passed.get(axiom, 0) + 1
            else:
                failed[axiom] = failed.get(axiom, 0) + 1
                violations.append({
                    "axiom": axiom,
                    "data": [list(d) if isinstance(d, tuple) else d for d in data],
                    "lambda": list(lam),
                    "lhs": str(lhs),
                    "rhs": str(rhs),
                })
    return {
        "ok": not violations,
        "passed": passed,
        "failed": failed,
        "skipped": skipped,
        "violations": violations,
    }


# solving for the parameter


def solve_projective(z: Mapping[int, LaurentScalar], mode: str = "quantum") -> ProjParam:
    """x with z_n = [n-1; x]/[n; x] (quantum) or (x + n - 1)/(x + n) (classical)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not z:
        raise InconsistentSequence("no samples")
    z = {int(k): as_scalar(v) for k, v in z.items()}
    two = _two(mode)
    for k in sorted(z):
        if k + 1 in z:
            if z[k + 1].is_zero() or z[k] + z[k + 1].inverse() != two:
                raise RecurrenceViolated(f"z_{k} + 1/z_{k + 1} != {two}")
    k0 = min(z)
    x = _solve_one(k0, z[k0], mode)
    for k, v in z.items():
        try:
            back = _singleton_value_param(x, mode, k)
        except ZeroDenominator:
            back = None
        if back != v:
            raise InconsistentSequence(f"sample z_{k} = {v} disagrees with x = {x} from z_{k0}")
    return x


def _solve_one(k: int, zk: LaurentScalar, mode: str) -> ProjParam:
    if mode == "quantum":
        from .qscalar import q_power

        return ProjParam(q_power(1 - k) - zk * q_power(-k), q_power(k - 1) - zk * q_power(k))
    # z (x + k) = x + k - 1
    return ProjParam(zk * (-k) + (k - 1), zk - 1)


def _singleton_value_param(x: ProjParam, mode: str, ell: int) -> LaurentScalar:
    if mode == "quantum":
        return bracket_ratio(ell - 1, ell, x)
    den = x.x + x.y * ell
    if den.is_zero():
        raise ZeroDenominator("x + ell vanishes")
    return (x.x + x.y * (ell - 1)) / den


def is_regular_parameter(x: ProjParam, mode: str = "quantum") -> bool:
    return _is_regular_param(x, mode)


def _pair_sequence(gamma: ScalarSystem, i: int, j: int) -> dict:
    """ell -> gamma(i, j; lambda) over the window, ell = (lambda, e_i - e_j).  Distinct
    lambda with equal ell must agree."""
    seq: dict = {}
    for lam in sorted(gamma.window):
        v = gamma.entries.get(((i,), (j,), lam))
        if v is None:
            continue
        ell = lam[i - 1] - lam[j - 1]
        if ell in seq and seq[ell] != v:
            raise InconsistentSequence(f"gamma({i},{j}; .) is not constant on (lambda, e_{i} - e_{j}) = {ell}")
        seq[ell] = v
    return seq


def classify(gamma: ScalarSystem, check_axioms: bool = True):
    """Recover the parameter of a scalar system and a certificate of the checks."""
    n, mode = gamma.n, gamma.mode
    certificate = {"mode": mode, "checks": []}
    if check_axioms:
        report = verify_scalar_axioms(gamma)
        certificate["axioms"] = {k: report[k] for k in ("passed", "failed", "skipped")}
        if not report["ok"]:
            v = report["violations"][0]
            raise AxiomFailure(f"axiom ({v['axiom']}) fails at data {v['data']}, lambda {v['lambda']}")
    x = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            seq = _pair_sequence(gamma, i, j)
            try:
                x[(i, j)] = solve_projective(seq, mode)
            except (InconsistentSequence, RecurrenceViolated) as exc:
                raise AxiomFailure(f"pair ({i}, {j}): {exc}") from exc
            if not _is_regular_param(x[(i, j)], mode):
                raise NotRegular(f"x_{i}{j} = {x[(i, j)]} is resonant")
            certificate["checks"].append({"pair": [i, j], "x": str(x[(i, j)]), "samples": len(seq), "regular": True})
    for i, j, k in itertools.combinations(range(1, n + 1), 3):
        a, b, c = x[(i, j)], x[(j, k)], x[(i, k)]
        if mode == "quantum":
            ok = a.x * b.x * c.y == a.y * b.y * c.x
        else:
            ok = (a.x * b.y + b.x * a.y) * c.y == c.x * a.y * b.y
        certificate["checks"].append({"triple": [i, j, k], "multiplicative": ok})
        if not ok:
            raise NotMultiplicative(f"x_{i}{j} x_{j}{k} != x_{i}{k} for the triple ({i}, {j}, {k})")
    if mode == "quantum":
        rs = RootSystem("A", n - 1)
        point = ToricPoint(rs, {rs.root_e(i, j): v for (i, j), v in x.items()})
    else:
        point = AdditivePoint(n, x)
    rebuilt = gamma_from_toric(point, gamma.window, n, mode)
    diff = rebuilt.first_difference(gamma)
    certificate["reconstruction"] = diff is None
    if diff is not None:
        raise AxiomFailure(f"rebuilt system differs at {diff}")
    certificate["x"] = {f"{i},{j}": str(v) for (i, j), v in x.items()}
    return point, certificate


def expand_gamma(singletons: Mapping, window: Iterable, n: int, mode: str = "quantum") -> ScalarSystem:
    """Extend singleton data (i, j, lambda) -> value to all (S, T) by the product formula."""
    table: dict = {}
    for (i, j, lam), v in singletons.items():
        lam = normalize(lam)
        key = (i, j, lam[i - 1] - lam[j - 1])
        v = as_scalar(v)
        if key in table and table[key] != v:
            raise InconsistentSingletons(f"gamma({i},{j}; .) differs for equal (lambda, e_i - e_j) = {key[2]}")
        table[key] = v
    two = _two(mode)
    for (i, j, ell), v in table.items():
        if v.is_zero():
            raise InconsistentSingletons(f"gamma({i},{j}) vanishes at ell = {ell}")
        other = table.get((j, i, -ell))
        if other is not None and v + other != two:
            raise InconsistentSingletons(f"gamma({i},{j}) + gamma({j},{i}) != {two} at ell = {ell}")
    window = frozenset(normalize(lam) for lam in window)

    def single(i, j, ell):
        try:
            return table[(i, j, ell)]
        except KeyError:
            raise InconsistentSingletons(f"no singleton value for ({i}, {j}) at ell = {ell}") from None

    out = _expand(n, window, single, mode)
    report = verify_scalar_axioms(out, ("vi",))
    if not report["ok"]:
        v = report["violations"][0]
        raise InconsistentSingletons(f"triple sum fails at {v['data']}, lambda {v['lambda']}")
    return out


# random parameters


def random_regular_toric(rank: int, rng: random.Random, monomial: bool) -> ToricPoint:
    """A random character on the simple roots of A_rank; resonant draws are redrawn."""
    from .qscalar import q_power

    rs = RootSystem("A", rank)
    while True:
        values = []
        for _ in range(rank):
            if monomial:
                c = rng.choice([1, -1, 2, -3, Fraction(1, 2)])
                values.append(q_power(rng.randint(-4, 4)) * c)
            else:
                a = rng.randint(-3, 3) or 1
                b = rng.randint(-5, 5)
                values.append(q_power(rng.randint(-3, 3)) * a + b)
        if any(as_scalar(v).is_zero() for v in values):
            continue
        chi = ToricPoint.from_character(rs, values)
        if chi.is_regular():
            return chi

"""Poisson parameter families phi_alpha: membership, conversion to toric points, normalization."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .qscalar import ONE, LaurentScalar, ProjParam, as_scalar, monomial_lattice_test, parse_scalar
from .rootdata import RootSystem, ToricPoint, WeylElement, iter_root_pairs, vector_neg

SPACES = ("fssorb", "circ", "quot", "zero", "zeroCirc")


class ModeMismatch(ValueError):
    pass


class NotMember(ValueError):
    pass


class NonFinite(ValueError):
    def __init__(self, roots):
        self.roots = roots
        super().__init__(f"x = y at roots {roots}")


class NotQuot(ValueError):
    pass


class PhiParam:
    """Values phi_alpha on every root, antisymmetric under alpha -> -alpha."""

    def __init__(self, system: RootSystem, entries: Mapping, mode: str = "quantum"):
        if mode not in ("quantum", "classical"):
            raise ValueError(f"unknown mode {mode!r}")
        self.system = system
        self.mode = mode
        full = {}
        for root, value in entries.items():
            root = tuple(root)
            if root not in system.root_set:
                raise ValueError(f"{root} is not a root of {system}")
            full[root] = as_scalar(value)
        for root in list(full):
            full.setdefault(vector_neg(root), -full[root])
        missing = [r for r in system.roots if r not in full]
        if missing:
            raise ValueError(f"phi has no value at roots {missing}")
        self.entries = full

    def __getitem__(self, root):
        return self.entries[tuple(root)]

    def __eq__(self, other):
        return (
            isinstance(other, PhiParam)
            and self.system == other.system
            and self.mode == other.mode
            and self.entries == other.entries
        )

    def __repr__(self):
        body = ", ".join(f"{r}: {self.entries[r]}" for r in self.system.positive_roots)
        return f"PhiParam({self.system.kind}{self.system.rank}, {self.mode}, {{{body}}})"

    @classmethod
    def constant(cls, system: RootSystem, value, mode: str = "quantum") -> "PhiParam":
        return cls(system, {a: value for a in system.positive_roots}, mode)

    def to_json(self) -> dict:
        return {
            "type": self.system.kind,
            "rank": self.system.rank,
            "mode": self.mode,
            "entries": [{"root": list(r), "value": str(self.entries[r])} for r in self.system.positive_roots],
        }

    @classmethod
    def from_json(cls, data: Mapping, system: Optional[RootSystem] = None) -> "PhiParam":
        items = data["entries"]
        if system is None:
            if "type" in data:
                system = RootSystem(data["type"], int(data["rank"]))
            else:
                system = RootSystem("A", len(items[0]["root"]))
        entries = {}
        for item in items:
            root = tuple(int(c) for c in item["root"])
            entries[root] = parse_scalar(str(item["value"]))
        positive = {r: v for r, v in entries.items() if system.is_positive(r)}
        phi = cls(system, positive or entries, data.get("mode", "quantum"))
        for r, v in entries.items():
            if phi.entries[r] != v:
                raise ValueError(f"value at {r} contradicts antisymmetry")
        return phi


def _relation_violations(phi: PhiParam, classical: bool) -> tuple[int, list]:
    checked, violations = 0, []
    for a in phi.system.roots:
        checked += 1
        if phi.entries[vector_neg(a)] != -phi.entries[a]:
            violations.append({"relation": "antisymmetry", "roots": [list(a)]})
    for a, b, c in iter_root_pairs(phi.system):
        checked += 1
        pa, pb, pc = phi.entries[a], phi.entries[b], phi.entries[c]
        lhs = pa * pb if classical else pa * pb + 1
        if lhs != pc * (pa + pb):
            violations.append({"relation": "classical" if classical else "quantum", "roots": [list(a), list(b), list(c)]})
    return checked, violations


def check_membership(phi: PhiParam, space: str) -> dict:
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}")
    rs = phi.system
    classical = space in ("zero", "zeroCirc")
    if space == "quot":
        bad = [list(a) for a in rs.positive_roots if not phi.entries[a].is_constant()]
        if bad:
            raise ModeMismatch(f"quot membership needs constant entries; non-constant at {bad}")
    checked, violations = _relation_violations(phi, classical)
    for alpha in rs.positive_roots:
        value = phi.entries[alpha]
        d = rs.root_length(alpha)
        if space == "circ":
            checked += 1
            m = monomial_lattice_test(ProjParam(value + 1, value - 1), d)
            if m is not None:
                violations.append({"relation": "circ", "roots": [list(alpha)], "exponent": m})
        elif space == "quot":
            checked += 1
            if abs(value.constant_value()) > 1:
                violations.append({"relation": "bound", "roots": [list(alpha)], "value": str(value)})
        elif space == "zeroCirc" and value.is_constant() and not value.is_zero():
            checked += 1
            inv = 1 / (value.constant_value() * d)
            if inv.denominator == 1:
                violations.append({"relation": "zeroCirc", "roots": [list(alpha)], "n": int(inv)})
    return {"space": space, "ok": not violations, "checked": checked, "violations": violations}


def phi_to_toric(phi: PhiParam) -> ToricPoint:
    """chi_{2 alpha} = [phi_alpha + 1 : phi_alpha - 1]."""
    report = check_membership(phi, "fssorb")
    if not report["ok"]:
        raise NotMember(f"phi is not in the quantum parameter space: {report['violations'][:3]}")
    return ToricPoint(phi.system, {a: ProjParam(v + 1, v - 1) for a, v in phi.entries.items()})


def toric_to_phi(chi: ToricPoint) -> PhiParam:
    """phi_alpha = (x + y) / (x - y) for chi_{2 alpha} = [x : y]."""
    entries, bad = {}, []
    for alpha in chi.system.positive_roots:
        p = chi.entries[alpha]
        if p.x == p.y:
            bad.append(list(alpha))
            continue
        entries[alpha] = (p.x + p.y) / (p.x - p.y)
    if bad:
        raise NonFinite(bad)
    return PhiParam(chi.system, entries)


def character_phi(system: RootSystem, values: Sequence) -> PhiParam:
    """phi_alpha = (a_alpha + 1)/(a_alpha - 1) for a multiplicative character a."""
    return toric_to_phi(ToricPoint.from_character(system, values))


def _components(system: RootSystem, vertices: set[int]) -> list[set[int]]:
    left, comps = set(vertices), []
    while left:
        start = left.pop()
        comp, stack = {start}, [start]
        while stack:
            i = stack.pop()
            for j in list(left):
                if system.cartan[i][j] != 0:
                    left.discard(j)
                    comp.add(j)
                    stack.append(j)
        comps.append(comp)
    return comps


def component_report(phi: PhiParam, levi: frozenset = frozenset()) -> list[dict]:
    """Audit that each component of {simple e outside levi : phi_e != 1} u levi
    holds at most one simple root outside levi, with coefficient 1 in the
    component's highest root."""
    rs = phi.system
    chosen = {i for i in range(rs.rank) if i in levi or phi.entries[rs.simple_roots[i]] != 1}
    out = []
    for comp in _components(rs, chosen):
        support = [r for r in rs.positive_roots if all(r[k] == 0 for k in range(rs.rank) if k not in comp)]
        top = max(support, key=lambda r: (sum(r), r))
        outside = sorted(i for i in comp if i not in levi)
        ok = len(outside) <= 1 and all(top[i] == 1 for i in outside)
        out.append({"component": sorted(comp), "outside": outside, "highestRoot": list(top), "ok": ok})
    return out


def normalize_quotient(phi: PhiParam) -> tuple[WeylElement, PhiParam, dict]:
    """Return w and phi'_alpha = phi_{w(alpha)} with phi' >= 0 on positive roots."""
    try:
        report = check_membership(phi, "quot")
    except ModeMismatch as exc:
        raise NotQuot(str(exc)) from exc
    if not report["ok"]:
        raise NotQuot(f"phi is not of quotient type: {report['violations'][:3]}")
    rs = phi.system
    signs = {}
    for alpha in rs.positive_roots:
        v = phi.entries[alpha].constant_value()
        signs[alpha] = (v > 0) - (v < 0)
    w, positive = rs.positive_system_from_parabolic(signs)
    new = PhiParam(rs, {a: phi.entries[w.act(a)] for a in rs.positive_roots}, phi.mode)
    comps = component_report(new)
    audit = {
        "word": list(w.word),
        "nonnegative": all(new.entries[a].constant_value() >= 0 for a in rs.positive_roots),
        "components": comps,
        "componentsOk": all(c["ok"] for c in comps),
    }
    return w, new, audit

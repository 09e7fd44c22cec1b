"""Exact algebra of the dihedral groups.

An element of the order-``2n`` group is written ``s^j r^k`` with ``j`` in
{0, 1} and ``k`` reduced modulo ``n``: ``r`` generates the ``n`` rotations,
``s`` a reflection.  Composition follows the rewriting identities

    r^i r^j = r^(i+j)        r^i s r^j = s r^(j-i)
    s r^i r^j = s r^(i+j)    s r^i s r^j = r^(j-i)

so products never leave the canonical ``s^j r^k`` form.  For the square
(n = 4) a faithful representation by signed 2x2 integer matrices is
provided; the matrices act on mathematical plane coordinates (x rightward,
y upward, origin at the region center) and rotations are counterclockwise.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DomainError, UnsupportedOrderError

__all__ = [
    "GroupElement",
    "TransformMatrix",
    "identity",
    "rotation",
    "reflection",
    "compose",
    "inverse",
    "power",
    "elements",
    "element_name",
    "parse_element",
    "matrix_of",
    "cayley_table",
    "cayley_csv",
    "verify_group_axioms",
    "AxiomCheck",
    "AxiomViolation",
    "AxiomReport",
    "axiom_report_csv",
]


@dataclass(frozen=True)
class GroupElement:
    """One element ``s^j r^k`` of the dihedral group of order ``2n``.

    ``rotation_k`` is always stored reduced modulo ``order_n``; two elements
    are equal iff all three fields are equal.
    """

    order_n: int
    reflection_j: int
    rotation_k: int

    def __post_init__(self):
        if self.order_n < 1:
            raise DomainError(f"dihedral order must be >= 1, got {self.order_n}")
        if self.reflection_j not in (0, 1):
            raise DomainError(f"reflection exponent must be 0 or 1, got {self.reflection_j}")
        object.__setattr__(self, "rotation_k", self.rotation_k % self.order_n)

    @property
    def is_identity(self) -> bool:
        return self.reflection_j == 0 and self.rotation_k == 0

    @property
    def name(self) -> str:
        return element_name(self)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def __repr__(self) -> str:
        return f"GroupElement(D{self.order_n}, {self.name})"


def identity(n: int) -> GroupElement:
    return GroupElement(n, 0, 0)


def rotation(n: int, k: int = 1) -> GroupElement:
    return GroupElement(n, 0, k)


def reflection(n: int, k: int = 0) -> GroupElement:
    return GroupElement(n, 1, k)


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Product ``a * b``, reduced to canonical form.

    Matrix order matters: ``matrix_of(compose(a, b))`` equals
    ``matrix_of(a) @ matrix_of(b)``.
    """
    if a.order_n != b.order_n:
        raise DomainError(
            f"cannot compose elements of different orders: D{a.order_n} and D{b.order_n}"
        )
    if b.reflection_j:
        k = b.rotation_k - a.rotation_k
    else:
        k = a.rotation_k + b.rotation_k
    return GroupElement(a.order_n, a.reflection_j ^ b.reflection_j, k % a.order_n)


def inverse(g: GroupElement) -> GroupElement:
    """Reflections are involutions; a rotation by k inverts to n - k."""
    if g.reflection_j:
        return g
    return GroupElement(g.order_n, 0, -g.rotation_k % g.order_n)


def power(g: GroupElement, m: int) -> GroupElement:
    """m-fold composition of ``g``; m may be zero or negative."""
    if m < 0:
        return power(inverse(g), -m)
    out = identity(g.order_n)
    for _ in range(m):
        out = compose(out, g)
    return out


def elements(n: int) -> list[GroupElement]:
    """All 2n elements, in canonical order: rotations by increasing k, then
    reflections by increasing k."""
    if n < 1:
        raise DomainError(f"dihedral order must be >= 1, got {n}")
    rots = [GroupElement(n, 0, k) for k in range(n)]
    refs = [GroupElement(n, 1, k) for k in range(n)]
    return rots + refs


def element_name(g: GroupElement) -> str:
    """Canonical name: e, r, r2, ... and s, sr, sr2, ..."""
    if g.reflection_j == 0:
        if g.rotation_k == 0:
            return "e"
        if g.rotation_k == 1:
            return "r"
        return f"r{g.rotation_k}"
    if g.rotation_k == 0:
        return "s"
    if g.rotation_k == 1:
        return "sr"
    return f"sr{g.rotation_k}"


def parse_element(n: int, name: str) -> GroupElement:
    """Inverse of :func:`element_name`; for n = 4 the matrix labels
    (R0..R3, V, H, D1, D2) are accepted as aliases, case-insensitively."""
    if n < 1:
        raise DomainError(f"dihedral order must be >= 1, got {n}")
    if n == 4:
        alias = _D4_LABEL_TO_JK.get(name.upper())
        if alias is not None:
            return GroupElement(4, *alias)
    text = name.strip()
    j = 0
    if text.startswith("s"):
        j = 1
        text = text[1:]
    if text == "e" and j == 0:
        return GroupElement(n, 0, 0)
    if text == "":
        if j:
            return GroupElement(n, 1, 0)
        raise DomainError(f"unknown element name {name!r}")
    if text == "r":
        return GroupElement(n, j, 1)
    if text.startswith("r") and text[1:].isdigit():
        return GroupElement(n, j, int(text[1:]))
    raise DomainError(f"unknown element name {name!r}")


@dataclass(frozen=True)
class TransformMatrix:
    """Signed 2x2 integer matrix acting on plane coordinates (y up)."""

    label: str
    entries: tuple[tuple[int, int], tuple[int, int]]

    @property
    def determinant(self) -> int:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def apply(self, p: tuple[float, float]) -> tuple[float, float]:
        (a, b), (c, d) = self.entries
        x, y = p
        return (a * x + b * y, c * x + d * y)

    def multiply(self, other: "TransformMatrix") -> tuple[tuple[int, int], tuple[int, int]]:
        """Raw entries of the matrix product self @ other."""
        (a, b), (c, d) = self.entries
        (e, f), (g, h) = other.entries
        return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


# Rotation k <-> R{k}; reflections follow s=V, sr=D1, sr2=H, sr3=D2, which is
# forced by s acting as the vertical-axis flip and r as the 90-degree
# counterclockwise turn.
_D4_MATRICES: dict[tuple[int, int], TransformMatrix] = {
    (0, 0): TransformMatrix("R0", ((1, 0), (0, 1))),
    (0, 1): TransformMatrix("R1", ((0, -1), (1, 0))),
    (0, 2): TransformMatrix("R2", ((-1, 0), (0, -1))),
    (0, 3): TransformMatrix("R3", ((0, 1), (-1, 0))),
    (1, 0): TransformMatrix("V", ((-1, 0), (0, 1))),
    (1, 1): TransformMatrix("D1", ((0, 1), (1, 0))),
    (1, 2): TransformMatrix("H", ((1, 0), (0, -1))),
    (1, 3): TransformMatrix("D2", ((0, -1), (-1, 0))),
}

_D4_LABEL_TO_JK = {m.label: jk for jk, m in _D4_MATRICES.items()}


def matrix_of(g: GroupElement) -> TransformMatrix:
    """Faithful matrix representation; defined for the square case only."""
    if g.order_n != 4:
        raise UnsupportedOrderError(
            f"matrix representation is defined for D4 only, got D{g.order_n}"
        )
    return _D4_MATRICES[(g.reflection_j, g.rotation_k)]


def cayley_table(n: int) -> list[list[GroupElement]]:
    """table[i][j] = elements(n)[i] * elements(n)[j]."""
    els = elements(n)
    return [[compose(a, b) for b in els] for a in els]


def cayley_csv(n: int) -> str:
    """Plain 2n x 2n CSV of canonical element names, no header."""
    rows = cayley_table(n)
    return "\n".join(",".join(element_name(g) for g in row) for row in rows) + "\n"


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str
    witness: tuple[str, ...]


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class AxiomReport:
    order_n: int
    element_count: int
    associativity_mode: str
    checks: tuple[AxiomCheck, ...]
    violations: tuple[AxiomViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


_EXHAUSTIVE_ASSOC_LIMIT = 8
_ASSOC_SAMPLES = 2000


def verify_group_axioms(n: int) -> AxiomReport:
    """Check closure, identity, inverses, associativity, and the defining
    identities r^n = e, s r^k s = r^(-k), (s r^k)^2 = e.

    Associativity is exhaustive up to n = 8 and sampled (fixed seed) above.
    """
    els = elements(n)
    e = identity(n)
    checks: list[AxiomCheck] = []
    violations: list[AxiomViolation] = []

    def record(name: str, bad: list[AxiomViolation], detail_ok: str) -> None:
        violations.extend(bad)
        if bad:
            witness = ";".join("(" + ",".join(v.witness) + ")" for v in bad[:3])
            checks.append(AxiomCheck(name, False, f"{len(bad)} violations, e.g. {witness}"))
        else:
            checks.append(AxiomCheck(name, True, detail_ok))

    distinct = len(set(els))
    record(
        "element_count",
        [] if distinct == 2 * n else [AxiomViolation("element_count", (str(distinct),))],
        f"{2 * n} distinct elements",
    )

    el_set = set(els)
    bad = [
        AxiomViolation("closure", (a.name, b.name))
        for a in els
        for b in els
        if compose(a, b) not in el_set
    ]
    record("closure", bad, f"{len(els) ** 2} products stay in the group")

    bad = [
        AxiomViolation("identity", (g.name,))
        for g in els
        if compose(e, g) != g or compose(g, e) != g
    ]
    record("identity", bad, "e * g == g * e == g for all elements")

    bad = [
        AxiomViolation("inverse", (g.name,))
        for g in els
        if compose(g, inverse(g)) != e or compose(inverse(g), g) != e
    ]
    record("inverse", bad, "two-sided inverses exist for all elements")

    if n <= _EXHAUSTIVE_ASSOC_LIMIT:
        mode = "exhaustive"
        triples = [(a, b, c) for a in els for b in els for c in els]
    else:
        mode = "sampled"
        rng = random.Random(0)
        triples = [
            (rng.choice(els), rng.choice(els), rng.choice(els))
            for _ in range(_ASSOC_SAMPLES)
        ]
    bad = [
        AxiomViolation("associativity", (a.name, b.name, c.name))
        for a, b, c in triples
        if compose(compose(a, b), c) != compose(a, compose(b, c))
    ]
    record("associativity", bad, f"{mode} over {len(triples)} triples")

    bad = [] if power(rotation(n), n) == e else [AxiomViolation("rotation_order", ("r",))]
    record("rotation_order", bad, "r^n == e")

    bad = [
        AxiomViolation("reflection_involution", (reflection(n, k).name,))
        for k in range(n)
        if compose(reflection(n, k), reflection(n, k)) != e
    ]
    record("reflection_involution", bad, "(s r^k)^2 == e for all k")

    s = reflection(n)
    bad = [
        AxiomViolation("reflection_conjugation", ("s", rotation(n, k).name, "s"))
        for k in range(n)
        if compose(compose(s, rotation(n, k)), s) != rotation(n, -k)
    ]
    record("reflection_conjugation", bad, "s r^k s == r^(-k) for all k")

    return AxiomReport(
        order_n=n,
        element_count=distinct,
        associativity_mode=mode,
        checks=tuple(checks),
        violations=tuple(violations),
    )


def axiom_report_csv(report: AxiomReport) -> str:
    lines = ["check,status,detail"]
    for c in report.checks:
        status = "pass" if c.passed else "fail"
        lines.append(f"{c.name},{status},{c.detail}")
    return "\n".join(lines) + "\n"

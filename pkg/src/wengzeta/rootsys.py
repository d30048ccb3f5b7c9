"""Irreducible reduced root systems built by closure from a Cartan matrix.

Roots live in simple-root coordinates and coroots in simple-coroot
coordinates, so everything downstream is integer arithmetic: the pairing
<lambda_p, alpha^vee> is a coordinate read and ht(alpha^vee) a coordinate sum.

Simple roots are numbered so that the coroot digit strings and the c_p
constants agree with the published tables (see README for the diagrams):

* A_r, B_r, C_r, D_r: Bourbaki numbering (alpha_r short in B_r, long in C_r,
  alpha_{r-1} and alpha_r form the fork of D_r).
* E_6: chain 1-2-3-4-5 with 6 attached to 3.
* E_7: chain 1-2-3-4-5-6 with 7 attached to 3.
* E_8: chain 1-2-3-4-5-6-7 with 8 attached to 5.
* F_4: chain 1-2-3-4 with alpha_1, alpha_2 short.
* G_2: alpha_1 short, alpha_2 long.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InvalidSpec

SERIES = ("A", "B", "C", "D", "E", "F", "G")

# Classical positive-root counts, used as a construction check.
_POSITIVE_COUNTS = {
    "A": lambda r: r * (r + 1) // 2,
    "B": lambda r: r * r,
    "C": lambda r: r * r,
    "D": lambda r: r * (r - 1),
    "E": lambda r: {6: 36, 7: 63, 8: 120}[r],
    "F": lambda r: 24,
    "G": lambda r: 6,
}


@dataclass(frozen=True)
class RootSystemSpec:
    series: str
    rank: int

    def __post_init__(self):
        s, r = self.series, self.rank
        if s not in SERIES:
            raise InvalidSpec(f"unknown series {s!r}")
        if not isinstance(r, (int, np.integer)) or isinstance(r, bool):
            raise InvalidSpec(f"rank must be an integer, got {r!r}")
        ok = {
            "A": r >= 1,
            # C_2 is admitted alongside B_2 because Sp(4) is one of the
            # numerically scanned cases.
            "B": r >= 2,
            "C": r >= 2,
            "D": r >= 4,
            "E": r in (6, 7, 8),
            "F": r == 4,
            "G": r == 2,
        }[s]
        if not ok:
            raise InvalidSpec(f"rank {r} not allowed for series {s}")

    @property
    def label(self) -> str:
        return f"{self.series}{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "RootSystemSpec":
        text = text.strip().upper()
        if len(text) < 2 or not text[1:].isdigit():
            raise InvalidSpec(f"cannot parse root system label {text!r}")
        return cls(text[0], int(text[1:]))


@dataclass(frozen=True)
class Root:
    index: int
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class Coroot:
    coeffs: tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    @property
    def digits(self) -> str:
        return digit_string(self.coeffs)


def digit_string(coeffs) -> str:
    """Write a nonnegative coefficient vector as a_1...a_r (all entries < 10)."""
    return "".join(str(int(c)) for c in coeffs)


def _dynkin_data(series: str, r: int):
    """Edges (0-based) and squared lengths of the simple roots."""
    chain = [(i, i + 1) for i in range(r - 1)]
    if series == "A":
        return chain, [2] * r
    if series == "B":
        return chain, [4] * (r - 1) + [2]
    if series == "C":
        return chain, [2] * (r - 1) + [4]
    if series == "D":
        return [(i, i + 1) for i in range(r - 2)] + [(r - 3, r - 1)], [2] * r
    if series == "E":
        branch = {6: (2, 5), 7: (2, 6), 8: (4, 7)}[r]
        return [(i, i + 1) for i in range(r - 2)] + [branch], [2] * r
    if series == "F":
        return chain, [2, 2, 4, 4]
    if series == "G":
        return chain, [2, 6]
    raise InvalidSpec(series)


def cartan_matrix(spec: RootSystemSpec):
    """Return (cartan, symmetrizer) with cartan[i][j] = <alpha_j, alpha_i^vee>."""
    r = spec.rank
    edges, lengths = _dynkin_data(spec.series, r)
    gram = [[0] * r for _ in range(r)]
    for i in range(r):
        gram[i][i] = lengths[i]
    for i, j in edges:
        gram[i][j] = gram[j][i] = -max(lengths[i], lengths[j]) // 2
    d = [L // 2 for L in lengths]
    cartan = tuple(tuple(gram[i][j] // d[i] for j in range(r)) for i in range(r))
    return cartan, tuple(d)


def _positive_roots(cartan) -> list[tuple[int, ...]]:
    """All positive roots, generated height by height through simple-root strings."""
    r = len(cartan)
    simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    found = set(simple)
    layer = list(simple)
    out = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(r):
                if beta == simple[i]:
                    continue
                # p = how far down the alpha_i string through beta goes
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in found:
                        p += 1
                    else:
                        break
                pairing = sum(cartan[i][j] * beta[j] for j in range(r))
                if p - pairing > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in found:
                        found.add(up)
                        nxt.append(up)
        out.extend(nxt)
        layer = nxt
    return out


@dataclass(frozen=True)
class RootSystem:
    spec: RootSystemSpec
    cartan: tuple[tuple[int, ...], ...]
    symmetrizer: tuple[int, ...]
    roots: tuple[tuple[int, ...], ...]
    coroots: tuple[tuple[int, ...], ...]
    highest_root_coeffs: tuple[int, ...]
    _index: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def rank(self) -> int:
        return self.spec.rank

    @property
    def n_pos(self) -> int:
        return len(self.roots) // 2

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    @cached_property
    def root_array(self) -> np.ndarray:
        return np.array(self.roots, dtype=np.int64)

    @cached_property
    def coroot_array(self) -> np.ndarray:
        return np.array(self.coroots, dtype=np.int64)

    @cached_property
    def heights(self) -> np.ndarray:
        """ht(alpha^vee) for every root index."""
        return self.coroot_array.sum(axis=1)

    @cached_property
    def simple(self) -> tuple[int, ...]:
        """Root indices of alpha_1..alpha_r."""
        r = self.rank
        return tuple(self._index[tuple(int(i == j) for j in range(r))] for i in range(r))

    @cached_property
    def highest_coroot(self) -> tuple[int, ...]:
        """The coroot of greatest height (the highest root of the dual system)."""
        i = max(range(self.n_pos), key=lambda a: (self.heights[a], self.coroots[a]))
        return self.coroots[i]

    def index_of(self, coeffs) -> int:
        return self._index[tuple(int(c) for c in coeffs)]

    def find(self, coeffs):
        return self._index.get(tuple(int(c) for c in coeffs))

    def neg(self, i: int) -> int:
        return i + self.n_pos if i < self.n_pos else i - self.n_pos

    def is_positive(self, i: int) -> bool:
        return i < self.n_pos

    def root(self, i: int) -> Root:
        return Root(i, self.roots[i])

    def pairing_simple_coroot(self, coeffs, i: int) -> int:
        """<beta, alpha_i^vee> for beta given in simple-root coordinates."""
        return sum(self.cartan[i][j] * coeffs[j] for j in range(self.rank))

    def to_json(self) -> str:
        pos = self.roots[: self.n_pos]
        return json.dumps(
            {
                "series": self.spec.series,
                "rank": self.rank,
                "cartan": [list(row) for row in self.cartan],
                "symmetrizer": list(self.symmetrizer),
                "positive_roots": [digit_string(c) for c in pos],
                "positive_coroots": [digit_string(c) for c in self.coroots[: self.n_pos]],
                "highest_root": digit_string(self.highest_root_coeffs),
            },
            indent=2,
        )


def _coroot(coeffs, d, gram_norm2) -> tuple[int, ...]:
    # alpha^vee = sum_j a_j (d_j / d_alpha) alpha_j^vee with d_alpha = (alpha, alpha)/2
    d_alpha = Fraction(gram_norm2, 2)
    out = []
    for a, dj in zip(coeffs, d):
        v = Fraction(a * dj) / d_alpha
        if v.denominator != 1:
            raise AssertionError("non-integral coroot coordinate")
        out.append(int(v))
    return tuple(out)


def build_root_system(spec: RootSystemSpec) -> RootSystem:
    cartan, d = cartan_matrix(spec)
    r = spec.rank
    pos = _positive_roots(cartan)
    if len(pos) != _POSITIVE_COUNTS[spec.series](r):
        raise AssertionError(f"{spec.label}: got {len(pos)} positive roots")
    pos.sort(key=lambda c: (sum(c), c))
    gram = [[d[i] * cartan[i][j] for j in range(r)] for i in range(r)]

    def norm2(c):
        return sum(c[i] * gram[i][j] * c[j] for i in range(r) for j in range(r))

    pos_co = [_coroot(c, d, norm2(c)) for c in pos]
    roots = tuple(pos) + tuple(tuple(-x for x in c) for c in pos)
    coroots = tuple(pos_co) + tuple(tuple(-x for x in c) for c in pos_co)
    index = {c: i for i, c in enumerate(roots)}
    return RootSystem(
        spec=spec,
        cartan=cartan,
        symmetrizer=d,
        roots=roots,
        coroots=coroots,
        highest_root_coeffs=pos[-1],
        _index=index,
    )


def coroot_of(rs: RootSystem, root_index: int) -> Coroot:
    return Coroot(rs.coroots[root_index])


def height_coroot(rs: RootSystem, root_index: int) -> int:
    return int(sum(rs.coroots[root_index]))


def pairing_fundamental(rs: RootSystem, p: int, root_index: int) -> int:
    """<lambda_p, alpha^vee> for 1-based p."""
    _check_p(rs, p)
    return int(rs.coroots[root_index][p - 1])


def _check_p(rs: RootSystem, p: int) -> None:
    if not 1 <= p <= rs.rank:
        raise InvalidSpec(f"p={p} outside 1..{rs.rank}")


def levi_positive(rs: RootSystem, p: int) -> list[int]:
    """Indices of Phi_p^+, the positive roots with no alpha_p component."""
    _check_p(rs, p)
    return [i for i in range(rs.n_pos) if rs.roots[i][p - 1] == 0]


def rho_and_rho_p(rs: RootSystem, p: int):
    """Half-sums of Phi^+ and Phi_p^+ in simple-root coordinates (Fractions)."""
    r = rs.rank
    rho = [Fraction(0)] * r
    rho_p = [Fraction(0)] * r
    levi = set(levi_positive(rs, p))
    for i in range(rs.n_pos):
        for j, c in enumerate(rs.roots[i]):
            rho[j] += Fraction(c, 2)
            if i in levi:
                rho_p[j] += Fraction(c, 2)
    return tuple(rho), tuple(rho_p)


def fundamental_weight(rs: RootSystem, p: int) -> tuple[Fraction, ...]:
    """lambda_p in simple-root coordinates: solves cartan @ m = e_p."""
    _check_p(rs, p)
    A = [[Fraction(x) for x in row] for row in rs.cartan]
    r = rs.rank
    b = [Fraction(int(i == p - 1)) for i in range(r)]
    # Gauss-Jordan over Q; r <= 8 so this is instant.
    M = [A[i] + [b[i]] for i in range(r)]
    for col in range(r):
        piv = next(i for i in range(col, r) if M[i][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for i in range(r):
            if i != col and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[col])]
    return tuple(M[i][r] for i in range(r))


def all_specs(max_rank: int = 8):
    """Every admissible (series, rank) with rank <= max_rank, in a fixed order."""
    out = []
    for s in SERIES:
        for r in range(1, max_rank + 1):
            try:
                out.append(RootSystemSpec(s, r))
            except InvalidSpec:
                pass
    return out


def brute_force_roots(rs: RootSystem) -> set[tuple[int, ...]]:
    """Orbit of the simple roots under simple reflections (independent check)."""
    r = rs.rank
    frontier = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    seen = set(frontier)
    while frontier:
        nxt = []
        for beta in frontier:
            for i in range(r):
                c = rs.pairing_simple_coroot(beta, i)
                img = list(beta)
                img[i] -= c
                img = tuple(img)
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return seen

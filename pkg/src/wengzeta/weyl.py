"""Weyl group enumeration and the parabolic data attached to a node p.

Elements are stored as permutations of the root table (row ``g`` of
``WeylGroup.perms`` maps root index a to the index of w_g(a)). Ids follow
breadth-first order from the identity, applying generators s_1..s_r in
increasing order on the right, so id 0 is the identity and lengths are
non-decreasing in the id.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapExceeded, NotInFrakWp
from .rootsys import RootSystem, levi_positive

DEFAULT_CAP = 3_000_000

_ORDERS = {
    "A": lambda r: math.factorial(r + 1),
    "B": lambda r: 2**r * math.factorial(r),
    "C": lambda r: 2**r * math.factorial(r),
    "D": lambda r: 2 ** (r - 1) * math.factorial(r),
    "E": lambda r: {6: 51840, 7: 2903040, 8: 696729600}[r],
    "F": lambda r: 1152,
    "G": lambda r: 12,
}


def classical_order(rs: RootSystem) -> int:
    return _ORDERS[rs.spec.series](rs.rank)


def simple_reflection_perms(rs: RootSystem) -> np.ndarray:
    """Row i is the permutation of root indices induced by s_{i+1}."""
    out = np.empty((rs.rank, rs.n_roots), dtype=np.int32)
    for i in range(rs.rank):
        for a, beta in enumerate(rs.roots):
            c = rs.pairing_simple_coroot(beta, i)
            img = list(beta)
            img[i] -= c
            out[i, a] = rs.index_of(img)
    return out


@dataclass
class WeylElement:
    id: int
    perm: np.ndarray
    word: tuple[int, ...]
    length: int


class WeylGroup:
    """All elements of W as root permutations, with parent pointers for words."""

    def __init__(self, rs: RootSystem, perms, parent, gen, lengths):
        self.rs = rs
        self.perms = perms
        self.parent = parent
        self.gen = gen
        self.lengths = lengths
        simple = np.array(rs.simple)
        keys = perms[:, simple]
        self._ids = {keys[g].tobytes(): g for g in range(len(perms))}
        self._simple = simple
        self.order = len(perms)
        self.w0 = int(np.argmax(lengths))
        self.identity = 0

    def __len__(self):
        return self.order

    def lookup(self, perm: np.ndarray) -> int:
        return self._ids[np.ascontiguousarray(perm[self._simple]).tobytes()]

    def mul(self, a: int, b: int) -> int:
        """Id of w_a w_b."""
        return self.lookup(self.perms[a][self.perms[b]])

    def inverse(self, a: int) -> int:
        return self.lookup(np.argsort(self.perms[a]).astype(self.perms.dtype))

    def inverse_perm(self, a: int) -> np.ndarray:
        return np.argsort(self.perms[a])

    def word(self, a: int) -> tuple[int, ...]:
        """Reduced word as 1-based generator indices, w = s_{i1} ... s_{ik}."""
        out = []
        while a != 0:
            out.append(int(self.gen[a]) + 1)
            a = int(self.parent[a])
        return tuple(reversed(out))

    def element(self, a: int) -> WeylElement:
        return WeylElement(a, self.perms[a], self.word(a), int(self.lengths[a]))

    @cached_property
    def negative_mask(self) -> np.ndarray:
        """Boolean array: [g, a] is True when w_g(alpha_a) is negative."""
        return self.perms >= self.rs.n_pos


def enumerate_weyl(rs: RootSystem, cap: int = DEFAULT_CAP) -> WeylGroup:
    order = classical_order(rs)
    if order > cap:
        raise CapExceeded(order, cap)
    gens = simple_reflection_perms(rs)
    dtype = np.int16 if rs.n_roots < 32000 else np.int32
    gens = gens.astype(dtype)
    simple = np.array(rs.simple)
    ident = np.arange(rs.n_roots, dtype=dtype)
    perms = [ident[None, :]]
    parents = [np.array([0])]
    gen_used = [np.array([-1])]
    lengths = [np.array([0])]
    seen = {ident[simple].tobytes()}
    layer = ident[None, :]
    base = 0
    length = 0
    while len(layer):
        length += 1
        new_rows, new_par, new_gen = [], [], []
        for j in range(len(layer)):
            row = layer[j]
            for i in range(rs.rank):
                cand = row[gens[i]]
                key = cand[simple].tobytes()
                if key not in seen:
                    seen.add(key)
                    new_rows.append(cand)
                    new_par.append(base + j)
                    new_gen.append(i)
        base += len(layer)
        if not new_rows:
            break
        layer = np.array(new_rows, dtype=dtype)
        perms.append(layer)
        parents.append(np.array(new_par))
        gen_used.append(np.array(new_gen))
        lengths.append(np.full(len(layer), length))
    perms = np.concatenate(perms)
    if len(perms) != order:
        raise AssertionError(f"enumerated {len(perms)} elements, expected {order}")
    return WeylGroup(
        rs,
        perms,
        np.concatenate(parents),
        np.concatenate(gen_used),
        np.concatenate(lengths),
    )


def inversion_set(group: WeylGroup, w: int) -> list[int]:
    """Phi_w: positive roots sent to negative roots by w."""
    n = group.rs.n_pos
    return [a for a in range(n) if group.perms[w][a] >= n]


def delta_indicator(group: WeylGroup, w: int, root_index: int) -> int:
    return int(group.perms[w][root_index] < group.rs.n_pos)


@dataclass
class ParabolicData:
    p: int
    delta_p: tuple[int, ...]
    phi_p_plus: tuple[int, ...]
    wp: int
    frak_Wp: tuple[int, ...]
    lp: dict
    classes: dict
    group: WeylGroup

    @property
    def rs(self) -> RootSystem:
        return self.group.rs

    @cached_property
    def outside_levi(self) -> tuple[int, ...]:
        """Indices of Phi^+ minus Phi_p^+."""
        levi = set(self.phi_p_plus)
        return tuple(a for a in range(self.rs.n_pos) if a not in levi)

    @cached_property
    def Wp_members(self) -> tuple[int, ...]:
        """Elements of the parabolic subgroup W_p (inversion set inside Phi_p^+)."""
        neg = self.group.negative_mask[:, list(self.outside_levi)]
        return tuple(int(g) for g in np.nonzero(~neg.any(axis=1))[0])

    def to_json(self) -> str:
        hist = Counter(self.lp.values())
        return json.dumps(
            {
                "root_system": self.rs.spec.label,
                "p": self.p,
                "weyl_order": self.group.order,
                "frak_Wp_size": len(self.frak_Wp),
                "class_sizes": {k: len(v) for k, v in self.classes.items()},
                "lp_histogram": {str(k): hist[k] for k in sorted(hist)},
                "n_outside_levi": len(self.outside_levi),
            },
            indent=2,
        )


def l_p_all(group: WeylGroup, outside_levi) -> np.ndarray:
    """l_p(w) for every element of W."""
    return group.negative_mask[:, list(outside_levi)].sum(axis=1)


def compute_frak_Wp(group: WeylGroup, rs: RootSystem, p: int) -> ParabolicData:
    n = rs.n_pos
    simple = rs.simple
    delta_p = tuple(simple[j] for j in range(rs.rank) if j != p - 1)
    phi_p_plus = tuple(levi_positive(rs, p))
    levi = set(phi_p_plus)
    outside = [a for a in range(n) if a not in levi]
    perms = group.perms
    simple_set = np.zeros(rs.n_roots, dtype=bool)
    simple_set[list(simple)] = True
    if delta_p:
        imgs = perms[:, list(delta_p)]
        ok = ((imgs >= n) | simple_set[imgs]).all(axis=1)
    else:
        ok = np.ones(group.order, dtype=bool)
    frak = tuple(int(g) for g in np.nonzero(ok)[0])
    lp_arr = l_p_all(group, outside)
    # w_p: sends Phi_p^+ to negatives and keeps everything else positive.
    neg = group.negative_mask[:, :n]
    target = np.zeros(n, dtype=bool)
    target[list(phi_p_plus)] = True
    wp_candidates = np.nonzero((neg == target).all(axis=1))[0]
    if len(wp_candidates) != 1:
        raise AssertionError("longest element of W_p not unique")
    wp = int(wp_candidates[0])
    lp = {g: int(lp_arr[g]) for g in frak}
    total = len(outside)
    classes = {"plus": [], "zero": [], "minus": [], "ddagger": []}
    for g in frak:
        v = 2 * lp[g]
        classes["plus" if v < total else "minus" if v > total else "zero"].append(g)
        if lp[g] == 0:
            classes["ddagger"].append(g)
    classes = {k: tuple(v) for k, v in classes.items()}
    return ParabolicData(p, delta_p, phi_p_plus, wp, frak, lp, classes, group)


def l_p(pd: ParabolicData, w: int) -> int:
    if w in pd.lp:
        return pd.lp[w]
    return int(pd.group.negative_mask[w, list(pd.outside_levi)].sum())


def classify(pd: ParabolicData) -> dict:
    return pd.classes


def involution(pd: ParabolicData, w: int) -> int:
    """w -> w_0 w w_p, defined on frak W_p."""
    if w not in pd.lp:
        raise NotInFrakWp(f"element {w} is not in frak W_p")
    g = pd.group
    return g.mul(g.mul(g.w0, w), pd.wp)

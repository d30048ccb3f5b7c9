"""The lambda_p-grading of a root system.

Sigma_p(k, h) collects the roots whose coroot has p-th coordinate k and
height h. Everything here needs only the root table; the Weyl-group
dependent counts N_{p,w} take a ParabolicData alongside.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .errors import DecompositionNotFound, InternalInconsistency, NoExtremalRoot
from .rootsys import RootSystem, _check_p, digit_string, levi_positive


@dataclass(frozen=True)
class GradingTables:
    rs: RootSystem = field(repr=False)
    p: int
    c_p: int
    k_p: int
    sigma: dict  # (k, h) -> tuple of positive root indices
    N: dict  # (k, h) -> count, absent keys are 0
    M: dict  # (k, h) -> closed-form exponent, only nonzero entries
    hbar_minus: dict
    hbar_plus: dict
    lowest: dict
    highest: dict

    def n(self, k: int, h: int) -> int:
        return self.N.get((k, h), 0)

    def sigma_k(self, k: int) -> list[int]:
        return sorted(i for (kk, _), idx in self.sigma.items() if kk == k for i in idx)

    def heights(self, k: int) -> list[int]:
        return sorted(h for (kk, h) in self.sigma if kk == k)


def _coroot_dominates(big, small) -> bool:
    return all(b >= s for b, s in zip(big, small))


def cp_from_rho(rs: RootSystem, p: int) -> int:
    """c_p = 2 <lambda_p - rho_p, alpha_p^vee> = 2 - sum_{alpha in Phi_p^+} <alpha, alpha_p^vee>."""
    total = sum(rs.pairing_simple_coroot(rs.roots[i], p - 1) for i in levi_positive(rs, p))
    return 2 - total


def build_grading(rs: RootSystem, p: int) -> GradingTables:
    _check_p(rs, p)
    sigma = defaultdict(list)
    for i in range(rs.n_pos):
        k = rs.coroots[i][p - 1]
        if k >= 1:
            sigma[(k, int(sum(rs.coroots[i])))].append(i)
    sigma = {key: tuple(v) for key, v in sorted(sigma.items())}
    N = {key: len(v) for key, v in sigma.items()}
    # k_p is the p-th coefficient of the highest coroot, which bounds <lambda_p, alpha^vee>.
    k_p = rs.highest_coroot[p - 1]
    if k_p != max(k for k, _ in sigma):
        raise InternalInconsistency(f"{rs.spec.label} p={p}: highest coroot does not bound the grading")
    c_p = cp_from_rho(rs, p)

    lowest, highest, hm, hp = {}, {}, {}, {}
    for k in range(1, k_p + 1):
        members = [i for (kk, _), idx in sigma.items() if kk == k for i in idx]
        lo = [i for i in members if all(_coroot_dominates(rs.coroots[j], rs.coroots[i]) for j in members)]
        hi = [i for i in members if all(_coroot_dominates(rs.coroots[i], rs.coroots[j]) for j in members)]
        if len(lo) != 1 or len(hi) != 1:
            raise NoExtremalRoot(f"{rs.spec.label} p={p} k={k}")
        lowest[k], highest[k] = lo[0], hi[0]
        hm[k] = int(sum(rs.coroots[lo[0]])) - k
        hp[k] = int(sum(rs.coroots[hi[0]])) - k

    if c_p != 2 + hp[1]:
        raise InternalInconsistency(
            f"{rs.spec.label} p={p}: c_p from rho_p is {c_p}, from the top of Sigma_p(1) {2 + hp[1]}"
        )

    M = {}
    for (k, h) in list(N) + [(k, h + 1) for (k, h) in N]:
        m = closed_form_M(N, c_p, k, h)
        if m:
            M[(k, h)] = m
    return GradingTables(rs, p, c_p, k_p, sigma, N, dict(sorted(M.items())), hm, hp, lowest, highest)


def closed_form_M(N: dict, c_p: int, k: int, h: int) -> int:
    if 2 * h - 1 <= k * c_p:
        return 0
    return N.get((k, h - 1), 0) - N.get((k, h), 0)


def M_p(tables: GradingTables, k: int, h: int) -> int:
    if k < 1:
        raise ValueError("M_p is defined here for k >= 1; k = 0 exponents come from omega_p")
    return closed_form_M(tables.N, tables.c_p, k, h)


def N_pw(tables: GradingTables, pd, w: int, k: int, h: int) -> int:
    """#{alpha in w^{-1} Phi^- : <lambda_p, alpha^vee> = k, ht alpha^vee = h}."""
    rs = tables.rs
    perm = pd.group.perms[w]
    p = tables.p
    return sum(
        1
        for a in range(rs.n_roots)
        if perm[a] >= rs.n_pos and rs.coroots[a][p - 1] == k and rs.heights[a] == h
    )


def lowest_highest(tables: GradingTables, k: int):
    if k not in tables.lowest:
        raise NoExtremalRoot(f"Sigma_p({k}) is empty")
    return tables.lowest[k], tables.highest[k]


@dataclass(frozen=True)
class ChainDecomposition:
    k: int
    chains: tuple[tuple[int, ...], ...]
    step_roots: tuple[tuple[int, ...], ...]

    def digits(self, rs: RootSystem) -> list[list[str]]:
        return [[digit_string(rs.coroots[i]) for i in ch] for ch in self.chains]


def chain_decomposition(tables: GradingTables, k: int) -> ChainDecomposition:
    """Partition Sigma_p(k) into height-symmetric chains climbing by Delta_p coroots.

    Chains are built one at a time from the lowest uncovered coroot
    (ties broken by the smallest digit vector). Each chain is found by a
    depth-first search upward through uncovered coroots, one simple coroot
    alpha_j^vee (j != p) per step, and must stop exactly at height
    k c_p - (start height).
    """
    rs = tables.rs
    p = tables.p
    if k not in tables.lowest:
        raise DecompositionNotFound(f"Sigma_p({k}) is empty")
    members = tables.sigma_k(k)
    by_coroot = {rs.coroots[i]: i for i in members}
    covered: set[int] = set()
    chains, steps = [], []
    target_total = k * tables.c_p

    def paths(path, stepped, end_height, end_root):
        """Yield every admissible upward path, in step-preference order."""
        cur = path[-1]
        if rs.heights[cur] == end_height:
            if end_root is None or cur == end_root:
                yield path, stepped
            return
        co = rs.coroots[cur]
        for j in _step_order(rs, cur, p):
            nxt = list(co)
            nxt[j] += 1
            nxt = by_coroot.get(tuple(nxt))
            if nxt is None or nxt in covered:
                continue
            covered.add(nxt)
            yield from paths(path + [nxt], stepped + [j + 1], end_height, end_root)
            covered.discard(nxt)

    def solve():
        if len(covered) == len(members):
            return True
        if not chains:
            start, end_root = tables.lowest[k], tables.highest[k]
        else:
            uncovered = [i for i in members if i not in covered]
            start = min(uncovered, key=lambda i: (rs.heights[i], rs.coroots[i]))
            end_root = None
        covered.add(start)
        for path, stepped in paths([start], [], target_total - rs.heights[start], end_root):
            chains.append(tuple(path))
            steps.append(tuple(stepped))
            if solve():
                return True
            chains.pop()
            steps.pop()
        covered.discard(start)
        return False

    if not solve():
        raise DecompositionNotFound(f"{rs.spec.label} p={p} k={k}: search exhausted")
    dec = ChainDecomposition(k, tuple(chains), tuple(steps))
    violations = chain_violations(tables, dec)
    if violations:
        raise DecompositionNotFound("; ".join(violations))
    return dec


def _step_order(rs, cur, p):
    return [j for j in range(rs.rank) if j != p - 1]


def chain_violations(tables: GradingTables, dec: ChainDecomposition) -> list[str]:
    """All failed chain-decomposition invariants (empty list when valid)."""
    rs = tables.rs
    k = dec.k
    out = []
    flat = [i for ch in dec.chains for i in ch]
    if sorted(flat) != tables.sigma_k(k) or len(set(flat)) != len(flat):
        out.append("chains do not partition Sigma_p(k)")
    if not dec.chains:
        return out + ["no chains"]
    first = dec.chains[0]
    lo, hi = tables.lowest[k], tables.highest[k]
    if first[0] != lo or first[-1] != hi:
        out.append("first chain does not run from the lowest to the highest root")
    if len(first) != rs.heights[hi] - rs.heights[lo] + 1:
        out.append("first chain has the wrong size")
    sizes = [len(ch) for ch in dec.chains]
    if any(s >= sizes[0] for s in sizes[1:]):
        out.append(f"first chain is not strictly the longest: sizes {sizes}")
    for m, ch in enumerate(dec.chains):
        for a, b in zip(ch, ch[1:]):
            diff = [y - x for x, y in zip(rs.coroots[a], rs.coroots[b])]
            if sorted(diff) != [0] * (rs.rank - 1) + [1] or diff[tables.p - 1] != 0:
                out.append(f"chain {m + 1}: step {digit_string(rs.coroots[a])}->{digit_string(rs.coroots[b])}")
        if rs.heights[ch[-1]] != k * tables.c_p - rs.heights[ch[0]]:
            out.append(f"chain {m + 1}: ends are not mirror images")
    starts = [int(rs.heights[ch[0]]) for ch in dec.chains]
    if len(starts) > 1 and not starts[0] < starts[1]:
        out.append(f"start heights {starts} do not begin strictly")
    if any(a > b for a, b in zip(starts[1:], starts[2:])) or 2 * starts[-1] > k * tables.c_p:
        out.append(f"start heights {starts} not nondecreasing up to k c_p / 2")
    return out

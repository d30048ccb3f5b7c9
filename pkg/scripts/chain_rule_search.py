"""Compare chain decompositions of Sigma_p(1) with the published tables.

Decompositions of Sigma_p(1) into height-symmetric chains are not unique.
This script checks that every published table is itself a valid
decomposition, then tries 16 greedy construction rules (climb up or down,
four tie-breaks for the next starting coroot, two step orders) and reports
which published tables each rule reproduces as a set of chains.

    python scripts/chain_rule_search.py
    python scripts/chain_rule_search.py --diff    # show ours vs published where they differ
"""

import argparse
import itertools
import sys

from wengzeta.fixtures import appendix1_tables, compare_chains
from wengzeta.grading import ChainDecomposition, build_grading, chain_decomposition, chain_violations
from wengzeta.rootsys import RootSystemSpec, build_root_system, digit_string

TIES = {
    "min": lambda c: c,
    "max": lambda c: tuple(-x for x in c),
    "rev-min": lambda c: c[::-1],
    "rev-max": lambda c: tuple(-x for x in c[::-1]),
}


def decompose(t, direction, tie, step_order):
    """Backtracking chain search with a configurable greedy preference."""
    rs, p = t.rs, t.p
    members = t.sigma_k(1)
    by_coroot = {rs.coroots[i]: i for i in members}
    sgn = 1 if direction == "up" else -1
    steps = [j for j in range(rs.rank) if j != p - 1]
    if step_order == "desc":
        steps.reverse()
    covered, chains = set(), []

    def paths(path, end_height, end_root):
        cur = path[-1]
        if rs.heights[cur] == end_height:
            if end_root is None or cur == end_root:
                yield path
            return
        for j in steps:
            nxt = list(rs.coroots[cur])
            nxt[j] += sgn
            nxt = by_coroot.get(tuple(nxt))
            if nxt is None or nxt in covered:
                continue
            covered.add(nxt)
            yield from paths(path + [nxt], end_height, end_root)
            covered.discard(nxt)

    def solve():
        if len(covered) == len(members):
            return True
        if not chains:
            start, end = (t.lowest[1], t.highest[1]) if sgn > 0 else (t.highest[1], t.lowest[1])
        else:
            rest = [i for i in members if i not in covered]
            start = min(rest, key=lambda i: (sgn * rs.heights[i], TIES[tie](rs.coroots[i])))
            end = None
        covered.add(start)
        for path in paths([start], t.c_p - rs.heights[start], end):
            chains.append(path)
            if solve():
                return True
            chains.pop()
        covered.discard(start)
        return False

    solve()
    return {tuple(digit_string(rs.coroots[i]) for i in (c if sgn < 0 else reversed(c))) for c in chains}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--diff", action="store_true")
    args = ap.parse_args()
    sys.setrecursionlimit(10000)

    cases = []
    for label, entry in appendix1_tables().items():
        rs = build_root_system(RootSystemSpec.parse(label))
        index = {digit_string(rs.coroots[i]): i for i in range(rs.n_pos)}
        for ps, published in entry["chains"].items():
            t = build_grading(rs, int(ps))
            upward = tuple(tuple(index[d] for d in reversed(ch)) for ch in published)
            # order chains by start height so the ordering rules do not mask real problems
            upward = tuple(sorted(upward, key=lambda ch: (-len(ch), rs.heights[ch[0]])))
            problems = chain_violations(t, ChainDecomposition(1, upward, ()))
            if problems:
                print(f"published {label} p={ps} is not a valid decomposition: {problems}")
            cases.append((f"{label} p={ps}", t, {tuple(c) for c in published}))
    print(f"{len(cases)} published tables checked for validity\n")

    for direction, tie, order in itertools.product(["up", "down"], TIES, ["asc", "desc"]):
        miss = [name for name, t, pub in cases if decompose(t, direction, tie, order) != pub]
        mark = "  <- library rule" if (direction, tie, order) == ("up", "min", "asc") else ""
        print(f"{direction:4} {tie:8} {order:4}  {len(miss):2} differ  {' '.join(miss)}{mark}", flush=True)

    if args.diff:
        print()
        for name, t, pub in cases:
            same, ours, published = compare_chains(t.rs, chain_decomposition(t, 1), sorted(pub))
            if not same:
                print(f"{name}\n  ours:      {ours}\n  published: {published}")


if __name__ == "__main__":
    main()

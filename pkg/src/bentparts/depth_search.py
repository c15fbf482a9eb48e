"""Exhaustive pruned search for binary bent partitions of prescribed depth.

The level sets of a bent function on V_n^(2) have sizes 2^(n-1) +- 2^(n/2-1)
and character sums +-2^(n/2-1) at every nonzero point, so in a bent
partition every union of K/2 cells must hit those values exactly.  Two
consequences drive the search:

* a size filter: only cell-size vectors whose every (K/2)-subset sums to a
  bent level-set size can support a bent partition;
* incremental pruning: character sums of completed cells must agree up to
  an element of {0, +-2^(n/2)} at every nonzero point, and every completed
  (K/2)-union must land on +-2^(n/2-1) on the nose.

Cells are enumerated in canonical form (cells ordered by their minimum,
point 0 pinned inside the first-opened cell), which quotients out the K!
relabelings.  Every surviving candidate is re-verified definitionally.
The DFS is iterative and resumable: the frontier serializes into an opaque
token (a versioned pickle of the decision path).
"""

from __future__ import annotations

import itertools
import pickle
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, DomainError
from .fields import SpaceDescriptor
from .partitions import Partition

_TOKEN_VERSION = 1


def _compositions_sorted(total: int, parts: int, minimum: int = 1):
    """Nondecreasing positive integer vectors of given length summing to total."""
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total // parts + 1):
        for rest in _compositions_sorted(total - first, parts - 1, first):
            yield (first,) + rest


def admissible_size_vectors(n: int, K: int):
    """Sorted cell-size vectors that the bent level-set sizes allow."""
    if n % 2 or n < 2:
        raise DomainError("n must be even and >= 2")
    if K % 2:
        raise DomainError("K must be even")
    if K > 12:
        raise DomainError("size-vector enumeration capped at K <= 12")
    total = 1 << n
    if total > (1 << 16):
        raise DomainError("2^n capped at 2^16 for size enumeration")
    lo = (1 << (n - 1)) - (1 << (n // 2 - 1))
    hi = (1 << (n - 1)) + (1 << (n // 2 - 1))
    out = []
    for vec in _compositions_sorted(total, K):
        ok = True
        for subset in itertools.combinations(range(K), K // 2):
            s = sum(vec[i] for i in subset)
            if s != lo and s != hi:
                ok = False
                break
        if ok:
            out.append(vec)
    return out


@dataclass
class SearchStats:
    nodes: int = 0
    completed_candidates: int = 0
    pruned_pair: int = 0
    pruned_union: int = 0


class _DFS:
    """Iterative canonical-partition DFS over one size vector."""

    def __init__(self, n: int, sizes, use_filters: bool = True):
        self.n = n
        self.N = 1 << n
        self.K = len(sizes)
        self.sizes = tuple(sizes)
        self.use_filters = use_filters
        self.half = self.K // 2
        self.level = 1 << (n // 2 - 1)
        # cols[x][a] = chi_a(x) = (-1)^(a.x)
        a = np.arange(self.N)
        parity = np.zeros((self.N, self.N), dtype=np.int8)
        for bit in range(n):
            parity ^= (((a[:, None] >> bit) & 1) * ((a[None, :] >> bit) & 1)).astype(
                np.int8
            )
        self.signs = 1 - 2 * parity.astype(np.int32)
        self.cols = [tuple(int(v) for v in self.signs[:, x]) for x in range(self.N)]

    def options(self, state):
        """Legal moves for the smallest unassigned point."""
        cells, remaining_sizes = state["cells"], state["size_pool"]
        opts = []
        for idx, (target, members) in enumerate(cells):
            if len(members) < target:
                opts.append(("place", idx))
        for size in sorted(set(remaining_sizes)):
            opts.append(("open", size))
        return opts

    def initial_state(self):
        return {
            "cells": [],          # list of (target_size, [points])
            "size_pool": list(self.sizes),
            "chi": [],            # per-cell character-sum tuples over all a
            "next_point": 0,
            "complete": [],       # indices of completed cells
        }

    def apply(self, state, opt, stats: SearchStats):
        """Apply a move; returns (ok, undo_record). Mutates even on reject."""
        x = state["next_point"]
        kind, arg = opt
        col = self.cols[x]
        if kind == "open":
            state["size_pool"].remove(arg)
            state["cells"].append((arg, [x]))
            state["chi"].append(list(col))
            idx = len(state["cells"]) - 1
        else:
            idx = arg
            _, members = state["cells"][idx]
            members.append(x)
            chi = state["chi"][idx]
            for a, ca in enumerate(col):
                chi[a] += ca
        state["next_point"] = x + 1
        stats.nodes += 1
        target, members = state["cells"][idx]
        completed = len(members) == target
        if completed:
            state["complete"].append(idx)
        undo = (kind, idx, completed, x, arg)
        ok = True
        if self.use_filters:
            if completed:
                ok = self._completion_checks(state, idx, stats)
            else:
                ok = self._feasibility_checks(state, idx, stats)
        return ok, undo

    def undo(self, state, record):
        kind, idx, completed, x, arg = record
        if completed:
            state["complete"].pop()
        if kind == "open":
            state["cells"].pop()
            state["chi"].pop()
            state["size_pool"].append(arg)
        else:
            state["cells"][idx][1].pop()
            chi = state["chi"][idx]
            for a, ca in enumerate(self.cols[x]):
                chi[a] -= ca
        state["next_point"] = x

    def _completion_checks(self, state, idx, stats: SearchStats) -> bool:
        chi = state["chi"]
        comp = state["complete"]
        mine = chi[idx]
        step = self.level * 2  # 2^(n/2)
        allowed = (-step, 0, step)
        for other in comp:
            if other == idx:
                continue
            oth = chi[other]
            if any((mine[a] - oth[a]) not in allowed for a in range(self.N)):
                stats.pruned_pair += 1
                return False
        others = [c for c in comp if c != idx]
        lv = self.level
        mid = 1 << (self.n - 1)
        if len(others) >= self.half - 1:
            for subset in itertools.combinations(others, self.half - 1):
                rows = [chi[c] for c in subset]
                bad = False
                for a in range(self.N):
                    t = mine[a]
                    for r in rows:
                        t += r[a]
                    want = (mid - lv, mid + lv) if a == 0 else (-lv, lv)
                    if t != want[0] and t != want[1]:
                        bad = True
                        break
                if bad:
                    stats.pruned_union += 1
                    return False
        return True

    def _feasibility_checks(self, state, idx, stats: SearchStats) -> bool:
        """A partial cell must stay within reach of every completed cell."""
        comp = state["complete"]
        if not comp:
            return True
        chi = state["chi"]
        mine = chi[idx]
        target, members = state["cells"][idx]
        slack = (target - len(members)) + (self.level * 2)
        for other in comp:
            oth = chi[other]
            if any(abs(mine[a] - oth[a]) > slack for a in range(1, self.N)):
                stats.pruned_pair += 1
                return False
        return True


def search(
    n: int,
    K: int,
    budget: int = 50_000_000,
    use_size_filter: bool = True,
    use_filters: bool = True,
    resume: bytes | None = None,
):
    """All bent partitions of V_n^(2) of depth K, up to cell relabeling.

    Exhaustive for n <= 4.  Returns (partitions, stats).  Exceeding the
    node budget raises BudgetExceededError carrying a resume token.
    """
    if n % 2 or not 2 <= n <= 4:
        raise DomainError("exhaustive search supports even n <= 4")
    if K % 2 or K < 2 or K > 12:
        raise DomainError("K must be even with 2 <= K <= 12")
    space = SpaceDescriptor.vector(2, n)
    vectors = admissible_size_vectors(n, K)
    if not use_size_filter:
        vectors = list(_compositions_sorted(1 << n, K))
    stats = SearchStats()
    found: list[Partition] = []
    candidates: list = []

    start_vec, start_path = 0, []
    if resume is not None:
        tok = pickle.loads(resume)
        if tok.get("v") != _TOKEN_VERSION or tok.get("n") != n or tok.get("K") != K:
            raise DomainError("resume token does not match this search")
        start_vec, start_path = tok["vec"], tok["path"]

    for vec_i in range(start_vec, len(vectors)):
        sizes = vectors[vec_i]
        dfs = _DFS(n, sizes, use_filters=use_filters)
        state = dfs.initial_state()
        # frame: [options, next option index]; undo records parallel the stack
        stack = [[dfs.options(state), 0]]
        undo_stack: list = []
        if vec_i == start_vec and start_path:
            for choice in start_path:
                opts, _ = stack[-1]
                ok, undo = dfs.apply(state, opts[choice], stats)
                assert ok, "corrupt resume token"
                stack[-1][1] = choice + 1
                undo_stack.append(undo)
                stack.append([dfs.options(state), 0])
        while stack:
            if stats.nodes >= budget:
                path = [frame[1] - 1 for frame in stack[:-1]]
                token = pickle.dumps(
                    {"v": _TOKEN_VERSION, "n": n, "K": K, "vec": vec_i, "path": path}
                )
                raise BudgetExceededError(
                    f"node budget {budget} exhausted", resume_token=token
                )
            opts, i = stack[-1]
            if i >= len(opts):
                stack.pop()
                if undo_stack:
                    dfs.undo(state, undo_stack.pop())
                continue
            stack[-1][1] = i + 1
            ok, undo = dfs.apply(state, opts[i], stats)
            if not ok:
                dfs.undo(state, undo)
                continue
            if state["next_point"] == dfs.N:
                stats.completed_candidates += 1
                candidates.append([list(m) for _, m in state["cells"]])
                dfs.undo(state, undo)
                continue
            undo_stack.append(undo)
            stack.append([dfs.options(state), 0])
    for cells in _confirmed_bent(space, candidates, K):
        ordered = sorted(cells, key=lambda c: (len(c), min(c)))
        found.append(Partition(space, ordered))
    return found, stats


def _confirmed_bent(space, candidates, K):
    """Definitional re-verification of complete candidates, batched."""
    from .partitions import _classify_rows, balanced_assignments

    if not candidates:
        return
    assigns = [np.asarray(a, dtype=np.uint8) for a in balanced_assignments(K, 2)]
    chunk = max(1, (1 << 22) // (space.size * len(assigns)))
    for lo in range(0, len(candidates), chunk):
        block = candidates[lo : lo + chunk]
        rows = []
        for cells in block:
            cell_of = np.zeros(space.size, dtype=np.int64)
            for i, c in enumerate(cells):
                cell_of[c] = i
            rows.extend(a[cell_of] for a in assigns)
        bent, _, _ = _classify_rows(space, np.stack(rows))
        per = bent.reshape(len(block), len(assigns)).all(axis=1)
        for cells, ok in zip(block, per):
            if ok:
                yield cells

"""Bent-partition verification by independent routes, plus coarsening.

A partition of V_n^(p) into K cells (p | K) is bent when every function
that sends exactly K/p cells to each value of F_p is bent.  Routes:

* definitional: enumerate all balanced assignments and analyze each
  generated function (budgeted; the enumeration is K!/((K/p)!)^p long);
* eq1 (m=1, odd p): a symmetry identity on the dual of a weakly regular
  bent function, necessary and sufficient for its preimage partition;
* eq29: all component duals of a vectorial F differ from a single linear
  bundle G_c by one common shift h; sufficient in general, and also
  necessary for p=2 and for m=1 -- for odd p with m >= 2 a failure is
  reported as inconclusive rather than negative;
* the permutation route: P(F) stays vectorial bent for every relabeling P.

Verified bent partitions also get a depth audit: the cell count of any
class-WBP bent partition must be a power of p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .analysis import (
    BentReport,
    analyze,
    codomain_point_from_coords,
    component,
)
from .cyclotomic import CycInt
from .errors import DomainError, RouteRefusedError
from .fields import SpaceDescriptor
from .transform import FunctionTable, walsh_full_batch

DEFAULT_ENUM_BUDGET = 100_000


class Partition:
    """Ordered disjoint cells covering a space."""

    def __init__(self, space: SpaceDescriptor, cells):
        cells = [np.sort(np.asarray(c, dtype=np.int64)) for c in cells]
        total = sum(len(c) for c in cells)
        if total != space.size:
            raise DomainError("cells do not cover the space")
        seen = np.concatenate(cells) if cells else np.array([], dtype=np.int64)
        if len(np.unique(seen)) != space.size:
            raise DomainError("cells overlap or miss points")
        if any(len(c) == 0 for c in cells):
            raise DomainError("empty cell")
        self.space = space
        self.cells = cells

    @property
    def depth(self) -> int:
        return len(self.cells)

    def cell_index_map(self) -> np.ndarray:
        out = np.zeros(self.space.size, dtype=np.uint16)
        for i, c in enumerate(self.cells):
            out[c] = i
        return out

    def canonical_key(self):
        ordered = sorted(
            (tuple(c.tolist()) for c in self.cells), key=lambda t: (len(t), t)
        )
        return tuple(ordered)

    def relabeled(self, order) -> "Partition":
        return Partition(self.space, [self.cells[i] for i in order])

    def __eq__(self, other):
        return (
            isinstance(other, Partition)
            and self.space == other.space
            and self.canonical_key() == other.canonical_key()
        )

    def __repr__(self):
        return f"Partition(depth={self.depth}, sizes={[len(c) for c in self.cells]})"


def preimage_partition(F: FunctionTable):
    """Cells D_{F,i} ordered by codomain index; empty cells are dropped.

    Returns (partition, dropped) where dropped counts absent codomain values.
    """
    order = np.argsort(F.values, kind="stable")
    sorted_vals = F.values[order]
    boundaries = np.nonzero(np.diff(sorted_vals.astype(np.int64)))[0] + 1
    groups = np.split(order, boundaries)
    cells = [g for g in groups if len(g)]
    dropped = F.codomain.size - len(cells)
    return Partition(F.domain, cells), dropped


@dataclass
class PartitionReport:
    route: str
    depth: int
    is_bent_partition: bool | None
    class_wbp: bool | None = None
    epsilon: int | None = None
    counterexample: tuple | None = None
    depth_is_power_of_p: bool | None = None
    dual_bent: bool | None = None
    h_is_zero: bool | None = None
    status: str = ""

    def finish_depth_audit(self, p: int):
        if self.is_bent_partition:
            k = self.depth
            while k % p == 0:
                k //= p
            self.depth_is_power_of_p = k == 1
        return self


# ---------------------------------------------------------------------------
# balanced assignments
# ---------------------------------------------------------------------------


def assignment_count(K: int, p: int) -> int:
    if K % p:
        raise DomainError("p must divide the depth K")
    c = factorial(K)
    for _ in range(p):
        c //= factorial(K // p)
    return c


def balanced_assignments(K: int, p: int):
    """All length-K sequences using each value of F_p exactly K/p times.

    Deterministic lexicographic order.
    """
    if K % p:
        raise DomainError("p must divide the depth K")
    counts = [K // p] * p
    seq: list[int] = []

    def rec():
        if len(seq) == K:
            yield tuple(seq)
            return
        for v in range(p):
            if counts[v]:
                counts[v] -= 1
                seq.append(v)
                yield from rec()
                seq.pop()
                counts[v] += 1

    yield from rec()


def generated_functions(partition: Partition):
    """The bent-candidate functions generated by balanced cell assignments."""
    p = partition.space.p
    cell_of = partition.cell_index_map()
    for assign in balanced_assignments(partition.depth, p):
        table = np.asarray(assign, dtype=np.uint8)[cell_of]
        yield assign, FunctionTable.scalar(partition.space, table)


# ---------------------------------------------------------------------------
# route 1: definitional
# ---------------------------------------------------------------------------


def _classify_rows(domain: SpaceDescriptor, rows: np.ndarray):
    """Batch spectra -> (bent_mask, eps_or_None per row, first_bad_point per row)."""
    p, n = domain.p, domain.dim
    spectra = walsh_full_batch(domain, rows)
    B = rows.shape[0]
    if p == 2:
        target = 1 << n
        ok = spectra.astype(np.int64) ** 2 == target
        bent = ok.all(axis=1)
        first_bad = np.where(bent, -1, np.argmin(ok, axis=1))
        eps = np.where(bent, 1, 0)
        return bent, eps, first_bad
    target = p**n
    s = p ** (n // 2) if n % 2 == 0 else None
    flat = spectra.reshape(B * domain.size, p - 1)
    from .analysis import _norm_sq_rows

    norms = _norm_sq_rows(flat, p).reshape(B, domain.size)
    bent = (norms == target).all(axis=1)
    first_bad = np.where(bent, -1, np.argmin(norms == target, axis=1))
    eps = np.zeros(B, dtype=np.int64)
    if s is not None:
        is_zero = flat == 0
        hits = np.abs(flat) == s
        single = (is_zero.sum(axis=1) == p - 2) & (hits.sum(axis=1) == 1)
        flat_pat = np.all(flat == flat[:, :1], axis=1) & (np.abs(flat[:, 0]) == s)
        picked = flat[np.arange(len(flat)), np.argmax(hits, axis=1)]
        eps_pt = np.where(single, np.sign(picked), 0) + np.where(
            flat_pat, -np.sign(flat[:, 0]), 0
        )
        eps_rows = eps_pt.reshape(B, domain.size)
        uniform = (eps_rows != 0).all(axis=1) & (eps_rows == eps_rows[:, :1]).all(axis=1)
        eps = np.where(bent & uniform, eps_rows[:, 0], 0)
        bad_decomp = np.where(
            bent & ~uniform,
            np.argmin((eps_rows != 0) & (eps_rows == eps_rows[:, :1]), axis=1),
            -1,
        )
        first_bad = np.where(bent & ~uniform, bad_decomp, first_bad)
    return bent, eps, first_bad


def verify_definitional(
    partition: Partition, budget: int = DEFAULT_ENUM_BUDGET
) -> PartitionReport:
    """Analyze every generated function; the ground-truth route."""
    p = partition.space.p
    K = partition.depth
    if K % p:
        raise DomainError("p must divide the depth K")
    count = assignment_count(K, p)
    if count > budget:
        raise RouteRefusedError(
            f"{count} balanced assignments exceed the budget {budget}; "
            "use the eq29 or hadamard route"
        )
    cell_of = partition.cell_index_map()
    domain = partition.space
    chunk = max(1, (1 << 22) // max(domain.size, 1))
    assigns: list[tuple] = []
    all_eps: set[int] = set()
    weakly_regular_all = True

    def flush(block):
        nonlocal weakly_regular_all
        rows = np.stack([np.asarray(a, dtype=np.uint8)[cell_of] for a in block])
        bent, eps, first_bad = _classify_rows(domain, rows)
        for i in range(len(block)):
            if not bent[i]:
                return block[i], int(first_bad[i])
            if eps[i] == 0:
                weakly_regular_all = False
            else:
                all_eps.add(int(eps[i]))
        return None

    block: list[tuple] = []
    for assign in balanced_assignments(K, p):
        block.append(assign)
        if len(block) >= chunk:
            bad = flush(block)
            if bad is not None:
                return PartitionReport(
                    "definitional", K, False, counterexample=bad
                )
            block = []
    if block:
        bad = flush(block)
        if bad is not None:
            return PartitionReport("definitional", K, False, counterexample=bad)
    class_wbp = weakly_regular_all and len(all_eps) == 1
    eps = all_eps.pop() if class_wbp else None
    return PartitionReport(
        "definitional", K, True, class_wbp=class_wbp, epsilon=eps
    ).finish_depth_audit(p)


# ---------------------------------------------------------------------------
# route 2: the dual symmetry identity (m = 1, odd p)
# ---------------------------------------------------------------------------


def verify_eq1(f: FunctionTable, report: BentReport | None = None) -> PartitionReport:
    """c f*(c^{-1} x) == ((c+1) f*(x) + (c-1) f*(-x)) / 2 for every c != 0.

    Necessary and sufficient for {D_{f,i}} to be a bent partition in class
    WBP (odd p, even n, f weakly regular bent).
    """
    p = f.p
    if p == 2:
        raise DomainError("the eq1 route needs odd p")
    if f.domain.dim % 2:
        raise DomainError("the eq1 route needs even n")
    if not f.is_scalar:
        raise DomainError("the eq1 route applies to p-ary functions")
    if report is None:
        report = analyze(f)
    if not report.weakly_regular:
        raise DomainError("the eq1 route needs a weakly regular bent function")
    d = report.dual.values.astype(np.int64)
    dn = d[f.domain.neg_perm()]
    inv2 = pow(2, -1, p)
    for c in range(1, p):
        cinv = pow(c, -1, p)
        lhs = (c * d[f.domain.scalar_perm(cinv)]) % p
        rhs = (((c + 1) * d + (c - 1) * dn) * inv2) % p
        if not np.array_equal(lhs, rhs):
            x = int(np.nonzero(lhs != rhs)[0][0])
            return PartitionReport(
                "eq1",
                p,
                False,
                counterexample=((c,), x),
                status=f"dual symmetry fails at c={c}, x={x}",
            )
    return PartitionReport(
        "eq1", p, True, class_wbp=True, epsilon=report.epsilon
    ).finish_depth_audit(p)


# ---------------------------------------------------------------------------
# route 3: shared dual shift (vectorial, any p)
# ---------------------------------------------------------------------------


@dataclass
class Eq29Result:
    report: PartitionReport
    G: FunctionTable | None = None
    h: FunctionTable | None = None
    epsilon: int | None = None


def _scalar_multiples_of_unit(codomain: SpaceDescriptor):
    return {c % codomain.size for c in range(codomain.p)}


def verify_eq29(F: FunctionTable) -> Eq29Result:
    """Check (F_c)* = G_c + h for one (G, h); sufficient for a WBP partition.

    Streams component transforms so only a handful of dual tables is ever
    held.  For p = 2 and for m = 1 a failure is a definitive negative; for
    odd p with m >= 2 it is reported as inconclusive.
    """
    p = F.p
    domain, codomain = F.domain, F.codomain
    n, m = domain.dim, codomain.dim
    if n % 2:
        raise DomainError("eq29 needs even n")
    if m > n // 2:
        raise DomainError("eq29 needs m <= n/2")
    if p == 2 and m < 2:
        raise DomainError("eq29 needs m >= 2 when p = 2")
    conclusive_negative = (p == 2) or (m == 1)

    dual_cache: dict[int, np.ndarray] = {}
    eps_seen: dict[int, int] = {}

    def dual_of(c: int) -> np.ndarray:
        if c not in dual_cache:
            rep = analyze(component(F, c))
            if not rep.weakly_regular:
                raise DomainError(
                    f"component {c} is not weakly regular bent; eq29 unavailable"
                )
            eps_seen[c] = rep.epsilon
            dual_cache[c] = rep.dual.values.astype(np.int64)
        return dual_cache[c]

    if m == 1:
        d1 = dual_of(1)
        dneg = d1[domain.neg_perm()]
        inv2 = pow(2, -1, p)
        h = ((d1 - dneg) * inv2) % p
        basis_rows = [((d1 + dneg) * inv2) % p]
    else:
        one = 1
        alpha = p  # the first point outside the scalar line
        assert alpha not in _scalar_multiples_of_unit(codomain)
        other = codomain.sub_points(one, alpha)
        h = (-dual_of(one) + dual_of(alpha) + dual_of(int(other))) % p
        basis_rows = [(dual_of(codomain.p**i) - h) % p for i in range(m)]

    K = codomain.size
    for c in range(1, K):
        rem, digits = c, []
        for _ in range(m):
            digits.append(rem % p)
            rem //= p
        combo = h.copy()
        for lam, row in zip(digits, basis_rows):
            if lam:
                combo += lam * row
        combo %= p
        actual = dual_of(c)
        dual_cache.pop(c, None)  # keep only a handful of tables alive
        if not np.array_equal(actual, combo):
            verdict = False if conclusive_negative else None
            return Eq29Result(
                PartitionReport(
                    "eq29",
                    K,
                    verdict,
                    status=(
                        "sufficient condition fails"
                        if verdict is None
                        else f"dual of component {c} breaks the shared-shift form"
                    ),
                    counterexample=((c,), None),
                )
            )
    eps_values = set(eps_seen.values())
    if len(eps_values) != 1:
        raise DomainError("components do not share a single epsilon")
    epsilon = eps_values.pop()
    h_zero = not h.any()
    g_table = FunctionTable(
        domain, codomain, codomain_point_from_coords(codomain, basis_rows)
    )
    h_table = FunctionTable.scalar(domain, h)
    report = PartitionReport(
        "eq29",
        K,
        True,
        class_wbp=True,
        epsilon=epsilon,
        dual_bent=h_zero,
        h_is_zero=h_zero,
    ).finish_depth_audit(p)
    return Eq29Result(report, g_table, h_table, epsilon)


# ---------------------------------------------------------------------------
# the character-sum identity behind eq29
# ---------------------------------------------------------------------------


def character_sums_at(F: FunctionTable, a: int) -> list[CycInt]:
    """chi_a(D_{F,i}) for every codomain value i, by direct summation."""
    p = F.p
    if not 0 <= a < F.domain.size:
        raise DomainError(f"point {a} outside the domain")
    ip = F.domain.ip_with_all(a).astype(np.int64)
    joint = F.values.astype(np.int64) * p + ip
    counts = np.bincount(joint, minlength=F.codomain.size * p)
    counts = counts.reshape(F.codomain.size, p)
    return [CycInt.from_exponent_counts(p, row.tolist()) for row in counts]


def character_sum_identity_check(
    F: FunctionTable,
    G: FunctionTable,
    h: FunctionTable,
    epsilon: int,
    points=None,
) -> bool:
    """chi_a(D_{F,i}) == p^{n-m} d0(a) + eps p^{n/2-m} zeta^{h(-a)} (p^m d_{G(-a)}(i) - 1)."""
    p = F.p
    n, m = F.domain.dim, F.codomain.dim
    if points is None:
        points = range(F.domain.size)
    lead = p ** (n - m)
    scale = p ** (n // 2 - m)
    for a in points:
        a = int(a)
        sums = character_sums_at(F, a)
        na = int(F.domain.neg_point(a))
        base = CycInt.zeta_pow(p, int(h.values[na]), epsilon * scale)
        g_na = int(G.values[na])
        for i, got in enumerate(sums):
            expect = base * (p**m * (1 if i == g_na else 0) - 1)
            if a == 0:
                expect = expect + lead
            if got != expect:
                return False
    return True


def galois_sum(space: SpaceDescriptor, cell: np.ndarray, a: int) -> CycInt:
    """sum over c in F_p^* of chi_{ca}(cell), computed by direct summation."""
    p = space.p
    luts = space.ip_luts(a)
    parts = space.decompose(np.asarray(cell, dtype=np.int64))
    w = np.zeros(len(cell), dtype=np.int64)
    for lut, part in zip(luts, parts):
        w += lut[part]
    w %= p
    base_counts = np.bincount(w, minlength=p)
    counts = [0] * p
    for c in range(1, p):
        for val in range(p):
            counts[(c * val) % p] += int(base_counts[val])
    return CycInt.from_exponent_counts(p, counts)


# ---------------------------------------------------------------------------
# coarsening
# ---------------------------------------------------------------------------


def coarsen(partition: Partition, new_depth: int, grouping=None) -> Partition:
    """Merge cells into new_depth groups (consecutive runs by default)."""
    p = partition.space.p
    K = partition.depth
    if new_depth % p or K % new_depth:
        raise DomainError("need p | K' and K' | K")
    k = K // new_depth
    if grouping is None:
        grouping = [list(range(j * k, (j + 1) * k)) for j in range(new_depth)]
    if sorted(i for g in grouping for i in g) != list(range(K)):
        raise DomainError("grouping must partition the cell indices")
    if any(len(g) != k for g in grouping):
        raise DomainError("groups must have equal size K/K'")
    cells = [np.concatenate([partition.cells[i] for i in g]) for g in grouping]
    return Partition(partition.space, cells)


# ---------------------------------------------------------------------------
# route 4: relabeling (permutation) route
# ---------------------------------------------------------------------------


def verify_thm1_permutation_route(
    F: FunctionTable, perm_budget: int = 50_000
) -> PartitionReport:
    """P(F) must stay vectorial bent for every permutation P of the codomain."""
    import itertools

    K = F.codomain.size
    if factorial(K) > perm_budget:
        raise RouteRefusedError(
            f"{factorial(K)} permutations exceed the budget {perm_budget}"
        )
    p = F.p
    luts = [F.codomain.ip_with_all(c) for c in range(1, K)]
    all_eps: set = set()
    weakly_all = True
    for P in itertools.permutations(range(K)):
        parr = np.asarray(P, dtype=np.uint16)
        pf = parr[F.values]
        rows = np.stack([lut[pf] for lut in luts])
        bent, eps, first_bad = _classify_rows(F.domain, rows)
        if not bent.all():
            i = int(np.argmin(bent))
            return PartitionReport(
                "thm1perm",
                K,
                False,
                counterexample=(tuple(P), int(first_bad[i])),
                status=f"component {i + 1} of P(F) is not bent",
            )
        if (eps == 0).any():
            weakly_all = False
        else:
            all_eps.update(int(e) for e in set(eps.tolist()))
    class_wbp = weakly_all and len(all_eps) == 1
    return PartitionReport(
        "thm1perm",
        K,
        True,
        class_wbp=class_wbp,
        epsilon=all_eps.pop() if class_wbp else None,
    ).finish_depth_audit(p)

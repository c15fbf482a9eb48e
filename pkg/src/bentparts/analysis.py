"""Bentness, regularity, duals, and the vectorial dual-bent test.

A p-ary f is bent when |W_f(a)|^2 = p^n for every a (checked exactly in
Z[zeta_p]).  When n is even and every value decomposes as eps * p^(n/2) *
zeta^(f*(a)) with one global sign eps, f is weakly regular; eps = 1 means
regular, and the exponents form the dual table f*.  For p = 2 the sign is
always +1 and the dual is the sign pattern of the spectrum.

A vectorial F is dual-bent exactly when the set of component duals,
together with the zero function, is closed under pointwise addition: the
components of any vectorial G satisfy G_c1 + G_c2 = G_(c1+c2), so the duals
of a dual-bent F must fill out a subspace of the function space, and
conversely a subspace of bent duals reassembles into a witness G.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .fields import SpaceDescriptor
from .transform import FunctionTable, WalshSpectrum, walsh_full

REGULAR = "regular"
WEAKLY_REGULAR_NOT_REGULAR = "weakly_regular_not_regular"
NOT_WEAKLY_REGULAR = "not_weakly_regular"
NOT_BENT = "not_bent"


@dataclass
class BentReport:
    is_bent: bool
    regularity: str
    epsilon: int | None = None
    dual: FunctionTable | None = None
    failure_point: int | None = None
    diagnostic: str = ""

    @property
    def weakly_regular(self) -> bool:
        return self.regularity in (REGULAR, WEAKLY_REGULAR_NOT_REGULAR)


def _norm_sq_rows(data: np.ndarray, p: int) -> np.ndarray:
    """|W(a)|^2 as rational integers, rowwise; -1 marks non-rational rows."""
    n_rows = data.shape[0]
    ext = np.zeros((n_rows, p), dtype=np.int64)
    ext[:, : p - 1] = data
    acc = np.zeros((n_rows, p), dtype=np.int64)
    for m in range(p):
        for j in range(p):
            acc[:, m] += ext[:, (m + j) % p] * ext[:, j]
    canon = acc[:, : p - 1] - acc[:, p - 1 :]
    out = canon[:, 0].copy()
    if p > 2:
        bad = np.any(canon[:, 1:] != 0, axis=1)
        out[bad] = -1
    return out


def _classify_odd(spec: WalshSpectrum):
    """(bent, eps_per_a or None, dual or None, first_bad) for odd p, even n."""
    p, n = spec.p, spec.dim
    data = spec.data
    target = p**n
    norms = _norm_sq_rows(data, p)
    bad = np.nonzero(norms != target)[0]
    if bad.size:
        return False, None, None, int(bad[0])
    if n % 2:
        return True, None, None, None
    s = p ** (n // 2)
    is_zero = data == 0
    hits = np.abs(data) == s
    # W = eps * s * zeta^j:  j < p-1 -> one +-s coefficient, rest zero
    single = (is_zero.sum(axis=1) == p - 2) & (hits.sum(axis=1) == 1)
    # j = p-1 -> all coefficients equal -eps*s
    flat = np.all(data == data[:, :1], axis=1) & (np.abs(data[:, 0]) == s)
    decomposable = single | flat
    if not decomposable.all():
        return True, None, None, int(np.nonzero(~decomposable)[0][0])
    j = np.where(single, np.argmax(hits, axis=1), p - 1).astype(np.int64)
    picked = data[np.arange(len(data)), np.minimum(j, p - 2)]
    eps = np.where(single, np.sign(picked), -np.sign(data[:, 0])).astype(np.int64)
    return True, eps, j, None


def analyze(f: FunctionTable) -> BentReport:
    """Classify a p-ary function: bent / weakly regular / dual / epsilon."""
    spec = walsh_full(f)
    p, n = spec.p, spec.dim
    if p == 2:
        if n % 2:
            ok = np.zeros(1, dtype=bool)  # |W|^2 = 2^n has no integer solution
        else:
            ok = np.abs(spec.data) == (1 << (n // 2))
        if not ok.all():
            bad = int(np.argmin(ok))
            return BentReport(False, NOT_BENT, failure_point=bad)
        dual_vals = (spec.data < 0).astype(np.uint8)
        dual = FunctionTable.scalar(f.domain, dual_vals)
        return BentReport(True, REGULAR, epsilon=1, dual=dual)
    bent, eps, j, first_bad = _classify_odd(spec)
    if not bent:
        return BentReport(False, NOT_BENT, failure_point=first_bad)
    if n % 2:
        return BentReport(
            True,
            NOT_WEAKLY_REGULAR,
            diagnostic="odd n: dual/sign extraction unsupported (out of scope)",
        )
    if eps is None or j is None:
        return BentReport(
            True,
            NOT_WEAKLY_REGULAR,
            failure_point=first_bad,
            diagnostic="spectrum value not of the form eps*p^(n/2)*zeta^j",
        )
    if not np.all(eps == eps[0]):
        mixed = int(np.nonzero(eps != eps[0])[0][0])
        return BentReport(
            True, NOT_WEAKLY_REGULAR, failure_point=mixed, diagnostic="mixed signs"
        )
    e = int(eps[0])
    dual = FunctionTable.scalar(f.domain, j.astype(np.uint8))
    return BentReport(
        True,
        REGULAR if e == 1 else WEAKLY_REGULAR_NOT_REGULAR,
        epsilon=e,
        dual=dual,
    )


# ---------------------------------------------------------------------------
# vectorial functions
# ---------------------------------------------------------------------------


def component(F: FunctionTable, c: int) -> FunctionTable:
    """F_c(x) = <c, F(x)> in the codomain's inner product."""
    if c == 0:
        raise DomainError("component index c must be nonzero")
    if not (0 < c < F.codomain.size):
        raise DomainError("component index outside codomain")
    lut = F.codomain.ip_with_all(c)
    return FunctionTable.scalar(F.domain, lut[F.values])


@dataclass
class VectorialReport:
    reports: dict
    vectorial_bent: bool
    uniform_epsilon: int | None


def analyze_vectorial(F: FunctionTable, keep_duals: bool = True) -> VectorialReport:
    reports = {}
    vect_bent = True
    epsilons = set()
    for c in range(1, F.codomain.size):
        rep = analyze(component(F, c))
        if not keep_duals:
            rep = BentReport(
                rep.is_bent, rep.regularity, rep.epsilon, None, rep.failure_point,
                rep.diagnostic,
            )
        reports[c] = rep
        vect_bent &= rep.is_bent
        epsilons.add(rep.epsilon if rep.weakly_regular else None)
    uniform = epsilons.pop() if len(epsilons) == 1 else None
    return VectorialReport(reports, vect_bent, uniform)


class _SpanTracker:
    """Greedy F_p-span of function tables with exact membership tests."""

    def __init__(self, p: int, length: int):
        self.p = p
        self.length = length
        self.basis: list[np.ndarray] = []
        self.probe_cols: list[int] = []

    def _solve_coords(self, vec: np.ndarray):
        """Coordinates of vec over the basis judging by probe columns only."""
        if not self.basis:
            return []
        p = self.p
        m = np.array([[int(b[c]) for b in self.basis] for c in self.probe_cols])
        rhs = [int(vec[c]) for c in self.probe_cols]
        coords = _solve_mod_p(m, rhs, p)
        return coords

    def membership(self, vec: np.ndarray):
        """Coordinates over the basis if vec is in the span, else None."""
        coords = self._solve_coords(vec)
        if coords is None:
            return None
        acc = np.zeros(self.length, dtype=np.int64)
        for lam, b in zip(coords, self.basis):
            if lam:
                acc += int(lam) * b.astype(np.int64)
        if np.array_equal(acc % self.p, vec.astype(np.int64) % self.p):
            return tuple(coords)
        return None

    def add_basis(self, vec: np.ndarray):
        """Extend the basis; needs a probe column making it independent."""
        coords = self._solve_coords(vec)
        acc = np.zeros(self.length, dtype=np.int64)
        for lam, b in zip(coords or [], self.basis):
            acc += int(lam) * b.astype(np.int64)
        diff = (vec.astype(np.int64) - acc) % self.p
        cols = np.nonzero(diff)[0]
        if cols.size == 0:
            raise DomainError("vector already in span")
        self.basis.append(vec.copy())
        self.probe_cols.append(int(cols[0]))


def _solve_mod_p(m: np.ndarray, rhs, p: int):
    """Solve m x = rhs mod p; assumes m square-ish with full column rank."""
    m = np.array(m, dtype=np.int64) % p
    rhs = np.array(rhs, dtype=np.int64) % p
    rows, cols = m.shape
    aug = np.concatenate([m, rhs[:, None]], axis=1)
    r = 0
    pivots = []
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if aug[i, c] % p:
                piv = i
                break
        if piv is None:
            return None
        aug[[r, piv]] = aug[[piv, r]]
        inv = pow(int(aug[r, c]), -1, p)
        aug[r] = (aug[r] * inv) % p
        for i in range(rows):
            if i != r and aug[i, c]:
                aug[i] = (aug[i] - aug[i, c] * aug[r]) % p
        pivots.append(c)
        r += 1
    if any(aug[r:, -1] % p):
        return None
    x = [0] * cols
    for i, c in enumerate(pivots):
        x[c] = int(aug[i, -1])
    return x


@dataclass
class DualBentResult:
    is_dual_bent: bool
    witness: FunctionTable | None = None
    reason: str = ""


def codomain_point_from_coords(codomain: SpaceDescriptor, coord_rows: list[np.ndarray]):
    """Invert v -> (<e_1,v>, ..., <e_m,v>) and map coordinate rows to points.

    coord_rows[i] holds the i-th inner-product coordinate of every entry.
    """
    m = codomain.dim
    p = codomain.p
    basis_points = [_basis_point(codomain, i) for i in range(m)]
    keys = np.zeros(codomain.size, dtype=np.int64)
    for i, bp in enumerate(basis_points):
        keys += codomain.ip_with_all(bp).astype(np.int64) * p**i
    inv = np.full(p**m, -1, dtype=np.int64)
    inv[keys] = np.arange(codomain.size)
    if (inv < 0).any():
        raise DomainError("degenerate codomain inner product")
    acc = np.zeros(len(coord_rows[0]), dtype=np.int64)
    for i, row in enumerate(coord_rows):
        acc += row.astype(np.int64) * p**i
    return inv[acc]


def _basis_point(space: SpaceDescriptor, i: int) -> int:
    """Point whose base-p digit string is e_i."""
    return space.p**i


def is_vectorial_dual_bent(F: FunctionTable) -> DualBentResult:
    """Set-closure test on the component duals, with witness reconstruction."""
    p = F.p
    m_dim = F.codomain.dim
    n_nonzero = F.codomain.size - 1
    tracker = _SpanTracker(p, F.domain.size)
    fingerprints = set()
    coords_by_c = {}
    for c in range(1, F.codomain.size):
        rep = analyze(component(F, c))
        if not rep.weakly_regular:
            raise DomainError(
                f"component {c} is not weakly regular bent; duals unavailable"
            )
        d = rep.dual.values.astype(np.int64)
        fp = hash(d.tobytes())
        if fp in fingerprints:
            return DualBentResult(False, reason=f"duplicate dual at component {c}")
        fingerprints.add(fp)
        coords = tracker.membership(d)
        if coords is None:
            if len(tracker.basis) == m_dim:
                return DualBentResult(
                    False, reason=f"dual of component {c} outside the m-dim span"
                )
            tracker.add_basis(d)
            coords = tracker.membership(d)
        coords_by_c[c] = coords
    if len(tracker.basis) != m_dim:
        return DualBentResult(
            False,
            reason=f"duals span dimension {len(tracker.basis)} < m = {m_dim}",
        )
    if len(fingerprints) != n_nonzero:
        return DualBentResult(False, reason="component duals not pairwise distinct")
    coord_rows = [b.astype(np.int64) % p for b in tracker.basis]
    g_vals = codomain_point_from_coords(F.codomain, coord_rows)
    witness = FunctionTable(F.domain, F.codomain, g_vals)
    return DualBentResult(True, witness=witness)


# ---------------------------------------------------------------------------
# dual decomposition and l-forms
# ---------------------------------------------------------------------------


@dataclass
class DualDecomposition:
    g: FunctionTable
    h: FunctionTable
    g_is_high_form: bool
    h_is_one_form: bool


def decompose_dual(f: FunctionTable, report: BentReport | None = None) -> DualDecomposition:
    """Split f* into its even part g and odd part h (odd p, even n)."""
    p = f.p
    if p == 2:
        raise DomainError("dual decomposition needs odd p")
    if f.domain.dim % 2:
        raise DomainError("dual decomposition needs even n")
    if report is None:
        report = analyze(f)
    if not report.weakly_regular:
        raise DomainError("dual decomposition needs a weakly regular bent function")
    d = report.dual.values.astype(np.int64)
    dn = d[f.domain.neg_perm()]
    inv2 = pow(2, -1, p)
    g = ((d + dn) * inv2) % p
    h = ((d - dn) * inv2) % p
    gt = FunctionTable.scalar(f.domain, g)
    ht = FunctionTable.scalar(f.domain, h)
    return DualDecomposition(
        gt, ht, l_form_check(gt, p - 1), l_form_check(ht, 1)
    )


def l_form_check(f: FunctionTable, l: int) -> bool:
    """f(c x) == c^l f(x) for every scalar c != 0, exhaustively."""
    _ = f.values  # force validation
    p = f.p
    if not f.is_scalar:
        raise DomainError("l-form check applies to p-ary functions")
    if not 1 <= l <= max(p - 1, 1):
        raise DomainError("l out of range")
    vals = f.values.astype(np.int64)
    for c in range(1, p):
        perm = f.domain.scalar_perm(c)
        if not np.array_equal(vals[perm] % p, (pow(c, l, p) * vals) % p):
            return False
    return True

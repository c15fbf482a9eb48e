"""Builders for the bent partitions this package studies.

Three families:

* a Maiorana-McFarland shape Tr(x pi(y)) + G(y) on F_{p^n} x F_{p^n} with a
  multiplier permutation theta tying pi and G together; with G nonzero the
  preimage partition is bent (class WBP) but does not come from a
  vectorial dual-bent function;
* a selector construction R^(i)(x) + Tr(beta P(y1 y2^(-1))) switching among
  a family of verified tables by Tr(alpha P(y1 y2^(-1)));
* a combiner K(R(x), R'(y)) with K balanced in each coordinate, covering
  the sum combiner K = x + y and the complete-permutation combiner
  K = P(x + y) + x.

Every builder re-verifies its preconditions exhaustively and refuses with
the name of the failed condition; nothing is trusted on authority.  The
catalog pins three concrete instances (two ternary over F_{3^4}, one
binary over F_{2^6}) together with their expected verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import ConstructionRefusedError, DomainError
from .fields import FieldDescriptor, SpaceDescriptor
from .partitions import verify_eq29
from .transform import FunctionTable


@dataclass
class ConstructionCertificate:
    kind: str
    bent_partition: bool
    class_wbp: bool
    dual_bent: bool
    epsilon: int | None = None
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# multiplier permutations
# ---------------------------------------------------------------------------


class MonomialPermutation:
    """x -> x^e on a field, with 0 -> 0; requires gcd(e, q-1) = 1."""

    def __init__(self, fld: FieldDescriptor, exponent: int):
        q = fld.order
        e = exponent % (q - 1)
        if e == 0:
            e = q - 1 if exponent != 0 else 0
        if gcd(e, q - 1) != 1:
            raise DomainError(f"x^{exponent} is not a permutation of F_{q}")
        self.field = fld
        self.exponent = e

    def table(self) -> np.ndarray:
        return self.field.pow_table(self.exponent)


class ThetaMap:
    """A bijection of F_{p^m}^* given as a table with theta[0] = 0 unused."""

    def __init__(self, fld: FieldDescriptor, table):
        table = np.asarray(table, dtype=np.int64)
        if len(table) != fld.order or table[0] != 0:
            raise DomainError("theta table must cover the field with theta[0] = 0")
        if sorted(table[1:].tolist()) != list(range(1, fld.order)):
            raise DomainError("theta must permute the nonzero elements")
        self.field = fld
        self.table = table

    @staticmethod
    def from_power(fld: FieldDescriptor, e: int) -> "ThetaMap":
        return ThetaMap(fld, fld.pow_table(e))

    def inverse(self) -> np.ndarray:
        inv = np.zeros_like(self.table)
        inv[self.table] = np.arange(len(self.table))
        return inv


def theta_condition_check(theta: ThetaMap) -> bool:
    """theta^-1(d^-1) + theta^-1(e^-1) == theta^-1((d+e)^-1) for d != -e."""
    fld = theta.field
    tinv = theta.inverse()
    finv = fld.inv_table()
    q = fld.order
    for d in range(1, q):
        for e in range(1, q):
            s = fld.add(d, e)
            if s == 0:
                continue
            lhs = fld.add(int(tinv[finv[d]]), int(tinv[finv[e]]))
            if lhs != int(tinv[finv[s]]):
                return False
    return True


def homogeneity_check(
    values: np.ndarray,
    theta: ThetaMap,
    big: FieldDescriptor,
    value_in_subfield: bool,
) -> bool:
    """map(c x) == theta(c) * map(x) for every scalar c in F_{p^m}^*.

    `values` maps the big field to itself (value_in_subfield=False) or to
    the standalone subfield (True); scalars act through the embedding.
    """
    sub_field = theta.field
    _, embed = big.subfield(sub_field.degree, sub_field.modulus)
    mt = big.mul_table()
    vals = np.asarray(values, dtype=np.int64)
    for c in range(1, sub_field.order):
        ce = int(embed[c])
        tc = int(theta.table[c])
        lhs = vals[mt[ce]]
        if value_in_subfield:
            rhs = sub_field.mul_table()[tc][vals]
        else:
            rhs = mt[int(embed[tc])][vals]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def derive_theta(
    values: np.ndarray,
    big: FieldDescriptor,
    m: int,
    value_in_subfield: bool = False,
    sub_modulus=None,
) -> ThetaMap | None:
    """Find the multiplier theta of a map, if one exists (checked fully)."""
    sub, embed = big.subfield(m, sub_modulus)
    back = {int(e): i for i, e in enumerate(embed)}
    vals = np.asarray(values, dtype=np.int64)
    x0 = next((x for x in range(big.order) if vals[x] != 0), None)
    if x0 is None:
        return None
    table = np.zeros(sub.order, dtype=np.int64)
    in_subfield = value_in_subfield
    for c in range(1, sub.order):
        ce = int(embed[c])
        if in_subfield:
            tc = sub.mul(int(vals[big.mul(ce, x0)]), sub.inv(int(vals[x0])))
        else:
            v = big.mul(int(vals[big.mul(ce, x0)]), big.inv(int(vals[x0])))
            if v not in back:
                return None
            tc = back[v]
        table[c] = tc
    if sorted(table[1:].tolist()) != list(range(1, sub.order)):
        return None
    theta = ThetaMap(sub, table)
    if not homogeneity_check(vals, theta, big, in_subfield):
        return None
    return theta


# ---------------------------------------------------------------------------
# Maiorana-McFarland shape
# ---------------------------------------------------------------------------


def mm_table(
    big: FieldDescriptor,
    m: int,
    pi,
    G_values=None,
    permuted_first: bool = False,
    sub_modulus=None,
) -> FunctionTable:
    """Tr_m^n(u * pi(v)) + G(v) as a dense table over F_{p^n} x F_{p^n}.

    Component order is (u, v); with permuted_first=True the roles swap so
    the permuted variable is component 0.
    """
    if big.degree % m:
        raise DomainError("m must divide the field degree")
    sub, _ = big.subfield(m, sub_modulus)
    q = big.order
    pi_tab = pi.table() if isinstance(pi, MonomialPermutation) else np.asarray(pi)
    if sorted(pi_tab.tolist()) != list(range(q)):
        raise DomainError("pi must be a permutation of the field")
    if G_values is None:
        G_values = np.zeros(q, dtype=np.int64)
    G_values = np.asarray(G_values, dtype=np.int64)
    tr = big.trace_table(m, sub_modulus)
    mt = big.mul_table()
    addm = sub.add_table()
    out = np.empty(q * q, dtype=np.uint16)
    for v in range(q):
        row = addm[tr[mt[int(pi_tab[v])]], int(G_values[v])]
        if permuted_first:
            out[v::q] = row  # u is the slow index
        else:
            out[v * q : (v + 1) * q] = row  # u is the fast index
    domain = SpaceDescriptor.of_fields(big, big)
    codomain = SpaceDescriptor.of_fields(sub)
    return FunctionTable(domain, codomain, out)


def build_prop3(
    big: FieldDescriptor,
    m: int,
    pi,
    G_values,
    theta: ThetaMap | None = None,
    sub_modulus=None,
):
    """The MM-with-multiplier construction; refuses if any hypothesis fails.

    Returns (table, certificate): a depth-p^m bent partition in class WBP
    whose duals do NOT assemble into a vectorial dual-bent witness.
    """
    p, n = big.p, big.degree
    if n % m:
        raise ConstructionRefusedError("m_divides_n", f"m={m}, n={n}")
    if m == n:
        raise ConstructionRefusedError("m_not_equal_n")
    if p == 2 and m < 2:
        raise ConstructionRefusedError("m_ge_2_for_p2")
    pi_tab = pi.table() if isinstance(pi, MonomialPermutation) else np.asarray(pi)
    if sorted(pi_tab.tolist()) != list(range(big.order)):
        raise ConstructionRefusedError("pi_permutation")
    G_values = np.asarray(G_values, dtype=np.int64)
    if not G_values.any():
        raise ConstructionRefusedError("G_nonzero")
    if theta is None:
        theta = derive_theta(pi_tab, big, m, sub_modulus=sub_modulus)
        if theta is None:
            raise ConstructionRefusedError("pi_homogeneity", "no multiplier found")
    if not homogeneity_check(pi_tab, theta, big, value_in_subfield=False):
        raise ConstructionRefusedError("pi_homogeneity")
    if not homogeneity_check(G_values, theta, big, value_in_subfield=True):
        raise ConstructionRefusedError("G_homogeneity")
    if not theta_condition_check(theta):
        raise ConstructionRefusedError("theta_condition")
    table = mm_table(big, m, pi_tab, G_values, sub_modulus=sub_modulus)
    cert = ConstructionCertificate(
        kind="prop3",
        bent_partition=True,
        class_wbp=True,
        dual_bent=False,
        epsilon=1,
        details={"depth": p**m},
    )
    return table, cert


# ---------------------------------------------------------------------------
# selector construction
# ---------------------------------------------------------------------------


def build_prop4(
    R_family,
    yfield: FieldDescriptor,
    m: int,
    alpha: int,
    beta: int,
    P=None,
):
    """Switch among verified tables R^(i) by Tr(alpha P(y1 y2^-1)).

    R_family is indexed by the codomain index i; every member must pass
    the shared-dual-shift verification with one epsilon, and the shift of
    R^(0) must be nonzero.  alpha, beta in the y-field must be linearly
    independent over F_{p^m}; P is a permutation fixing 0.
    """
    nprime = yfield.degree
    if nprime % m:
        raise ConstructionRefusedError("m_divides_nprime")
    if nprime == m:
        raise ConstructionRefusedError("m_not_equal_nprime")
    base = R_family[0]
    codomain = base.codomain
    p = base.p
    if len(R_family) != codomain.size:
        raise ConstructionRefusedError("R_family_complete", "need one table per value")
    if any(R.domain != base.domain or R.codomain != codomain for R in R_family):
        raise ConstructionRefusedError("R_family_aligned")
    if P is None:
        P = np.arange(yfield.order, dtype=np.int64)
    P = np.asarray(P, dtype=np.int64)
    if sorted(P.tolist()) != list(range(yfield.order)):
        raise ConstructionRefusedError("P_permutation")
    if P[0] != 0:
        raise ConstructionRefusedError("P_fixes_zero")
    sub, embed = yfield.subfield(m)
    if alpha == 0 or beta == 0:
        raise ConstructionRefusedError("alpha_beta_independent", "zero element")
    ratio = yfield.mul(beta, yfield.inv(alpha))
    if ratio in set(int(e) for e in embed):
        raise ConstructionRefusedError(
            "alpha_beta_independent", "beta/alpha lies in the subfield"
        )
    # verify every distinct member once
    eps_seen = set()
    results = {}
    for R in R_family:
        key = R.values.tobytes()
        if key not in results:
            try:
                res = verify_eq29(R)
            except DomainError as exc:
                raise ConstructionRefusedError("R_eq29", str(exc)) from exc
            if not res.report.is_bent_partition:
                raise ConstructionRefusedError("R_eq29", res.report.status)
            results[key] = res
        eps_seen.add(results[key].epsilon)
    if len(eps_seen) != 1:
        raise ConstructionRefusedError("epsilon_uniform")
    h0 = results[R_family[0].values.tobytes()].h
    if not h0.values.any():
        raise ConstructionRefusedError("h0_nonzero")
    epsilon = eps_seen.pop()

    q = yfield.order
    tr = yfield.trace_table(m)
    mt = yfield.mul_table()
    inv = yfield.inv_table()
    addm = sub.add_table()
    nx = base.domain.size
    stack = np.stack([R.values.astype(np.int64) for R in R_family])
    out = np.empty(nx * q * q, dtype=np.uint16)
    for y2 in range(q):
        for y1 in range(q):
            s = int(P[mt[y1, inv[y2]]])
            sel = int(tr[mt[alpha, s]])
            t = int(tr[mt[beta, s]])
            off = nx * (y1 + q * y2)
            out[off : off + nx] = addm[stack[sel], t]
    domain = SpaceDescriptor(p, list(base.domain.components) + [yfield, yfield])
    table = FunctionTable(domain, codomain, out)
    cert = ConstructionCertificate(
        kind="prop4",
        bent_partition=True,
        class_wbp=True,
        dual_bent=False,
        epsilon=epsilon,
        details={"depth": codomain.size, "h0_nonzero": True},
    )
    return table, cert


# ---------------------------------------------------------------------------
# combiner construction
# ---------------------------------------------------------------------------


def is_complete_permutation(P, fld: FieldDescriptor) -> bool:
    """P and x -> P(x) + x are both bijections."""
    P = np.asarray(P, dtype=np.int64)
    if sorted(P.tolist()) != list(range(fld.order)):
        raise DomainError("P must be a bijection")
    shifted = fld.add_table()[P, np.arange(fld.order)]
    return len(np.unique(shifted)) == fld.order


def build_thm6(R: FunctionTable, Rp: FunctionTable, K: FunctionTable):
    """F(x, y) = K(R(x), R'(y)) with K balanced in each coordinate."""
    if K.domain.components != R.codomain.components + Rp.codomain.components or K.p != R.p:
        raise ConstructionRefusedError(
            "K_domain", "K must be defined on codomain(R) x codomain(R')"
        )
    qx, qy, qr = R.codomain.size, Rp.codomain.size, K.codomain.size
    if qx % qr or qy % qr:
        raise ConstructionRefusedError("K_output_size")
    K2 = K.values.reshape(qy, qx)
    for x in range(qx):
        counts = np.bincount(K2[:, x].astype(np.int64), minlength=qr)
        if not np.all(counts == qy // qr):
            raise ConstructionRefusedError(
                "K_sections_balanced", f"section S^(x) at x={x} is unbalanced"
            )
    for y in range(qy):
        counts = np.bincount(K2[y].astype(np.int64), minlength=qr)
        if not np.all(counts == qx // qr):
            raise ConstructionRefusedError(
                "K_sections_balanced", f"section T^(y) at y={y} is unbalanced"
            )
    res_R = verify_eq29(R)
    if not res_R.report.is_bent_partition:
        raise ConstructionRefusedError("R_eq29", res_R.report.status)
    res_Rp = verify_eq29(Rp)
    if not res_Rp.report.is_bent_partition:
        raise ConstructionRefusedError("Rprime_eq29", res_Rp.report.status)
    hv, hpv = res_R.h.values, res_Rp.h.values
    h_const = np.all(hv == hv[0])
    hp_const = np.all(hpv == hpv[0])
    dual_bent = bool(
        h_const and hp_const and (int(hv[0]) + int(hpv[0])) % R.p == 0
    )
    vals = K2[Rp.values.astype(np.int64)[:, None], R.values.astype(np.int64)[None, :]]
    domain = SpaceDescriptor(
        R.p, list(R.domain.components) + list(Rp.domain.components)
    )
    table = FunctionTable(domain, K.codomain, vals.reshape(-1))
    cert = ConstructionCertificate(
        kind="thm6",
        bent_partition=True,
        class_wbp=True,
        dual_bent=dual_bent,
        epsilon=res_R.epsilon * res_Rp.epsilon,
        details={
            "depth": qr,
            "epsilon_left": res_R.epsilon,
            "epsilon_right": res_Rp.epsilon,
            "G_left": res_R.G,
            "h_left": res_R.h,
            "G_right": res_Rp.G,
            "h_right": res_Rp.h,
        },
    )
    return table, cert


def sum_combiner(codomain: SpaceDescriptor) -> FunctionTable:
    """K(x, y) = x + y on a shared codomain."""
    q = codomain.size
    idx = np.arange(q, dtype=np.int64)
    vals = np.empty((q, q), dtype=np.int64)
    for y in range(q):
        vals[y] = codomain.add_points(y, idx)
    dom = SpaceDescriptor(codomain.p, list(codomain.components) * 2)
    return FunctionTable(dom, codomain, vals.reshape(-1))


def complete_permutation_combiner(fld: FieldDescriptor, P) -> FunctionTable:
    """K(x, y) = P(x + y) + x for a complete permutation P of the field."""
    P = np.asarray(P, dtype=np.int64)
    if not is_complete_permutation(P, fld):
        raise ConstructionRefusedError("P_complete_permutation")
    at = fld.add_table()
    q = fld.order
    vals = np.empty((q, q), dtype=np.int64)
    idx = np.arange(q)
    for y in range(q):
        vals[y] = at[P[at[y, idx]], idx]
    cod = SpaceDescriptor.of_fields(fld)
    dom = SpaceDescriptor(fld.p, [fld, fld])
    return FunctionTable(dom, cod, vals.reshape(-1))


# ---------------------------------------------------------------------------
# the pinned example catalog
# ---------------------------------------------------------------------------


def _example_fields():
    F81 = FieldDescriptor(3, 4)
    F64 = FieldDescriptor(2, 6)
    return F81, F64


def _beta_outside_subfield(big: FieldDescriptor, m: int) -> int:
    _, embed = big.subfield(m)
    inside = set(int(e) for e in embed)
    return min(x for x in range(big.order) if x not in inside)


def catalog_ids():
    return ("ex1", "ex2", "ex3")


def example_catalog(name: str):
    """Build a pinned example; returns (table, expected, certificate)."""
    F81, F64 = _example_fields()
    if name == "ex1":
        R0 = mm_table(F81, 2, MonomialPermutation(F81, 69),
                      F81.trace_table(2)[F81.pow_table(29)], permuted_first=True)
        Ri = mm_table(F81, 2, MonomialPermutation(F81, 79), None, permuted_first=True)
        family = [R0] + [Ri] * 8
        beta = _beta_outside_subfield(F81, 2)
        table, cert = build_prop4(family, F81, 2, alpha=1, beta=beta)
        expected = {
            "bent_partition": True,
            "class_wbp": True,
            "dual_bent": False,
            "depth": 9,
        }
        return table, expected, cert
    if name == "ex2":
        R = mm_table(F81, 2, MonomialPermutation(F81, 69),
                     F81.trace_table(2)[F81.pow_table(29)], permuted_first=True)
        Rp = mm_table(F81, 2, MonomialPermutation(F81, 79), None, permuted_first=True)
        K = sum_combiner(R.codomain)
        table, cert = build_thm6(R, Rp, K)
        expected = {
            "bent_partition": True,
            "class_wbp": True,
            "dual_bent": False,
            "depth": 9,
        }
        return table, expected, cert
    if name == "ex3":
        inv = MonomialPermutation(F64, -1)
        # x1^(-1) x2: the inverted variable is component 0
        R = mm_table(F64, 6, inv, None, permuted_first=True)
        # y1 y2^(-1): the inverted variable is component 1
        Rp = mm_table(F64, 6, inv, None, permuted_first=False)
        _, embed4 = F64.subfield(2)
        alpha = int(embed4[2])  # an element of F_4 outside F_2
        x = np.arange(64, dtype=np.int64)
        P = F64.add_table()[
            F64.add_table()[F64.pow_table(17), F64.pow_table(5)],
            F64.mul_table()[alpha][x],
        ]
        K = complete_permutation_combiner(F64, P)
        table, cert = build_thm6(R, Rp, K)
        expected = {
            "bent_partition": True,
            "class_wbp": True,
            "dual_bent": True,
            "depth": 64,
        }
        return table, expected, cert
    raise DomainError(f"unknown example {name!r}; try one of {catalog_ids()}")


def thm6_witnesses(K: FunctionTable, cert: ConstructionCertificate, domain):
    """The (G, h) pair of a combiner table, assembled from its halves.

    (F_c)* (x, y) = <c, K(G_left(x), G_right(y))> + h_left(x) + h_right(y),
    so the full witnesses are K(G_l, G_r) and the summed shift.
    """
    if cert.kind != "thm6":
        raise DomainError("witness composition applies to combiner certificates")
    G_l, h_l = cert.details["G_left"], cert.details["h_left"]
    G_r, h_r = cert.details["G_right"], cert.details["h_right"]
    p = K.p
    qx = G_l.codomain.size
    qy = G_r.codomain.size
    K2 = K.values.reshape(qy, qx)
    g_vals = K2[
        G_r.values.astype(np.int64)[:, None], G_l.values.astype(np.int64)[None, :]
    ].reshape(-1)
    h_vals = (
        (h_l.values.astype(np.int64)[None, :] + h_r.values.astype(np.int64)[:, None])
        % p
    ).reshape(-1)
    return (
        FunctionTable(domain, K.codomain, g_vals),
        FunctionTable.scalar(domain, h_vals),
    )

"""Exact arithmetic for finite fields F_{p^k} and product spaces over F_p.

Elements of F_{p^k} are stored as canonical integer indices: the element
with polynomial-basis digits (d_0, ..., d_{k-1}) has index sum(d_i * p^i).
A product space (mixed field / prime-vector components) indexes its points
mixed-radix with component 0 least significant, so a point index is again
just a base-p digit string and additive structure is digitwise mod p.

The inner product is the trace form Tr(a*b) on field components and the
dot product on prime-vector components, summed over components.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import DomainError

# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient tuples, low degree first)
# ---------------------------------------------------------------------------


def _poly_trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return c[:i]


def _poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(tuple(out))


def _poly_mod(a, m, p):
    """Remainder of a modulo the monic polynomial m."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(tuple(a))


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


# Default moduli (Conway polynomials, coefficients low -> high).
DEFAULT_MODULI = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
}

_IRRED_CHECK_CAP = 1 << 26
_FIELD_SIZE_CAP = 1 << 31
_TABLE_CAP = 1 << 12


class FieldDescriptor:
    """Immutable description of F_{p^k} with a fixed polynomial basis."""

    def __init__(self, p: int, degree: int, modulus=None):
        if not is_prime(p):
            raise DomainError(f"p={p} is not prime")
        if degree < 1:
            raise DomainError("degree must be positive")
        if p**degree > _FIELD_SIZE_CAP:
            raise DomainError(f"field size p^k = {p**degree} exceeds cap 2^31")
        if modulus is None:
            try:
                modulus = DEFAULT_MODULI[(p, degree)]
            except KeyError:
                raise DomainError(
                    f"no default modulus shipped for F_{p}^{degree}; supply one"
                ) from None
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != degree + 1 or modulus[-1] != 1:
            raise DomainError("modulus must be monic of degree k")
        self.p = p
        self.degree = degree
        self.modulus = modulus
        self.order = p**degree
        if self.order <= _IRRED_CHECK_CAP:
            self._check_irreducible()
        self._cache: dict = {}

    # -- construction checks ------------------------------------------------

    def _check_irreducible(self):
        p, k, m = self.p, self.degree, self.modulus
        if k == 1:
            return
        # exhaustive trial division by every monic polynomial of degree <= k/2
        for d in range(1, k // 2 + 1):
            for idx in range(p**d):
                div = _index_to_digits(idx, p, d) + (1,)
                if not _poly_mod(m, div, p):
                    raise DomainError(
                        f"modulus {m} is reducible over F_{p} (divisor {div})"
                    )

    # -- canonical index <-> digit vector -----------------------------------

    def digits(self, a: int):
        return _index_to_digits(a, self.p, self.degree)

    def from_digits(self, digs) -> int:
        v = 0
        for d in reversed(digs):
            v = v * self.p + (d % self.p)
        return v

    # -- exact arithmetic on element indices ---------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        v, mult = 0, 1
        for _ in range(self.degree):
            v += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return v

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        p = self.p
        v, mult = 0, 1
        for _ in range(self.degree):
            v += ((-a) % p) * mult
            a //= p
            mult *= p
        return v

    def mul(self, a: int, b: int) -> int:
        prod = _poly_mul(self.digits(a), self.digits(b), self.p)
        return self.from_digits(_poly_mod(prod, self.modulus, self.p))

    def inv(self, a: int) -> int:
        """Multiplicative inverse with the total convention inv(0) = 0."""
        if a == 0:
            return 0
        return self.pow(a, self.order - 2)

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        e %= self.order - 1
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frobenius(self, a: int, i: int = 1) -> int:
        return self.pow(a, self.p**i)

    # -- cached lookup tables (small fields only) ----------------------------

    def _cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def mul_table(self) -> np.ndarray:
        if self.order > _TABLE_CAP:
            raise DomainError("field too large for dense tables")

        def build():
            q = self.order
            t = np.zeros((q, q), dtype=np.int32)
            for a in range(q):
                for b in range(a, q):
                    v = self.mul(a, b)
                    t[a, b] = v
                    t[b, a] = v
            t.setflags(write=False)
            return t

        return self._cached("mul_table", build)

    def add_table(self) -> np.ndarray:
        if self.order > _TABLE_CAP:
            raise DomainError("field too large for dense tables")

        def build():
            q, p, k = self.order, self.p, self.degree
            digs = _digit_matrix(q, p, k)
            t = np.zeros((q, q), dtype=np.int32)
            places = p ** np.arange(k)
            for a in range(q):
                t[a] = ((digs[a] + digs) % p) @ places
            t.setflags(write=False)
            return t

        return self._cached("add_table", build)

    def neg_table(self) -> np.ndarray:
        def build():
            q, p, k = self.order, self.p, self.degree
            digs = _digit_matrix(q, p, k)
            places = p ** np.arange(k)
            t = (((-digs) % p) @ places).astype(np.int32)
            t.setflags(write=False)
            return t

        return self._cached("neg_table", build)

    def inv_table(self) -> np.ndarray:
        def build():
            t = np.array([self.inv(a) for a in range(self.order)], dtype=np.int32)
            t.setflags(write=False)
            return t

        return self._cached("inv_table", build)

    def pow_table(self, e: int) -> np.ndarray:
        """x -> x^e over the whole field, with 0^e = 0 (e > 0)."""
        key = ("pow", e)
        return self._cached(
            key,
            lambda: np.array([self.pow(a, e) for a in range(self.order)], dtype=np.int32),
        )

    # -- subfields and traces -------------------------------------------------

    def subfield(self, m: int, modulus=None):
        """Embedding of the standalone F_{p^m} into this field.

        Returns (sub, embed) where embed[i] is the element of this field
        representing the standalone element i; cached per (m, modulus).
        """
        if self.degree % m:
            raise DomainError(f"m={m} does not divide degree {self.degree}")
        key = ("subfield", m, modulus)

        def build():
            sub = (
                self
                if (m == self.degree and modulus is None)
                else FieldDescriptor(self.p, m, modulus)
            )
            if m == self.degree and modulus is None:
                embed = np.arange(self.order, dtype=np.int32)
                return sub, embed
            # the unique subfield copy = fixed points of the p^m Frobenius
            fixed = [a for a in range(self.order) if self.frobenius(a, m) == a]
            assert len(fixed) == sub.order
            # a root of the standalone modulus inside the copy defines the iso
            beta = None
            for cand in fixed:
                acc, powc = 0, 1
                for c in sub.modulus:
                    acc = self.add(acc, self.mul(c % self.p, powc))
                    powc = self.mul(powc, cand)
                if acc == 0:
                    beta = cand
                    break
            if beta is None:
                raise DomainError("subfield modulus has no root in the large field")
            embed = np.zeros(sub.order, dtype=np.int32)
            for i in range(sub.order):
                acc, powb = 0, 1
                for d in sub.digits(i):
                    acc = self.add(acc, self.mul(d, powb))
                    powb = self.mul(powb, beta)
                embed[i] = acc
            assert len(set(embed.tolist())) == sub.order
            embed.setflags(write=False)
            return sub, embed

        return self._cached(key, build)

    def trace(self, m: int, a: int) -> int:
        """Tr_m^n(a) as a canonical index of the standalone F_{p^m}."""
        return int(self.trace_table(m)[a])

    def trace_table(self, m: int = 1, modulus=None) -> np.ndarray:
        if self.degree % m:
            raise DomainError(f"m={m} does not divide degree {self.degree}")
        key = ("trace", m, modulus)

        def build():
            sub, embed = self.subfield(m, modulus)
            back = {int(e): i for i, e in enumerate(embed)}
            t = np.zeros(self.order, dtype=np.int32)
            for a in range(self.order):
                acc, conj = 0, a
                for _ in range(self.degree // m):
                    acc = self.add(acc, conj)
                    conj = self.frobenius(conj, m)
                t[a] = back[acc]
            t.setflags(write=False)
            return t

        return self._cached(key, build)

    def absolute_trace_table(self) -> np.ndarray:
        """Tr_1^k as plain F_p values (the m=1 standalone index is the value)."""
        return self.trace_table(1)

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FieldDescriptor)
            and self.p == other.p
            and self.degree == other.degree
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.degree, self.modulus))

    def __repr__(self):
        return f"FieldDescriptor(p={self.p}, degree={self.degree}, modulus={self.modulus})"


def _index_to_digits(idx: int, p: int, k: int):
    digs = []
    for _ in range(k):
        digs.append(idx % p)
        idx //= p
    return tuple(digs)


@functools.lru_cache(maxsize=64)
def _digit_matrix_cached(q: int, p: int, k: int):
    m = np.zeros((q, k), dtype=np.int64)
    tmp = np.arange(q, dtype=np.int64)
    for j in range(k):
        m[:, j] = tmp % p
        tmp //= p
    m.setflags(write=False)
    return m


def _digit_matrix(q, p, k):
    return _digit_matrix_cached(q, p, k)


# ---------------------------------------------------------------------------
# space components
# ---------------------------------------------------------------------------


class FieldComponent:
    kind = "field"

    def __init__(self, field: FieldDescriptor):
        self.field = field
        self.p = field.p
        self.dim = field.degree
        self.size = field.order

    def ip_lut(self, a: int) -> np.ndarray:
        """values of <a, v> = Tr(a*v) over all v, as F_p values."""
        f = self.field
        tr = f.absolute_trace_table()
        if f.order <= _TABLE_CAP:
            return tr[f.mul_table()[a]].astype(np.int8)
        return np.array([tr[f.mul(a, v)] for v in range(f.order)], dtype=np.int8)

    def gram_block(self) -> np.ndarray:
        f = self.field
        tr = f.absolute_trace_table()
        k = f.degree
        g = np.zeros((k, k), dtype=np.int64)
        basis = [f.from_digits(tuple(1 if i == j else 0 for i in range(k))) for j in range(k)]
        for r in range(k):
            for s in range(k):
                g[r, s] = tr[f.mul(basis[r], basis[s])]
        return g

    def descriptor(self):
        return {"field": {"degree": self.field.degree, "modulus": list(self.field.modulus)}}

    def __eq__(self, other):
        return isinstance(other, FieldComponent) and self.field == other.field

    def __hash__(self):
        return hash(("field", self.field))


class VectorComponent:
    kind = "vector"

    def __init__(self, p: int, dim: int):
        if dim < 1:
            raise DomainError("vector component dimension must be positive")
        self.p = p
        self.dim = dim
        self.size = p**dim

    def ip_lut(self, a: int) -> np.ndarray:
        digs = _digit_matrix(self.size, self.p, self.dim)
        ad = np.array(_index_to_digits(a, self.p, self.dim), dtype=np.int64)
        return ((digs @ ad) % self.p).astype(np.int8)

    def gram_block(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    def descriptor(self):
        return {"vector": self.dim}

    def __eq__(self, other):
        return (
            isinstance(other, VectorComponent)
            and self.p == other.p
            and self.dim == other.dim
        )

    def __hash__(self):
        return hash(("vector", self.p, self.dim))


# ---------------------------------------------------------------------------
# product spaces
# ---------------------------------------------------------------------------


class SpaceDescriptor:
    """V_n^(p) as an ordered product of field / prime-vector components.

    Point index is mixed-radix over component indices, component 0 least
    significant.  Since every component is indexed by base-p digits that
    are F_p-coordinates, the full index is a base-p digit string and the
    additive group structure is digitwise mod p.
    """

    def __init__(self, p: int, components):
        if not components:
            raise DomainError("a space needs at least one component")
        comps = []
        for c in components:
            if isinstance(c, FieldDescriptor):
                c = FieldComponent(c)
            if c.p != p:
                raise DomainError("all components must share the same p")
            comps.append(c)
        self.p = p
        self.components = tuple(comps)
        self.dim = sum(c.dim for c in comps)
        self.size = p**self.dim
        self.comp_sizes = tuple(c.size for c in comps)
        places = [1]
        for c in comps[:-1]:
            places.append(places[-1] * c.size)
        self.comp_places = tuple(places)
        self._cache: dict = {}

    # -- constructors --------------------------------------------------------

    @staticmethod
    def vector(p: int, n: int) -> "SpaceDescriptor":
        return SpaceDescriptor(p, [VectorComponent(p, n)])

    @staticmethod
    def of_fields(*fields: FieldDescriptor) -> "SpaceDescriptor":
        return SpaceDescriptor(fields[0].p, list(fields))

    @staticmethod
    def scalar_line(p: int) -> "SpaceDescriptor":
        """The 1-dimensional codomain used by p-ary functions."""
        return SpaceDescriptor(p, [VectorComponent(p, 1)])

    # -- indexing -------------------------------------------------------------

    def decompose(self, idx):
        """Component indices of a point (scalar int or ndarray)."""
        out = []
        rem = idx
        for q in self.comp_sizes:
            out.append(rem % q)
            rem = rem // q
        return out

    def compose(self, parts):
        acc = 0
        for part, place in zip(reversed(parts), reversed(self.comp_places)):
            acc = acc + part * place
        return acc

    def points(self):
        return range(self.size)

    # -- additive structure (digitwise mod p) ---------------------------------

    def _comp_luts(self, key, scalar_fn):
        def build():
            luts = []
            for comp in self.components:
                digs = _digit_matrix(comp.size, self.p, comp.dim)
                vals = scalar_fn(digs) % self.p
                places = self.p ** np.arange(comp.dim)
                luts.append((vals @ places).astype(np.int64))
            return luts

        return self._cached(key, build)

    def _cached(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def neg_point(self, idx):
        luts = self._comp_luts("neg_luts", lambda d: -d)
        parts = self.decompose(idx)
        return self.compose([lut[part] for lut, part in zip(luts, parts)])

    def scalar_point(self, c: int, idx):
        """Scalar multiplication by c in F_p, digitwise."""
        c %= self.p
        luts = self._comp_luts(("scalar_luts", c), lambda d: c * d)
        parts = self.decompose(idx)
        return self.compose([lut[part] for lut, part in zip(luts, parts)])

    def add_points(self, a, b):
        pa, pb = self.decompose(a), self.decompose(b)
        parts = []
        for comp, xa, xb in zip(self.components, pa, pb):
            digs = _digit_matrix(comp.size, self.p, comp.dim)
            places = self.p ** np.arange(comp.dim)
            parts.append(((digs[xa] + digs[xb]) % self.p) @ places)
        return self.compose(parts)

    def sub_points(self, a, b):
        return self.add_points(a, self.neg_point(b))

    def neg_perm(self) -> np.ndarray:
        def build():
            idx = np.arange(self.size, dtype=np.int64)
            return np.asarray(self.neg_point(idx))

        return self._cached("neg_perm", build)

    def scalar_perm(self, c: int) -> np.ndarray:
        c %= self.p

        def build():
            idx = np.arange(self.size, dtype=np.int64)
            return np.asarray(self.scalar_point(c, idx))

        return self._cached(("scalar_perm", c), build)

    # -- inner product ---------------------------------------------------------

    def inner_product(self, a: int, b: int) -> int:
        total = 0
        for comp, xa, xb in zip(self.components, self.decompose(a), self.decompose(b)):
            total += int(comp.ip_lut(xa)[xb])
        return total % self.p

    def ip_luts(self, a: int):
        """Per-component lookup tables of <a_i, .> for fast bulk sums."""
        return [
            comp.ip_lut(xa) for comp, xa in zip(self.components, self.decompose(a))
        ]

    def ip_with_all(self, a: int) -> np.ndarray:
        """<a, x> for every point x, as an int8 array of F_p values."""
        luts = self.ip_luts(a)
        shape = tuple(reversed(self.comp_sizes))
        acc = np.zeros(shape, dtype=np.int16)
        s = len(luts)
        for i, lut in enumerate(luts):
            # component i varies along axis s-1-i (component 0 fastest)
            newshape = [1] * s
            newshape[s - 1 - i] = len(lut)
            acc += lut.reshape(newshape)
        return (acc % self.p).astype(np.int8).reshape(-1)

    def gram(self) -> np.ndarray:
        def build():
            g = np.zeros((self.dim, self.dim), dtype=np.int64)
            off = 0
            for comp in self.components:
                k = comp.dim
                g[off : off + k, off : off + k] = comp.gram_block()
                off += k
            g.setflags(write=False)
            return g

        return self._cached("gram", build)

    def is_nondegenerate(self) -> bool:
        return _rank_mod_p(self.gram().copy(), self.p) == self.dim

    # -- misc -------------------------------------------------------------------

    def descriptor(self):
        return [c.descriptor() for c in self.components]

    def __eq__(self, other):
        return (
            isinstance(other, SpaceDescriptor)
            and self.p == other.p
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.p, self.components))

    def __repr__(self):
        return f"SpaceDescriptor(p={self.p}, dim={self.dim}, components={len(self.components)})"


def _rank_mod_p(m: np.ndarray, p: int) -> int:
    m = m % p
    rows, cols = m.shape
    rank, r = 0, 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        r += 1
        rank += 1
        if r == rows:
            break
    return rank


def digit_matrix(q: int, p: int, k: int) -> np.ndarray:
    """Base-p digit rows for indices 0..q-1 (shared cache)."""
    return _digit_matrix(q, p, k)

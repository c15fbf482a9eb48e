"""Walsh transforms of p-ary function tables, exact over Z[zeta_p].

W_f(a) = sum_x zeta^(f(x) - <a,x>).  Two independent routes are provided:

* `walsh_point` sums the definition directly (a histogram of exponents),
  one point at a time.  It is the oracle everything else is checked against.
* `walsh_full` runs a radix-p butterfly transform in the plain dot-product
  coordinate system and then permutes the result through the Gram matrix of
  the space's inner product, so trace forms on field components come out
  right.  For p = 2 the work array is plain integers; for odd p it holds
  redundant exponent coordinates (length-p integer vectors) so that
  multiplying by a root of unity is a cyclic roll.

Both routes are exact; there is no floating point anywhere.
"""

from __future__ import annotations

import numpy as np

from .cyclotomic import CycInt
from .errors import DomainError, RouteRefusedError
from .fields import SpaceDescriptor, digit_matrix

# hard cap on table length; odd-p full transforms refuse earlier (see below)
SIZE_CAP = 1 << 26

# desk budget for holding a full cyclotomic spectrum in memory
def _full_transform_allowed(p: int, size: int) -> bool:
    if p == 2:
        return size <= SIZE_CAP
    return size * p * 8 <= (512 << 20)


def _min_uint_dtype(maxval: int):
    for dt in (np.uint8, np.uint16, np.uint32, np.uint64):
        if maxval <= np.iinfo(dt).max:
            return dt
    raise DomainError("value range too large")


class FunctionTable:
    """Dense table of a function V_n^(p) -> V_m^(p), values as codomain indices."""

    def __init__(self, domain: SpaceDescriptor, codomain: SpaceDescriptor, values):
        values = np.asarray(values)
        if len(values) != domain.size:
            raise DomainError(
                f"table length {len(values)} != domain size {domain.size}"
            )
        if domain.p != codomain.p:
            raise DomainError("domain and codomain must share p")
        if values.size and (int(values.max()) >= codomain.size or int(values.min()) < 0):
            raise DomainError("table values exceed codomain size")
        self.domain = domain
        self.codomain = codomain
        self.values = values.astype(_min_uint_dtype(codomain.size - 1), copy=False)
        self.values.setflags(write=False)

    @property
    def p(self) -> int:
        return self.domain.p

    @property
    def is_scalar(self) -> bool:
        return self.codomain.dim == 1

    def __call__(self, x: int) -> int:
        return int(self.values[x])

    def __eq__(self, other):
        return (
            isinstance(other, FunctionTable)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return (
            f"FunctionTable({self.domain.size} points -> {self.codomain.size} values)"
        )

    @staticmethod
    def scalar(domain: SpaceDescriptor, values) -> "FunctionTable":
        return FunctionTable(domain, SpaceDescriptor.scalar_line(domain.p), values)


def _require_scalar(f: FunctionTable):
    if not f.is_scalar:
        raise DomainError("this operation needs a p-ary (m=1) function table")


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


class WalshSpectrum:
    """Full table a -> W_f(a).

    For p = 2 `data` is an integer array of the +-2^(n/2)-scale values; for
    odd p it is an (N, p-1) array of canonical power-basis coefficients.
    """

    def __init__(self, p: int, dim: int, data: np.ndarray):
        self.p = p
        self.dim = dim
        self.data = data

    @property
    def size(self) -> int:
        return self.p**self.dim

    def value(self, a: int) -> CycInt:
        if self.p == 2:
            return CycInt(2, (int(self.data[a]),))
        return CycInt(self.p, tuple(int(c) for c in self.data[a]))

    def parseval_holds(self) -> bool:
        """sum_a |W(a)|^2 == p^(2n), exactly."""
        expect = self.p ** (2 * self.dim)
        if self.p == 2:
            sq = np.square(self.data.astype(np.int64))
            # chunked so partial sums stay inside int64
            total = sum(int(sq[i : i + (1 << 14)].sum()) for i in range(0, len(sq), 1 << 14))
            return total == expect
        p = self.p
        ext = np.zeros((self.size, p), dtype=np.int64)
        ext[:, : p - 1] = self.data
        counts = [0] * p
        for m in range(p):
            for j in range(p):
                col = ext[:, (m + j) % p] * ext[:, j]
                counts[m] += sum(
                    int(col[i : i + (1 << 14)].sum()) for i in range(0, len(col), 1 << 14)
                )
        total = CycInt.from_exponent_counts(p, counts)
        return total.as_rational_integer() == expect


# ---------------------------------------------------------------------------
# the naive oracle: direct summation at a single point
# ---------------------------------------------------------------------------


def walsh_point(f: FunctionTable, a: int) -> CycInt:
    """W_f(a) by direct summation of zeta^(f(x) - <a,x>) over all x."""
    _require_scalar(f)
    p = f.p
    ip = f.domain.ip_with_all(a)
    e = (f.values.astype(np.int16) - ip) % p
    counts = np.bincount(e, minlength=p)
    return CycInt.from_exponent_counts(p, counts.tolist())


def walsh_points_batch(f: FunctionTable, points, min_size: int = 1 << 18) -> list:
    """W_f at many points; same values as `walsh_point`, amortized.

    For large multi-component domains the function table is sliced once
    into per-value indicator matrices over a 2D row/column split of the
    components, after which each point costs a few thin exact matvecs
    (0/1 counts stay below 2^24, so float32 BLAS is exact; the final
    contraction runs in int64).
    """
    _require_scalar(f)
    p = f.p
    comps = f.domain.components
    if f.domain.size < min_size or len(comps) < 2:
        return [walsh_point(f, a) for a in points]

    # split components into column group (low) and row group (high)
    sizes = f.domain.comp_sizes
    best_split, best_cost = 1, None
    for s in range(1, len(comps)):
        ncols = int(np.prod(sizes[:s]))
        nrows = f.domain.size // ncols
        cost = abs(nrows - ncols)
        if best_cost is None or cost < best_cost:
            best_split, best_cost = s, cost
    s = best_split
    ncols = int(np.prod(sizes[:s]))
    nrows = f.domain.size // ncols
    grid = f.values.reshape(nrows, ncols)
    indicators = [(grid == v).astype(np.float32) for v in range(p)]

    results = []
    for a in points:
        luts = f.domain.ip_luts(a)
        col = np.zeros(1, dtype=np.int64)
        for lut in luts[:s]:  # component 0 fastest
            col = (col[None, :] + lut.astype(np.int64)[:, None]).ravel()
        row = np.zeros(1, dtype=np.int64)
        for lut in luts[s:]:
            row = (row[None, :] + lut.astype(np.int64)[:, None]).ravel()
        col %= p
        row %= p
        urow = np.stack([(row == w) for w in range(p)], axis=1).astype(np.float32)
        ucol = [(col == w).astype(np.int64) for w in range(p)]
        counts = np.zeros(p, dtype=np.int64)  # counts of f(x) - <a,x> mod p
        for v in range(p):
            y = (indicators[v].T @ urow).astype(np.int64)  # (ncols, p), exact
            for w1 in range(p):
                yv = y[:, w1]
                for w2 in range(p):
                    counts[(v - w1 - w2) % p] += int(yv @ ucol[w2])
        results.append(CycInt.from_exponent_counts(p, counts.tolist()))
    return results


# ---------------------------------------------------------------------------
# fast full transform
# ---------------------------------------------------------------------------


def _gram_index_map(space: SpaceDescriptor) -> np.ndarray | None:
    """Index permutation a -> index(G @ digits(a)) for the space's Gram matrix.

    Cached on the space; the map is shared by every transform over it.
    """
    _missing = object()
    cached = space._cache.get("gram_index_map", _missing)
    if cached is not _missing:
        return cached
    g = space.gram() % space.p
    n, p, size = space.dim, space.p, space.size
    if np.array_equal(g, np.eye(n, dtype=g.dtype)):
        out = None
    elif p == 2:
        colmask = []
        for j in range(n):
            mask = 0
            for i in range(n):
                if g[i, j]:
                    mask |= 1 << i
            colmask.append(mask)
        idx = np.arange(size, dtype=np.uint32 if size <= (1 << 31) else np.int64)
        out = np.zeros_like(idx)
        scratch = np.empty_like(idx)
        for j in range(n):
            if colmask[j] == 0:
                continue
            np.right_shift(idx, j, out=scratch)
            np.bitwise_and(scratch, 1, out=scratch)
            np.multiply(scratch, colmask[j], out=scratch)
            np.bitwise_xor(out, scratch, out=out)
        out = out.astype(np.int64)
    else:
        digs = digit_matrix(size, p, n)
        out_digits = (digs @ g.T) % p
        places = p ** np.arange(n, dtype=np.int64)
        out = out_digits @ places
    space._cache["gram_index_map"] = out
    return out


def _butterfly_p2(work: np.ndarray, n: int) -> np.ndarray:
    h = 1
    size = work.shape[-1]
    while h < size:
        v = work.reshape(work.shape[:-1] + (size // (2 * h), 2, h))
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] = x + y
        v[..., 1, :] = x - y
        h <<= 1
    return work


def _butterfly_odd(work: np.ndarray, p: int, n: int) -> np.ndarray:
    """Radix-p transform on exponent-coordinate arrays (..., N, p).

    Computes T[u] = sum_x s[x] * zeta^(-u.x) digit by digit; multiplying by
    zeta^e is a cyclic roll of the trailing exponent axis.
    """
    size = work.shape[-2]
    lead = work.shape[:-2]
    for d in range(n):
        stride = p**d
        v = work.reshape(lead + (size // (p * stride), p, stride, p))
        out = np.zeros_like(v)
        for tout in range(p):
            acc = out[..., tout, :, :]
            for tin in range(p):
                shift = (-(tout * tin)) % p
                acc += np.roll(v[..., tin, :, :], shift, axis=-1)
        work = out.reshape(lead + (size, p))
    return work


def _seed_p2(values: np.ndarray, dtype) -> np.ndarray:
    return (1 - 2 * values.astype(dtype, copy=False)).astype(dtype, copy=False)


def _seed_odd(values: np.ndarray, p: int) -> np.ndarray:
    seed = np.zeros(values.shape + (p,), dtype=np.int64)
    np.put_along_axis(seed, values.astype(np.int64)[..., None], 1, axis=-1)
    return seed


def walsh_full(f: FunctionTable) -> WalshSpectrum:
    """Full spectrum by the fast radix-p transform (== walsh_point everywhere)."""
    _require_scalar(f)
    p, space = f.p, f.domain
    size, n = space.size, space.dim
    if not _full_transform_allowed(p, size):
        raise RouteRefusedError(
            f"full cyclotomic spectrum at p^n = {size} exceeds the desk budget; "
            "use walsh_point sampling"
        )
    perm = _gram_index_map(space)
    if p == 2:
        dtype = np.int32 if size >= (1 << 20) else np.int64
        work = _butterfly_p2(_seed_p2(f.values, dtype), n)
        data = work if perm is None else work[perm]
        return WalshSpectrum(2, n, data)
    work = _butterfly_odd(_seed_odd(f.values, p), p, n)
    if perm is not None:
        work = work[perm]
    canonical = work[:, : p - 1] - work[:, p - 1 :]
    return WalshSpectrum(p, n, canonical)


def walsh_full_batch(domain: SpaceDescriptor, value_rows: np.ndarray) -> np.ndarray:
    """Spectra of many scalar tables over one domain, stacked.

    Returns an integer array of shape (B, N) for p = 2 or canonical
    coefficients of shape (B, N, p-1) for odd p.
    """
    p, size, n = domain.p, domain.size, domain.dim
    if value_rows.ndim != 2 or value_rows.shape[1] != size:
        raise DomainError("value_rows must be (B, N)")
    if not _full_transform_allowed(p, size * len(value_rows)):
        raise RouteRefusedError("batch exceeds transform budget; chunk it")
    perm = _gram_index_map(domain)
    if p == 2:
        work = _butterfly_p2(_seed_p2(value_rows, np.int64), n)
        return work if perm is None else work[:, perm]
    work = _butterfly_odd(_seed_odd(value_rows, p), p, n)
    if perm is not None:
        work = work[:, perm]
    return work[:, :, : p - 1] - work[:, :, p - 1 :]

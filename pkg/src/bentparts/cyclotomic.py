"""Exact arithmetic in Z[zeta_p], the ring of integers of the p-th cyclotomic field.

Values are stored on the power basis {1, zeta, ..., zeta^(p-2)}; the relation
zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)) keeps everything canonical, and
since the power basis is an integral basis, equality is coefficientwise.
Coefficients are Python ints, so there is no overflow to guard against.

For p = 2 the ring degenerates to plain integers (zeta_2 = -1).
"""

from __future__ import annotations

from .errors import DomainError


class CycInt:
    """An element of Z[zeta_p] in canonical power-basis coordinates."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != p - 1:
            raise DomainError(f"need {p - 1} coefficients for p={p}, got {len(coeffs)}")
        self.p = p
        self.coeffs = coeffs

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(p: int) -> "CycInt":
        return CycInt(p, (0,) * (p - 1))

    @staticmethod
    def one(p: int) -> "CycInt":
        return CycInt.integer(p, 1)

    @staticmethod
    def integer(p: int, k: int) -> "CycInt":
        return CycInt(p, (k,) + (0,) * (p - 2))

    @staticmethod
    def zeta_pow(p: int, j: int, scale: int = 1) -> "CycInt":
        """scale * zeta^j in canonical form."""
        j %= p
        if j < p - 1:
            coeffs = [0] * (p - 1)
            coeffs[j] = scale
        else:
            coeffs = [-scale] * (p - 1)
        return CycInt(p, coeffs)

    @staticmethod
    def from_exponent_counts(p: int, counts) -> "CycInt":
        """sum_k counts[k] * zeta^k for k = 0..p-1, canonicalized."""
        counts = list(counts)
        if len(counts) != p:
            raise DomainError("need one count per exponent 0..p-1")
        top = counts[p - 1]
        return CycInt(p, tuple(int(c) - int(top) for c in counts[: p - 1]))

    # -- ring operations --------------------------------------------------------

    def _same_p(self, other: "CycInt"):
        if self.p != other.p:
            raise DomainError("mixed p in cyclotomic arithmetic")

    def __add__(self, other):
        other = self._coerce(other)
        self._same_p(other)
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        other = self._coerce(other)
        self._same_p(other)
        return CycInt(self.p, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, tuple(a * other for a in self.coeffs))
        self._same_p(other)
        p = self.p
        # zeta^p = 1, so convolve exponents mod p and canonicalize once
        counts = [0] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    counts[(i + j) % p] += a * b
        return CycInt.from_exponent_counts(p, counts)

    __rmul__ = __mul__
    __radd__ = __add__

    def _coerce(self, other):
        if isinstance(other, int):
            return CycInt.integer(self.p, other)
        return other

    # -- involutions -------------------------------------------------------------

    def conj(self) -> "CycInt":
        """Complex conjugation zeta -> zeta^(p-1)."""
        return self.galois(self.p - 1)

    def galois(self, b: int) -> "CycInt":
        """The automorphism zeta -> zeta^b for b not divisible by p."""
        p = self.p
        b %= p
        if b == 0:
            raise DomainError("galois exponent must be a unit mod p")
        counts = [0] * p
        for i, c in enumerate(self.coeffs):
            counts[(i * b) % p] += c
        return CycInt.from_exponent_counts(p, counts)

    # -- queries -----------------------------------------------------------------

    def as_rational_integer(self):
        """The integer k if self == k, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def decompose_signed_root(self, scale: int):
        """(sign, j) with self == sign * scale * zeta^j exactly, else None."""
        if scale <= 0:
            raise DomainError("scale must be positive")
        for j in range(self.p):
            for sign in (1, -1):
                if self == CycInt.zeta_pow(self.p, j, sign * scale):
                    return sign, j
        return None

    def norm_squared(self) -> "CycInt":
        return self * self.conj()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # -- equality ------------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycInt.integer(self.p, other)
        return (
            isinstance(other, CycInt)
            and self.p == other.p
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        if self.p == 2:
            return f"CycInt(2, {self.coeffs[0]})"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}*z^{i}")
        return f"CycInt({self.p}, {' + '.join(terms) or '0'})"

    def to_complex(self) -> complex:
        """Float shadow for diagnostics only; exact paths never use it."""
        import cmath

        z = cmath.exp(2j * cmath.pi / self.p)
        return sum(c * z**i for i, c in enumerate(self.coeffs))

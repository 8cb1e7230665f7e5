"""Exact Gaussian-rational scalars and polynomials in one deformation parameter.

Every coefficient in the workbench is a GaussianRational (a + b*i with a, b
exact rationals); family files additionally carry polynomials in the
deformation parameter t with GaussianRational coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction]


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        object.__setattr__(self, "re", re if type(re) is Fraction else Fraction(re))
        object.__setattr__(self, "im", im if type(im) is Fraction else Fraction(im))

    def __setattr__(self, *args):
        raise AttributeError("GaussianRational is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def of(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.of(other) - self

    def __mul__(self, other):
        other = GaussianRational.of(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.of(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianRational((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        return GaussianRational.of(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, k: int):
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    # -- predicates / conversions ---------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = GaussianRational.of(other)
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        return format_gaussian(self)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
MINUS_ONE = GaussianRational(-1)


def gr(re=0, im=0) -> GaussianRational:
    """Shorthand constructor accepting ints, Fractions or 'a/b' strings."""
    if isinstance(re, str):
        re = Fraction(re)
    if isinstance(im, str):
        im = Fraction(im)
    return GaussianRational(re, im)


def format_gaussian(z: GaussianRational) -> str:
    """Render as an exact string: '0', '3/2', 'i', '-1/3 i', '1/2+2/3 i', '1/2-2/3 i'."""
    re, im = z.re, z.im
    if im == 0:
        return str(re)
    if im == 1:
        imania = "i"
    elif im == -1:
        imania = "-i"
    else:
        imania = f"{im} i"
    if re == 0:
        return imania
    if im > 0:
        return f"{re}+{im} i" if im != 1 else f"{re}+i"
    return f"{re}{im} i" if im != -1 else f"{re}-i"


def parse_gaussian(text: str) -> GaussianRational:
    """Inverse of format_gaussian (used by report round-trips)."""
    s = text.strip()
    if s.endswith("i"):
        body = s[:-1].strip()
        # split the trailing imaginary coefficient from an optional real part
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/*eE" and body[k - 1] != "(":
                re_part, im_part = body[:k], body[k:]
                im_part = im_part.strip()
                if im_part in ("+", "-"):
                    im_part += "1"
                return GaussianRational(Fraction(re_part), Fraction(im_part))
        if body in ("", "+"):
            return I
        if body == "-":
            return GaussianRational(0, -1)
        return GaussianRational(0, Fraction(body))
    return GaussianRational(Fraction(s), 0)


class Poly:
    """Polynomial in the deformation parameter t over GaussianRational.

    Coefficients are stored ascending; the zero polynomial has coeffs == ().
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [GaussianRational.of(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *args):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def of(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly([GaussianRational.of(x)])

    @staticmethod
    def t() -> "Poly":
        return Poly([ZERO, ONE])

    def __add__(self, other):
        other = Poly.of(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-Poly.of(other))

    def __rsub__(self, other):
        return Poly.of(other) - self

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other):
        other = Poly.of(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for a, ca in enumerate(self.coeffs):
            if not ca:
                continue
            for b, cb in enumerate(other.coeffs):
                out[a + b] = out[a + b] + ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([ONE])
        for _ in range(k):
            out = out * self
        return out

    def coeff(self, k: int) -> GaussianRational:
        return self.coeffs[k] if k < len(self.coeffs) else ZERO

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant(self) -> GaussianRational:
        return self.coeffs[0] if self.coeffs else ZERO

    def __call__(self, t: Fraction) -> GaussianRational:
        val = ZERO
        tg = GaussianRational(t)
        for c in reversed(self.coeffs):
            val = val * tg + c
        return val

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (Poly, int, Fraction, GaussianRational)):
            return Poly.of(other).coeffs == self.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(format_gaussian(c))
            else:
                tk = "t" if k == 1 else f"t^{k}"
                if c == ONE:
                    parts.append(tk)
                elif c == MINUS_ONE:
                    parts.append(f"-{tk}")
                else:
                    parts.append(f"({format_gaussian(c)})*{tk}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

"""Finite bigraded differential algebra of a Lie algebra with complex structure.

A model is given by the complex dimension n and the 2-forms d(omega^k) on a
(1,0)-coframe omega^1..omega^n.  Monomials are indexed by pairs of ascending
index tuples (I, J) <-> omega^{i1}..omega^{ip} ^ obar^{j1}..obar^{jq}; every
sign in the workbench derives from this single ordering convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exactla import Matrix, Vector
from .scalars import GaussianRational, I as IMAG, ONE, ZERO

Key = Tuple[Tuple[int, ...], Tuple[int, ...]]


def merge_indices(a: Tuple[int, ...], b: Tuple[int, ...]):
    """Merge two ascending tuples; returns (sign, merged) or None on a repeat."""
    sign = 1
    i, j = 0, 0
    la = len(a)
    out: List[int] = []
    while i < la and j < len(b):
        if a[i] == b[j]:
            return None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            if (la - i) & 1:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return sign, tuple(out)


def wedge_keys(k1: Key, k2: Key):
    """Sign and key of the product of two monomials, or None if it vanishes."""
    I1, J1 = k1
    I2, J2 = k2
    sign = -1 if (len(I2) & 1) and (len(J1) & 1) else 1
    mi = merge_indices(I1, I2)
    if mi is None:
        return None
    mj = merge_indices(J1, J2)
    if mj is None:
        return None
    return sign * mi[0] * mj[0], (mi[1], mj[1])


def conj_key(k: Key) -> Tuple[int, Key]:
    I, J = k
    sign = -1 if (len(I) & 1) and (len(J) & 1) else 1
    return sign, (J, I)


def key_bidegree(k: Key) -> Tuple[int, int]:
    return len(k[0]), len(k[1])


class Form:
    """A complex-valued invariant form: map from monomial keys to coefficients.

    Mixed degrees are allowed; zero coefficients are never stored.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[Dict[Key, GaussianRational]] = None):
        cs = {}
        if coeffs:
            for k, v in coeffs.items():
                v = GaussianRational.of(v)
                if v:
                    cs[k] = v
        object.__setattr__(self, "coeffs", cs)

    def __setattr__(self, *a):
        raise AttributeError("Form is immutable")

    @staticmethod
    def zero() -> "Form":
        return Form()

    @staticmethod
    def monomial(key: Key, coeff=ONE) -> "Form":
        return Form({key: GaussianRational.of(coeff)})

    @staticmethod
    def hol(i: int) -> "Form":
        return Form({((i,), ()): ONE})

    @staticmethod
    def anti(i: int) -> "Form":
        return Form({((), (i,)): ONE})

    def __add__(self, other: "Form") -> "Form":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            w = out.get(k)
            out[k] = v if w is None else w + v
        return Form(out)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form({k: -v for k, v in self.coeffs.items()})

    def scale(self, c) -> "Form":
        c = GaussianRational.of(c)
        if not c:
            return Form()
        return Form({k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def wedge(self, other: "Form") -> "Form":
        out: Dict[Key, GaussianRational] = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                w = wedge_keys(k1, k2)
                if w is None:
                    continue
                s, k = w
                c = c1 * c2
                if s < 0:
                    c = -c
                prev = out.get(k)
                out[k] = c if prev is None else prev + c
        return Form(out)

    def conjugate(self) -> "Form":
        out: Dict[Key, GaussianRational] = {}
        for k, c in self.coeffs.items():
            s, kk = conj_key(k)
            cc = c.conjugate()
            out[kk] = cc if s > 0 else -cc
        return Form(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_real(self) -> bool:
        return self.conjugate() == self

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def degrees(self) -> List[int]:
        return sorted({len(k[0]) + len(k[1]) for k in self.coeffs})

    def bidegrees(self) -> List[Tuple[int, int]]:
        return sorted({key_bidegree(k) for k in self.coeffs})

    def component(self, p: int, q: int) -> "Form":
        return Form({k: v for k, v in self.coeffs.items() if key_bidegree(k) == (p, q)})

    def degree_component(self, deg: int) -> "Form":
        return Form({k: v for k, v in self.coeffs.items() if len(k[0]) + len(k[1]) == deg})

    def coefficient(self, key: Key) -> GaussianRational:
        return self.coeffs.get(key, ZERO)

    def __repr__(self):
        if not self.coeffs:
            return "Form(0)"
        parts = []
        for k in sorted(self.coeffs):
            parts.append(f"{self.coeffs[k]}*{monomial_name(k)}")
        return "Form(" + " + ".join(parts) + ")"


def monomial_name(k: Key) -> str:
    I, J = k
    letters = [f"f{i}" for i in I] + [f"g{j}" for j in J]
    return "^".join(letters) if letters else "1"


class Space:
    """Ordered monomial basis of a bidegree or total-degree component."""

    __slots__ = ("keys", "index", "label")

    def __init__(self, keys: Sequence[Key], label: str = ""):
        object.__setattr__(self, "keys", tuple(keys))
        object.__setattr__(self, "index", {k: i for i, k in enumerate(keys)})
        object.__setattr__(self, "label", label)

    def __setattr__(self, *a):
        raise AttributeError("Space is immutable")

    @property
    def dim(self) -> int:
        return len(self.keys)

    def to_vec(self, form: Form) -> Vector:
        v = [ZERO] * len(self.keys)
        for k, c in form.coeffs.items():
            i = self.index.get(k)
            if i is None:
                raise ValueError(f"monomial {monomial_name(k)} not in space {self.label}")
            v[i] = c
        return v

    def to_form(self, v: Vector) -> Form:
        return Form({k: c for k, c in zip(self.keys, v) if c})

    def __eq__(self, other):
        return isinstance(other, Space) and self.keys == other.keys

    def __hash__(self):
        return hash(self.keys)

    def __repr__(self):
        return f"Space({self.label or len(self.keys)})"


@dataclass(frozen=True)
class OperatorMatrix:
    """Exact matrix of a linear operator between monomial-basis spaces."""

    src: Space
    dst: Space
    mat: Matrix

    def __post_init__(self):
        if (self.mat.nrows, self.mat.ncols) != (self.dst.dim, self.src.dim):
            raise ValueError("operator shape does not match its spaces")

    def apply_form(self, form: Form) -> Form:
        return self.dst.to_form(self.mat.apply(self.src.to_vec(form)))

    def compose(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.dst != self.src:
            raise ValueError("composition space mismatch")
        return OperatorMatrix(other.src, self.dst, self.mat * other.mat)

    def add(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.src != other.src or self.dst != other.dst:
            raise ValueError("sum space mismatch")
        return OperatorMatrix(self.src, self.dst, self.mat + other.mat)

    def scale(self, c) -> "OperatorMatrix":
        return OperatorMatrix(self.src, self.dst, self.mat * GaussianRational.of(c))

    def is_zero(self) -> bool:
        return self.mat.is_zero()


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class ModelError(ValueError):
    pass


class LieComplexModel:
    """Lie algebra with integrable complex structure, as structure 2-forms.

    structure[k] is d(omega^k), a Form whose (2,0)-part carries the A^k_{ij}
    and whose (1,1)-part carries the B^k_{ij-bar}; a (0,2)-part makes the
    model invalid (integrability).
    """

    def __init__(self, n: int, structure: Dict[int, Form], name: str = "model"):
        if n < 1:
            raise ModelError("complex dimension must be >= 1")
        self.n = n
        self.name = name
        self.structure = {k: structure.get(k, Form.zero()) for k in range(1, n + 1)}
        self._space_cache: Dict = {}
        self._op_cache: Dict = {}
        self._gen_cache: Optional[Dict] = None

    # -- bases ---------------------------------------------------------

    def bidegree_basis(self, p: int, q: int) -> List[Key]:
        if not (0 <= p <= self.n and 0 <= q <= self.n):
            raise ModelError(f"bidegree ({p},{q}) out of range for n={self.n}")
        rng = range(1, self.n + 1)
        return [(ii, jj) for ii in itertools.combinations(rng, p) for jj in itertools.combinations(rng, q)]

    def space(self, p: int, q: int) -> Space:
        key = ("pq", p, q)
        if key not in self._space_cache:
            self._space_cache[key] = Space(self.bidegree_basis(p, q), f"({p},{q})")
        return self._space_cache[key]

    def space_total(self, k: int) -> Space:
        key = ("k", k)
        if key not in self._space_cache:
            if not (0 <= k <= 2 * self.n):
                raise ModelError(f"degree {k} out of range")
            keys: List[Key] = []
            for p in range(max(0, k - self.n), min(self.n, k) + 1):
                keys.extend(self.bidegree_basis(p, k - p))
            self._space_cache[key] = Space(keys, f"deg {k}")
        return self._space_cache[key]

    def top_key(self) -> Key:
        full = tuple(range(1, self.n + 1))
        return (full, full)

    # -- generator differentials ----------------------------------------

    def _generator_images(self):
        if self._gen_cache is None:
            del_h, dbar_h, del_a, dbar_a = {}, {}, {}, {}
            for k in range(1, self.n + 1):
                dk = self.structure[k]
                del_h[k] = dk.component(2, 0)
                dbar_h[k] = dk.component(1, 1)
                # conjugate generators: d(gbar^k) = conj(d f^k)
                dbar_a[k] = del_h[k].conjugate()
                del_a[k] = dbar_h[k].conjugate()
                # a (0,2)-part (invalid model) is kept on the dbar side so that
                # d = del + dbar still reproduces the declared structure and the
                # d^2 = 0 validation can run before rejecting the model
                bad = dk.component(0, 2)
                if bad:
                    dbar_h[k] = dbar_h[k] + bad
                    del_a[k] = del_a[k] + bad.conjugate()
            self._gen_cache = {"del_h": del_h, "dbar_h": dbar_h, "del_a": del_a, "dbar_a": dbar_a}
        return self._gen_cache

    def _apply_derivation(self, form: Form, hol_images: Dict[int, Form], anti_images: Dict[int, Form]) -> Form:
        out = Form.zero()
        for key, c in form.coeffs.items():
            I, J = key
            letters = [("h", i) for i in I] + [("a", j) for j in J]
            for t, (typ, idx) in enumerate(letters):
                img = hol_images[idx] if typ == "h" else anti_images[idx]
                if img.is_zero():
                    continue
                if typ == "h":
                    prefix: Key = (I[:t], ())
                    suffix: Key = (I[t + 1 :], J)
                else:
                    prefix = (I, J[: t - len(I)])
                    suffix = ((), J[t - len(I) + 1 :])
                sgn = -ONE if t & 1 else ONE
                pre = Form.monomial(prefix, c * sgn)
                suf = Form.monomial(suffix)
                out = out + pre.wedge(img).wedge(suf)
        return out

    def apply_del(self, form: Form) -> Form:
        g = self._generator_images()
        return self._apply_derivation(form, g["del_h"], g["del_a"])

    def apply_dbar(self, form: Form) -> Form:
        g = self._generator_images()
        return self._apply_derivation(form, g["dbar_h"], g["dbar_a"])

    def apply_d(self, form: Form) -> Form:
        return self.apply_del(form) + self.apply_dbar(form)

    def apply_dh(self, form: Form, h) -> Form:
        h = _check_h(h)
        return self.apply_del(form).scale(h) + self.apply_dbar(form)

    # -- operator matrices -----------------------------------------------

    def _matrix_of(self, apply_fn, src: Space, dst: Space) -> OperatorMatrix:
        cols = []
        for key in src.keys:
            cols.append(dst.to_vec(apply_fn(Form.monomial(key))))
        return OperatorMatrix(src, dst, Matrix.from_cols(cols, nrows=dst.dim) if cols else Matrix.zeros(dst.dim, 0))

    def op_del(self, p: int, q: int) -> OperatorMatrix:
        key = ("del", p, q)
        if key not in self._op_cache:
            self._op_cache[key] = self._matrix_of(self.apply_del, self.space(p, q), self.space(p + 1, q) if p < self.n else Space((), "0"))
        return self._op_cache[key]

    def op_dbar(self, p: int, q: int) -> OperatorMatrix:
        key = ("dbar", p, q)
        if key not in self._op_cache:
            self._op_cache[key] = self._matrix_of(self.apply_dbar, self.space(p, q), self.space(p, q + 1) if q < self.n else Space((), "0"))
        return self._op_cache[key]

    def op_del_total(self, k: int) -> OperatorMatrix:
        key = ("delk", k)
        if key not in self._op_cache:
            dst = self.space_total(k + 1) if k < 2 * self.n else Space((), "0")
            self._op_cache[key] = self._matrix_of(self.apply_del, self.space_total(k), dst)
        return self._op_cache[key]

    def op_dbar_total(self, k: int) -> OperatorMatrix:
        key = ("dbark", k)
        if key not in self._op_cache:
            dst = self.space_total(k + 1) if k < 2 * self.n else Space((), "0")
            self._op_cache[key] = self._matrix_of(self.apply_dbar, self.space_total(k), dst)
        return self._op_cache[key]

    def op_d_total(self, k: int) -> OperatorMatrix:
        return self.op_del_total(k).add(self.op_dbar_total(k))

    def op_dh_total(self, k: int, h) -> OperatorMatrix:
        h = _check_h(h)
        return self.op_del_total(k).scale(h).add(self.op_dbar_total(k))

    def op_deldbar_total(self, k: int) -> OperatorMatrix:
        """del dbar : degree k -> degree k+2."""
        a = self.op_dbar_total(k)
        if k + 1 > 2 * self.n:
            return OperatorMatrix(self.space_total(k), Space((), "0"), Matrix.zeros(0, self.space_total(k).dim))
        b = self.op_del_total(k + 1)
        return b.compose(a)

    def op_deldbar(self, p: int, q: int) -> OperatorMatrix:
        return self.op_del(p, q + 1).compose(self.op_dbar(p, q))

    def conj_matrix(self, space_src: Space, space_dst: Space) -> Matrix:
        """Signed permutation S with coords(conj u) = S * conj(coords u)."""
        cols = []
        for k in space_src.keys:
            s, kk = conj_key(k)
            v = [ZERO] * space_dst.dim
            v[space_dst.index[kk]] = ONE if s > 0 else -ONE
            cols.append(v)
        return Matrix.from_cols(cols, nrows=space_dst.dim)

    def conj_matrix_total(self, k: int) -> Matrix:
        sp = self.space_total(k)
        return self.conj_matrix(sp, sp)

    def theta_matrix(self, space: Space, h) -> Matrix:
        h = _check_h(h)
        return Matrix.diag([h ** len(key[0]) for key in space.keys])

    # -- pointwise operations ---------------------------------------------

    def theta_h(self, form: Form, h) -> Form:
        h = _check_h(h)
        return Form({k: (h ** len(k[0])) * c for k, c in form.coeffs.items()})

    def conjugate_operator(self, op: OperatorMatrix) -> OperatorMatrix:
        """Matrix of u -> conj(A(conj u)) on the same spaces."""
        S_src = self.conj_matrix(op.src, op.src)
        S_dst = self.conj_matrix(op.dst, op.dst)
        return OperatorMatrix(op.src, op.dst, S_dst * op.mat.conj() * S_src)

    # -- validation -------------------------------------------------------

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        for k in range(1, self.n + 1):
            dk = self.structure[k]
            for (p, q) in dk.bidegrees():
                if p + q != 2:
                    rep.violations.append(f"generator f{k}: d has a component of degree {p+q}, expected 2")
            if dk.component(0, 2):
                rep.violations.append(f"generator f{k}: (0,2) component breaks integrability")
            dd = self.apply_d(dk)
            if not dd.is_zero():
                rep.violations.append(f"generator f{k}: d(d f{k}) != 0 (Jacobi identity fails)")
        if rep.ok:
            top = 2 * self.n - 1
            d_top = self.op_d_total(top)
            if not d_top.is_zero():
                rep.warnings.append(
                    "non-unimodular model: d is nonzero on (2n-1)-forms, Stokes-type identities lose their manifold meaning"
                )
        return rep

    def validated(self) -> "LieComplexModel":
        rep = self.validate()
        if not rep.ok:
            raise ModelError("; ".join(rep.violations))
        return self

    # -- change of coframe --------------------------------------------------

    def expand_in_images(self, form: Form, hol_images: Dict[int, Form], anti_images: Dict[int, Form]) -> Form:
        """Substitute each coframe letter by a 1-form and expand the products."""
        out = Form.zero()
        for key, c in form.coeffs.items():
            I, J = key
            acc = Form({((), ()): c})
            for i in I:
                acc = acc.wedge(hol_images[i])
                if acc.is_zero():
                    break
            else:
                for j in J:
                    acc = acc.wedge(anti_images[j])
                    if acc.is_zero():
                        break
            out = out + acc
        return out

    def real_structure_constants(self) -> Dict[Tuple[int, int, int], Fraction]:
        """Structure constants d e^j = sum c^j_{lm} e^l ^ e^m of the canonical
        real coframe e^{2k-1} = w^k + wbar^k, e^{2k} = -i (w^k - wbar^k)."""
        out: Dict[Tuple[int, int, int], Fraction] = {}
        for k in range(1, self.n + 1):
            re_part = self.structure[k] + self.structure[k].conjugate()
            im_part = (self.structure[k] - self.structure[k].conjugate()).scale(-IMAG)
            for j, two_form in ((2 * k - 1, re_part), (2 * k, im_part)):
                for (l, m), coeff in _expand_real_two_form(self.n, two_form).items():
                    if coeff:
                        if not coeff.is_real():
                            raise ModelError("real structure constants came out non-real")
                        out[(j, l, m)] = coeff.re
        return out


def _real_letter_expansions(n: int):
    hol = {}
    anti = {}
    half = GaussianRational(Fraction(1, 2))
    half_i = GaussianRational(0, Fraction(1, 2))
    for k in range(1, n + 1):
        # w^k = (e^{2k-1} + i e^{2k})/2 in the formal real-letter algebra
        hol[k] = ((2 * k - 1, half), (2 * k, half_i))
        anti[k] = ((2 * k - 1, half), (2 * k, -half_i))
    return hol, anti


def _expand_real_two_form(n: int, form: Form) -> Dict[Tuple[int, int], GaussianRational]:
    hol, anti = _real_letter_expansions(n)
    out: Dict[Tuple[int, int], GaussianRational] = {}

    def add(l, m, c):
        if l == m:
            return
        if l > m:
            l, m = m, l
            c = -c
        prev = out.get((l, m))
        out[(l, m)] = c if prev is None else prev + c

    for (I, J), c in form.coeffs.items():
        letters = [hol[i] for i in I] + [anti[j] for j in J]
        if len(letters) != 2:
            raise ModelError("real expansion expects a 2-form")
        for e1, c1 in letters[0]:
            for e2, c2 in letters[1]:
                add(e1, e2, c * c1 * c2)
    return {k: v for k, v in out.items() if v}


def _check_h(h):
    h = GaussianRational.of(h) if not isinstance(h, GaussianRational) else h
    if not h:
        raise ModelError("h must be a nonzero rational (h in R \\ {0})")
    if not h.is_real():
        raise ModelError("h must be real")
    return h


def standard_fundamental_form(n: int) -> Form:
    """omega = i * sum_k w^k ^ wbar^k (the identity-Gram metric form)."""
    out = {}
    for k in range(1, n + 1):
        out[((k,), (k,))] = IMAG
    return Form(out)

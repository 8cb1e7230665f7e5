"""Exact subquotient cohomology engine.

Computes every cohomology theory of the workbench (de Rham, both Dolbeault
theories, Bott-Chern, Aeppli, the d_h family, h-Bott-Chern, h-Aeppli), the
Froelicher pages with their differentials via filtration subspaces, the
canonical map T into E_2^{n-2,n}, the real subspace E_2^{n-2,n}(X)_R and the
E_2 duality pairing.  Everything is exact over the Gaussian rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactla import (
    Matrix,
    Subspace,
    Vector,
    image_of,
    kernel_of,
    realify_matrix,
    realify_vector,
    unrealify_vector,
    vec_is_zero,
)
from .model import Form, LieComplexModel, ModelError, Space
from .scalars import GaussianRational, I as IMAG, MINUS_ONE, ONE, ZERO

THEORIES = ("deRham", "dolbeault", "dolbeault_del", "bott_chern", "aeppli", "dh", "hbc", "ha")


class CohomologyGroup:
    """Subquotient numerator/denominator with a fixed representative basis."""

    def __init__(self, theory: str, degree, space: Space, numerator: Subspace, denominator: Subspace):
        self.theory = theory
        self.degree = degree
        self.space = space
        self.numerator = numerator
        self.den_in_num = denominator.intersect(numerator)
        reps: List[Vector] = []
        if numerator.dim > self.den_in_num.dim:
            stacked = Matrix.hstack([self.den_in_num.basis, numerator.basis])
            _, pivots = stacked.rref()
            dcols = self.den_in_num.basis.ncols
            for p in pivots:
                if p >= dcols:
                    reps.append(numerator.basis.col(p - dcols))
        self.reps = Matrix.from_cols(reps, nrows=space.dim)
        self._solver = Matrix.hstack([self.reps, self.den_in_num.basis])

    @property
    def dim(self) -> int:
        return self.reps.ncols

    def rep_vectors(self) -> List[Vector]:
        return self.reps.cols()

    def rep_forms(self) -> List[Form]:
        return [self.space.to_form(v) for v in self.rep_vectors()]

    def coords(self, v: Vector) -> Vector:
        """Class coordinates of a numerator element in the representative basis."""
        if vec_is_zero(v):
            return [ZERO] * self.dim
        sol = self._solver.solve(v)
        if sol is None:
            raise ModelError(f"vector does not represent a {self.theory} class in degree {self.degree}")
        return sol[: self.dim]

    def coords_form(self, form: Form) -> Vector:
        return self.coords(self.space.to_vec(form))

    def class_of(self, coords: Vector) -> Form:
        return self.space.to_form(self.reps.apply(coords))


def subquotient(theory: str, degree, space: Space, numerator: Subspace, denominator: Subspace) -> CohomologyGroup:
    if numerator.ambient != space.dim or denominator.ambient != space.dim:
        raise ModelError("subquotient ambient mismatch")
    return CohomologyGroup(theory, degree, space, numerator, denominator)


@dataclass
class SpectralPage:
    r: int
    dims: Dict[Tuple[int, int], int]
    d_matrices: Dict[Tuple[int, int], Matrix]
    groups: Dict[Tuple[int, int], CohomologyGroup]
    stabilized: bool

    def table(self, n: int) -> List[List[int]]:
        return [[self.dims.get((p, q), 0) for q in range(n + 1)] for p in range(n + 1)]


class CohomologyEngine:
    """All cohomological computations for one model, with exact caching."""

    def __init__(self, model: LieComplexModel):
        self.model = model
        self.n = model.n
        self._cache: Dict = {}
        self._pages: Optional[List[SpectralPage]] = None

    # -- kernels and images of the basic operators ----------------------

    def _sub(self, key, builder) -> Subspace:
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def ker_d(self, k: int) -> Subspace:
        return self._sub(("ker_d", k), lambda: kernel_of(self.model.op_d_total(k).mat))

    def im_d(self, k: int) -> Subspace:
        """Image of d inside degree k (from degree k-1)."""
        if k == 0:
            return Subspace.zero(self.model.space_total(0).dim)
        return self._sub(("im_d", k), lambda: image_of(self.model.op_d_total(k - 1).mat))

    def ker_dh(self, k: int, h) -> Subspace:
        h = GaussianRational.of(h)
        return self._sub(("ker_dh", k, h), lambda: kernel_of(self.model.op_dh_total(k, h).mat))

    def im_dh(self, k: int, h) -> Subspace:
        h = GaussianRational.of(h)
        if k == 0:
            return Subspace.zero(self.model.space_total(0).dim)
        return self._sub(("im_dh", k, h), lambda: image_of(self.model.op_dh_total(k - 1, h).mat))

    def op_dhdmh(self, k: int, h) -> Matrix:
        """d_h d_{-1/h} as a matrix from degree k to degree k+2."""
        h = GaussianRational.of(h)
        mh = MINUS_ONE / h
        if k + 1 >= 2 * self.n:
            dim = self.model.space_total(k).dim
            tgt = self.model.space_total(k + 2).dim if k + 2 <= 2 * self.n else 0
            return Matrix.zeros(tgt, dim)
        return self.model.op_dh_total(k + 1, h).mat * self.model.op_dh_total(k, mh).mat

    # -- the nine theories ------------------------------------------------

    def betti(self, k: int) -> int:
        return self.cohomology("deRham", k).dim

    def betti_numbers(self) -> List[int]:
        return [self.betti(k) for k in range(2 * self.n + 1)]

    def cohomology(self, theory: str, degree, h=None) -> CohomologyGroup:
        key = ("coh", theory, degree if not isinstance(degree, tuple) else tuple(degree), GaussianRational.of(h) if h is not None else None)
        if key in self._cache:
            return self._cache[key]
        g = self._cohomology(theory, degree, h)
        self._cache[key] = g
        return g

    def _cohomology(self, theory: str, degree, h) -> CohomologyGroup:
        m = self.model
        if theory in ("dh", "hbc", "ha"):
            if h is None:
                raise ModelError(f"theory {theory} requires a nonzero h")
            h = GaussianRational.of(h)
            if not h or not h.is_real():
                raise ModelError("h must be a nonzero real rational")
        elif h is not None:
            raise ModelError(f"theory {theory} does not take an h parameter")

        if theory == "deRham":
            k = int(degree)
            sp = m.space_total(k)
            return subquotient(theory, k, sp, self.ker_d(k), self.im_d(k))
        if theory == "dh":
            k = int(degree)
            sp = m.space_total(k)
            return subquotient(theory, k, sp, self.ker_dh(k, h), self.im_dh(k, h))
        if theory == "hbc":
            k = int(degree)
            sp = m.space_total(k)
            mh = MINUS_ONE / h
            num = self.ker_dh(k, h).intersect(self.ker_dh(k, mh))
            den = image_of(self.op_dhdmh(k - 2, h)) if k >= 2 else Subspace.zero(sp.dim)
            return subquotient(theory, k, sp, num, den)
        if theory == "ha":
            k = int(degree)
            sp = m.space_total(k)
            mh = MINUS_ONE / h
            num = kernel_of(self.op_dhdmh(k, h))
            den = self.im_dh(k, h) + self.im_dh(k, mh)
            return subquotient(theory, k, sp, num, den)

        p, q = degree
        sp = m.space(p, q)
        if theory == "dolbeault":
            num = kernel_of(m.op_dbar(p, q).mat)
            den = image_of(m.op_dbar(p, q - 1).mat) if q >= 1 else Subspace.zero(sp.dim)
            return subquotient(theory, (p, q), sp, num, den)
        if theory == "dolbeault_del":
            num = kernel_of(m.op_del(p, q).mat)
            den = image_of(m.op_del(p - 1, q).mat) if p >= 1 else Subspace.zero(sp.dim)
            return subquotient(theory, (p, q), sp, num, den)
        if theory == "bott_chern":
            num = kernel_of(m.op_del(p, q).mat).intersect(kernel_of(m.op_dbar(p, q).mat))
            den = image_of(m.op_deldbar(p - 1, q - 1).mat) if p >= 1 and q >= 1 else Subspace.zero(sp.dim)
            return subquotient(theory, (p, q), sp, num, den)
        if theory == "aeppli":
            num = kernel_of(m.op_deldbar(p, q).mat)
            den = Subspace.zero(sp.dim)
            if p >= 1:
                den = den + image_of(m.op_del(p - 1, q).mat)
            if q >= 1:
                den = den + image_of(m.op_dbar(p, q - 1).mat)
            return subquotient(theory, (p, q), sp, num, den)
        raise ModelError(f"unknown theory {theory!r}")

    def hodge_table(self, theory: str) -> List[List[int]]:
        return [[self.cohomology(theory, (p, q)).dim for q in range(self.n + 1)] for p in range(self.n + 1)]

    # -- Froelicher pages ----------------------------------------------------

    def filtration(self, p: int, k: int) -> Subspace:
        """F^p A^k: span of monomials with holomorphic degree >= p."""
        sp = self.model.space_total(k)
        vecs = []
        for i, key in enumerate(sp.keys):
            if len(key[0]) >= p:
                v = [ZERO] * sp.dim
                v[i] = ONE
                vecs.append(v)
        return Subspace.span(sp.dim, vecs)

    def zr_subspace(self, r: int, p: int, q: int) -> Subspace:
        """Z_r^{p,q} = F^p A^k  intersect  d^{-1}(F^{p+r} A^{k+1})."""
        k = p + q
        key = ("Z", r, p, k)
        if key in self._cache:
            return self._cache[key]
        d = self.model.op_d_total(k).mat
        target = self.filtration(p + r, k + 1) if k + 1 <= 2 * self.n else Subspace.zero(0)
        pre = target.preimage_under(d)
        z = self.filtration(p, k).intersect(pre)
        self._cache[key] = z
        return z

    def page_group(self, r: int, p: int, q: int) -> CohomologyGroup:
        """E_r^{p,q} = Z_r / (Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2})."""
        key = ("E", r, p, q)
        if key in self._cache:
            return self._cache[key]
        k = p + q
        sp = self.model.space_total(k)
        num = self.zr_subspace(r, p, q)
        den = self.zr_subspace(r - 1, p + 1, q - 1)
        if k >= 1:
            src = self.zr_subspace(r - 1, p - r + 1, q + r - 2)
            den = den + src.image_under(self.model.op_d_total(k - 1).mat)
        g = subquotient(f"E_{r}", (p, q), sp, num, den)
        self._cache[key] = g
        return g

    def d_r_matrix(self, r: int, p: int, q: int) -> Matrix:
        """Matrix of d_r : E_r^{p,q} -> E_r^{p+r,q-r+1} in representative coords."""
        src = self.page_group(r, p, q)
        k = p + q
        tp, tq = p + r, q - r + 1
        if not (0 <= tp <= self.n and 0 <= tq <= self.n) or k + 1 > 2 * self.n:
            return Matrix.zeros(0, src.dim)
        dst = self.page_group(r, tp, tq)
        d = self.model.op_d_total(k).mat
        cols = [dst.coords(d.apply(v)) for v in src.rep_vectors()]
        return Matrix.from_cols(cols, nrows=dst.dim)

    def frolicher_pages(self, r_max: Optional[int] = None) -> List[SpectralPage]:
        """Pages E_1..E_{max(r_max, n+1)}; E_{n+1} = E_infinity."""
        r_stop = max(r_max or 0, self.n + 1)
        if self._pages is not None and len(self._pages) >= r_stop:
            return self._pages[:r_stop]
        pages: List[SpectralPage] = []
        prev_dims: Optional[Dict] = None
        for r in range(1, r_stop + 1):
            dims: Dict[Tuple[int, int], int] = {}
            mats: Dict[Tuple[int, int], Matrix] = {}
            groups: Dict[Tuple[int, int], CohomologyGroup] = {}
            for p in range(self.n + 1):
                for q in range(self.n + 1):
                    g = self.page_group(r, p, q)
                    groups[(p, q)] = g
                    dims[(p, q)] = g.dim
                    mats[(p, q)] = self.d_r_matrix(r, p, q)
            stab = prev_dims == dims
            pages.append(SpectralPage(r, dims, mats, groups, stab))
            prev_dims = dims
        self._pages = pages
        return pages

    def einf_dims(self) -> Dict[Tuple[int, int], int]:
        return self.frolicher_pages()[self.n].dims

    def stabilization_page(self) -> int:
        """Smallest r with E_r = E_infinity (dimension-wise)."""
        pages = self.frolicher_pages()
        einf = pages[-1].dims
        for pg in pages:
            if pg.dims == einf:
                return pg.r
        return pages[-1].r

    def degenerates_at(self, r: int) -> bool:
        return self.stabilization_page() <= r

    # -- E2 vanishing, map T, real subspace -------------------------------

    def e2_vanishing_subspace(self, p: int, q: int) -> Subspace:
        """del(ker dbar^{p-1,q}) + Im dbar^{p,q-1} inside Lambda^{p,q}."""
        m = self.model
        sp = m.space(p, q)
        out = Subspace.zero(sp.dim)
        if p >= 1:
            kerd = kernel_of(m.op_dbar(p - 1, q).mat)
            out = out + kerd.image_under(m.op_del(p - 1, q).mat)
        if q >= 1:
            out = out + image_of(m.op_dbar(p, q - 1).mat)
        return out

    def is_e2_representative(self, alpha: Form, p: int, q: int) -> bool:
        m = self.model
        if any(bd != (p, q) for bd in alpha.bidegrees()):
            return False
        if not m.apply_dbar(alpha).is_zero():
            return False
        da = m.apply_del(alpha)
        if da.is_zero():
            return True
        sp = m.space(p + 1, q)
        return image_of(m.op_dbar(p + 1, q - 1).mat).contains(sp.to_vec(da))

    def e2_class_is_zero(self, alpha: Form, p: int, q: int):
        """Vanishing test with explicit witness (u, v): alpha = del u + dbar v, dbar u = 0."""
        if not self.is_e2_representative(alpha, p, q):
            raise ModelError("not an E2 representative: needs dbar(alpha) = 0 and del(alpha) in Im(dbar)")
        m = self.model
        sp = m.space(p, q)
        target = sp.to_vec(alpha)
        blocks = []
        widths = []
        ker_basis = None
        if p >= 1:
            ker_basis = kernel_of(m.op_dbar(p - 1, q).mat)
            blocks.append(m.op_del(p - 1, q).mat * ker_basis.basis)
            widths.append(ker_basis.basis.ncols)
        if q >= 1:
            blocks.append(m.op_dbar(p, q - 1).mat)
            widths.append(m.space(p, q - 1).dim)
        if not blocks:
            if vec_is_zero(target):
                return True, (Form.zero(), Form.zero())
            return False, None
        sol = Matrix.hstack(blocks).solve(target)
        if sol is None:
            return False, None
        u = Form.zero()
        v = Form.zero()
        ofs = 0
        if p >= 1:
            a = sol[ofs : ofs + widths[0]]
            u = m.space(p - 1, q).to_form(ker_basis.basis.apply(a))
            ofs += widths[0]
        if q >= 1:
            v = m.space(p, q - 1).to_form(sol[ofs:])
        return True, (u, v)

    def e2_class_coords(self, alpha: Form, p: int, q: int) -> Vector:
        """Coordinates of the class of an E2 representative, via a zigzag lift."""
        if not self.is_e2_representative(alpha, p, q):
            raise ModelError("not an E2 representative")
        m = self.model
        g = self.page_group(2, p, q)
        k = p + q
        total = m.space_total(k)
        da = m.apply_del(alpha)
        lift = Form.zero()
        if not da.is_zero():
            sp1 = m.space(p + 1, q)
            src = m.space(p + 1, q - 1)
            sol = m.op_dbar(p + 1, q - 1).mat.solve(sp1.to_vec(da.scale(-1)))
            if sol is None:
                raise ModelError("del(alpha) not dbar-exact")
            lift = src.to_form(sol)
        return g.coords(total.to_vec(alpha + lift))

    def map_T(self, alpha: Form) -> Vector:
        """E_2^{n-2,n} coordinates of the (n-2,n)-component of a d-closed (2n-2)-form."""
        n = self.n
        k = 2 * n - 2
        if alpha.degrees() not in ([], [k]):
            raise ModelError(f"map T expects a form of pure degree {k}")
        if not self.model.apply_d(alpha).is_zero():
            raise ModelError("map T expects a d-closed form")
        g = self.page_group(2, n - 2, n)
        u = alpha.component(n - 2, n) + alpha.component(n - 1, n - 1)
        return g.coords(self.model.space_total(k).to_vec(u))

    def map_T_matrix(self) -> Matrix:
        """Matrix of T on the chosen basis of H^{2n-2}_DR."""
        g = self.cohomology("deRham", 2 * self.n - 2)
        cols = [self.map_T(f) for f in g.rep_forms()]
        return Matrix.from_cols(cols, nrows=self.page_group(2, self.n - 2, self.n).dim)

    def real_derham_basis(self, k: int) -> List[Form]:
        """Real forms representing a basis of H^k(X, R) inside H^k(X, C)."""
        g = self.cohomology("deRham", k)
        if g.dim == 0:
            return []
        S = self.model.conj_matrix_total(k)
        cols = [g.coords(S.apply([c.conjugate() for c in v])) for v in g.rep_vectors()]
        T = Matrix.from_cols(cols, nrows=g.dim)
        fixed = _antilinear_fixed_subspace(T)
        out = []
        for x in fixed.basis.cols():
            u = g.class_of(unrealify_vector(x))
            out.append((u + u.conjugate()).scale(Fraction(1, 2)))
        return out

    def real_e2_space(self):
        """E_2^{n-2,n}(X)_R as a real span of E2 coordinate vectors.

        Returns (coordinate_vectors, realified_subspace); asserts the two
        halves of Lemma T_R (containment in ker d_2, surjectivity of T_R) and
        raises if either fails -- both are theorems.
        """
        n = self.model.n
        m = self.model
        p, q = n - 2, n
        g = self.page_group(2, p, q)
        sp_a = m.space(p, q)
        sp_o = m.space(n - 1, n - 1)
        del_m = realify_matrix(m.op_del(p, q).mat)
        S = m.conj_matrix(sp_o, sp_o)
        real_forms = _antilinear_fixed_subspace_signed(S)
        dbar_o = realify_matrix(m.op_dbar(n - 1, n - 1).mat)
        B = dbar_o * real_forms.basis
        K = Matrix.hstack([del_m, B]).nullspace()
        coord_vecs: List[Vector] = []
        ma = sp_a.dim
        for kv in K:
            alpha = unrealify_vector(kv[: 2 * ma])
            z = kv[2 * ma :]
            omega = unrealify_vector(real_forms.basis.apply(z))
            total = m.space_total(p + q).to_vec(sp_a.to_form(alpha) + sp_o.to_form(omega))
            coord_vecs.append(g.coords(total))
        span = Subspace.span(2 * g.dim, [realify_vector(v) for v in coord_vecs])
        # Lemma T_R (i): containment in ker d_2
        d2 = self.d_r_matrix(2, p, q)
        for v in coord_vecs:
            if not vec_is_zero(d2.apply(v)):
                raise ModelError("falsified: E_2^{n-2,n}(X)_R not contained in ker d_2 (Lemma T_R(i))")
        # Lemma T_R (ii): T restricted to real de Rham classes is onto
        t_image = Subspace.span(
            2 * g.dim, [realify_vector(self.map_T(f)) for f in self.real_derham_basis(2 * n - 2)]
        )
        if not (span.contains_subspace(t_image) and t_image.contains_subspace(span)):
            raise ModelError("falsified: T_R is not onto E_2^{n-2,n}(X)_R (Lemma T_R(ii))")
        return coord_vecs, span

    # -- integration and the E2 duality pairing ------------------------------

    def integral(self, form: Form) -> GaussianRational:
        """Invariant integral: coefficient of the top monomial, normalized so
        the standard-metric volume form integrates to 1 (exact i-power)."""
        c = form.coefficient(self.model.top_key())
        return c / (IMAG ** (self.n * self.n))

    def duality_pairing_matrix(self, p: int, q: int) -> Matrix:
        g1 = self.page_group(2, p, q)
        g2 = self.page_group(2, self.n - p, self.n - q)
        rows = []
        for u in g1.rep_vectors():
            alpha = self.model.space_total(p + q).to_form(u).component(p, q)
            row = []
            for v in g2.rep_vectors():
                beta = self.model.space_total(2 * self.n - p - q).to_form(v).component(self.n - p, self.n - q)
                row.append(self.integral(alpha.wedge(beta)))
            rows.append(row)
        return Matrix(rows, ncols=g2.dim)

    def pairing_is_nondegenerate(self, p: int, q: int) -> bool:
        g1 = self.page_group(2, p, q)
        g2 = self.page_group(2, self.n - p, self.n - q)
        M = self.duality_pairing_matrix(p, q)
        return M.rank() == g1.dim == g2.dim


def _antilinear_fixed_subspace(T: Matrix) -> Subspace:
    """Fixed points of x -> T conj(x), realified (T arbitrary complex)."""
    re = Matrix([[GaussianRational(x.re) for x in r] for r in T.rows], ncols=T.ncols)
    im = Matrix([[GaussianRational(x.im) for x in r] for r in T.rows], ncols=T.ncols)
    top = Matrix.hstack([re, im])
    bot = Matrix.hstack([im, -re])
    big = Matrix.vstack([top, bot]) - Matrix.identity(2 * T.ncols)
    return kernel_of(big)


def _antilinear_fixed_subspace_signed(S: Matrix) -> Subspace:
    """Fixed points of the conjugation x -> S conj(x) for a real signed S."""
    return _antilinear_fixed_subspace(S)

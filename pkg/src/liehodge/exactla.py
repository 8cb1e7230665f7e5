"""Exact linear algebra over the Gaussian rationals.

Matrices are dense tuples of tuples of GaussianRational with sparse-aware
inner loops; every rank / kernel / solve is certificate-grade (no floats).
Subspaces are column spans kept in a canonical reduced form, so equality,
intersection, sums and preimages are all exact and deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .scalars import GaussianRational, ONE, ZERO

Vector = List[GaussianRational]


class Matrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence[GaussianRational]], ncols: Optional[int] = None):
        rws = tuple(tuple(GaussianRational.of(x) for x in r) for r in rows)
        object.__setattr__(self, "rows", rws)
        object.__setattr__(self, "nrows", len(rws))
        object.__setattr__(self, "ncols", len(rws[0]) if rws else (ncols or 0))
        if any(len(r) != self.ncols for r in rws):
            raise ValueError("ragged matrix")

    def __setattr__(self, *a):
        raise AttributeError("Matrix is immutable")

    # -- constructors --------------------------------------------------

    @staticmethod
    def zeros(n: int, m: int) -> "Matrix":
        return Matrix([[ZERO] * m for _ in range(n)], ncols=m)

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def diag(entries: Sequence) -> "Matrix":
        n = len(entries)
        return Matrix(
            [[GaussianRational.of(entries[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def from_cols(cols: Sequence[Vector], nrows: Optional[int] = None) -> "Matrix":
        if not cols:
            return Matrix.zeros(nrows or 0, 0)
        n = len(cols[0])
        return Matrix([[cols[j][i] for j in range(len(cols))] for i in range(n)], ncols=len(cols))

    # -- basic access ---------------------------------------------------

    def col(self, j: int) -> Vector:
        return [r[j] for r in self.rows]

    def cols(self) -> List[Vector]:
        return [self.col(j) for j in range(self.ncols)]

    def entry(self, i: int, j: int) -> GaussianRational:
        return self.rows[i][j]

    # -- algebra ----------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.nrows}x{self.ncols} * {other.nrows}x{other.ncols}")
            brows = other.rows
            m = other.ncols
            out = []
            for arow in self.rows:
                acc = [ZERO] * m
                for k, a in enumerate(arow):
                    if not a:
                        continue
                    brow = brows[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] = acc[j] + a * b
                out.append(acc)
            return Matrix(out, ncols=m)
        z = GaussianRational.of(other)
        return Matrix([[z * x for x in r] for r in self.rows], ncols=self.ncols)

    __rmul__ = __mul__

    def apply(self, v: Vector) -> Vector:
        if self.ncols != len(v):
            raise ValueError("shape mismatch in apply")
        out = [ZERO] * self.nrows
        for i, row in enumerate(self.rows):
            acc = ZERO
            for a, x in zip(row, v):
                if a and x:
                    acc = acc + a * x
            out[i] = acc
        return out

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch in add")
        return Matrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)], ncols=self.ncols
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in r] for r in self.rows], ncols=self.ncols)

    def transpose(self) -> "Matrix":
        return Matrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)], ncols=self.nrows
        )

    T = property(transpose)

    def conj(self) -> "Matrix":
        return Matrix([[x.conjugate() for x in r] for r in self.rows], ncols=self.ncols)

    def hermitian_transpose(self) -> "Matrix":
        return self.conj().transpose()

    H = property(hermitian_transpose)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols})"

    @staticmethod
    def hstack(mats: Sequence["Matrix"]) -> "Matrix":
        n = mats[0].nrows
        if any(m.nrows != n for m in mats):
            raise ValueError("hstack row mismatch")
        total = sum(m.ncols for m in mats)
        return Matrix([sum((list(m.rows[i]) for m in mats), []) for i in range(n)], ncols=total)

    @staticmethod
    def vstack(mats: Sequence["Matrix"]) -> "Matrix":
        m = mats[0].ncols
        if any(mm.ncols != m for mm in mats):
            raise ValueError("vstack col mismatch")
        return Matrix([list(r) for mm in mats for r in mm.rows], ncols=m)

    # -- elimination -----------------------------------------------------

    def rref(self) -> Tuple["Matrix", Tuple[int, ...]]:
        """Reduced row-echelon form with the deterministic first-pivot rule."""
        rows = [list(r) for r in self.rows]
        n, m = self.nrows, self.ncols
        pivots: List[int] = []
        pr = 0
        for pc in range(m):
            sel = None
            for i in range(pr, n):
                if rows[i][pc]:
                    sel = i
                    break
            if sel is None:
                continue
            rows[pr], rows[sel] = rows[sel], rows[pr]
            inv = ONE / rows[pr][pc]
            rows[pr] = [x * inv if x else ZERO for x in rows[pr]]
            prow = rows[pr]
            for i in range(n):
                if i == pr:
                    continue
                f = rows[i][pc]
                if f:
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], prow)]
            pivots.append(pc)
            pr += 1
            if pr == n:
                break
        return Matrix(rows, ncols=m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> List[Vector]:
        """Basis of the right kernel, in free-column order."""
        R, pivots = self.rref()
        m = self.ncols
        pivset = set(pivots)
        free = [j for j in range(m) if j not in pivset]
        basis = []
        for fj in free:
            v = [ZERO] * m
            v[fj] = ONE
            for i, pj in enumerate(pivots):
                v[pj] = -R.rows[i][fj]
            basis.append(v)
        return basis

    def solve(self, b: Vector) -> Optional[Vector]:
        """One exact solution of self @ x = b, or None if inconsistent."""
        aug = Matrix.hstack([self, Matrix.from_cols([b])])
        R, pivots = aug.rref()
        m = self.ncols
        if m in pivots:
            return None
        x = [ZERO] * m
        for i, pj in enumerate(pivots):
            x[pj] = R.rows[i][m]
        return x

    def solve_matrix(self, B: "Matrix") -> Optional["Matrix"]:
        cols = []
        for j in range(B.ncols):
            x = self.solve(B.col(j))
            if x is None:
                return None
            cols.append(x)
        return Matrix.from_cols(cols, nrows=self.ncols)

    def inv(self) -> "Matrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        aug = Matrix.hstack([self, Matrix.identity(n)])
        R, pivots = aug.rref()
        if list(pivots) != list(range(n)):
            raise ValueError("matrix is singular")
        return Matrix([r[n:] for r in R.rows])

    def det(self) -> GaussianRational:
        if self.nrows != self.ncols:
            raise ValueError("determinant of non-square matrix")
        rows = [list(r) for r in self.rows]
        n = self.nrows
        out = ONE
        for c in range(n):
            sel = None
            for i in range(c, n):
                if rows[i][c]:
                    sel = i
                    break
            if sel is None:
                return ZERO
            if sel != c:
                rows[c], rows[sel] = rows[sel], rows[c]
                out = -out
            p = rows[c][c]
            out = out * p
            inv = ONE / p
            for i in range(c + 1, n):
                f = rows[i][c]
                if f:
                    f = f * inv
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], rows[c])]
        return out

    def trace(self) -> GaussianRational:
        return sum((self.rows[i][i] for i in range(min(self.nrows, self.ncols))), ZERO)

    def to_complex(self):
        import numpy as np

        return np.array([[complex(x) for x in r] for r in self.rows], dtype=complex)


def vec(entries: Iterable) -> Vector:
    return [GaussianRational.of(x) for x in entries]


def vec_is_zero(v: Vector) -> bool:
    return all(not x for x in v)


def vec_add(a: Vector, b: Vector) -> Vector:
    return [x + y for x, y in zip(a, b)]

def vec_sub(a: Vector, b: Vector) -> Vector:
    return [x - y for x, y in zip(a, b)]


def vec_scale(c, a: Vector) -> Vector:
    c = GaussianRational.of(c)
    return [c * x for x in a]


class Subspace:
    """Column span of exact vectors, held in a canonical reduced basis.

    The canonical basis is the nonzero-row part of rref(transpose), so two
    Subspace objects are equal iff they span the same space.
    """

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: int, canonical_basis: Matrix):
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", canonical_basis)

    def __setattr__(self, *a):
        raise AttributeError("Subspace is immutable")

    @staticmethod
    def span(ambient: int, vectors: Sequence[Vector]) -> "Subspace":
        vecs = [v for v in vectors if not vec_is_zero(v)]
        if not vecs:
            return Subspace(ambient, Matrix.zeros(ambient, 0))
        R, pivots = Matrix(vecs).rref()
        cols = [[R.rows[i][k] for k in range(ambient)] for i in range(len(pivots))]
        return Subspace(ambient, Matrix.from_cols(cols, nrows=ambient))

    @staticmethod
    def from_columns(M: Matrix) -> "Subspace":
        return Subspace.span(M.nrows, M.cols())

    @staticmethod
    def zero(ambient: int) -> "Subspace":
        return Subspace(ambient, Matrix.zeros(ambient, 0))

    @staticmethod
    def full(ambient: int) -> "Subspace":
        return Subspace(ambient, Matrix.identity(ambient))

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def contains(self, v: Vector) -> bool:
        if vec_is_zero(v):
            return True
        return self.basis.solve(v) is not None

    def coords(self, v: Vector) -> Optional[Vector]:
        return self.basis.solve(v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(other.basis.col(j)) for j in range(other.dim))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch in subspace sum")
        return Subspace.span(self.ambient, self.basis.cols() + other.basis.cols())

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch in intersection")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient)
        A, B = self.basis, other.basis
        K = Matrix.hstack([A, -B]).nullspace()
        vecs = [A.apply(k[: A.ncols]) for k in K]
        return Subspace.span(self.ambient, vecs)

    def image_under(self, M: Matrix) -> "Subspace":
        return Subspace.span(M.nrows, [M.apply(c) for c in self.basis.cols()])

    def preimage_under(self, M: Matrix) -> "Subspace":
        """{x : M x in self}; M maps ambient' -> ambient."""
        if M.nrows != self.ambient:
            raise ValueError("ambient mismatch in preimage")
        if self.dim == 0:
            return Subspace.span(M.ncols, M.nullspace())
        K = Matrix.hstack([M, -self.basis]).nullspace()
        vecs = [k[: M.ncols] for k in K]
        return Subspace.span(M.ncols, vecs)

    def projector(self, gram: Matrix) -> Matrix:
        """Orthogonal projector onto this subspace w.r.t. <x,y> = y^H G x."""
        B = self.basis
        if B.ncols == 0:
            return Matrix.zeros(self.ambient, self.ambient)
        BhG = B.H * gram
        core = (BhG * B).inv()
        return B * core * BhG


def kernel_of(M: Matrix) -> Subspace:
    return Subspace.span(M.ncols, M.nullspace())


def image_of(M: Matrix) -> Subspace:
    return Subspace.span(M.nrows, M.cols())


# -- realification (exact R-linear algebra inside C^m) -------------------


def realify_vector(v: Vector) -> Vector:
    out = []
    for x in v:
        out.append(GaussianRational(x.re))
    for x in v:
        out.append(GaussianRational(x.im))
    return out


def unrealify_vector(rv: Vector) -> Vector:
    m = len(rv) // 2
    return [GaussianRational(rv[k].re, rv[m + k].re) for k in range(m)]


def realify_matrix(M: Matrix) -> Matrix:
    """Realification of a C-linear map: [[Re, -Im], [Im, Re]]."""
    re = Matrix([[GaussianRational(x.re) for x in r] for r in M.rows])
    im = Matrix([[GaussianRational(x.im) for x in r] for r in M.rows])
    top = Matrix.hstack([re, -im])
    bot = Matrix.hstack([im, re])
    return Matrix.vstack([top, bot])


def realify_antilinear(S: Matrix) -> Matrix:
    """Realification of x -> S * conj(x) for a matrix S with real entries."""
    if any(x.im for r in S.rows for x in r):
        raise ValueError("antilinear realification expects a real matrix")
    top = Matrix.hstack([S, Matrix.zeros(S.nrows, S.ncols)])
    bot = Matrix.hstack([Matrix.zeros(S.nrows, S.ncols), -S])
    return Matrix.vstack([top, bot])

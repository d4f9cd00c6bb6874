"""Exact (Gaussian rational) and floating linear algebra backends.

Vectors are flat coordinate sequences; matrices are square blocks. The exact
backend keeps vectors as tuples of ``QQ_I`` elements and reduces bases to
reduced row echelon form, so equal spans have equal bases. The float backend
uses complex128 arrays and decides ranks by singular values.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Any, Sequence

import numpy as np
from sympy import QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational
from sympy.polys.matrices import DomainMatrix

REL_TOL = 1e-9
# singular values below this are roundoff whatever the largest one is;
# without it an all-noise matrix would have full relative rank
ABS_FLOOR = 1e-12


def _frac(x: Any) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class ExactBackend:
    mode = "exact"

    def scalar(self, x: Any) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("exact mode does not accept floating complex numbers")
        if isinstance(x, float):
            raise TypeError("exact mode does not accept floats")
        if isinstance(x, tuple) and len(x) == 2:
            return QQ_I(_frac(x[0]), _frac(x[1]))
        return QQ_I(_frac(x), 0)

    @property
    def zero(self):
        return QQ_I.zero

    @property
    def one(self):
        return QQ_I.one

    @property
    def i(self):
        return QQ_I(0, 1)

    def conj(self, a: GaussianRational) -> GaussianRational:
        return QQ_I(a.x, -a.y)

    def vector(self, entries: Sequence[Any]) -> tuple:
        return tuple(self.scalar(e) for e in entries)

    def is_zero(self, v: Sequence) -> bool:
        return all(not e for e in v)

    def _dm(self, rows: Sequence[Sequence], ncols: int) -> DomainMatrix:
        return DomainMatrix([list(r) for r in rows], (len(rows), ncols), QQ_I)

    def basis(self, vectors: Sequence[Sequence], dim: int) -> tuple[tuple, ...]:
        rows = [v for v in vectors if not self.is_zero(v)]
        if not rows:
            return ()
        red, pivots = self._dm(rows, dim).rref()
        flat = red.to_list()
        return tuple(tuple(flat[i]) for i in range(len(pivots)))

    def rank(self, vectors: Sequence[Sequence], dim: int) -> int:
        rows = [v for v in vectors if not self.is_zero(v)]
        if not rows:
            return 0
        return self._dm(rows, dim).rank()

    def nullspace(self, columns: Sequence[Sequence], length: int) -> list[tuple]:
        """Coefficient vectors ``c`` with ``sum_j c[j] * columns[j] == 0``."""
        if not columns:
            return []
        m = self._dm(columns, length).transpose()
        ns = m.nullspace()
        return [tuple(r) for r in ns.to_list()]

    def combine(self, coeffs: Sequence, vectors: Sequence[Sequence], dim: int) -> tuple:
        out = [QQ_I.zero] * dim
        for c, v in zip(coeffs, vectors):
            if c:
                for j, e in enumerate(v):
                    if e:
                        out[j] += c * e
        return tuple(out)

    # square matrices
    def matrix(self, rows: Sequence[Sequence[Any]]) -> DomainMatrix:
        rows = [[self.scalar(e) for e in r] for r in rows]
        return DomainMatrix(rows, (len(rows), len(rows[0]) if rows else 0), QQ_I)

    def eye(self, n: int) -> DomainMatrix:
        return DomainMatrix.eye(n, QQ_I)

    def zeros(self, n: int) -> DomainMatrix:
        return DomainMatrix.zeros((n, n), QQ_I)

    def matmul(self, a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
        return a * b

    def adjoint(self, a: DomainMatrix) -> DomainMatrix:
        return a.transpose().applyfunc(self.conj, QQ_I)

    def flatten(self, a: DomainMatrix) -> list:
        return a.to_list_flat()

    def unflatten(self, vals: Sequence, n: int) -> DomainMatrix:
        return DomainMatrix([list(vals[r * n:(r + 1) * n]) for r in range(n)], (n, n), QQ_I)

    def mat_equal(self, a: DomainMatrix, b: DomainMatrix) -> bool:
        # == also compares the sparse/dense storage format
        return a.shape == b.shape and (a - b).is_zero_matrix

    def is_native(self, m: Any) -> bool:
        return isinstance(m, DomainMatrix)

    def entries(self, m: DomainMatrix) -> list[list]:
        return m.to_list()

    def entry_to_json(self, e: GaussianRational) -> list[list[int]]:
        re, im = Fraction(int(e.x.numerator), int(e.x.denominator)), Fraction(int(e.y.numerator), int(e.y.denominator))
        return [[re.numerator, re.denominator], [im.numerator, im.denominator]]

    def entry_from_json(self, data: Any) -> GaussianRational:
        (rn, rd), (inn, ind) = data
        return QQ_I(Fraction(rn, rd), Fraction(inn, ind))


class FloatBackend:
    mode = "float"

    def __init__(self, rel_tol: float = REL_TOL):
        self.rel_tol = rel_tol

    def scalar(self, x: Any) -> complex:
        if isinstance(x, GaussianRational):
            return complex(float(x.x), float(x.y))
        if isinstance(x, tuple) and len(x) == 2:
            return complex(float(x[0]), float(x[1]))
        if isinstance(x, Rational):
            return complex(float(x))
        return complex(x)

    zero = 0j
    one = 1 + 0j
    i = 1j

    def conj(self, a: complex) -> complex:
        return a.conjugate()

    def vector(self, entries: Sequence[Any]) -> np.ndarray:
        return np.array([self.scalar(e) for e in entries], dtype=complex)

    def _svd_rank(self, s: np.ndarray) -> int:
        if s.size == 0:
            return 0
        return int((s > max(self.rel_tol * s[0], ABS_FLOOR)).sum())

    def is_zero(self, v: np.ndarray) -> bool:
        return not np.any(np.abs(v) > 0)

    def basis(self, vectors: Sequence[np.ndarray], dim: int) -> tuple[np.ndarray, ...]:
        if not len(vectors):
            return ()
        a = np.array(vectors, dtype=complex).reshape(len(vectors), dim)
        _, s, vh = np.linalg.svd(a, full_matrices=False)
        r = self._svd_rank(s)
        return tuple(vh[i].copy() for i in range(r))

    def rank(self, vectors: Sequence[np.ndarray], dim: int) -> int:
        if not len(vectors):
            return 0
        a = np.array(vectors, dtype=complex).reshape(len(vectors), dim)
        return self._svd_rank(np.linalg.svd(a, compute_uv=False))

    def nullspace(self, columns: Sequence[np.ndarray], length: int) -> list[np.ndarray]:
        if not len(columns):
            return []
        a = np.array(columns, dtype=complex).reshape(len(columns), length).T
        _, s, vh = np.linalg.svd(a, full_matrices=True)
        r = self._svd_rank(s)
        return [vh[i].conj() for i in range(r, vh.shape[0])]

    def combine(self, coeffs: Sequence, vectors: Sequence[np.ndarray], dim: int) -> np.ndarray:
        out = np.zeros(dim, dtype=complex)
        for c, v in zip(coeffs, vectors):
            out += c * v
        return out

    def matrix(self, rows: Sequence[Sequence[Any]]) -> np.ndarray:
        return np.array([[self.scalar(e) for e in r] for r in rows], dtype=complex)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=complex)

    def zeros(self, n: int) -> np.ndarray:
        return np.zeros((n, n), dtype=complex)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a @ b

    def adjoint(self, a: np.ndarray) -> np.ndarray:
        return a.conj().T

    def flatten(self, a: np.ndarray) -> np.ndarray:
        return a.reshape(-1)

    def unflatten(self, vals: np.ndarray, n: int) -> np.ndarray:
        return np.asarray(vals).reshape(n, n)

    def mat_equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        scale = max(1.0, float(np.abs(a).max(initial=0)), float(np.abs(b).max(initial=0)))
        return bool(np.abs(a - b).max(initial=0) <= self.rel_tol * scale)

    def is_native(self, m: Any) -> bool:
        return isinstance(m, np.ndarray)

    def entries(self, m: np.ndarray) -> list[list]:
        return m.tolist()

    def entry_to_json(self, e: complex) -> list[float]:
        return [float(e.real), float(e.imag)]

    def entry_from_json(self, data: Any) -> complex:
        re, im = data
        return complex(float(re), float(im))


def backend(mode: str) -> ExactBackend | FloatBackend:
    if mode == "exact":
        return ExactBackend()
    if mode == "float":
        return FloatBackend()
    raise ValueError(f"unknown arithmetic mode {mode!r}; use 'exact' or 'float'")

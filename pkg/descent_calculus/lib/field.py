"""
Finite field extensions K = F_p[t]/(m) of F_p, the tensor square K ⊗ K and
the splitting isomorphism K ⊗ K -> ∏_σ K, x ⊗ y -> (x·σ(y))_σ.

Field elements are coefficient vectors (constant term first) of length n;
all arithmetic is done with int64 numpy arrays reduced mod p.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Tuple

import numpy as np

from .errors import DegreeZero, NotPrime, VerificationFailed
from .init_helper import get_logger

logger = get_logger()


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def poly_trim(a: np.ndarray) -> np.ndarray:
    nonzero = np.nonzero(a)[0]
    if len(nonzero) == 0:
        return np.zeros(1, dtype=np.int64)
    return a[: nonzero[-1] + 1]


def poly_rem(a: np.ndarray, m: np.ndarray, p: int) -> np.ndarray:
    """
    Remainder of a modulo the monic polynomial m over F_p.
    """
    a = np.array(a, dtype=np.int64) % p
    m = poly_trim(np.array(m, dtype=np.int64) % p)
    deg = len(m) - 1
    lead_inverse = pow(int(m[-1]), -1, p)
    for top in range(len(a) - 1, deg - 1, -1):
        coeff = (a[top] * lead_inverse) % p
        if coeff:
            a[top - deg : top + 1] = (a[top - deg : top + 1] - coeff * m) % p
    result = np.zeros(max(deg, 1), dtype=np.int64)
    size = min(len(a), deg) if deg else 0
    result[:size] = a[:size]
    return result


def poly_mulmod(a: np.ndarray, b: np.ndarray, m: np.ndarray, p: int) -> np.ndarray:
    return poly_rem(np.convolve(a, b) % p, m, p)


def monic_polynomials(p: int, degree: int) -> Iterator[np.ndarray]:
    """
    Monic polynomials of the given degree, in lexicographic order of the
    coefficient list read from the top.
    """
    for lower in itertools.product(range(p), repeat=degree):
        yield np.array(list(reversed(lower)) + [1], dtype=np.int64)


def is_irreducible(m: np.ndarray, p: int) -> bool:
    m = poly_trim(np.array(m, dtype=np.int64) % p)
    degree = len(m) - 1
    if degree < 1:
        return False
    for d in range(1, degree // 2 + 1):
        for factor in monic_polynomials(p, d):
            if not poly_rem(m, factor, p).any():
                return False
    return True


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """
    Rank over F_p by Gaussian elimination.
    """
    a = np.array(matrix, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, col]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        a[rank] = (a[rank] * pow(int(a[rank, col]), -1, p)) % p
        for r in range(rows):
            if r != rank and a[r, col]:
                a[r] = (a[r] - a[r, col] * a[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True, eq=False)
class FiniteFieldExt:
    p: int
    n: int
    modulus: np.ndarray
    frobenius_powers: Tuple[np.ndarray, ...]

    @cached_property
    def structure(self) -> np.ndarray:
        """
        structure[i, j] is the coefficient vector of t^i · t^j.
        """
        n, p = self.n, self.p
        basis = np.eye(n, dtype=np.int64)
        result = np.zeros((n, n, n), dtype=np.int64)
        for i, j in itertools.product(range(n), repeat=2):
            result[i, j] = poly_mulmod(basis[i], basis[j], self.modulus, p)
        return result

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijz->z", a, b, self.structure) % self.p

    @property
    def one(self) -> np.ndarray:
        return np.eye(self.n, dtype=np.int64)[0]

    def apply(self, k: int, a: np.ndarray) -> np.ndarray:
        """
        σ_k(a) = a^(p^k).
        """
        return self.frobenius_powers[k].dot(a) % self.p

    def elements(self) -> Iterator[np.ndarray]:
        for coeffs in itertools.product(range(self.p), repeat=self.n):
            yield np.array(coeffs, dtype=np.int64)


def least_irreducible(p: int, n: int) -> np.ndarray:
    return next(m for m in monic_polynomials(p, n) if is_irreducible(m, p))


def frobenius_matrix(modulus: np.ndarray, p: int) -> np.ndarray:
    """
    Matrix of a -> a^p in the basis 1, t, ..., t^(n-1); column i is t^(ip).
    """
    n = len(modulus) - 1
    columns = []
    for i in range(n):
        power = np.zeros(i * p + 1, dtype=np.int64)
        power[-1] = 1
        columns.append(poly_rem(power, modulus, p))
    return np.array(columns, dtype=np.int64).T % p


def build_extension(p: int, n: int) -> FiniteFieldExt:
    """
    F_(p^n) with the least irreducible monic modulus and its n Frobenius
    automorphisms σ_k: a -> a^(p^k), k = 0, ..., n-1.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime", p)
    if n < 1:
        raise DegreeZero("extension degree must be at least 1", n)
    modulus = least_irreducible(p, n)
    frob = frobenius_matrix(modulus, p)
    powers = [np.eye(n, dtype=np.int64)]
    for _ in range(1, n):
        powers.append(frob.dot(powers[-1]) % p)
    ext = FiniteFieldExt(p, n, modulus, tuple(powers))
    _verify_frobenius(ext, frob)
    logger.debug(f"F_{p}^{n} with modulus {modulus.tolist()}")
    return ext


def _verify_frobenius(ext: FiniteFieldExt, frob: np.ndarray):
    n, p = ext.n, ext.p
    if not np.array_equal(frob.dot(ext.frobenius_powers[-1]) % p, np.eye(n, dtype=np.int64)):
        raise VerificationFailed("Frobenius does not have order n", n)
    flat = {tuple(power.flatten()) for power in ext.frobenius_powers}
    if len(flat) != n:
        raise VerificationFailed("Frobenius powers are not distinct", n)
    basis = np.eye(n, dtype=np.int64)
    for k in range(n):
        if not np.array_equal(ext.apply(k, ext.one), ext.one):
            raise VerificationFailed("automorphism does not fix 1", k)
        for i, j in itertools.product(range(n), repeat=2):
            left = ext.apply(k, ext.mul(basis[i], basis[j]))
            right = ext.mul(ext.apply(k, basis[i]), ext.apply(k, basis[j]))
            if not np.array_equal(left, right):
                raise VerificationFailed("Frobenius power is not multiplicative", (k, i, j))


@dataclass(frozen=True, eq=False)
class TensorAlgebra:
    """
    K ⊗ K over F_p in the basis e_i ⊗ e_j (index i*n + j).
    """

    ext: FiniteFieldExt
    structure: np.ndarray

    @property
    def dim(self) -> int:
        return self.ext.n**2

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("a,b,abz->z", a, b, self.structure) % self.ext.p

    @property
    def one(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)[0]


def tensor_square(ext: FiniteFieldExt) -> TensorAlgebra:
    """
    (a ⊗ b)(c ⊗ d) = ac ⊗ bd, checked for the commutative, associative and
    unital laws on all basis triples.
    """
    n, p = ext.n, ext.p
    m = ext.structure
    # axes (i, j, k, l, u, v) flatten to e_i⊗e_j, e_k⊗e_l, e_u⊗e_v
    structure = np.einsum("iku,jlv->ijkluv", m, m) % p
    structure = structure.reshape(n * n, n * n, n * n)
    algebra = TensorAlgebra(ext, structure)
    _verify_algebra(algebra)
    return algebra


def _verify_algebra(algebra: TensorAlgebra):
    p = algebra.ext.p
    c = algebra.structure
    if not np.array_equal(c, c.transpose(1, 0, 2)):
        raise VerificationFailed("tensor square is not commutative")
    left = np.einsum("abw,wcz->abcz", c, c) % p
    right = np.einsum("bcw,awz->abcz", c, c) % p
    if not np.array_equal(left, right):
        raise VerificationFailed("tensor square is not associative")
    basis = np.eye(algebra.dim, dtype=np.int64)
    for a in range(algebra.dim):
        if not np.array_equal(algebra.mul(algebra.one, basis[a]), basis[a]):
            raise VerificationFailed("1 ⊗ 1 is not a unit", a)


@dataclass(frozen=True, eq=False)
class SplittingIso:
    """
    matrix has one column per basis tensor e_i ⊗ e_j and n blocks of n rows,
    block k being the character x ⊗ y -> x·σ_k(y).
    """

    algebra: TensorAlgebra
    matrix: np.ndarray
    rank: int

    def character(self, k: int) -> np.ndarray:
        n = self.algebra.ext.n
        return self.matrix[k * n : (k + 1) * n]

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return self.matrix.dot(a) % self.algebra.ext.p


def splitting_iso(ext: FiniteFieldExt) -> SplittingIso:
    """
    The F_p-linear map K ⊗ K -> ∏_σ K, verified multiplicative, unital and of
    full rank n^2.
    """
    n, p = ext.n, ext.p
    algebra = tensor_square(ext)
    blocks = [
        np.einsum("uj,iuz->zij", ext.frobenius_powers[k], ext.structure).reshape(n, n * n)
        for k in range(n)
    ]
    matrix = np.concatenate(blocks, axis=0) % p
    rank = rank_mod_p(matrix, p)
    iso = SplittingIso(algebra, matrix, rank)
    if rank != n * n:
        raise VerificationFailed("splitting map is not bijective", rank)
    if not np.array_equal(iso(algebra.one), np.tile(ext.one, n)):
        raise VerificationFailed("splitting map is not unital")
    basis = np.eye(n * n, dtype=np.int64)
    for a, b in itertools.product(range(n * n), repeat=2):
        left = iso(algebra.mul(basis[a], basis[b]))
        right = _product_mul(ext, iso(basis[a]), iso(basis[b]))
        if not np.array_equal(left, right):
            raise VerificationFailed("splitting map is not multiplicative", (a, b))
    logger.debug(f"K ⊗ K -> K^{n} over F_{p} has rank {rank}")
    return iso


def _product_mul(ext: FiniteFieldExt, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = ext.n
    return np.concatenate(
        [ext.mul(a[k * n : (k + 1) * n], b[k * n : (k + 1) * n]) for k in range(n)]
    )


def characters_distinct(iso: SplittingIso) -> bool:
    n = iso.algebra.ext.n
    blocks = [tuple(iso.character(k).flatten()) for k in range(n)]
    return len(set(blocks)) == n

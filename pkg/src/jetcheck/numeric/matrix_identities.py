"""Random-matrix checks of the matrix calculus identities the reductions rely on.

A random matrix function of ``(x, y)`` is represented by its Taylor jet at a
point, truncated at total order 2. Products truncate, inverses use the
Neumann series, and the identities are compared at the point itself.
"""

from collections.abc import Callable
from fractions import Fraction

import numpy as np
import sympy as sp

from my_logger import check_logger
from src.jetcheck.enums import NumericMode
from src.jetcheck.exceptions import SingularSample

ORDER = 2
EXPONENTS = [(i, j) for i in range(ORDER + 1) for j in range(ORDER + 1 - i)]


class MatrixJet:
    """Truncated Taylor jet of a matrix function of two variables.

    Parameters
    ----------
    coefficients : dict of (int, int) to ndarray
        Coefficient of ``x^i y^j`` (missing entries are zero).
    size : int
        Matrix size.
    """

    def __init__(self, coefficients: dict[tuple[int, int], np.ndarray], size: int) -> None:
        self.size = size
        self.c = {k: v for k, v in coefficients.items() if k[0] + k[1] <= ORDER}

    def _zero(self) -> np.ndarray:
        sample = next(iter(self.c.values()), None)
        if sample is not None and sample.dtype == object:
            return np.full((self.size, self.size), Fraction(0), dtype=object)
        return np.zeros((self.size, self.size))

    def coefficient(self, key: tuple[int, int]) -> np.ndarray:
        return self.c.get(key, self._zero())

    def value(self) -> np.ndarray:
        """Value at the expansion point."""
        return self.coefficient((0, 0))

    def __add__(self, other: "MatrixJet") -> "MatrixJet":
        keys = set(self.c) | set(other.c)
        return MatrixJet({k: self.coefficient(k) + other.coefficient(k) for k in keys}, self.size)

    def __neg__(self) -> "MatrixJet":
        return MatrixJet({k: -v for k, v in self.c.items()}, self.size)

    def __sub__(self, other: "MatrixJet") -> "MatrixJet":
        return self + (-other)

    def __matmul__(self, other: "MatrixJet") -> "MatrixJet":
        product: dict[tuple[int, int], np.ndarray] = {}
        for (i1, j1), a in self.c.items():
            for (i2, j2), b in other.c.items():
                key = (i1 + i2, j1 + j2)
                if key[0] + key[1] > ORDER:
                    continue
                product[key] = product[key] + a @ b if key in product else a @ b
        return MatrixJet(product, self.size)

    def diff(self, var: str) -> "MatrixJet":
        """Derivative in ``x`` or ``y``; the result is exact to one order less."""
        result = {}
        for (i, j), v in self.c.items():
            n = i if var == "x" else j
            if n:
                result[(i - 1, j) if var == "x" else (i, j - 1)] = v * n
        return MatrixJet(result, self.size)

    def inverse(self, invert: Callable[[np.ndarray], np.ndarray]) -> "MatrixJet":
        """Inverse through ``(A0 (1 + B))^-1 = (1 - B + B^2) A0^-1`` with ``B`` nilpotent."""
        head = invert(self.value())
        head_jet = MatrixJet({(0, 0): head}, self.size)
        tail = MatrixJet({k: v for k, v in self.c.items() if k != (0, 0)}, self.size)
        b = head_jet @ tail
        one = MatrixJet({(0, 0): _identity_like(head)}, self.size)
        series = one - b + b @ b
        return series @ head_jet


def commutator(a: MatrixJet, b: MatrixJet) -> MatrixJet:
    return a @ b - b @ a


def _identity_like(m: np.ndarray) -> np.ndarray:
    if m.dtype == object:
        eye = np.full(m.shape, Fraction(0), dtype=object)
        for k in range(m.shape[0]):
            eye[k, k] = Fraction(1)
        return eye
    return np.eye(m.shape[0])


def _exact_inverse(m: np.ndarray) -> np.ndarray:
    inv = sp.Matrix(m.tolist()).inv()
    out = np.empty(m.shape, dtype=object)
    for r in range(m.shape[0]):
        for c in range(m.shape[1]):
            v = sp.Rational(inv[r, c])
            out[r, c] = Fraction(int(v.p), int(v.q))
    return out


def _inverse_derivative(a: MatrixJet, b: MatrixJet, inv: Callable) -> MatrixJet:
    ai = a.inverse(inv)
    return ai.diff("x") + ai @ a.diff("x") @ ai


def _left_current_flatness(a: MatrixJet, b: MatrixJet, inv: Callable) -> MatrixJet:
    ai = a.inverse(inv)
    lx, ly = ai @ a.diff("x"), ai @ a.diff("y")
    return ly.diff("x") - lx.diff("y") + commutator(lx, ly)


def _right_current_flatness(a: MatrixJet, b: MatrixJet, inv: Callable) -> MatrixJet:
    ai = a.inverse(inv)
    rx, ry = a.diff("x") @ ai, a.diff("y") @ ai
    return ry.diff("x") - rx.diff("y") - commutator(rx, ry)


def _conjugated_current(a: MatrixJet, b: MatrixJet, inv: Callable) -> MatrixJet:
    ai = a.inverse(inv)
    return a @ (ai @ a.diff("x")).diff("y") @ ai - (a.diff("y") @ ai).diff("x")


def _commutator_derivative(a: MatrixJet, b: MatrixJet, inv: Callable) -> MatrixJet:
    return commutator(a, b).diff("x") - commutator(a.diff("x"), b) - commutator(a, b.diff("x"))


IDENTITIES: dict[str, Callable[[MatrixJet, MatrixJet, Callable], MatrixJet]] = {
    "inverse-derivative": _inverse_derivative,
    "left-current-flatness": _left_current_flatness,
    "right-current-flatness": _right_current_flatness,
    "conjugated-current": _conjugated_current,
    "commutator-derivative": _commutator_derivative,
}


def random_jet(
    rng: np.random.Generator, size: int, mode: NumericMode = NumericMode.FLOAT
) -> MatrixJet:
    """Jet of a random quadratic matrix polynomial at a random point."""
    coefficients = {}
    for key in EXPONENTS:
        if mode is NumericMode.EXACT:
            num = rng.integers(-9, 10, size=(size, size))
            den = rng.integers(1, 10, size=(size, size))
            entries = np.empty((size, size), dtype=object)
            for (r, c), n in np.ndenumerate(num):
                entries[r, c] = Fraction(int(n), int(den[r, c]))
            coefficients[key] = entries
        elif key == (0, 0):
            # diagonally dominant, so the value is well conditioned
            spread = rng.uniform(-1.0, 1.0, size=(size, size))
            coefficients[key] = np.eye(size) + spread / (2 * size)
        else:
            coefficients[key] = rng.uniform(-1.0, 1.0, size=(size, size))
    return MatrixJet(coefficients, size)


def _invertible(m: np.ndarray, mode: NumericMode) -> bool:
    if mode is NumericMode.EXACT:
        return sp.Matrix(m.tolist()).det() != 0
    return abs(np.linalg.det(m)) > 1e-3


def random_matrix_check(
    identity: str,
    size: int = 2,
    trials: int = 100,
    seed: int = 1729,
    mode: NumericMode = NumericMode.FLOAT,
    retries: int = 10,
) -> float:
    """Largest entrywise deviation of a matrix identity over random samples.

    Parameters
    ----------
    identity : str
        One of `IDENTITIES`.
    size : int, optional
        Matrix size, at least 2.
    trials : int, optional
        Number of random samples.
    seed : int, optional
        Seed of the samples.
    mode : NumericMode, optional
        Float samples, or exact rational samples (deviation exactly 0.0).
    retries : int, optional
        Redraws allowed for a singular sample.

    Returns
    -------
    float
        Maximum absolute entry of the identity's left side over all trials.

    Raises
    ------
    SingularSample
        When a sample stays singular after every retry.
    """
    if identity not in IDENTITIES:
        raise KeyError(f"Unknown identity '{identity}'; known: {', '.join(IDENTITIES)}.")
    if size < 2:
        raise ValueError("Matrix identities need matrices of size at least 2.")
    rng = np.random.default_rng(seed)
    inv = _exact_inverse if mode is NumericMode.EXACT else np.linalg.inv
    worst = 0.0
    for _ in range(trials):
        for _ in range(retries):
            a = random_jet(rng, size, mode)
            if _invertible(a.value(), mode):
                break
        else:
            raise SingularSample(f"No invertible sample after {retries} draws.")
        b = random_jet(rng, size, mode)
        residual = IDENTITIES[identity](a, b, inv).value()
        worst = max(worst, max(abs(float(v)) for v in residual.flat))
    check_logger.debug(f"{identity}: max deviation {worst:.3e} over {trials} trials")
    return worst

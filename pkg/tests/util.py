"""Shared fixtures-in-code for the test suite: small canonical instances and
the independent oracles used to freeze expected values."""

import numpy as np

from spexp import BistochasticTuple, Subspace, tuple_from_permutations


def shift_matrix(n: int) -> np.ndarray:
    """Cyclic shift: column j carries 1 in row j+1 mod n."""
    s = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        s[(j + 1) % n, j] = 1.0
    return s


def cycle_tuple(n: int) -> BistochasticTuple:
    """The permutation tuple {shift, shift^-1} of the n-cycle."""
    fwd = [(j + 1) % n for j in range(n)]
    bwd = [(j - 1) % n for j in range(n)]
    return tuple_from_permutations([fwd, bwd])


def identity_tuple(n: int, d: int) -> BistochasticTuple:
    return tuple_from_permutations([list(range(n))] * d)


def coord(n: int, idx) -> Subspace:
    return Subspace.coordinate(n, idx)


def random_complex(rng, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def finite_difference_gradient(fun, q: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central differences over the real and imaginary part of every entry.

    Matches a gradient defined as the Riesz representer under the real inner
    product Re Tr[A* B].
    """
    grad = np.zeros_like(q, dtype=np.complex128)
    for i in range(q.shape[0]):
        for j in range(q.shape[1]):
            for unit, write in ((1.0, 1.0), (1j, 1j)):
                plus = q.copy()
                plus[i, j] += h * unit
                minus = q.copy()
                minus[i, j] -= h * unit
                grad[i, j] += write * (fun(plus) - fun(minus)) / (2 * h)
    return grad

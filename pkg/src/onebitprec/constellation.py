"""Square 4^n-QAM constellations built from the four quadrant basis symbols.

Every constellation point is indexed by a length-n quaternary digit vector
(d_1, ..., d_n) and equals tau * sum_l 2^(n-l) * c(d_l), where c(0..3) are the
diagonal unit cells +-1 +- 1j and tau is the decision size (half the minimum
distance of the scaled constellation).  Minimum-distance decision regions
factor into n nested, shifted quadrant cones; that decomposition is what the
precoding margin system is built on.

All functions here are pure and operate on immutable inputs, so they are safe
to use concurrently.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# sqrt(2) * exp(1j * pi * (1 + 2i) / 4) for i = 0..3, evaluated exactly
BASIS_SYMBOLS = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
BASIS_SYMBOLS.setflags(write=False)

# strict cone membership, with a little slack for accumulated rounding
_MEMBERSHIP_TOL = 1e-12


def g_map(x) -> np.ndarray:
    """Real expansion of a complex vector: (Re x1, Im x1, Re x2, Im x2, ...)."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    out = np.empty(2 * x.size)
    out[0::2] = x.real
    out[1::2] = x.imag
    return out


def g_inv(v) -> np.ndarray:
    """Inverse of :func:`g_map`.  Rejects odd-length input."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size % 2:
        raise ValueError(f"real expansion must be 1-D with even length, got shape {v.shape}")
    return v[0::2] + 1j * v[1::2]


def phi_expand(H) -> np.ndarray:
    """Real 2x2-block expansion of a complex matrix (vectors are columns).

    Each entry x becomes [[Re x, -Im x], [Im x, Re x]], so that
    ``g_map(H @ x) == phi_expand(H) @ g_map(x)``.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim < 2:
        H = H.reshape(-1, 1) if H.ndim == 1 else H.reshape(1, 1)
    rows, cols = H.shape
    out = np.empty((2 * rows, 2 * cols))
    out[0::2, 0::2] = H.real
    out[0::2, 1::2] = -H.imag
    out[1::2, 0::2] = H.imag
    out[1::2, 1::2] = H.real
    return out


def basis_symbol(i: int) -> complex:
    """The i-th quadrant basis symbol, i in [0:3]."""
    if not 0 <= int(i) <= 3:
        raise ValueError(f"basis symbol index must be in [0:3], got {i}")
    return complex(BASIS_SYMBOLS[int(i)])


def as_digits(digits, n: int | None = None) -> np.ndarray:
    """Validate a quaternary digit vector and return it as an int64 array."""
    d = np.atleast_1d(np.asarray(digits, dtype=np.int64))
    if d.ndim != 1 or d.size == 0:
        raise ValueError(f"digit vector must be 1-D and nonempty, got shape {d.shape}")
    if np.any((d < 0) | (d > 3)):
        raise ValueError(f"digits must lie in [0:3], got {digits}")
    if n is not None and d.size != n:
        raise ValueError(f"expected {n} digits, got {d.size}")
    return d


@dataclass(frozen=True)
class QamSpec:
    """A 4^n-QAM constellation with lexicographically ordered digit indexing.

    ``points`` holds the normalized (tau = 1) constellation; row ``r`` of
    ``indices`` is the digit vector of ``points[r]``.
    """

    n: int
    indices: np.ndarray  # (4**n, n) int64
    points: np.ndarray   # (4**n,) complex

    @property
    def size(self) -> int:
        return self.points.size


@lru_cache(maxsize=None)
def qam_spec(n: int) -> QamSpec:
    """Build (and cache) the 4^n-QAM description for n >= 2."""
    if n < 2:
        raise ValueError(f"constellation order exponent must be >= 2, got {n}")
    indices = np.array(list(itertools.product(range(4), repeat=n)), dtype=np.int64)
    weights = 2.0 ** np.arange(n - 1, -1, -1)
    points = (BASIS_SYMBOLS[indices] * weights).sum(axis=1)
    indices.setflags(write=False)
    points.setflags(write=False)
    return QamSpec(n=n, indices=indices, points=points)


def symbol_from_index(digits, tau: float) -> complex:
    """Constellation point tau * sum_l 2^(n-l) c(d_l) for the given digits."""
    d = as_digits(digits)
    if tau <= 0:
        raise ValueError(f"decision size tau must be positive, got {tau}")
    weights = 2.0 ** np.arange(d.size - 1, -1, -1)
    return complex(tau * (BASIS_SYMBOLS[d] * weights).sum())


def region_offsets(digits, tau: float) -> np.ndarray:
    """Per-level shifts of the nested quadrant decomposition, shape (n, 2).

    Level 1 is unshifted; level l >= 2 is shifted by the real expansion of
    2^(n-l+1) * tau * (partial point of the first l-1 digits).
    """
    d = as_digits(digits)
    n = d.size
    off = np.zeros((n, 2))
    partial = 0j
    for l in range(1, n):
        partial = 2.0 * partial + complex(BASIS_SYMBOLS[d[l - 1]])
        scale = tau * 2.0 ** (n - l)
        off[l, 0] = scale * partial.real
        off[l, 1] = scale * partial.imag
    return off


def base_region_membership(v, i: int, offset) -> bool:
    """Strict membership of a real 2-vector in the i-th quadrant cone + offset.

    The cone is spanned by the axis vectors (Re c_i, 0) and (0, Im c_i) with
    strictly positive coefficients.
    """
    c = basis_symbol(i)
    v = np.asarray(v, dtype=float)
    offset = np.asarray(offset, dtype=float)
    a1 = c.real * (v[0] - offset[0])
    a2 = c.imag * (v[1] - offset[1])
    return bool(a1 > _MEMBERSHIP_TOL and a2 > _MEMBERSHIP_TOL)


def region_decomposition_check(y: complex, digits, tau: float) -> bool:
    """True iff y lies strictly inside every nested cone of the symbol's region."""
    d = as_digits(digits)
    if tau <= 0:
        raise ValueError(f"decision size tau must be positive, got {tau}")
    v = np.array([np.real(y), np.imag(y)])
    off = region_offsets(d, tau)
    return all(base_region_membership(v, d[l], off[l]) for l in range(d.size))


def nearest_symbols(y, tau: float, spec: QamSpec) -> np.ndarray:
    """Digit vectors of the tau-scaled points closest to each entry of y.

    Exact distance ties resolve to the lexicographically smallest digit
    vector (points are stored in that order and argmin keeps the first).
    """
    if tau <= 0:
        raise ValueError(f"decision size tau must be positive, got {tau}")
    y = np.atleast_1d(np.asarray(y, dtype=complex))
    diff = y[:, None] - tau * spec.points[None, :]
    d2 = diff.real**2 + diff.imag**2
    return spec.indices[np.argmin(d2, axis=1)]


def nearest_symbol(y: complex, tau: float, spec: QamSpec) -> np.ndarray:
    """Digit vector of the tau-scaled constellation point closest to y."""
    return nearest_symbols(np.array([y], dtype=complex), tau, spec)[0]

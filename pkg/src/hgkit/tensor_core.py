"""Dense multilinear algebra over a 4n-dimensional real vector space.

This module provides the ground floor of the package: the standard
hypercomplex triple of anticommuting almost complex structures, the
compatible neutral metric, the associated bilinear forms, and the small
set of tensor utilities (index substitution, cyclic sums, symmetry
residuals, raising/lowering) everything else is built from.

Index conventions used throughout the package
---------------------------------------------
* Endomorphisms are matrices ``J[i, j] = J^i_j`` acting on column
  vectors, so column ``j`` holds the image of the basis vector ``e_j``.
* Covariant tensors store slots in argument order:
  ``T[i, j, k] = T(e_i, e_j, e_k)``.
* Structure constants: ``C[i, j, k] = C^k_{ij}``, i.e.
  ``[e_i, e_j] = C[i, j, :] @ e``.
* Connection coefficients: ``G[i, j, k] = Gamma^k_{ij}``, i.e.
  ``nabla_{e_i} e_j = G[i, j, :] @ e``.

Slot permutations are always written as explicit ``einsum`` strings,
e.g. ``np.einsum('jki->ijk', T)`` is the tensor ``(x,y,z) -> T(y,z,x)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

#: Default relative pass tolerance for residual verdicts.
DEFAULT_RTOL = 1e-8

#: Absolute floor used when normalizing residuals by a reference magnitude.
ABS_FLOOR = 1e-10

#: Signs (epsilon_1, epsilon_2, epsilon_3): the metric is Hermitian for J1
#: and anti-Hermitian (Norden) for J2 and J3.
EPSILON = (1.0, -1.0, -1.0)

_COND_WARN = 1e8
_SIG_ZERO_TOL = 1e-10


class StructureError(ValueError):
    """Raised when a metric/hypercomplex structure fails validation."""


@dataclass(frozen=True)
class Dim:
    """Ambient dimension d = 4n of the model space."""

    n: int

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise StructureError(f"n must be a positive integer, got {self.n}")

    @property
    def d(self) -> int:
        return 4 * self.n


@dataclass(frozen=True)
class Metric:
    """Symmetric invertible bilinear form with its precomputed inverse.

    Use :meth:`from_components`; the constructor does not validate.
    The inverse is computed once (LU with partial pivoting) and the
    condition number is kept for reporting.
    """

    components: np.ndarray
    inverse: np.ndarray
    signature: tuple
    condition: float = 1.0

    @classmethod
    def from_components(cls, mat) -> "Metric":
        mat = np.asarray(mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise StructureError(f"metric must be square, got shape {mat.shape}")
        if max_abs(mat - mat.T) > ABS_FLOOR * max(max_abs(mat), 1.0):
            raise StructureError("metric is not symmetric")
        cond = float(np.linalg.cond(mat))
        if not np.isfinite(cond):
            raise StructureError("metric is singular")
        if cond > _COND_WARN:
            warnings.warn(f"metric condition number {cond:.2e} exceeds {_COND_WARN:.0e}",
                          RuntimeWarning, stacklevel=2)
        inv = np.linalg.inv(mat)
        return cls(components=mat, inverse=inv, signature=signature(mat),
                   condition=cond)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def is_neutral(self) -> bool:
        pos, neg = self.signature
        return pos == neg


@dataclass(frozen=True)
class HypercomplexTriple:
    """Triple (J1, J2, J3) of anticommuting almost complex structures.

    ``epsilon`` is the fixed sign split (+1, -1, -1): J1 is an isometry
    of the compatible metric, J2 and J3 are anti-isometries.
    """

    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    epsilon: tuple = field(default=EPSILON)

    def __iter__(self):
        return iter((self.J1, self.J2, self.J3))

    def __getitem__(self, alpha: int) -> np.ndarray:
        """1-based access: H[1] is J1."""
        return (self.J1, self.J2, self.J3)[alpha - 1]

    @property
    def dim(self) -> int:
        return self.J1.shape[0]


def standard_hypercomplex(dim: Dim) -> HypercomplexTriple:
    """Block-repeated standard triple on R^{4n}.

    Per 4-block with basis (e1, e2, e3, e4):
    J1: e1->e2, e2->-e1, e3->-e4, e4->e3
    J2: e1->e3, e2->e4, e3->-e1, e4->-e2
    J3: e1->-e4, e2->e3, e3->-e2, e4->e1
    All entries are 0 or +-1, so the quaternionic relations hold exactly.
    """
    d = dim.d
    J1 = np.zeros((d, d))
    J2 = np.zeros((d, d))
    J3 = np.zeros((d, d))
    for k in range(dim.n):
        b = 4 * k
        J1[b + 1, b + 0] = 1.0; J1[b + 0, b + 1] = -1.0
        J1[b + 3, b + 2] = -1.0; J1[b + 2, b + 3] = 1.0
        J2[b + 2, b + 0] = 1.0; J2[b + 3, b + 1] = 1.0
        J2[b + 0, b + 2] = -1.0; J2[b + 1, b + 3] = -1.0
        J3[b + 3, b + 0] = -1.0; J3[b + 2, b + 1] = 1.0
        J3[b + 1, b + 2] = -1.0; J3[b + 0, b + 3] = 1.0
    return HypercomplexTriple(J1=J1, J2=J2, J3=J3)


def standard_metric(dim: Dim) -> Metric:
    """Block-diagonal neutral metric diag(+1, +1, -1, -1) repeated n times."""
    diag = np.tile([1.0, 1.0, -1.0, -1.0], dim.n)
    return Metric.from_components(np.diag(diag))


def check_structure(g: Metric, H: HypercomplexTriple) -> dict:
    """Max-norm residuals of the (H, G)-structure axioms.

    Returns residuals of the quaternionic relations, of J_alpha^2 = -I,
    and of the compatibility eps_alpha * g(J_alpha x, J_alpha y) = g(x, y).
    All residuals are nonnegative; zero means the axiom holds exactly.
    """
    if g.dim != H.dim:
        raise StructureError(f"dimension mismatch: metric {g.dim}, triple {H.dim}")
    d = g.dim
    I = np.eye(d)
    Js = tuple(H)
    out = {}
    quat = 0.0
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        quat = max(quat, max_abs(Js[a] - Js[b] @ Js[c]))
        quat = max(quat, max_abs(Js[a] + Js[c] @ Js[b]))
    out["quaternionic"] = quat
    for a, J in enumerate(Js):
        out[f"J{a + 1}_square"] = max_abs(J @ J + I)
        out[f"compat_J{a + 1}"] = max_abs(EPSILON[a] * J.T @ g.components @ J - g.components)
    return out


def structure_ok(g: Metric, H: HypercomplexTriple, tol: float = DEFAULT_RTOL) -> bool:
    return max(check_structure(g, H).values()) <= tol


def associated_forms(g: Metric, H: HypercomplexTriple, tol: float = DEFAULT_RTOL):
    """The three bilinear forms g_alpha(x, y) = g(J_alpha x, y).

    g_1 is the Kahler 2-form (antisymmetric); g_2 and g_3 are further
    neutral metrics (symmetric).
    """
    if not structure_ok(g, H, tol):
        raise StructureError("incompatible (g, H) structure; see check_structure")
    return tuple(J.T @ g.components for J in H)


# ---------------------------------------------------------------------------
# tensor utilities
# ---------------------------------------------------------------------------

def magnitude(T) -> float:
    """Frobenius-style magnitude: sqrt of the sum of squared components."""
    T = np.asarray(T)
    return float(np.sqrt(np.sum(T * T)))


def max_abs(T) -> float:
    T = np.asarray(T)
    return float(np.abs(T).max()) if T.size else 0.0


def relative(err, *refs, floor: float = ABS_FLOOR) -> float:
    """Magnitude of ``err`` relative to the largest reference magnitude.

    The absolute floor keeps the ratio finite (and zero-over-floor = 0)
    when all references vanish.
    """
    scale = max(max((magnitude(r) for r in refs), default=0.0), floor)
    return magnitude(err) / scale


def cyclic_sum(T) -> np.ndarray:
    """Cyclic sum over the first three slots.

    For a 3-tensor: (S T)(x,y,z) = T(x,y,z) + T(y,z,x) + T(z,x,y);
    a trailing fourth slot, if present, is carried along unchanged.
    Satisfies S(S(T)) = 3 S(T) for every T.
    """
    T = np.asarray(T)
    if T.ndim == 3:
        return T + np.einsum('jki->ijk', T) + np.einsum('kij->ijk', T)
    if T.ndim == 4:
        return T + np.einsum('jkil->ijkl', T) + np.einsum('kijl->ijkl', T)
    raise ValueError(f"cyclic_sum expects 3 or 4 slots, got {T.ndim}")


def sub_index(T, J, slot: int) -> np.ndarray:
    """Substitute the argument in ``slot`` by its J-image: T(..., Jx, ...)."""
    R = np.tensordot(np.asarray(T), np.asarray(J), axes=([slot], [0]))
    return np.moveaxis(R, -1, slot)


def alternation3(T) -> np.ndarray:
    """Full antisymmetrization of a 3-tensor."""
    return (T
            - np.einsum('ikj->ijk', T)
            - np.einsum('jik->ijk', T)
            + np.einsum('jki->ijk', T)
            + np.einsum('kij->ijk', T)
            - np.einsum('kji->ijk', T)) / 6.0


def lower_slot(T, g: Metric, slot: int) -> np.ndarray:
    """Contract an upper index in ``slot`` with the metric."""
    R = np.tensordot(np.asarray(T), g.components, axes=([slot], [0]))
    return np.moveaxis(R, -1, slot)


def raise_slot(T, g: Metric, slot: int) -> np.ndarray:
    """Contract a lower index in ``slot`` with the inverse metric."""
    R = np.tensordot(np.asarray(T), g.inverse, axes=([slot], [0]))
    return np.moveaxis(R, -1, slot)


def signature(mat, zero_tol: float = _SIG_ZERO_TOL) -> tuple:
    """(positive, negative) eigenvalue counts of a symmetric matrix."""
    w = np.linalg.eigvalsh(np.asarray(mat, dtype=float))
    thresh = zero_tol * max(np.abs(w).max(), 1.0)
    return int(np.sum(w > thresh)), int(np.sum(w < -thresh))


# ---------------------------------------------------------------------------
# flat-index operator matrices (constraint assembly plumbing)
# ---------------------------------------------------------------------------

def slot_permutation_matrix(d: int, perm) -> np.ndarray:
    """Dense matrix of vec(T) -> vec(T') with T'(x_0,..) = T(x_perm(0),..).

    ``perm`` lists, for each output slot, which output argument feeds the
    corresponding input slot, matching ``np.transpose`` axes semantics:
    the returned matrix M satisfies M @ T.ravel() == np.transpose(T, perm).ravel().
    """
    rank = len(perm)
    N = d ** rank
    src = np.transpose(np.arange(N).reshape((d,) * rank), perm).ravel()
    return np.eye(N)[src]


def substitution_matrix(d: int, J, slot: int, rank: int = 3) -> np.ndarray:
    """Dense matrix of vec(T) -> vec(sub_index(T, J, slot))."""
    J = np.asarray(J)
    M = np.ones((1, 1))
    for s in range(rank):
        M = np.kron(M, J.T if s == slot else np.eye(d))
    return M

"""Concrete desk-scale models: left-invariant Lie-algebra geometry and
pointwise first-order structural data.

A :class:`LieAlgebraModel` carries skew structure constants together with
a compatible (g, H)-structure; every geometric object (connection,
curvature, torsion) becomes a constant dense tensor, with the bracket
supplied by the structure constants.

A :class:`PointModel` carries only the first-order data (F1, F2): two
covariant 3-tensors constrained by the fundamental identity system, with
F3 derived.  It supports purely linear-algebra verification of the
first-order classification theorems.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from .tensor_core import (
    ABS_FLOOR,
    DEFAULT_RTOL,
    EPSILON,
    Dim,
    HypercomplexTriple,
    Metric,
    StructureError,
    check_structure,
    magnitude,
    relative,
    slot_permutation_matrix,
    standard_hypercomplex,
    standard_metric,
    sub_index,
    substitution_matrix,
)

JACOBI_TOL = 1e-8

#: rank threshold for nullspace computations, relative to the largest
#: singular value
NULLSPACE_RCOND = 1e-9


def jacobi_tensor(C: np.ndarray) -> np.ndarray:
    """Cyclic sum over (i, j, k) of C^l_{ij} C^m_{lk}; zero iff Jacobi holds."""
    X = np.einsum('ijl,lkm->ijkm', C, C)
    return X + np.einsum('jkim->ijkm', X) + np.einsum('kijm->ijkm', X)


def jacobi_residual(C: np.ndarray) -> float:
    """Magnitude of the Jacobi tensor relative to the quadratic bracket scale."""
    scale = max(magnitude(C) ** 2, ABS_FLOOR)
    return magnitude(jacobi_tensor(C)) / scale


@dataclass(frozen=True)
class LieAlgebraModel:
    """Structure constants plus a validated (g, H)-structure.

    Use :meth:`create`; instances are treated as immutable.
    """

    dim: Dim
    C: np.ndarray
    g: Metric
    H: HypercomplexTriple

    @classmethod
    def create(cls, C, g: Metric = None, H: HypercomplexTriple = None,
               jacobi: str = "strict", tol: float = DEFAULT_RTOL) -> "LieAlgebraModel":
        """Validate and build a model.

        ``jacobi`` is one of ``"strict"`` (reject above tolerance),
        ``"warn"`` (warn and continue: pointwise F-identities do not need
        it, curvature-level ones do) or ``"skip"``.
        """
        C = np.asarray(C, dtype=float)
        d = C.shape[0]
        if C.shape != (d, d, d) or d % 4 != 0:
            raise StructureError(f"structure constants must be (d,d,d), d=4n; got {C.shape}")
        dim = Dim(d // 4)
        if g is None:
            g = standard_metric(dim)
        if H is None:
            H = standard_hypercomplex(dim)
        skew = np.abs(C + np.einsum('jik->ijk', C)).max()
        if skew > 0.0:
            raise StructureError(f"structure constants not skew: residual {skew:.3e}")
        sres = check_structure(g, H)
        if max(sres.values()) > tol:
            raise StructureError(f"(g, H) fails structure axioms: {sres}")
        jres = jacobi_residual(C)
        if jres > JACOBI_TOL:
            if jacobi == "strict":
                raise StructureError(f"Jacobi residual {jres:.3e} above {JACOBI_TOL:.0e}")
            if jacobi == "warn":
                warnings.warn(f"Jacobi residual {jres:.3e}; curvature-level "
                              "identities are unreliable", RuntimeWarning, stacklevel=2)
        return cls(dim=dim, C=C, g=g, H=H)

    @property
    def d(self) -> int:
        return self.dim.d


def abelian_model(dim: Dim) -> LieAlgebraModel:
    """The flat model: zero bracket with the standard structure."""
    return LieAlgebraModel.create(np.zeros((dim.d,) * 3))


# ---------------------------------------------------------------------------
# left-invariant connection and curvature
# ---------------------------------------------------------------------------

def levi_civita(m: LieAlgebraModel) -> np.ndarray:
    """Koszul formula for a left-invariant metric.

    2 g(nabla_x y, z) = g([x,y],z) - g([y,z],x) + g([z,x],y); the inner
    products of frame fields are constant so no derivative terms appear.
    Returns G with G[i,j,k] = Gamma^k_{ij}.
    """
    Cl = np.einsum('ijm,mk->ijk', m.C, m.g.components)
    Gl = 0.5 * (Cl - np.einsum('jki->ijk', Cl) + np.einsum('kij->ijk', Cl))
    return np.einsum('ijm,mk->ijk', Gl, m.g.inverse)


def metric_compat_residual(G: np.ndarray, g: Metric) -> float:
    """Residual of nabla g = 0."""
    ng = np.einsum('ijm,mk->ijk', G, g.components) + np.einsum('ikm,jm->ijk', G, g.components)
    return relative(ng, G, g.components)


def bracket_torsion_residual(G: np.ndarray, C: np.ndarray) -> float:
    """Residual of Gamma(x,y) - Gamma(y,x) = [x,y]."""
    t = G - np.einsum('jik->ijk', G) - C
    return relative(t, G, C)


def curvature_R(m: LieAlgebraModel, G: np.ndarray) -> np.ndarray:
    """Lowered curvature of connection coefficients G by the commutator rule.

    R(x,y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_{[x,y]} z,
    R(x,y,z,w) = g(R(x,y)z, w).  Feeding the Levi-Civita coefficients
    gives R; feeding any other metric connection's coefficients (e.g. the
    pHKT connection) gives its curvature tensor by the same formula.
    """
    Rup = (np.einsum('jkp,ipm->ijkm', G, G)
           - np.einsum('ikp,jpm->ijkm', G, G)
           - np.einsum('ijp,pkm->ijkm', m.C, G))
    return np.einsum('ijkm,ml->ijkl', Rup, m.g.components)


def nabla_J(G: np.ndarray, J: np.ndarray) -> np.ndarray:
    """(1,2)-tensor nj[i,k,j] = ((nabla_i J))^k_j for constant J.

    (nabla_x J) y = nabla_x(J y) - J nabla_x y, a Gamma-commutator.
    """
    return np.einsum('mj,imk->ikj', J, G) - np.einsum('ijm,km->ikj', G, J)


def cov_deriv_3tensor(T: np.ndarray, G: np.ndarray) -> np.ndarray:
    """(nabla_i T)_{jkl} for a constant covariant 3-tensor on the frame."""
    return -(np.einsum('ijm,mkl->ijkl', G, T)
             + np.einsum('ikm,jml->ijkl', G, T)
             + np.einsum('ilm,jkm->ijkl', G, T))


# ---------------------------------------------------------------------------
# pointwise first-order models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointModel:
    """First-order structural data (F1, F2) at a point; F3 is derived."""

    dim: Dim
    g: Metric
    H: HypercomplexTriple
    F1: np.ndarray
    F2: np.ndarray

    @property
    def F3(self) -> np.ndarray:
        return derive_F3(self)

    def packed(self) -> np.ndarray:
        return np.concatenate([self.F1.ravel(), self.F2.ravel()])

    @classmethod
    def from_packed(cls, dim: Dim, vec, g: Metric = None,
                    H: HypercomplexTriple = None) -> "PointModel":
        d = dim.d
        vec = np.asarray(vec, dtype=float)
        return cls(dim=dim,
                   g=g if g is not None else standard_metric(dim),
                   H=H if H is not None else standard_hypercomplex(dim),
                   F1=vec[:d ** 3].reshape(d, d, d),
                   F2=vec[d ** 3:].reshape(d, d, d))


def derive_F3(p_or_F1, F2=None, H: HypercomplexTriple = None) -> np.ndarray:
    """F3(x,y,z) = F1(x, J2 y, z) - F2(x, y, J1 z).

    This is the interrelation line with (alpha, beta, gamma) = (3, 1, 2); on
    admissible data the other line, -F2(x, J1 y, z) - F1(x, y, J2 z),
    agrees componentwise.
    """
    if isinstance(p_or_F1, PointModel):
        F1, F2, H = p_or_F1.F1, p_or_F1.F2, p_or_F1.H
    else:
        F1 = p_or_F1
    return sub_index(F1, H.J2, 1) - sub_index(F2, H.J1, 2)


def _block_ops(d: int, H: HypercomplexTriple):
    """Flat-index operator matrices used by the admissibility system.

    Returns (E1, E2, E3, S, P) where E_alpha maps the packed (F1, F2)
    vector to the flattened F_alpha, S[alpha][slot] substitutes J_alpha in
    a slot, and P holds slot permutations.
    """
    sz = d ** 3
    I = np.eye(sz)
    Z = np.zeros((sz, sz))
    S = {a: {s: substitution_matrix(d, H[a], s) for s in (0, 1, 2)} for a in (1, 2, 3)}
    P = {
        (0, 1): slot_permutation_matrix(d, (1, 0, 2)),
        (1, 2): slot_permutation_matrix(d, (0, 2, 1)),
        "cyc": (slot_permutation_matrix(d, (1, 2, 0)),
                slot_permutation_matrix(d, (2, 0, 1))),
    }
    E1 = np.hstack([I, Z])
    E2 = np.hstack([Z, I])
    E3 = np.hstack([S[2][1], Z]) - np.hstack([Z, S[1][2]])
    return E1, E2, E3, S, P


def admissibility_matrix(d: int, H: HypercomplexTriple) -> np.ndarray:
    """Stacked linear constraints defining admissible (F1, F2) data.

    Rows: the F1 symmetry set, the F2 symmetry set, both lines of the
    cyclic interrelation for all cyclic permutations (with F3 eliminated
    through its defining line), and the symmetry set of the derived F3.
    """
    sz = d ** 3
    I = np.eye(sz)
    E1, E2, E3, S, P = _block_ops(d, H)
    E = {1: E1, 2: E2, 3: E3}
    rows = [
        (I + P[(1, 2)]) @ E1,               # F1(x,y,z) = -F1(x,z,y)
        (I + S[1][1] @ S[1][2]) @ E1,       # F1(x,y,z) = -F1(x,J1y,J1z)
        (I - P[(1, 2)]) @ E2,               # F2 symmetric in last two slots
        (I - S[2][1] @ S[2][2]) @ E2,       # F2(x,y,z) = F2(x,J2y,J2z)
        (I - P[(1, 2)]) @ E3,               # derived F3 symmetry set
        (I - S[3][1] @ S[3][2]) @ E3,
    ]
    for (a, b, c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        # line A: F_a = F_b(x, J_c y, z) - eps_b F_c(x, y, J_b z)
        rows.append(E[a] - (S[c][1] @ E[b] - EPSILON[b - 1] * S[b][2] @ E[c]))
        # line B: F_a = -F_c(x, J_b y, z) + eps_c F_b(x, y, J_c z)
        rows.append(E[a] - (-S[b][1] @ E[c] + EPSILON[c - 1] * S[c][2] @ E[b]))
    return np.vstack(rows)


@lru_cache(maxsize=8)
def _admissible_basis_standard(n: int) -> np.ndarray:
    dim = Dim(n)
    H = standard_hypercomplex(dim)
    A = admissibility_matrix(dim.d, H)
    return null_space(A, rcond=NULLSPACE_RCOND)


def admissible_basis(dim: Dim, H: HypercomplexTriple = None) -> np.ndarray:
    """Orthonormal basis (columns) of the admissible (F1, F2) space."""
    if H is None:
        return _admissible_basis_standard(dim.n)
    return null_space(admissibility_matrix(dim.d, H), rcond=NULLSPACE_RCOND)


def sample_point_model(dim: Dim, seed: int) -> PointModel:
    """Seeded random admissible PointModel, normalized to unit magnitude.

    Coefficients are drawn in the admissible nullspace basis; the same
    seed always returns the identical model.
    """
    basis = admissible_basis(dim)
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(basis.shape[1])
    vec = basis @ coeff
    nrm = np.linalg.norm(vec)
    if nrm > ABS_FLOOR:
        vec = vec / nrm
    return PointModel.from_packed(dim, vec)


# ---------------------------------------------------------------------------
# seeded model generators (fuzz plumbing)
# ---------------------------------------------------------------------------

def _nilpotent2_constants(d: int, rng) -> np.ndarray:
    """2-step nilpotent bracket: [V, V] in Z with Z central; Jacobi exact."""
    C = np.zeros((d, d, d))
    half = d // 2
    perm = rng.permutation(d)
    V, Z = perm[:half], perm[half:]
    for a in range(half):
        for b in range(a + 1, half):
            row = rng.standard_normal(d - half)
            C[V[a], V[b], Z] = row
            C[V[b], V[a], Z] = -row
    return C


def _almost_abelian_constants(d: int, rng) -> np.ndarray:
    """One generator acting on an abelian ideal; Jacobi exact."""
    C = np.zeros((d, d, d))
    A = rng.standard_normal((d - 1, d - 1))
    C[0, 1:, 1:] = A.T
    C[1:, 0, 1:] = -A.T
    return C


def random_model(dim: Dim, seed: int, kind: str = "mixed") -> LieAlgebraModel:
    """Seeded random valid LieAlgebraModel with the standard (g, H).

    ``kind``: "nilpotent2", "almost_abelian", or "mixed" (alternate by
    seed parity).  The bracket is rescaled to unit magnitude so residual
    normalization is meaningful.
    """
    d = dim.d
    rng = np.random.default_rng(seed)
    if kind == "mixed":
        kind = "nilpotent2" if seed % 2 == 0 else "almost_abelian"
    if kind == "nilpotent2":
        C = _nilpotent2_constants(d, rng)
    elif kind == "almost_abelian":
        C = _almost_abelian_constants(d, rng)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    nrm = magnitude(C)
    if nrm > ABS_FLOOR:
        C = C / nrm
    return LieAlgebraModel.create(C)

"""KT-potentials and the combined connection with totally skew torsion.

The connection D is built from the three KT-potentials as
Q = -1/2 Q1 + Q2 + Q3; on W133 data this collapses to the closed form
Q(x,y,z) = 1/2 F1(x,y,J1 z), equivalently
D_x y = nabla_x y - 1/2 J1 (nabla_x J1) y.
Every equality is verified as a residual between independently computed
sides; when a class precondition fails the operations still compute and
report the disagreement (fuzz tests need the negative direction).
"""

from __future__ import annotations

import warnings

import numpy as np

from .model import LieAlgebraModel, cov_deriv_3tensor, nabla_J
from .structural import square_norm
from .tensor_core import (
    HypercomplexTriple,
    Metric,
    alternation3,
    cyclic_sum,
    magnitude,
    relative,
    sub_index,
)

_CLASS_WARN = 1e-6


def kt_potential_hermitian(F1: np.ndarray, J1: np.ndarray,
                           mode: str = "general") -> np.ndarray:
    """KT-potential of the Hermitian structure J1.

    general: Q1(x,y,z) = 1/2 {F1(x,y,J1z) + F1(y,z,J1x) - F1(z,x,J1y)},
    nearly_kahler: the reduced form Q1 = 1/2 F1(x,y,J1z).  On W1(J1) data
    the two agree componentwise, and the torsion relation T1 = 2 Q1 makes
    Q1 totally skew there.  A violated class precondition warns but the
    potential is still computed.
    """
    A = sub_index(F1, J1, 2)  # A[i,j,k] = F1(e_i, e_j, J1 e_k)
    if mode == "nearly_kahler":
        if relative(F1 + np.einsum('jik->ijk', F1), F1) > _CLASS_WARN:
            warnings.warn("F1 is not W1(J1)-certified; reduced KT-potential "
                          "computed anyway", RuntimeWarning, stacklevel=2)
        return 0.5 * A
    if mode == "general":
        diff = F1 - sub_index(sub_index(F1, J1, 0), J1, 1)
        if relative(diff + np.einsum('jik->ijk', diff), F1) > _CLASS_WARN:
            warnings.warn("F1 is not G1(J1)-certified; KT-potential computed "
                          "anyway", RuntimeWarning, stacklevel=2)
        return 0.5 * (A + np.einsum('jki->ijk', A) - np.einsum('kij->ijk', A))
    raise ValueError(f"unknown mode {mode!r}")


def kt_potential_norden(F: np.ndarray, J: np.ndarray) -> np.ndarray:
    """KT-potential of a Norden structure: Q(x,y,z) = -1/4 S F(x,y,Jz).

    S is the cyclic sum over (x,y,z); total antisymmetry holds on
    W3-certified data.  A violated class precondition warns but the
    potential is still computed.
    """
    if relative(cyclic_sum(F), F) > _CLASS_WARN:
        warnings.warn("F is not W3-certified; KT-potential computed anyway",
                      RuntimeWarning, stacklevel=2)
    A = sub_index(F, J, 2)
    return -0.25 * cyclic_sum(A)


def phkt_closed_form(F1: np.ndarray, J1: np.ndarray) -> np.ndarray:
    """Q(x,y,z) = 1/2 F1(x,y,J1z), the W133 closed form of the potential."""
    return 0.5 * sub_index(F1, J1, 2)


def phkt_potential(Q1: np.ndarray, Q2: np.ndarray, Q3: np.ndarray,
                   F1: np.ndarray, J1: np.ndarray):
    """Combined potential Q = -1/2 Q1 + Q2 + Q3 with its consistency record.

    Returns ``(Q, info)`` where info holds the relative disagreement with
    the closed form 1/2 F1(.,.,J1.) and the total-antisymmetry defect.
    On W133-certified data both vanish; off-class both are reported
    rather than raised.
    """
    Q = -0.5 * Q1 + Q2 + Q3
    closed = phkt_closed_form(F1, J1)
    info = {
        "closed_form_disagreement": relative(Q - closed, Q, closed, F1),
        "total_antisymmetry": relative(Q - alternation3(Q), Q, F1),
    }
    return Q, info


def connection_D(G: np.ndarray, Q: np.ndarray, g: Metric) -> np.ndarray:
    """Coefficients of D = nabla + g^{-1} Q: D[i,j,k] = G[i,j,k] + Q(i,j,m) g^{mk}."""
    return G + np.einsum('ijm,mk->ijk', Q, g.inverse)


def connection_D_endomorphism(G: np.ndarray, J1: np.ndarray) -> np.ndarray:
    """Second route: D_x y = nabla_x y - 1/2 J1 (nabla_x J1) y."""
    nj = nabla_J(G, J1)  # nj[i,k,j] = (nabla_i J1)^k_j
    return G - 0.5 * np.einsum('km,imj->ijk', J1, nj)


def naturality_residuals(D: np.ndarray, g: Metric, H: HypercomplexTriple) -> dict:
    """Parallelism residuals of D: D J_alpha, D g and D g_alpha.

    A natural connection has all seven zero; the g_alpha entries are the
    corollary residuals (they vanish automatically once DJ = Dg = 0).
    """
    out = {}
    scale = max(magnitude(D), 1.0)
    for a in (1, 2, 3):
        J = H[a]
        DJ = np.einsum('mj,imk->ikj', J, D) - np.einsum('ijm,km->ikj', D, J)
        out[f"DJ{a}"] = magnitude(DJ) / scale
    gc = g.components
    Dg = np.einsum('ijm,mk->ijk', D, gc) + np.einsum('ikm,jm->ijk', D, gc)
    out["Dg"] = magnitude(Dg) / scale
    for a in (1, 2, 3):
        ga = H[a].T @ gc
        Dga = np.einsum('ijm,mk->ijk', D, ga) + np.einsum('ikm,jm->ijk', D, ga)
        out[f"Dg{a}"] = magnitude(Dga) / scale
    return out


def torsion(D: np.ndarray, m: LieAlgebraModel):
    """Lowered torsion of D and its invariants.

    T(x,y) = D_x y - D_y x - [x,y]; T(x,y,z) = g(T(x,y), z).  Returns
    ``(T, info)`` with the total-antisymmetry residual and the invariant
    square norm (signed; equals |nabla J1|^2 on W133 models).
    """
    Tup = D - np.einsum('jik->ijk', D) - m.C
    T = np.einsum('ijm,mk->ijk', Tup, m.g.components)
    info = {
        "total_antisymmetry": relative(T - alternation3(T), T),
        "square_norm": square_norm(T, m.g),
    }
    return T, info


def exterior_derivative_3form(T: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Intrinsic dT of an invariant 3-form on a Lie algebra.

    Only bracket-insertion terms survive for invariant forms:
    dT(x,y,z,w) = -T([x,y],z,w) + T([x,z],y,w) - T([x,w],y,z)
                  - T([y,z],x,w) + T([y,w],x,z) - T([z,w],x,y).
    """
    B = np.einsum('ijm,mkl->ijkl', C, T)  # B[i,j,k,l] = T([e_i,e_j], e_k, e_l)
    return (-B
            + np.einsum('ikjl->ijkl', B)
            - np.einsum('iljk->ijkl', B)
            - np.einsum('jkil->ijkl', B)
            + np.einsum('jlik->ijkl', B)
            - np.einsum('klij->ijkl', B))


def exterior_derivative_via_nabla(T: np.ndarray, G: np.ndarray) -> np.ndarray:
    """dT from the torsion-free covariant derivative: alternating sum
    of (nabla_{x_i} T)(...); cross-checks the intrinsic formula."""
    nT = cov_deriv_3tensor(T, G)
    return (nT
            - np.einsum('jikl->ijkl', nT)
            + np.einsum('kijl->ijkl', nT)
            - np.einsum('lijk->ijkl', nT))


def codifferential_3form(T: np.ndarray, G: np.ndarray, g: Metric) -> np.ndarray:
    """delta T(y,z) = -g^{ij} (nabla_{e_i} T)(e_j, y, z)."""
    nT = cov_deriv_3tensor(T, G)
    return -np.einsum('ij,ijkl->kl', g.inverse, nT)


def natural_perturbation_basis(d: int, H: HypercomplexTriple) -> np.ndarray:
    """Basis of lowered difference tensors preserving naturality.

    Columns span {B : B(x,y,z) = -B(x,z,y) and B(x,J_a y,z) =
    -eps_a B(x,y,J_a z) for a = 1,2,3}, i.e. adding g^{-1}B to any natural
    connection keeps all seven parallelism conditions.  The space is
    nonzero (natural connections are never unique); perturbing the
    combined potential along it generically destroys the total skewness
    of the torsion, which is the numerical content of the uniqueness
    claim for the connection on W133 models.
    """
    from scipy.linalg import null_space

    from .model import NULLSPACE_RCOND
    from .tensor_core import EPSILON, slot_permutation_matrix, substitution_matrix

    I = np.eye(d ** 3)
    rows = [I + slot_permutation_matrix(d, (0, 2, 1))]
    for a in (1, 2, 3):
        S1 = substitution_matrix(d, H[a], 1)
        S2 = substitution_matrix(d, H[a], 2)
        rows.append(S1 + EPSILON[a - 1] * S2)
    return null_space(np.vstack(rows), rcond=NULLSPACE_RCOND)


def torsion_derivatives(m: LieAlgebraModel, G: np.ndarray, D: np.ndarray,
                        T: np.ndarray, A1: np.ndarray) -> dict:
    """Residual map for the parallel-torsion properties of D.

    Keys: DT (D-parallelism of T), nablaT_vs_half_SA1, dT_vs_2SA1 (dT
    computed intrinsically), deltaT (coclosedness) and the alternation
    consistency of the two dT routes.  All vanish on W133-certified
    models; off-class they are reported as is.
    """
    SA1 = cyclic_sum(A1)
    DT = -(np.einsum('ijm,mkl->ijkl', D, T)
           + np.einsum('ikm,jml->ijkl', D, T)
           + np.einsum('ilm,jkm->ijkl', D, T))
    nT = cov_deriv_3tensor(T, G)
    dT = exterior_derivative_3form(T, m.C)
    dT_nabla = exterior_derivative_via_nabla(T, G)
    deltaT = codifferential_3form(T, G, m.g)
    scale = [T, A1] if magnitude(A1) > 0 else [T, D]
    return {
        "DT": relative(DT, *scale),
        "nablaT_vs_half_SA1": relative(nT - 0.5 * SA1, nT, SA1, *scale),
        "dT_vs_2SA1": relative(dT - 2.0 * SA1, dT, SA1, *scale),
        "deltaT": relative(deltaT, *scale),
        "dT_route_consistency": relative(dT - dT_nabla, dT, dT_nabla, *scale),
    }

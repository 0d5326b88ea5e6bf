"""Pure-NumPy implementation of the search hot kernel.

Mirrors the compiled extension ``hgkit._kernels`` exactly; the active
implementation is chosen at import time by :mod:`hgkit._backend`.
"""

import numpy as np

BACKEND = "numpy"

#: component layout of the vector returned by penalty_components
COMPONENTS = ("jacobi", "W1(J1)", "W3(J2)", "W3(J3)", "G1(J1)",
              "W0(J1)", "W0(J2)", "W0(J3)", "C")


def penalty_components(C, g, gi, J1, J2, J3):
    """Squared Frobenius norms of the search residual tensors.

    Given skew structure constants ``C`` and a fixed (g, H), computes the
    Levi-Civita connection (Koszul), the three structural tensors, and
    returns the 9-vector
    ``[|Jacobi|^2, |W1 viol|^2, |W3(J2) viol|^2, |W3(J3) viol|^2,
    |G1 viol|^2, |F1|^2, |F2|^2, |F3|^2, |C|^2]``.
    """
    # Jacobi: cyclic sum over (i,j,k) of C^l_{ij} C^m_{lk}
    X = np.einsum('ijl,lkm->ijkm', C, C)
    jac = X + np.einsum('jkim->ijkm', X) + np.einsum('kijm->ijkm', X)

    # Koszul: 2 g(nabla_i e_j, e_k) = Cl[i,j,k] - Cl[j,k,i] + Cl[k,i,j]
    Cl = np.einsum('ijm,mk->ijk', C, g)
    Gl = 0.5 * (Cl - np.einsum('jki->ijk', Cl) + np.einsum('kij->ijk', Cl))
    G = np.einsum('ijm,mk->ijk', Gl, gi)

    F = []
    for J in (J1, J2, J3):
        # (nabla_i J)^k_j = J^m_j G[i,m,k] - G[i,j,m] J^k_m
        nj = np.einsum('mj,imk->ikj', J, G) - np.einsum('ijm,km->ikj', G, J)
        F.append(np.einsum('imj,mk->ijk', nj, g))
    F1, F2, F3 = F

    v_w1 = F1 + np.einsum('jik->ijk', F1)
    v_w32 = F2 + np.einsum('jki->ijk', F2) + np.einsum('kij->ijk', F2)
    v_w33 = F3 + np.einsum('jki->ijk', F3) + np.einsum('kij->ijk', F3)
    # polarized G1 condition: (I + P01)(F1 - F1(J1.,J1.,.))
    FJ = np.einsum('ai,bj,abk->ijk', J1, J1, F1)
    Dif = F1 - FJ
    v_g1 = Dif + np.einsum('jik->ijk', Dif)

    def sq(T):
        return float(np.sum(T * T))

    return np.array([sq(jac), sq(v_w1), sq(v_w32), sq(v_w33), sq(v_g1),
                     sq(F1), sq(F2), sq(F3), sq(C)])

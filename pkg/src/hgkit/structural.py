"""Structural tensors of an (H, G)-structure and their identity suites.

The three covariant 3-tensors F_alpha(x,y,z) = g((nabla_x J_alpha) y, z)
encode the failure of the triple to be parallel.  This module computes
them on Lie-algebra models (two independent routes), evaluates the
fundamental identity residual suite, the invariant square norms, and the
Nijenhuis tensor.
"""

from __future__ import annotations

import numpy as np

from .model import LieAlgebraModel, derive_F3, nabla_J
from .tensor_core import (
    EPSILON,
    HypercomplexTriple,
    Metric,
    alternation3,
    magnitude,
    relative,
    sub_index,
)


def structural_F(m: LieAlgebraModel, G: np.ndarray, alpha: int) -> np.ndarray:
    """F_alpha(x,y,z) = g((nabla_x J_alpha) y, z) on the frame."""
    nj = nabla_J(G, m.H[alpha])
    return np.einsum('imj,mk->ijk', nj, m.g.components)


def structural_F_via_form(m: LieAlgebraModel, G: np.ndarray, alpha: int) -> np.ndarray:
    """Second route: F_alpha = nabla g_alpha for g_alpha = g(J_alpha ., .).

    Must agree with :func:`structural_F`; the two equalities of the
    defining equation give two independent code paths.
    """
    ga = m.H[alpha].T @ m.g.components
    return -(np.einsum('ijm,mk->ijk', G, ga) + np.einsum('ikm,jm->ijk', G, ga))


def all_structural_F(m: LieAlgebraModel, G: np.ndarray):
    return tuple(structural_F(m, G, a) for a in (1, 2, 3))


def fundamental_identity_residuals(F1, F2, F3, g: Metric,
                                   H: HypercomplexTriple) -> dict:
    """Relative residuals of the fundamental identities and interrelations.

    Keys: per alpha the two equalities of the first identity line, the
    J-slot-transfer line, and both lines of the cyclic interrelation for
    every cyclic permutation.  All residuals are normalized by the
    overall F magnitude.
    """
    F = {1: np.asarray(F1), 2: np.asarray(F2), 3: np.asarray(F3)}
    scale = [F[1], F[2], F[3]]
    out = {}
    for a in (1, 2, 3):
        Fa, Ja, ea = F[a], H[a], EPSILON[a - 1]
        out[f"F{a}: F(x,y,z) = -eps F(x,z,y)"] = relative(
            Fa + ea * np.einsum('ikj->ijk', Fa), *scale)
        out[f"F{a}: F(x,y,z) = -eps F(x,Jy,Jz)"] = relative(
            Fa + ea * sub_index(sub_index(Fa, Ja, 1), Ja, 2), *scale)
        out[f"F{a}: F(x,Jy,z) = eps F(x,y,Jz)"] = relative(
            sub_index(Fa, Ja, 1) - ea * sub_index(Fa, Ja, 2), *scale)
    for (a, b, c) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        eb, ec = EPSILON[b - 1], EPSILON[c - 1]
        out[f"F{a} = F{b}(x,J{c}y,z) - eps{b} F{c}(x,y,J{b}z)"] = relative(
            F[a] - (sub_index(F[b], H[c], 1) - eb * sub_index(F[c], H[b], 2)), *scale)
        out[f"F{a} = -F{c}(x,J{b}y,z) + eps{c} F{b}(x,y,J{c}z)"] = relative(
            F[a] - (-sub_index(F[c], H[b], 1) + ec * sub_index(F[b], H[c], 2)), *scale)
    return out


def square_norm(F: np.ndarray, g: Metric) -> float:
    """Invariant square norm of nabla J_alpha from its lowered tensor.

    All three slots are contracted with the inverse metric:
    g^{ij} g^{kl} g^{pq} F(i,k,p) F(j,l,q).  The metric is indefinite, so
    the value is a signed real; no absolute value is taken.
    """
    gi = g.inverse
    return float(np.einsum('ikp,ij,kl,pq,jlq->', F, gi, gi, gi, F))


def square_norm_nablaJ(nj: np.ndarray, g: Metric) -> float:
    """Same invariant computed from the (1,2)-tensor nabla J directly."""
    # nj[i,k,j] = (nabla_i J)^k_j; pair the endomorphism slots with g
    return float(np.einsum('ij,kl,iak,jbl,ab->', g.inverse, g.inverse, nj, nj,
                           g.components))


def nijenhuis(m: LieAlgebraModel, J: np.ndarray):
    """Lowered Nijenhuis tensor of J and its total-antisymmetry defect.

    N(x,y) = [Jx, Jy] - J[Jx, y] - J[x, Jy] - [x, y] (no 1/4 factor),
    N(x,y,z) = g(N(x,y), z).  Returns (N, residual) where the residual is
    the 3-form defect normalized by the bracket scale: J admits a unique
    connection with totally skew torsion iff it vanishes.
    """
    C = m.C
    t1 = np.einsum('abm,ai,bj->ijm', C, J, J)
    t2 = np.einsum('mc,ajc,ai->ijm', J, C, J)
    t3 = np.einsum('mc,ibc,bj->ijm', J, C, J)
    N = np.einsum('ijm,mk->ijk', t1 - t2 - t3 - C, m.g.components)
    residual = relative(N - alternation3(N), N, C)
    return N, residual


def isotropy_flags(F1, F2, F3, g: Metric, tol: float = 1e-8) -> dict:
    """Detect the isotropic pseudo-hyper-Kahler situation.

    All three square norms vanish while some F_alpha does not: possible
    only because the metric is indefinite.
    """
    norms = [square_norm(np.asarray(F), g) for F in (F1, F2, F3)]
    mags = [magnitude(F) for F in (F1, F2, F3)]
    scale = max(max(mags), 1.0)
    norms_zero = all(abs(v) <= tol * scale ** 2 for v in norms)
    some_F = any(v > tol * scale for v in mags)
    return {
        "square_norms": tuple(norms),
        "isotropic_pseudo_hyper_kahler": bool(norms_zero and some_F),
        "pseudo_hyper_kahler": bool(not some_F),
    }

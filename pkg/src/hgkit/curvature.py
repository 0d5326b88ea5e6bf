"""Curvature-level identities: the Kahler-like nullspace, the nearly
Kahler curvature relations, scalar-curvature chains, the K-R relation and
the strong/weak/flat trichotomy of the combined connection.

The curvature tensor of any metric connection is produced by
:func:`hgkit.model.curvature_R` from its coefficients; the relation
between K (curvature of D) and R (curvature of the Levi-Civita
connection) is always a *test* here, never a constructor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .model import LieAlgebraModel, cov_deriv_3tensor
from .structural import square_norm
from .tensor_core import (
    EPSILON,
    Dim,
    HypercomplexTriple,
    Metric,
    cyclic_sum,
    magnitude,
    relative,
    standard_hypercomplex,
    sub_index,
)


def a_tensor(F: np.ndarray, g: Metric) -> np.ndarray:
    """A_alpha(x,y,z,w) = g((nabla_x J_alpha) y, (nabla_z J_alpha) w).

    Pair-symmetric in ((x,y), (z,w)) by construction.
    """
    return np.einsum('ijm,mn,kln->ijkl', F, g.inverse, F)


# ---------------------------------------------------------------------------
# Kahler-like tensors: constraint system and nullspace (rank fact)
# ---------------------------------------------------------------------------

def _perm4(d: int, perm) -> sp.csr_matrix:
    N = d ** 4
    src = np.transpose(np.arange(N).reshape((d,) * 4), perm).ravel()
    return sp.csr_matrix((np.ones(N), (np.arange(N), src)), shape=(N, N))


def _subJJ4(d: int, J: np.ndarray, slots) -> sp.csr_matrix:
    """Sparse matrix of L -> L with J substituted in two slots."""
    Jt = sp.csr_matrix(J.T)
    I = sp.identity(d, format="csr")
    factors = [Jt if s in slots else I for s in range(4)]
    M = factors[0]
    for f in factors[1:]:
        M = sp.kron(M, f, format="csr")
    return M


def kahler_like_constraints(dim: Dim, H: HypercomplexTriple,
                            alphas=(1, 2, 3)) -> sp.csr_matrix:
    """Sparse rows of the full curvature-like + Kahler-like linear system.

    Unknowns are the d^4 components of L.  Rows: antisymmetry in the
    first and second pairs, the first Bianchi identity, and for each
    requested alpha both Kahler-like relations
    L = eps_a L(.,.,J_a ., J_a .) = eps_a L(J_a ., J_a ., ., .).
    """
    d = dim.d
    I4 = sp.identity(d ** 4, format="csr")
    rows = [
        I4 + _perm4(d, (1, 0, 2, 3)),
        I4 + _perm4(d, (0, 1, 3, 2)),
        I4 + _perm4(d, (1, 2, 0, 3)) + _perm4(d, (2, 0, 1, 3)),
    ]
    for a in alphas:
        J, e = H[a], EPSILON[a - 1]
        rows.append(I4 - e * _subJJ4(d, J, (2, 3)))
        rows.append(I4 - e * _subJJ4(d, J, (0, 1)))
    return sp.vstack(rows, format="csr")


def kahler_like_nullspace(dim: Dim, g: Metric = None, H: HypercomplexTriple = None,
                          alphas=(1, 2, 3)) -> int:
    """Nullspace dimension of the Kahler-like constraint system.

    Zero means every Kahler-like tensor vanishes at this dimension.  The
    rank is revealed by the eigenvalue spectrum of the Gram matrix of the
    assembled sparse rows (zero-eigenvalue count at relative threshold
    1e-9).  Dropping alphas relaxes the system; e.g. ``alphas=(1,)``
    keeps only the Hermitian constraints and the dimension is positive.
    """
    if H is None:
        H = standard_hypercomplex(dim)
    H_std = standard_hypercomplex(dim)
    if all(np.array_equal(a, b) for a, b in zip(H, H_std)):
        return _kahler_like_nullity_standard(dim.n, tuple(alphas))
    return _kahler_like_nullity(dim, H, tuple(alphas))


@lru_cache(maxsize=16)
def _kahler_like_nullity_standard(n: int, alphas: tuple) -> int:
    dim = Dim(n)
    return _kahler_like_nullity(dim, standard_hypercomplex(dim), alphas)


def _kahler_like_nullity(dim: Dim, H: HypercomplexTriple, alphas: tuple) -> int:
    A = kahler_like_constraints(dim, H, alphas)
    gram = (A.T @ A).toarray()
    w = np.linalg.eigvalsh(gram)
    tol = 1e-9 * max(float(w[-1]), 1.0)
    return int(np.sum(w < tol))


# ---------------------------------------------------------------------------
# curvature identity residuals
# ---------------------------------------------------------------------------

def nearly_kahler_curvature_residuals(m: LieAlgebraModel, R: np.ndarray,
                                      A1: np.ndarray) -> dict:
    """Nearly Kahler curvature relations w.r.t. J1 (W1-certified models).

    R(x,y,J1z,J1w) - R(x,y,z,w) = A1(x,y,z,w) and invariance of R under
    J1 in all four slots.
    """
    J1 = m.H.J1
    lhs = sub_index(sub_index(R, J1, 2), J1, 3) - R
    r_gray = relative(lhs - A1, R, A1)
    R4 = R
    for s in range(4):
        R4 = sub_index(R4, J1, s)
    return {
        "R(x,y,J1z,J1w) - R = A1": r_gray,
        "R(J1x,J1y,J1z,J1w) = R": relative(R4 - R, R),
    }


def ricci_identity_residuals(m: LieAlgebraModel, G: np.ndarray, R: np.ndarray,
                             Fs) -> dict:
    """Universal corollary of the Ricci identity on (H, G)-models.

    (nabla_x F_a)(y,z,J_a w) - (nabla_y F_a)(x,z,J_a w)
        = R(x,y,J_a z,J_a w) - eps_a R(x,y,z,w)
    holds on every valid model with no class restriction.
    """
    out = {}
    for a in (1, 2, 3):
        Fa, Ja, ea = Fs[a - 1], m.H[a], EPSILON[a - 1]
        nF = cov_deriv_3tensor(Fa, G)
        lhs4 = sub_index(nF, Ja, 3)
        lhs = lhs4 - np.einsum('jikl->ijkl', lhs4)
        rhs = sub_index(sub_index(R, Ja, 2), Ja, 3) - ea * R
        out[f"ricci_identity_J{a}"] = relative(lhs - rhs, lhs, rhs, R)
    return out


def hyper_curvature_residuals(m: LieAlgebraModel, R: np.ndarray, As) -> dict:
    """Hypercomplex curvature identity and its J2/J3 consequences (W133).

    The main identity sums R over all three J-substitutions in the second
    pair; each consequence isolates one Norden structure.  Also checks the
    proof step A1(x,y,J2z,J2w) = -A1(x,y,J3z,J3w).
    """
    H = m.H
    A1, A2, A3 = As
    sum_term = np.zeros_like(R)
    for Aa in As:
        sum_term += np.einsum('ikjl->ijkl', Aa) - np.einsum('jkil->ijkl', Aa)
    lhs_main = R + sum(sub_index(sub_index(R, H[a], 2), H[a], 3) for a in (1, 2, 3))
    out = {"thm_hyper_R": relative(lhs_main - sum_term, R, *As)}
    for a, lab in ((2, "cor_RJ2"), (3, "cor_RJ3")):
        Ja = H[a]
        lhs = 2.0 * R + 2.0 * sub_index(sub_index(R, Ja, 2), Ja, 3)
        rhs = sum_term - A1 - sub_index(sub_index(A1, Ja, 2), Ja, 3)
        out[lab] = relative(lhs - rhs, R, *As)
    a1_23 = (sub_index(sub_index(A1, H.J2, 2), H.J2, 3)
             + sub_index(sub_index(A1, H.J3, 2), H.J3, 3))
    out["A1(x,y,J2z,J2w) = -A1(x,y,J3z,J3w)"] = relative(a1_23, A1)
    return out


# ---------------------------------------------------------------------------
# scalar curvatures
# ---------------------------------------------------------------------------

def scalar_tau(R: np.ndarray, g: Metric) -> float:
    """tau = g^{ij} g^{ks} R(e_i, e_k, e_s, e_j)."""
    return float(np.einsum('ij,ks,iksj->', g.inverse, g.inverse, R))


def scalar_tau_star(R: np.ndarray, g: Metric, J: np.ndarray) -> float:
    """tau**_alpha = g^{ij} g^{ks} R(e_i, e_k, J e_s, J e_j)."""
    RJ = sub_index(sub_index(R, J, 2), J, 3)
    return float(np.einsum('ij,ks,iksj->', g.inverse, g.inverse, RJ))


def ricci_of(K: np.ndarray, g: Metric) -> np.ndarray:
    """rho(y,z) = g^{ij} K(e_i, y, z, e_j)."""
    return np.einsum('ij,iklj->kl', g.inverse, K)


@dataclass(frozen=True)
class ScalarReport:
    tau: float
    tau_star: tuple
    tau_D: float
    norm_nabla_J: tuple
    norm_T: float
    rho_D_symmetry: float
    rho_D_J1_invariance: float


def scalar_relations(m: LieAlgebraModel, R: np.ndarray, K: np.ndarray,
                     Fs, T: np.ndarray):
    """Scalar-curvature chain on a W133 model (flat models allowed).

    Returns ``(ScalarReport, residuals)`` with the six relations:
    tau - tau1** = |nJ1|^2;  tau + tau_a** = -1/2 |nJ_a|^2 (a = 2, 3);
    |nJ2|^2 = |nJ3|^2;  |nJ1|^2 = -2 |nJ2|^2 = -2 |nJ3|^2;
    3 tau + tau1** = -4 tau2** = -4 tau3**;  tau_D = tau - 1/4 |T|^2;
    plus symmetry and J1-invariance of the Ricci tensor of D.
    """
    g, H = m.g, m.H
    tau = scalar_tau(R, g)
    tstars = tuple(scalar_tau_star(R, g, H[a]) for a in (1, 2, 3))
    tau_D = scalar_tau(K, g)
    nJ = tuple(square_norm(F, g) for F in Fs)
    nT = square_norm(T, g)
    rhoD = ricci_of(K, g)
    J1 = H.J1
    rho_sym = relative(rhoD - rhoD.T, rhoD)
    rho_J1 = relative(J1.T @ rhoD @ J1 - rhoD, rhoD)
    scale = max(abs(tau), abs(tau_D), max(abs(v) for v in tstars),
                max(abs(v) for v in nJ), abs(nT), 1e-10)
    residuals = {
        "tau - tau1** = |nJ1|^2": abs(tau - tstars[0] - nJ[0]) / scale,
        "tau + tau2** = -1/2 |nJ2|^2": abs(tau + tstars[1] + 0.5 * nJ[1]) / scale,
        "tau + tau3** = -1/2 |nJ3|^2": abs(tau + tstars[2] + 0.5 * nJ[2]) / scale,
        "|nJ2|^2 = |nJ3|^2": abs(nJ[1] - nJ[2]) / scale,
        "|nJ1|^2 = -2 |nJ2|^2": abs(nJ[0] + 2.0 * nJ[1]) / scale,
        "|nJ1|^2 = -2 |nJ3|^2": abs(nJ[0] + 2.0 * nJ[2]) / scale,
        "3 tau + tau1** = -4 tau2**": abs(3.0 * tau + tstars[0] + 4.0 * tstars[1]) / scale,
        "3 tau + tau1** = -4 tau3**": abs(3.0 * tau + tstars[0] + 4.0 * tstars[2]) / scale,
        "tau_D = tau - 1/4 |T|^2": abs(tau_D - tau + 0.25 * nT) / scale,
        "rho_D symmetric": rho_sym,
        "rho_D J1-invariant": rho_J1,
    }
    report = ScalarReport(tau=tau, tau_star=tstars, tau_D=tau_D,
                          norm_nabla_J=nJ, norm_T=nT,
                          rho_D_symmetry=rho_sym, rho_D_J1_invariance=rho_J1)
    return report, residuals


def f_level_norm_relations(F1, F2, F3, g: Metric) -> dict:
    """The norm chain |nJ1|^2 = -2|nJ2|^2 = -2|nJ3|^2 from F-data alone."""
    n1, n2, n3 = (square_norm(np.asarray(F), g) for F in (F1, F2, F3))
    scale = max(abs(n1), abs(n2), abs(n3), 1e-10)
    return {
        "|nJ1|^2 = -2 |nJ2|^2": abs(n1 + 2.0 * n2) / scale,
        "|nJ1|^2 = -2 |nJ3|^2": abs(n1 + 2.0 * n3) / scale,
        "|nJ2|^2 = |nJ3|^2": abs(n2 - n3) / scale,
        "values": (n1, n2, n3),
    }


def kr_relation_residual(K: np.ndarray, R: np.ndarray, A1: np.ndarray) -> float:
    """Residual of K = R + 1/4 A1 + 1/4 S A1 (S cyclic over first three slots)."""
    rhs = R + 0.25 * A1 + 0.25 * cyclic_sum(A1)
    return relative(K - rhs, K, R, A1)


# ---------------------------------------------------------------------------
# strong / weak / flat trichotomy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrichotomyReport:
    verdict: str                 # "strong/flat" or "weak"
    magnitudes: dict             # |SA1|, |nablaT|, |K|, |R|, |T|^2, |nJ_a|^2
    sk_vs_sa1: float             # always-checked residual S K = S A1
    flat_branch_residuals: dict  # populated when verdict is strong/flat
    tol: float


def strong_weak_flat_report(m: LieAlgebraModel, G: np.ndarray, D: np.ndarray,
                            R: np.ndarray, K: np.ndarray, T: np.ndarray,
                            A1: np.ndarray, Fs, tol: float = 1e-7) -> TrichotomyReport:
    """Equivalence report: strong <=> nabla-parallel torsion <=> flat.

    The verdict is "strong/flat" iff S A1 vanishes at tolerance; in that
    branch K, R, A1 and the (isotropic) torsion norm must all vanish and
    their residuals are recorded.  Otherwise the verdict is "weak".  The
    Bianchi-with-torsion consequence S K = S A1 is checked in both
    branches.
    """
    SA1 = cyclic_sum(A1)
    nT = cov_deriv_3tensor(T, G)
    norm_T = square_norm(T, m.g)
    nJ = tuple(square_norm(F, m.g) for F in Fs)
    # normalize against the model's own curvature scale so that verdicts
    # on (near-)flat models compare noise to the bracket size, not to
    # noise itself
    scale = max(magnitude(A1), magnitude(R), magnitude(K), magnitude(T) ** 2,
                magnitude(G) ** 2, magnitude(D) ** 2, 1e-10)
    mags = {
        "|SA1|": magnitude(SA1),
        "|nablaT|": magnitude(nT),
        "|K|": magnitude(K),
        "|R|": magnitude(R),
        "|T|^2": norm_T,
        "|nJ1|^2": nJ[0], "|nJ2|^2": nJ[1], "|nJ3|^2": nJ[2],
    }
    sk_res = magnitude(cyclic_sum(K) - SA1) / scale
    flat = magnitude(SA1) <= tol * scale
    branch = {}
    if flat:
        branch = {
            "K = 0": magnitude(K) / scale,
            "R = 0": magnitude(R) / scale,
            "A1 = 0": magnitude(A1) / scale,
            "R = -1/4 A1": magnitude(R + 0.25 * A1) / scale,
            "|T|^2 = 0 (isotropic torsion)": abs(norm_T) / scale,
            "nablaT = 0": magnitude(nT) / scale,
        }
    return TrichotomyReport(verdict="strong/flat" if flat else "weak",
                            magnitudes=mags, sk_vs_sa1=sk_res,
                            flat_branch_residuals=branch, tol=tol)

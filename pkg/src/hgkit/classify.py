"""Class membership residuals and the first-order classification theorems.

Classes are graded, not boolean: each label maps to a normalized residual
and the verdict is a threshold at the configured tolerance.  Labels:

* ``G1(J1)``  almost Hermitian cocalibrated class (polarized condition)
* ``W1(J1)``  nearly Kahler with neutral metric w.r.t. J1
* ``W3(J2)``, ``W3(J3)``  quasi-Kahler with Norden metric
* ``W0(J1)``, ``W0(J2)``, ``W0(J3)``  Kahler-type: F_alpha = 0
* ``K``       pseudo-hyper-Kahler: all three F_alpha = 0

All class conditions are linear in (F1, F2), which makes the classification
theorems rank facts: projections and nullspace dimensions are computed with
rank-revealing SVD.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from .model import (
    NULLSPACE_RCOND,
    PointModel,
    _block_ops,
    admissible_basis,
)
from .tensor_core import (
    ABS_FLOOR,
    DEFAULT_RTOL,
    Dim,
    HypercomplexTriple,
    Metric,
    cyclic_sum,
    magnitude,
    relative,
    slot_permutation_matrix,
    standard_hypercomplex,
    sub_index,
)

CLASS_LABELS = ("G1(J1)", "W1(J1)", "W3(J2)", "W3(J3)",
                "W0(J1)", "W0(J2)", "W0(J3)", "K")

#: labels admissible in constraint sets (K expands to the three W0)
W133 = ("W1(J1)", "W3(J2)", "W3(J3)")

STRICT_FLOOR = 1e-6


@dataclass(frozen=True)
class ClassificationReport:
    """Normalized residual per class label plus thresholded verdicts."""

    residuals: dict
    verdicts: dict
    strict: bool
    tol: float
    notes: tuple = field(default=())

    def passes(self, *labels) -> bool:
        return all(self.verdicts[lab] for lab in labels)


def class_violation_tensors(F1, F2, F3, H: HypercomplexTriple) -> dict:
    """Raw violation tensor per class label (K is handled by verdict logic)."""
    F1, F2, F3 = (np.asarray(F) for F in (F1, F2, F3))
    J1 = H.J1
    # polarized G1 condition, the paper's own polarization:
    # F1(x,z,y) - F1(J1x,J1z,y) - F1(J1z,J1x,y) + F1(z,x,y) = 0
    diff = F1 - sub_index(sub_index(F1, J1, 0), J1, 1)
    g1 = diff + np.einsum('jik->ijk', diff)
    return {
        "G1(J1)": g1,
        "W1(J1)": F1 + np.einsum('jik->ijk', F1),
        "W3(J2)": cyclic_sum(F2),
        "W3(J3)": cyclic_sum(F3),
        "W0(J1)": F1,
        "W0(J2)": F2,
        "W0(J3)": F3,
    }


def class_residuals(F1, F2, F3, g: Metric, H: HypercomplexTriple,
                    tol: float = DEFAULT_RTOL, notes=()) -> ClassificationReport:
    """Normalized class residuals and verdicts for given F-data.

    Residuals are normalized by the overall F magnitude, so they are
    invariant under rescaling the data.  The K verdict passes iff all
    three W0 verdicts pass; its residual is their maximum.
    """
    viol = class_violation_tensors(F1, F2, F3, H)
    scale = max(magnitude(F1), magnitude(F2), magnitude(F3), ABS_FLOOR)
    residuals = {lab: magnitude(v) / scale for lab, v in viol.items()}
    residuals["K"] = max(residuals["W0(J1)"], residuals["W0(J2)"], residuals["W0(J3)"])
    verdicts = {lab: bool(r <= tol) for lab, r in residuals.items()}
    mags = [magnitude(F) for F in (F1, F2, F3)]
    strict = bool(max(mags) > ABS_FLOOR and min(mags) > STRICT_FLOOR * max(mags))
    return ClassificationReport(residuals=residuals, verdicts=verdicts,
                                strict=strict, tol=tol, notes=tuple(notes))


def classify_point_model(p: PointModel, tol: float = DEFAULT_RTOL) -> ClassificationReport:
    notes = ("first-order verification on pointwise data; realizability by "
             "a global manifold is not claimed",)
    return class_residuals(p.F1, p.F2, p.F3, p.g, p.H, tol=tol, notes=notes)


# ---------------------------------------------------------------------------
# class constraints as matrices on the packed (F1, F2) vector
# ---------------------------------------------------------------------------

def class_constraint_matrix(d: int, H: HypercomplexTriple, labels) -> np.ndarray:
    """Stacked linear constraint rows for the requested class labels."""
    sz = d ** 3
    I = np.eye(sz)
    E1, E2, E3, S, P = _block_ops(d, H)
    E = {1: E1, 2: E2, 3: E3}
    CY = I + slot_permutation_matrix(d, (1, 2, 0)) + slot_permutation_matrix(d, (2, 0, 1))
    P01 = slot_permutation_matrix(d, (1, 0, 2))
    rows = []
    for lab in labels:
        if lab == "K":
            rows.extend([E1, E2, E3])
        elif lab == "W1(J1)":
            rows.append((I + P01) @ E1)
        elif lab == "W3(J2)":
            rows.append(CY @ E2)
        elif lab == "W3(J3)":
            rows.append(CY @ E3)
        elif lab == "G1(J1)":
            rows.append((I + P01) @ (I - S[1][0] @ S[1][1]) @ E1)
        elif lab in ("W0(J1)", "W0(J2)", "W0(J3)"):
            rows.append(E[int(lab[4])])
        else:
            raise ValueError(f"unknown class label {lab!r}")
    return np.vstack(rows)


@lru_cache(maxsize=64)
def _class_basis_standard(n: int, labels: tuple) -> np.ndarray:
    """Orthonormal basis of the admissible data satisfying ``labels``."""
    dim = Dim(n)
    H = standard_hypercomplex(dim)
    N = admissible_basis(dim)
    A = class_constraint_matrix(dim.d, H, labels) @ N
    M = null_space(A, rcond=NULLSPACE_RCOND)
    return N @ M


def class_nullspace_dimension(dim: Dim, labels) -> int:
    """Dimension of the admissible (F1, F2) data satisfying the labels."""
    return _class_basis_standard(dim.n, tuple(sorted(labels))).shape[1]


def _class_basis(p: PointModel, labels) -> np.ndarray:
    H_std = standard_hypercomplex(p.dim)
    if all(np.array_equal(a, b) for a, b in zip(p.H, H_std)):
        return _class_basis_standard(p.dim.n, tuple(sorted(labels)))
    N = admissible_basis(p.dim, p.H)
    A = class_constraint_matrix(p.dim.d, p.H, sorted(labels)) @ N
    return N @ null_space(A, rcond=NULLSPACE_RCOND)


def project_to_classes(p: PointModel, labels):
    """Orthogonal projection of (F1, F2) onto the class constraint nullspace.

    The projection uses the Euclidean component inner product (the
    indefinite metric plays no role: only the constraint set matters).
    Returns ``(model, trivial_only)``; an intersection that contains only
    zero is not an error, it returns zero data flagged trivial-only.
    """
    basis = _class_basis(p, labels)
    vec = p.packed()
    if basis.shape[1] == 0:
        proj = np.zeros_like(vec)
    else:
        proj = basis @ (basis.T @ vec)
    trivial_only = basis.shape[1] == 0 or magnitude(proj) <= ABS_FLOOR
    return PointModel.from_packed(p.dim, proj, g=p.g, H=p.H), trivial_only


def sample_class_point_model(dim: Dim, labels, seed: int) -> PointModel:
    """Seeded unit-magnitude sample from a class constraint nullspace."""
    basis = _class_basis_standard(dim.n, tuple(sorted(labels)))
    rng = np.random.default_rng(seed)
    if basis.shape[1] == 0:
        return PointModel.from_packed(dim, np.zeros(2 * dim.d ** 3))
    vec = basis @ rng.standard_normal(basis.shape[1])
    nrm = np.linalg.norm(vec)
    if nrm > ABS_FLOOR:
        vec /= nrm
    return PointModel.from_packed(dim, vec)


# ---------------------------------------------------------------------------
# the W133 identity suite (Lemmas and the structural-tensor proposition)
# ---------------------------------------------------------------------------

def w133_identity_suite(p: PointModel, tol: float = DEFAULT_RTOL) -> dict:
    """Residuals of every W133 structural-tensor identity.

    Precondition: the W1(J1), W3(J2), W3(J3) residuals of ``p`` are below
    tolerance; if not, a warning entry is added and the suite still runs
    (the negative direction is what fuzz tests need).
    """
    F1, F2, F3 = p.F1, p.F2, p.F3
    J1, J2, J3 = p.H.J1, p.H.J2, p.H.J3
    s = (F1, F2, F3)

    def sub2(F, Ja, sa, Jb, sb):
        return sub_index(sub_index(F, Ja, sa), Jb, sb)

    out = {}
    rep = classify_point_model(p, tol=1e-9)
    if not rep.passes(*W133):
        out["WARNING: W133 precondition"] = max(rep.residuals[lab] for lab in W133)

    # F1 is a 3-form
    out["F1(x,y,z) = -F1(y,x,z)"] = relative(F1 + np.einsum('jik->ijk', F1), *s)
    out["F1(x,y,z) = -F1(x,z,y)"] = relative(F1 + np.einsum('ikj->ijk', F1), *s)
    # J1-hybrid family
    out["F1(x,y,z) = -F1(J1x,J1y,z)"] = relative(F1 + sub2(F1, J1, 0, J1, 1), *s)
    out["F1(x,y,z) = -F1(J1x,y,J1z)"] = relative(F1 + sub2(F1, J1, 0, J1, 2), *s)
    out["F1(x,y,z) = -F1(x,J1y,J1z)"] = relative(F1 + sub2(F1, J1, 1, J1, 2), *s)
    out["F1(J1x,y,z) = F1(x,J1y,z)"] = relative(
        sub_index(F1, J1, 0) - sub_index(F1, J1, 1), *s)
    out["F1(x,J1y,z) = F1(x,y,J1z)"] = relative(
        sub_index(F1, J1, 1) - sub_index(F1, J1, 2), *s)
    # J2/J3 exchange family
    out["F1(J2x,J2y,z) = -F1(J3x,J3y,z)"] = relative(
        sub2(F1, J2, 0, J2, 1) + sub2(F1, J3, 0, J3, 1), *s)
    out["F1(J2x,y,J2z) = -F1(J3x,y,J3z)"] = relative(
        sub2(F1, J2, 0, J2, 2) + sub2(F1, J3, 0, J3, 2), *s)
    out["F1(x,J2y,J2z) = -F1(x,J3y,J3z)"] = relative(
        sub2(F1, J2, 1, J2, 2) + sub2(F1, J3, 1, J3, 2), *s)
    out["F2(x,y,z) = F2(x,J1y,J1z)"] = relative(F2 - sub2(F2, J1, 1, J1, 2), *s)
    out["F2(x,y,z) = F2(x,J3y,J3z)"] = relative(F2 - sub2(F2, J3, 1, J3, 2), *s)
    out["F3(x,y,z) = F3(x,J1y,J1z)"] = relative(F3 - sub2(F3, J1, 1, J1, 2), *s)
    out["F3(x,y,z) = F3(x,J2y,J2z)"] = relative(F3 - sub2(F3, J2, 1, J2, 2), *s)
    # exchange lemma and slot-swapped variants
    out["F1(J2x,J3y,z) = F1(J3x,J2y,z)"] = relative(
        sub2(F1, J2, 0, J3, 1) - sub2(F1, J3, 0, J2, 1), *s)
    out["F1(J2x,y,J3z) = F1(J3x,y,J2z)"] = relative(
        sub2(F1, J2, 0, J3, 2) - sub2(F1, J3, 0, J2, 2), *s)
    out["F1(x,J2y,J3z) = F1(x,J3y,J2z)"] = relative(
        sub2(F1, J2, 1, J3, 2) - sub2(F1, J3, 1, J2, 2), *s)
    out["F2(x,y,J1z) = -F2(x,J1y,z)"] = relative(
        sub_index(F2, J1, 2) + sub_index(F2, J1, 1), *s)
    out["F2(x,y,J3z) = -F2(x,J3y,z)"] = relative(
        sub_index(F2, J3, 2) + sub_index(F2, J3, 1), *s)
    out["F3(x,y,J1z) = -F3(x,J1y,z)"] = relative(
        sub_index(F3, J1, 2) + sub_index(F3, J1, 1), *s)
    out["F3(x,y,J2z) = -F3(x,J2y,z)"] = relative(
        sub_index(F3, J2, 2) + sub_index(F3, J2, 1), *s)
    # structural-tensor proposition
    out["2F2(x,y,z) = F1(x,y,J3z) - F1(x,J3y,z)"] = relative(
        2 * F2 - (sub_index(F1, J3, 2) - sub_index(F1, J3, 1)), *s)
    out["2F3(x,y,z) = F1(x,J2y,z) - F1(x,y,J2z)"] = relative(
        2 * F3 - (sub_index(F1, J2, 1) - sub_index(F1, J2, 2)), *s)
    out["F2(x,y,z) = -F3(J1x,y,z)"] = relative(F2 + sub_index(F3, J1, 0), *s)
    out["F1(x,y,J1z) + F2(x,y,J2z) + F3(x,y,J3z) = 0"] = relative(
        sub_index(F1, J1, 2) + sub_index(F2, J2, 2) + sub_index(F3, J3, 2), *s)
    return out


@dataclass(frozen=True)
class DimensionAdvisory:
    target: str
    dim: Dim
    nullspace_dim: int
    message: str


def dimension_gate(dim: Dim, target: str = "W133") -> DimensionAdvisory:
    """Existence advisory for a target class at the given dimension.

    For W133 the verification hook is the pointwise nullspace dimension:
    it vanishes at d = 4 (the class collapses below dimension 8) and is
    reported verbatim at d >= 8.
    """
    if target == "W133":
        nd = class_nullspace_dimension(dim, W133)
        if dim.d < 8:
            msg = (f"class collapses below dimension 8: pointwise W133 "
                   f"nullspace at d={dim.d} has dimension {nd}")
        else:
            msg = f"pointwise W133 nullspace at d={dim.d} has dimension {nd}"
        return DimensionAdvisory("W133", dim, nd, msg)
    if target == "K":
        return DimensionAdvisory("K", dim, 0,
                                 "always nonempty: zero F-data is Kahler-type")
    raise ValueError(f"no dimension gate for target {target!r}")

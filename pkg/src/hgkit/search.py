"""Numerical search for Lie-algebra models certifying target classes.

The class conditions are linear in the structure constants (the Koszul
formula and the structural tensors are linear in C), so restarts are
drawn inside the class-constraint nullspace and the penalty reduces to
the Jacobi term there.  The penalty itself is always the full

    penalty = |Jacobi|^2 + sum over targets |class violation|^2

evaluated by the compiled kernel when available.  The optimizer is
damped gradient descent with central finite differences and backtracking
line search, renormalizing to unit bracket scale after each accepted
step (the penalty is homogeneous in C, so unconstrained descent would
collapse to the abelian point, which is handled separately as the
iteration-0 candidate), followed by Gauss-Newton polish on the residual
vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from ._backend import BACKEND, COMPONENTS, penalty_components
from .classify import W133, ClassificationReport, class_residuals
from .model import (
    NULLSPACE_RCOND,
    LieAlgebraModel,
    jacobi_tensor,
    levi_civita,
)
from .structural import all_structural_F, fundamental_identity_residuals
from .tensor_core import (
    Dim,
    HypercomplexTriple,
    Metric,
    magnitude,
    standard_hypercomplex,
    standard_metric,
)

#: certification threshold on the penalty (residuals around 1e-6 each)
CERT_PENALTY = 1e-12

#: strictness: |F1| must exceed this fraction of the bracket scale
STRICT_RATIO = 0.1

FD_STEP = 1e-6
DEFAULT_RESTARTS = 32
DEFAULT_BUDGET = 60
POLISH_STEPS = 10

_TARGET_COMPONENTS = {
    "W1(J1)": (1,), "W3(J2)": (2,), "W3(J3)": (3,), "G1(J1)": (4,),
    "W0(J1)": (5,), "W0(J2)": (6,), "W0(J3)": (7,), "K": (5, 6, 7),
}


def normalize_targets(targets) -> tuple:
    """Expand aliases and validate; 'W133' means the three W133 labels."""
    out = []
    for t in targets:
        if t == "W133":
            out.extend(W133)
        elif t in _TARGET_COMPONENTS:
            out.append(t)
        else:
            raise ValueError(f"unknown class target {t!r}")
    return tuple(sorted(set(out)))


def _skew_pairs(d: int):
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def pack_constants(C: np.ndarray) -> np.ndarray:
    d = C.shape[0]
    return np.stack([C[i, j, :] for (i, j) in _skew_pairs(d)]).ravel()


def unpack_constants(theta: np.ndarray, d: int) -> np.ndarray:
    pairs = _skew_pairs(d)
    C = np.zeros((d, d, d))
    t = np.asarray(theta).reshape(len(pairs), d)
    for idx, (i, j) in enumerate(pairs):
        C[i, j, :] = t[idx]
        C[j, i, :] = -t[idx]
    return C


def _batched_violations(Cb, g, gi, H: HypercomplexTriple, targets):
    """Class violation tensors for a batch of structure constants."""
    Cl = np.einsum('bijm,mk->bijk', Cb, g)
    Gl = 0.5 * (Cl - np.einsum('bjki->bijk', Cl) + np.einsum('bkij->bijk', Cl))
    G = np.einsum('bijm,mk->bijk', Gl, gi)
    F = {}
    for a in (1, 2, 3):
        J = H[a]
        nj = np.einsum('mj,bimk->bikj', J, G) - np.einsum('bijm,km->bikj', G, J)
        F[a] = np.einsum('bimj,mk->bijk', nj, g)
    out = []
    for t in targets:
        if t == "W1(J1)":
            out.append(F[1] + np.einsum('bjik->bijk', F[1]))
        elif t == "W3(J2)":
            out.append(F[2] + np.einsum('bjki->bijk', F[2]) + np.einsum('bkij->bijk', F[2]))
        elif t == "W3(J3)":
            out.append(F[3] + np.einsum('bjki->bijk', F[3]) + np.einsum('bkij->bijk', F[3]))
        elif t == "G1(J1)":
            FJ = np.einsum('ai,bj,zabk->zijk', H.J1, H.J1, F[1])
            Dif = F[1] - FJ
            out.append(Dif + np.einsum('bjik->bijk', Dif))
        elif t == "W0(J1)":
            out.append(F[1])
        elif t == "W0(J2)":
            out.append(F[2])
        elif t == "W0(J3)":
            out.append(F[3])
        elif t == "K":
            out.extend([F[1], F[2], F[3]])
        else:
            raise ValueError(t)
    B = Cb.shape[0]
    return np.concatenate([v.reshape(B, -1) for v in out], axis=1)


def class_subspace(dim: Dim, targets, g: Metric = None,
                   H: HypercomplexTriple = None) -> np.ndarray:
    """Orthonormal basis of {skew C : all target violations = 0}."""
    if g is None:
        g = standard_metric(dim)
    if H is None:
        H = standard_hypercomplex(dim)
    d = dim.d
    P = len(_skew_pairs(d)) * d
    basis = np.stack([unpack_constants(row, d) for row in np.eye(P)])
    A = _batched_violations(basis, g.components, g.inverse, H, targets).T
    return null_space(A, rcond=NULLSPACE_RCOND)


@dataclass(frozen=True)
class SearchResult:
    model: LieAlgebraModel
    penalty: float
    components: dict
    strict: bool
    certified: bool
    report: ClassificationReport
    restart: int
    iterations: int


@dataclass(frozen=True)
class SearchOutcome:
    targets: tuple
    results: list            # certified (and strict, if required), by penalty
    best: SearchResult       # best candidate regardless of certification
    diagnostics: dict = field(default_factory=dict)


def _component_dict(comp_vec) -> dict:
    return {name: float(v) for name, v in zip(COMPONENTS, comp_vec)}


def _penalty_from_components(comp_vec, target_idx) -> float:
    return float(comp_vec[0] + sum(comp_vec[i] for i in target_idx))


class _Problem:
    """Penalty evaluation over a parametrization theta -> C."""

    def __init__(self, dim, g, H, targets, basis=None):
        self.d = dim.d
        self.gc, self.gi = g.components, g.inverse
        self.H = H
        self.targets = targets
        self.target_idx = sorted({i for t in targets for i in _TARGET_COMPONENTS[t]})
        self.basis = basis
        self.evaluations = 0

    def to_constants(self, theta) -> np.ndarray:
        vec = self.basis @ theta if self.basis is not None else theta
        return unpack_constants(vec, self.d)

    def components(self, C) -> np.ndarray:
        self.evaluations += 1
        return penalty_components(C, self.gc, self.gi,
                                  self.H.J1, self.H.J2, self.H.J3)

    def penalty(self, theta) -> float:
        nrm = np.linalg.norm(theta)
        if nrm < 1e-14:
            return 0.0
        return _penalty_from_components(self.components(self.to_constants(theta / nrm)),
                                        self.target_idx)

    def residual_vector(self, theta) -> np.ndarray:
        """Unit-sphere residuals whose squared sum is the penalty.

        Inside the class-constraint nullspace the violation part is
        identically zero, so only the Jacobi residuals remain.
        """
        nrm = np.linalg.norm(theta)
        C = self.to_constants(theta / nrm if nrm > 1e-14 else theta)
        parts = [jacobi_tensor(C).ravel()]
        if self.targets and self.basis is None:
            Cb = C[None, :, :, :]
            parts.append(_batched_violations(Cb, self.gc, self.gi, self.H,
                                             self.targets).ravel())
        return np.concatenate(parts)


def _descent(problem: _Problem, theta0, budget: int, fd_step: float = FD_STEP,
             history: list = None):
    """Damped gradient descent with backtracking on the unit sphere.

    Accepted steps never increase the penalty; returns (theta, penalty,
    iterations used).  ``history`` collects the penalty after every
    accepted step.
    """
    theta = np.asarray(theta0, dtype=float)
    theta = theta / np.linalg.norm(theta)
    f = problem.penalty(theta)
    if history is not None:
        history.append(f)
    step = 1.0
    n = theta.size
    it = 0
    for it in range(1, budget + 1):
        grad = np.empty(n)
        for q in range(n):
            tp = theta.copy(); tp[q] += fd_step
            tm = theta.copy(); tm[q] -= fd_step
            grad[q] = (problem.penalty(tp) - problem.penalty(tm)) / (2 * fd_step)
        gn = np.linalg.norm(grad)
        if gn < 1e-14 or f < 1e-300:
            break
        direction = -grad / gn
        accepted = False
        alpha = step
        for _ in range(40):
            cand = theta + alpha * direction
            cnrm = np.linalg.norm(cand)
            if cnrm > 1e-14:
                cand = cand / cnrm
                fc = problem.penalty(cand)
                if fc < f:
                    theta, f = cand, fc
                    step = min(alpha * 2.0, 1.0)
                    accepted = True
                    if history is not None:
                        history.append(f)
                    break
            alpha *= 0.5
        if not accepted:
            break
    return theta, f, it


def _gauss_newton(problem: _Problem, theta, steps: int = POLISH_STEPS,
                  fd_step: float = FD_STEP):
    """Polish on the residual vector with damped Gauss-Newton steps."""
    theta = theta / np.linalg.norm(theta)
    r = problem.residual_vector(theta)
    cost = float(r @ r)
    n = theta.size
    for _ in range(steps):
        if cost < 1e-300:
            break
        J = np.empty((r.size, n))
        for q in range(n):
            tp = theta.copy(); tp[q] += fd_step
            tm = theta.copy(); tm[q] -= fd_step
            J[:, q] = (problem.residual_vector(tp)
                       - problem.residual_vector(tm)) / (2 * fd_step)
        delta, *_ = np.linalg.lstsq(J, -r, rcond=1e-12)
        lam = 1.0
        improved = False
        for _ in range(25):
            cand = theta + lam * delta
            if np.linalg.norm(cand) > 1e-14:
                cand = cand / np.linalg.norm(cand)
                rc = problem.residual_vector(cand)
                cc = float(rc @ rc)
                if cc < cost:
                    theta, r, cost = cand, rc, cc
                    improved = True
                    break
            lam *= 0.5
        if not improved:
            break
    return theta, cost


def _make_result(problem, C, penalty, restart, iterations,
                 tol) -> SearchResult:
    comp = problem.components(C)
    comp_d = _component_dict(comp)
    model = LieAlgebraModel.create(C, jacobi="skip")
    G = levi_civita(model)
    F1, F2, F3 = all_structural_F(model, G)
    report = class_residuals(F1, F2, F3, model.g, model.H, tol=tol)
    strict = bool(np.sqrt(comp[5]) > STRICT_RATIO * max(np.sqrt(comp[8]), 1e-30))
    return SearchResult(model=model, penalty=penalty, components=comp_d,
                        strict=strict, certified=penalty < CERT_PENALTY,
                        report=report, restart=restart, iterations=iterations)


def search_class(targets, dim: Dim, seed: int = 0, budget: int = DEFAULT_BUDGET,
                 restarts: int = DEFAULT_RESTARTS, strict: bool = False,
                 subspace: bool = True, tol: float = 1e-8) -> SearchOutcome:
    """Minimize the class penalty over skew structure constants.

    The abelian model is the iteration-0 candidate (penalty exactly 0 for
    every target, never strict).  ``restarts`` random starts then descend
    inside the class-constraint nullspace (or the full skew space with
    ``subspace=False``), each polished by Gauss-Newton.  Returns the
    certified models sorted by penalty; with ``strict=True`` only models
    with |F1| above 0.1 of the bracket scale are kept in ``results``.
    Exhausting the budget without a certified model is not an error: the
    outcome carries best-found diagnostics and an empty result list.
    """
    targets = normalize_targets(targets)
    if set(W133) <= set(targets) and dim.d < 8:
        raise ValueError("W133 targets need dimension >= 8 "
                         "(the class collapses below dimension 8)")
    g = standard_metric(dim)
    H = standard_hypercomplex(dim)
    basis = class_subspace(dim, targets, g, H) if subspace else None
    problem = _Problem(dim, g, H, targets, basis=basis)

    # iteration 0: the abelian origin
    results = []
    zero = _make_result(problem, np.zeros((dim.d,) * 3), 0.0, restart=-1,
                        iterations=0, tol=tol)
    candidates = [zero]

    nparams = basis.shape[1] if basis is not None else len(_skew_pairs(dim.d)) * dim.d
    if nparams > 0:
        seeds = np.random.SeedSequence(seed).spawn(restarts)
        for r, ss in enumerate(seeds):
            rng = np.random.default_rng(ss)
            theta0 = rng.standard_normal(nparams)
            theta, pen, its = _descent(problem, theta0, budget)
            theta, cost = _gauss_newton(problem, theta)
            C = problem.to_constants(theta / np.linalg.norm(theta))
            scale = magnitude(C)
            if scale > 1e-14:
                C = C / scale
            comp = problem.components(C)
            pen = _penalty_from_components(comp, problem.target_idx)
            candidates.append(_make_result(problem, C, pen, restart=r,
                                           iterations=its, tol=tol))

    best = min(candidates, key=lambda c: (not c.strict, c.penalty)) if strict \
        else min(candidates, key=lambda c: c.penalty)
    results = [c for c in candidates
               if c.certified and (c.strict or not strict)]
    results.sort(key=lambda c: c.penalty)
    diagnostics = {
        "backend": BACKEND,
        "best_penalty": min(c.penalty for c in candidates),
        "best_strict_penalty": min((c.penalty for c in candidates if c.strict),
                                   default=None),
        "restarts": restarts,
        "budget": budget,
        "subspace_dim": int(nparams),
        "evaluations": problem.evaluations,
    }
    return SearchOutcome(targets=targets, results=results, best=best,
                         diagnostics=diagnostics)


def perturb(m: LieAlgebraModel, noise: float, seed: int = 0) -> LieAlgebraModel:
    """Seeded skew noise plus one tangential Newton re-projection onto Jacobi.

    ``noise`` is the Frobenius magnitude of the added skew tensor; zero
    returns the identical model.  Class residuals of the output dominate
    those of the input up to numerical noise, which makes the operation a
    residual-sensitivity probe.
    """
    if noise == 0.0:
        return m
    d = m.d
    rng = np.random.default_rng(seed)
    P = len(_skew_pairs(d)) * d
    vec = rng.standard_normal(P)
    vec *= noise / np.linalg.norm(vec)
    C = m.C + unpack_constants(vec, d)

    # one Gauss-Newton step on the Jacobi residual
    r = jacobi_tensor(C).ravel()
    basis = np.eye(P)
    cols = []
    for q in range(P):
        E = unpack_constants(basis[q], d)
        X = np.einsum('ijl,lkm->ijkm', E, C) + np.einsum('ijl,lkm->ijkm', C, E)
        dj = X + np.einsum('jkim->ijkm', X) + np.einsum('kijm->ijkm', X)
        cols.append(dj.ravel())
    J = np.stack(cols, axis=1)
    delta, *_ = np.linalg.lstsq(J, -r, rcond=1e-10)
    C = C + unpack_constants(delta, d)
    return LieAlgebraModel.create(C, jacobi="warn")


def fundamental_suite_ok(m: LieAlgebraModel, tol: float = 1e-8) -> bool:
    """Every returned model passes this regardless of class success."""
    G = levi_civita(m)
    F1, F2, F3 = all_structural_F(m, G)
    res = fundamental_identity_residuals(F1, F2, F3, m.g, m.H)
    return max(res.values()) <= tol

"""Command-line surface: model ingestion, verification pipelines, reports.

Subcommands: classify, verify, connection, curvature, search, nullspace,
generate-point-model.  Reports are emitted twice on request: fixed-width
text for humans and structured JSON for CI, with identical numeric
content.  Exit codes: 0 success, 1 usage error (e.g. invalid dimension
for a search target), 2 model-file parse error, 3 structure-validation
failure; verify exits 0 iff every applicable residual passes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import classify as _classify
from . import connection as _conn
from . import curvature as _curv
from . import model as _model
from . import search as _search
from . import structural as _struct
from .modelfile import (
    ModelFileError,
    ModelValidationError,
        file_tolerance,
    load_model,
    save_model,
)
from .tensor_core import DEFAULT_RTOL, Dim, check_structure, magnitude, relative

JACOBI_GATE = 1e-6


@dataclass
class Line:
    label: str
    value: float = None
    threshold: float = None
    status: str = "INFO"
    note: str = ""

    def to_json(self):
        return {"label": self.label, "value": self.value,
                "threshold": self.threshold, "status": self.status,
                "note": self.note}


def check(label, value, tol, note="") -> Line:
    value = float(value)
    return Line(label, value, tol, "PASS" if value <= tol else "FAIL", note)


def skip(label, note) -> Line:
    return Line(label, None, None, "SKIP", note)


def info(label, value, note="") -> Line:
    if value is not None and not isinstance(value, int):
        value = float(value)
    return Line(label, value, None, "INFO", note)


def render_text(title, lines) -> str:
    out = [title, "-" * len(title)]
    for ln in lines:
        if ln.value is None:
            val = " " * 24
        elif isinstance(ln.value, int):
            val = f"{ln.value:>24d}"
        else:
            val = f"{ln.value:>24.16e}"
        note = f"  [{ln.note}]" if ln.note else ""
        out.append(f"{ln.label:<60.60} {val} {ln.status:>4}{note}")
    n_fail = sum(1 for ln in lines if ln.status == "FAIL")
    n_skip = sum(1 for ln in lines if ln.status == "SKIP")
    out.append(f"summary: {len(lines)} lines, {n_fail} failed, {n_skip} skipped")
    return "\n".join(out)


def render_json(title, lines, tol) -> dict:
    return {
        "title": title,
        "tolerance": tol,
        "lines": [ln.to_json() for ln in lines],
        "failed": sum(1 for ln in lines if ln.status == "FAIL"),
        "skipped": sum(1 for ln in lines if ln.status == "SKIP"),
    }


def emit(title, lines, tol, output=None) -> None:
    text = render_text(title, lines)
    print(text)
    if output:
        with open(output + ".txt", "w") as fh:
            fh.write(text + "\n")
        with open(output + ".json", "w") as fh:
            json.dump(render_json(title, lines, tol), fh, indent=1)
            fh.write("\n")


# ---------------------------------------------------------------------------
# shared evaluation context
# ---------------------------------------------------------------------------

class LieContext:
    """Everything the suites need, computed once from a Lie-algebra model."""

    def __init__(self, m: _model.LieAlgebraModel, tol: float):
        self.m = m
        self.tol = tol
        self.jacobi = _model.jacobi_residual(m.C)
        self.G = _model.levi_civita(m)
        self.F = _struct.all_structural_F(m, self.G)
        self.report = _classify.class_residuals(*self.F, m.g, m.H, tol=tol)
        # off-class potentials are wanted here (the report carries the class
        # verdicts), so the per-call precondition warnings are redundant
        import warnings as _warnings
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore", RuntimeWarning)
            self.Q1 = _conn.kt_potential_hermitian(self.F[0], m.H.J1, mode="general")
            self.Q2 = _conn.kt_potential_norden(self.F[1], m.H.J2)
            self.Q3 = _conn.kt_potential_norden(self.F[2], m.H.J3)
        self.Q, self.q_info = _conn.phkt_potential(self.Q1, self.Q2, self.Q3,
                                                   self.F[0], m.H.J1)
        self.Qc = _conn.phkt_closed_form(self.F[0], m.H.J1)
        self.D = _conn.connection_D(self.G, self.Qc, m.g)
        self.T, self.t_info = _conn.torsion(self.D, m)
        self.A1 = _curv.a_tensor(self.F[0], m.g)
        self.R = _model.curvature_R(m, self.G)
        self.K = _model.curvature_R(m, self.D)

    @property
    def w133(self) -> bool:
        return self.report.passes(*_classify.W133)

    @property
    def jacobi_ok(self) -> bool:
        return self.jacobi <= JACOBI_GATE


def _lines_identities(ctx: LieContext) -> list:
    m, tol = ctx.m, ctx.tol
    lines = [check("structure axioms (quaternionic + compatibility)",
                   max(check_structure(m.g, m.H).values()), tol)]
    lines.append(info("jacobi residual", ctx.jacobi))
    for lab, val in _struct.fundamental_identity_residuals(*ctx.F, m.g, m.H).items():
        lines.append(check(f"fundamental: {lab}", val, tol))
    for a in (1, 2, 3):
        two = relative(ctx.F[a - 1] - _struct.structural_F_via_form(m, ctx.G, a),
                       ctx.F[a - 1])
        lines.append(check(f"F{a}: nabla-J route = nabla-g_alpha route", two, tol))
    if ctx.jacobi_ok:
        for lab, val in _curv.ricci_identity_residuals(m, ctx.G, ctx.R, ctx.F).items():
            lines.append(check(lab, val, max(tol, 1e-7)))
    else:
        lines.append(skip("ricci identity corollary", "jacobi residual too large"))
    _, nij_res = _struct.nijenhuis(m, m.H.J1)
    if ctx.report.passes("G1(J1)"):
        lines.append(check("nijenhuis(J1) is a 3-form", nij_res, tol,
                           note="unique-KT criterion"))
    else:
        lines.append(info("nijenhuis(J1) 3-form defect (not G1-certified)", nij_res))
    if ctx.w133:
        suite = _classify.w133_identity_suite(
            _model.PointModel(dim=m.dim, g=m.g, H=m.H, F1=ctx.F[0], F2=ctx.F[1]))
        for lab, val in suite.items():
            lines.append(check(f"W133: {lab}", val, tol))
    else:
        lines.append(skip("W133 identity suite", "class precondition"))
    return lines


def _lines_connection(ctx: LieContext) -> list:
    m, tol = ctx.m, ctx.tol
    lines = []
    Tdef = ctx.Qc - np.einsum('jik->ijk', ctx.Qc)
    lines.append(check("torsion: T(x,y,z) = Q(x,y,z) - Q(y,x,z)",
                       relative(ctx.T - Tdef, ctx.T, ctx.Qc), max(tol, 1e-10)))
    if ctx.jacobi_ok:
        # the two exterior-derivative routes agree on genuine 3-forms;
        # off-class the torsion is not totally skew, so alternate first
        from .tensor_core import alternation3
        T3 = alternation3(ctx.T)
        a = _conn.exterior_derivative_3form(T3, m.C)
        b = _conn.exterior_derivative_via_nabla(T3, ctx.G)
        lines.append(check("dT on alt(T): intrinsic route = nabla route",
                           relative(a - b, a, b, T3), max(tol, 1e-7)))
    else:
        lines.append(skip("dT on alt(T): intrinsic route = nabla route",
                          "jacobi residual too large"))
    if ctx.w133:
        Q1r = _conn.kt_potential_hermitian(ctx.F[0], m.H.J1, mode="nearly_kahler")
        lines.append(check("Q1 general mode = nearly-Kahler mode",
                           relative(ctx.Q1 - Q1r, ctx.Q1, ctx.F[0]), tol))
        lines.append(check("Q = -1/2 Q1 + Q2 + Q3 vs closed form",
                           ctx.q_info["closed_form_disagreement"], tol))
        lines.append(check("Q totally antisymmetric", ctx.q_info["total_antisymmetry"], tol))
        lines.append(check("T = 2Q", relative(ctx.T - 2.0 * ctx.Q, ctx.T, ctx.Q), tol))
        D2 = _conn.connection_D_endomorphism(ctx.G, m.H.J1)
        lines.append(check("D = nabla + g^{-1}Q vs endomorphism form",
                           relative(ctx.D - D2, ctx.D, ctx.G, ctx.Qc), max(tol, 1e-10)))
        for lab, val in _conn.naturality_residuals(ctx.D, m.g, m.H).items():
            lines.append(check(f"naturality: {lab} = 0", val, tol))
        lines.append(check("torsion totally antisymmetric",
                           ctx.t_info["total_antisymmetry"], tol))
        nJ1 = _struct.square_norm(ctx.F[0], m.g)
        scale = max(abs(ctx.t_info["square_norm"]), abs(nJ1), 1e-10)
        lines.append(check("|T|^2 = |nabla J1|^2",
                           abs(ctx.t_info["square_norm"] - nJ1) / scale, tol))
        if ctx.jacobi_ok:
            der = _conn.torsion_derivatives(m, ctx.G, ctx.D, ctx.T, ctx.A1)
            for lab in ("DT", "nablaT_vs_half_SA1", "dT_vs_2SA1", "deltaT"):
                lines.append(check(f"torsion derivative: {lab}", der[lab], max(tol, 1e-7)))
        else:
            lines.append(skip("torsion derivatives", "jacobi residual too large"))
        # uniqueness evidence: a seeded natural perturbation must break the
        # total skewness of the torsion (exhaustive uniqueness is out of
        # numerical reach)
        B = _conn.natural_perturbation_basis(m.d, m.H)
        if B.shape[1] > 0 and magnitude(ctx.D) > 0:
            pert = (B @ np.random.default_rng(0).standard_normal(B.shape[1]))
            pert = pert.reshape(m.d, m.d, m.d)
            pert *= magnitude(ctx.D) / max(magnitude(pert), 1e-30)
            Tp, _ = _conn.torsion(_conn.connection_D(ctx.D, pert, m.g), m)
            from .tensor_core import alternation3
            broken = relative(Tp - alternation3(Tp), Tp)
            lines.append(Line("uniqueness probe: natural perturbation breaks "
                              "skew torsion", broken, 1e-3,
                              "PASS" if broken > 1e-3 else "FAIL",
                              "residual must exceed threshold"))
        else:
            lines.append(skip("uniqueness probe", "flat model: torsion is zero"))
    else:
        lines.append(info("Q combination vs closed form (off-class disagreement)",
                          ctx.q_info["closed_form_disagreement"]))
        for lab in ("Q1/Q2/Q3 potentials", "naturality", "torsion antisymmetry",
                    "torsion derivatives"):
            lines.append(skip(lab, "class precondition"))
    return lines


def _lines_curvature(ctx: LieContext) -> list:
    m, tol = ctx.m, ctx.tol
    lines = []
    if not ctx.jacobi_ok:
        lines.append(skip("curvature suite", "jacobi residual too large"))
        return lines
    ctol = max(tol, 1e-7)
    lines.append(check("R: first Bianchi identity",
                       relative(_curv.cyclic_sum(ctx.R), ctx.R), ctol))
    lines.append(check("R: pair symmetry",
                       relative(ctx.R - np.einsum('klij->ijkl', ctx.R), ctx.R), ctol))
    lines.append(check("A1 pair symmetry (construction)",
                       relative(ctx.A1 - np.einsum('klij->ijkl', ctx.A1), ctx.A1), tol))
    for lab, val in _curv.ricci_identity_residuals(m, ctx.G, ctx.R, ctx.F).items():
        lines.append(check(lab, val, ctol))
    if ctx.report.passes("W1(J1)"):
        for lab, val in _curv.nearly_kahler_curvature_residuals(m, ctx.R, ctx.A1).items():
            lines.append(check(f"nearly-Kahler: {lab}", val, ctol))
    else:
        lines.append(skip("nearly-Kahler curvature relations", "class precondition"))
    if ctx.w133:
        As = tuple(_curv.a_tensor(F, m.g) for F in ctx.F)
        for lab, val in _curv.hyper_curvature_residuals(m, ctx.R, As).items():
            lines.append(check(f"hyper: {lab}", val, ctol))
        _, sres = _curv.scalar_relations(m, ctx.R, ctx.K, ctx.F, ctx.T)
        for lab, val in sres.items():
            lines.append(check(f"scalar: {lab}", val, ctol))
        lines.append(check("K = R + 1/4 A1 + 1/4 S A1",
                           _curv.kr_relation_residual(ctx.K, ctx.R, ctx.A1), ctol))
        tri = _curv.strong_weak_flat_report(m, ctx.G, ctx.D, ctx.R, ctx.K,
                                            ctx.T, ctx.A1, ctx.F, tol=ctol)
        lines.append(info("trichotomy verdict", None, note=tri.verdict))
        lines.append(check("S K = S A1", tri.sk_vs_sa1, ctol))
        for lab, val in tri.flat_branch_residuals.items():
            lines.append(check(f"flat branch: {lab}", val, ctol))
        for lab, val in tri.magnitudes.items():
            lines.append(info(f"magnitude: {lab}", val))
    else:
        for lab in ("hypercomplex curvature identity", "scalar relations",
                    "K-R relation", "trichotomy"):
            lines.append(skip(lab, "class precondition"))
    return lines


def _classification_lines(report) -> list:
    lines = []
    for lab in _classify.CLASS_LABELS:
        lines.append(Line(f"class {lab}", report.residuals[lab], report.tol,
                          "PASS" if report.verdicts[lab] else "FAIL"))
    lines.append(info("strict (no F_alpha vanishes)", None,
                      note=str(report.strict)))
    for note in report.notes:
        lines.append(info("note", None, note=note))
    return lines


def _point_model_lines(p, suite, tol) -> list:
    F1, F2, F3 = p.F1, p.F2, p.F3
    lines = []
    if suite in ("identities", "all"):
        for lab, val in _struct.fundamental_identity_residuals(
                F1, F2, F3, p.g, p.H).items():
            lines.append(check(f"fundamental: {lab}", val, tol))
        rep = _classify.classify_point_model(p, tol=tol)
        if rep.passes(*_classify.W133):
            for lab, val in _classify.w133_identity_suite(p).items():
                lines.append(check(f"W133: {lab}", val, tol))
            for lab, val in _curv.f_level_norm_relations(F1, F2, F3, p.g).items():
                if lab != "values":
                    lines.append(check(f"norms: {lab}", val, tol))
        else:
            lines.append(skip("W133 identity suite", "class precondition"))
    if suite in ("connection", "all"):
        rep = _classify.classify_point_model(p, tol=tol)
        Q1 = _conn.kt_potential_hermitian(F1, p.H.J1, mode="general")
        Q2 = _conn.kt_potential_norden(F2, p.H.J2)
        Q3 = _conn.kt_potential_norden(F3, p.H.J3)
        Q, q_info = _conn.phkt_potential(Q1, Q2, Q3, F1, p.H.J1)
        if rep.passes(*_classify.W133):
            Q1r = _conn.kt_potential_hermitian(F1, p.H.J1, mode="nearly_kahler")
            lines.append(check("Q1 general mode = nearly-Kahler mode",
                               relative(Q1 - Q1r, Q1, F1), tol))
            lines.append(check("Q = -1/2 Q1 + Q2 + Q3 vs closed form",
                               q_info["closed_form_disagreement"], tol))
            lines.append(check("Q totally antisymmetric",
                               q_info["total_antisymmetry"], tol))
        else:
            lines.append(info("Q combination vs closed form (off-class)",
                              q_info["closed_form_disagreement"]))
            lines.append(skip("potential suite", "class precondition"))
    if suite in ("curvature", "all"):
        lines.append(skip("curvature suite", "requires a Lie-algebra model"))
    return lines


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _load(path):
    try:
        return load_model(path), 0
    except ModelValidationError as e:
        print(f"structure-validation failure: {e}", file=sys.stderr)
        return None, 3
    except ModelFileError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return None, 2


def cmd_classify(args) -> int:
    model, rc = _load(args.model)
    if model is None:
        return rc
    tol = args.tol if args.tol is not None else file_tolerance(args.model, DEFAULT_RTOL)
    if isinstance(model, _model.PointModel):
        report = _classify.classify_point_model(model, tol=tol)
        Fs = (model.F1, model.F2, model.F3)
    else:
        G = _model.levi_civita(model)
        Fs = _struct.all_structural_F(model, G)
        report = _classify.class_residuals(*Fs, model.g, model.H, tol=tol)
    lines = _classification_lines(report)
    flags = _struct.isotropy_flags(*Fs, model.g)
    for a, v in enumerate(flags["square_norms"], 1):
        lines.append(info(f"square norm |nabla J{a}|^2", v))
    if flags["isotropic_pseudo_hyper_kahler"]:
        lines.append(info("isotropic pseudo-hyper-Kahler", None,
                          note="all square norms vanish, some F_alpha does not"))
    emit(f"classification report ({args.model})", lines, tol, args.output)
    return 0


def cmd_verify(args, suite=None) -> int:
    model, rc = _load(args.model)
    if model is None:
        return rc
    suite = suite or args.suite
    tol = args.tol if args.tol is not None else file_tolerance(args.model, DEFAULT_RTOL)
    if isinstance(model, _model.PointModel):
        lines = _point_model_lines(model, suite, tol)
    else:
        ctx = LieContext(model, tol)
        lines = []
        if suite in ("identities", "all"):
            lines += _lines_identities(ctx)
        if suite in ("connection", "all"):
            lines += _lines_connection(ctx)
        if suite in ("curvature", "all"):
            lines += _lines_curvature(ctx)
    emit(f"verification report ({args.model}, suite={suite})", lines, tol, args.output)
    return 0 if not any(ln.status == "FAIL" for ln in lines) else 1


def cmd_search(args) -> int:
    try:
        targets = _search.normalize_targets(args.target.split(","))
        dim = Dim(args.n)
        outcome = _search.search_class(targets, dim, seed=args.seed,
                                       budget=args.budget, restarts=args.restarts,
                                       strict=args.strict, tol=args.tol or DEFAULT_RTOL)
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    lines = [info("target", None, note=",".join(outcome.targets)),
             info("best penalty", outcome.diagnostics["best_penalty"]),
             info("subspace dimension", outcome.diagnostics["subspace_dim"]),
             info("certified models", len(outcome.results))]
    outdir = args.output or "."
    os.makedirs(outdir, exist_ok=True)
    written = []
    for idx, res in enumerate(outcome.results[:args.max_models]):
        path = os.path.join(outdir, f"model_{idx:03d}.json")
        save_model(path, res.model, tolerance=args.tol)
        written.append(path)
        lines.append(info(f"model_{idx:03d} penalty", res.penalty,
                          note=f"strict={res.strict}"))
    log = {
        "targets": list(outcome.targets),
        "seed": args.seed, "budget": args.budget, "restarts": args.restarts,
        "diagnostics": outcome.diagnostics,
        "models": written,
        "penalties": [r.penalty for r in outcome.results],
    }
    with open(os.path.join(outdir, "penalty_log.json"), "w") as fh:
        json.dump(log, fh, indent=1)
        fh.write("\n")
    emit("search report", lines, args.tol or DEFAULT_RTOL, None)
    return 0


def cmd_nullspace(args) -> int:
    dim = Dim(args.n)
    lines = [
        info("Kahler-like nullspace dimension",
             _curv.kahler_like_nullspace(dim)),
        info("admissible point-model dimension",
             _model.admissible_basis(dim).shape[1]),
        info("W3(J2) & W3(J3) nullspace dimension",
             _classify.class_nullspace_dimension(dim, ("W3(J2)", "W3(J3)"))),
        info("W133 nullspace dimension",
             _classify.class_nullspace_dimension(dim, _classify.W133)),
        info("W3(J2) & W3(J3) & W0(J1) nullspace dimension",
             _classify.class_nullspace_dimension(dim, ("W3(J2)", "W3(J3)", "W0(J1)"))),
    ]
    for a in (1, 2, 3):
        lines.append(info(f"W133 & W0(J{a}) nullspace dimension",
                          _classify.class_nullspace_dimension(
                              dim, _classify.W133 + (f"W0(J{a})",))))
    emit(f"nullspace report (n={args.n}, d={dim.d})", lines,
         args.tol or DEFAULT_RTOL, args.output)
    return 0


def cmd_generate_point_model(args) -> int:
    dim = Dim(args.n)
    p = _model.sample_point_model(dim, args.seed)
    trivial = False
    if args.classes:
        labels = _search.normalize_targets(args.classes.split(","))
        p, trivial = _classify.project_to_classes(p, labels)
    path = args.output or f"point_model_n{args.n}_seed{args.seed}.json"
    save_model(path, p, tolerance=args.tol)
    report = _classify.classify_point_model(p, tol=args.tol or DEFAULT_RTOL)
    lines = _classification_lines(report)
    lines.append(info("written", None, note=path))
    if trivial:
        lines.append(info("trivial-only", None,
                          note="requested intersection contains only zero data"))
    lines.append(info("|F1|", magnitude(p.F1)))
    lines.append(info("|F2|", magnitude(p.F2)))
    emit("point-model report", lines, args.tol or DEFAULT_RTOL, None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hgkit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("model", help="model file (JSON)")
        p.add_argument("--tol", type=float, default=None,
                       help="relative tolerance override (default 1e-8 or file value)")
        p.add_argument("--output", default=None,
                       help="basename for report files (.txt and .json)")

    common(sub.add_parser("classify", help="class residuals and verdicts"))
    pv = sub.add_parser("verify", help="run a verification suite")
    common(pv)
    pv.add_argument("--suite", choices=("identities", "connection", "curvature", "all"),
                    default="all")
    common(sub.add_parser("connection", help="verify, connection suite"))
    common(sub.add_parser("curvature", help="verify, curvature suite"))

    ps = sub.add_parser("search", help="search for class-certified models")
    ps.add_argument("--target", default="W133",
                    help="comma-separated class labels (default W133)")
    ps.add_argument("-n", type=int, default=2, help="dimension parameter n (d = 4n)")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--budget", type=int, default=_search.DEFAULT_BUDGET,
                    help="descent iterations per restart")
    ps.add_argument("--restarts", type=int, default=_search.DEFAULT_RESTARTS)
    ps.add_argument("--strict", action="store_true",
                    help="keep only strict models (|F1| above 0.1 of bracket scale)")
    ps.add_argument("--max-models", type=int, default=8)
    ps.add_argument("--tol", type=float, default=None)
    ps.add_argument("--output", default=None, help="output directory")

    pn = sub.add_parser("nullspace", help="rank facts: class and Kahler-like nullspaces")
    pn.add_argument("-n", type=int, default=1)
    pn.add_argument("--tol", type=float, default=None)
    pn.add_argument("--output", default=None)

    pg = sub.add_parser("generate-point-model", help="sample an admissible point model")
    pg.add_argument("-n", type=int, default=2)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--classes", default=None,
                    help="project onto these classes (comma-separated)")
    pg.add_argument("--tol", type=float, default=None)
    pg.add_argument("--output", default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "classify": cmd_classify,
        "verify": cmd_verify,
        "connection": lambda a: cmd_verify(a, suite="connection"),
        "curvature": lambda a: cmd_verify(a, suite="curvature"),
        "search": cmd_search,
        "nullspace": cmd_nullspace,
        "generate-point-model": cmd_generate_point_model,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

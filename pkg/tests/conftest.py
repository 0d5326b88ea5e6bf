import numpy as np
import pytest

from hgkit import Dim, LieAlgebraModel, search_class, square_norm
from hgkit.classify import sample_class_point_model, W133
from hgkit.model import PointModel


@pytest.fixture(scope="session")
def dim1():
    return Dim(1)


@pytest.fixture(scope="session")
def dim2():
    return Dim(2)


@pytest.fixture(scope="session")
def w33_search_n1():
    """Search outcome for W3(J2) & W3(J3) at n=1 (has strict solutions)."""
    return search_class(("W3(J2)", "W3(J3)"), Dim(1), seed=0, budget=40, restarts=6)


@pytest.fixture(scope="session")
def w33_model_n1(w33_search_n1):
    """A strict W33-certified nonabelian Lie model at d=4 (G1 by the
    first classification theorem)."""
    strict = [r for r in w33_search_n1.results if r.strict]
    assert strict, "expected strict W33 models at n=1"
    return strict[0].model


@pytest.fixture(scope="session")
def w33_model_n2(w33_model_n1):
    """The n=1 strict W33 model embedded as a direct sum with an abelian
    block: a d=8 nonabelian W33-certified model."""
    C = np.zeros((8, 8, 8))
    C[:4, :4, :4] = w33_model_n1.C
    return LieAlgebraModel.create(C)


@pytest.fixture(scope="session")
def w133_point_models(dim2):
    """Twenty seeded unit-magnitude W133 point models at d=8."""
    models = [sample_class_point_model(dim2, W133, seed=s) for s in range(20)]
    assert all(np.linalg.norm(p.packed()) > 0.9 for p in models)
    return models


@pytest.fixture(scope="session")
def isotropic_point_model(dim2):
    """W133 point model with all three square norms zero but F nonzero.

    |nabla J1|^2 takes both signs on the W133 space, so a zero crossing
    is found by bisection along a segment inside the space; the norm
    chain then kills the other two norms as well.
    """
    lo = hi = None
    for s in range(64):
        p = sample_class_point_model(dim2, W133, seed=s)
        v = square_norm(p.F1, p.g)
        if v > 0.01 and hi is None:
            hi = p.packed()
        if v < -0.01 and lo is None:
            lo = p.packed()
        if lo is not None and hi is not None:
            break
    assert lo is not None and hi is not None

    def norm_at(t):
        vec = (1 - t) * hi + t * lo
        vec = vec / np.linalg.norm(vec)
        q = PointModel.from_packed(dim2, vec)
        return square_norm(q.F1, q.g), vec

    a, b = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (a + b)
        v, vec = norm_at(mid)
        if v > 0:
            a = mid
        else:
            b = mid
    _, vec = norm_at(0.5 * (a + b))
    return PointModel.from_packed(dim2, vec)

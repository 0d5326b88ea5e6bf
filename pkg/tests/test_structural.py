import numpy as np
import pytest

from hgkit.model import abelian_model, levi_civita, random_model
from hgkit.structural import (
    all_structural_F,
    fundamental_identity_residuals,
    isotropy_flags,
    nijenhuis,
    square_norm,
    square_norm_nablaJ,
    structural_F,
    structural_F_via_form,
)
from hgkit.model import nabla_J
from hgkit.tensor_core import Dim, magnitude, relative


def brute_force_square_norm(F, g):
    """Naive O(d^6) contraction oracle."""
    d = F.shape[0]
    gi = g.inverse
    total = 0.0
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    for p in range(d):
                        for q in range(d):
                            total += gi[i, j] * gi[k, l] * gi[p, q] * F[i, k, p] * F[j, l, q]
    return total


def test_flat_structural_tensors_vanish():
    m = abelian_model(Dim(2))
    G = levi_civita(m)
    for a in (1, 2, 3):
        assert magnitude(structural_F(m, G, a)) == 0.0


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("alpha", [1, 2, 3])
def test_two_defining_routes_agree(n, alpha):
    for seed in range(3):
        m = random_model(Dim(n), seed)
        G = levi_civita(m)
        a = structural_F(m, G, alpha)
        b = structural_F_via_form(m, G, alpha)
        assert relative(a - b, a, b) < 1e-10


def test_F1_antisymmetric_last_two():
    m = random_model(Dim(2), seed=6)
    F1 = structural_F(m, levi_civita(m), 1)
    assert relative(F1 + np.einsum('ikj->ijk', F1), F1) < 1e-8


@pytest.mark.parametrize("n", [1, 2])
def test_fundamental_identities_on_random_models(n):
    for seed in range(5):
        m = random_model(Dim(n), seed)
        F1, F2, F3 = all_structural_F(m, levi_civita(m))
        res = fundamental_identity_residuals(F1, F2, F3, m.g, m.H)
        assert max(res.values()) < 1e-8


def test_fundamental_identities_zero_data():
    m = abelian_model(Dim(1))
    Z = np.zeros((4, 4, 4))
    res = fundamental_identity_residuals(Z, Z, Z, m.g, m.H)
    assert max(res.values()) == 0.0


def test_fundamental_identities_detect_violation():
    # a slot-(2,3)-symmetric F1 violates the antisymmetry identity
    m = random_model(Dim(2), seed=2)
    _, F2, F3 = all_structural_F(m, levi_civita(m))
    raw = np.random.default_rng(0).standard_normal((8, 8, 8))
    bad = 0.5 * (raw + np.einsum('ikj->ijk', raw))
    res = fundamental_identity_residuals(bad, F2, F3, m.g, m.H)
    assert res["F1: F(x,y,z) = -eps F(x,z,y)"] > 1e-2


@pytest.mark.parametrize("n", [1, 2])
def test_square_norm_matches_bruteforce(n):
    m = random_model(Dim(n), seed=1)
    F1 = structural_F(m, levi_civita(m), 1)
    assert square_norm(F1, m.g) == pytest.approx(brute_force_square_norm(F1, m.g),
                                                 rel=1e-10, abs=1e-12)


def test_square_norm_two_formulations():
    m = random_model(Dim(2), seed=8)
    G = levi_civita(m)
    for a in (1, 2, 3):
        F = structural_F(m, G, a)
        nj = nabla_J(G, m.H[a])
        assert square_norm(F, m.g) == pytest.approx(square_norm_nablaJ(nj, m.g),
                                                    rel=1e-10, abs=1e-12)


def test_square_norm_flat_zero():
    m = abelian_model(Dim(1))
    F = structural_F(m, levi_civita(m), 1)
    assert square_norm(F, m.g) == 0.0


def test_square_norms_are_signed(w133_point_models):
    # the indefinite metric makes |nabla J_2|^2 negative whenever
    # |nabla J_1|^2 is positive on W133 data
    values = [(square_norm(p.F1, p.g), square_norm(p.F2, p.g))
              for p in w133_point_models]
    assert any(a > 1e-6 and b < -1e-7 for a, b in values)


def test_isotropic_flag(isotropic_point_model):
    p = isotropic_point_model
    flags = isotropy_flags(p.F1, p.F2, p.F3, p.g)
    assert flags["isotropic_pseudo_hyper_kahler"]
    assert not flags["pseudo_hyper_kahler"]
    assert max(abs(v) for v in flags["square_norms"]) < 1e-8
    assert magnitude(p.F1) > 0.1


def test_nijenhuis_abelian_zero():
    m = abelian_model(Dim(2))
    N, res = nijenhuis(m, m.H.J1)
    assert magnitude(N) == 0.0
    assert res == 0.0


def test_nijenhuis_g1_certified_model_is_three_form(w33_model_n1):
    # W33 models are G1 by the classification theorem; on them the
    # Nijenhuis tensor of J1 must be a 3-form (unique-KT criterion)
    _, res = nijenhuis(w33_model_n1, w33_model_n1.H.J1)
    assert res < 1e-8


def test_nijenhuis_generic_model_not_three_form():
    hits = 0
    for seed in range(5):
        m = random_model(Dim(2), seed)
        _, res = nijenhuis(m, m.H.J1)
        if res > 1e-3:
            hits += 1
    assert hits >= 4  # generically non-skew

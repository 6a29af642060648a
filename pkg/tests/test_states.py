import json
import math

import numpy as np
import pytest

from phasetest import (
    CoherentSuperpositionSpec,
    DomainError,
    FockSpec,
    GaussianSpec,
    MixtureSpec,
    ValidationError,
    coherent,
    coherent_overlap,
    displaced_parity,
    laguerre,
    make_cat,
    make_cat_vacuum_mixture,
)
from phasetest.states import state_from_dict, state_to_dict

from oracles import fock_basis_parity, fock_parity, fock_series_parity


class TestDisplacedParity:
    def test_vacuum_peak(self):
        assert displaced_parity(GaussianSpec(), 0.0, 0.0) == pytest.approx(1.0, abs=1e-14)

    def test_fock1_origin(self):
        assert displaced_parity(FockSpec(1), 0.0, 0.0) == pytest.approx(-1.0, abs=1e-14)

    def test_fock2_off_origin(self):
        got = displaced_parity(FockSpec(2), 0.331, 0.331)
        assert got == pytest.approx(fock_parity(2, 0.331, 0.331), abs=1e-13)
        assert got == pytest.approx(-0.23798, abs=2e-5)
        # independent cross-check through a 60-photon Fock expansion
        assert got == pytest.approx(fock_series_parity(2, 0.331, 0.331), abs=1e-10)

    def test_even_cat_origin(self):
        assert displaced_parity(make_cat(1.0), 0.0, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_coherent_profile(self, rng):
        spec = coherent(0.4 - 0.9j)
        for _ in range(25):
            x, y = rng.normal(0, 1, 2)
            expected = math.exp(-2 * ((x - 0.4) ** 2 + (y + 0.9) ** 2))
            assert displaced_parity(spec, x, y) == pytest.approx(expected, abs=1e-13)

    def test_bounded_everywhere(self, rng):
        states = [
            GaussianSpec(alpha=0.5 + 0.1j, r=1.2, phi=0.3, nbar=0.7),
            FockSpec(5),
            make_cat(1.7),
            MixtureSpec([(0.5, FockSpec(1)), (0.5, make_cat(0.6))]),
        ]
        for spec in states:
            for _ in range(200):
                x, y, th = rng.normal(0, 2, 3)
                assert abs(displaced_parity(spec, x, y, th)) <= 1 + 1e-12

    def test_frame_consistency(self, rng):
        spec = MixtureSpec([(0.4, GaussianSpec(alpha=0.3, r=0.5, phi=0.2)), (0.6, make_cat(0.8))])
        for _ in range(50):
            x, y, th = rng.normal(0, 1.5, 3)
            q = math.cos(th) * x - math.sin(th) * y
            p = math.sin(th) * x + math.cos(th) * y
            assert displaced_parity(spec, x, y, th) == pytest.approx(
                displaced_parity(spec, q, p, 0.0), abs=1e-12
            )

    def test_gaussian_normalizes_to_one(self, rng):
        # integral of W = (2/pi) * parity over phase space
        for _ in range(5):
            spec = GaussianSpec(
                alpha=complex(*rng.normal(0, 0.3, 2)),
                r=rng.uniform(0, 1.5),
                phi=rng.uniform(0, math.pi),
                nbar=rng.uniform(0, 2),
            )
            sigma_max = math.sqrt(np.max(np.linalg.eigvalsh(spec.covariance())))
            lim = 6.5 * sigma_max + abs(spec.alpha) + 1.0
            axis = np.linspace(-lim, lim, 801)
            dx = axis[1] - axis[0]
            gx, gy = np.meshgrid(axis, axis, indexing="ij")
            from phasetest.kernels import parity_grid
            from phasetest.states import compile_state

            vals = parity_grid(compile_state(spec), gx.ravel(), gy.ravel(), 0.0)
            integral = vals.sum() * dx * dx * 2.0 / math.pi
            assert integral == pytest.approx(1.0, abs=1e-6)

    def test_mixture_linearity(self, rng):
        a, b = FockSpec(2), make_cat(1.1)
        mix = MixtureSpec([(0.3, a), (0.7, b)])
        for _ in range(25):
            x, y = rng.normal(0, 1, 2)
            expected = 0.3 * displaced_parity(a, x, y) + 0.7 * displaced_parity(b, x, y)
            assert displaced_parity(mix, x, y) == pytest.approx(expected, abs=5e-16)

    def test_cat_matches_fock_expansion(self, rng):
        # superposition path vs an independent Fock-basis oracle
        for gamma in (0.3, 0.8):
            cat = make_cat(gamma)
            for _ in range(10):
                x, y = rng.normal(0, 0.7, 2)
                oracle = fock_basis_parity(list(cat.terms), complex(x, y))
                assert displaced_parity(cat, x, y) == pytest.approx(oracle, abs=1e-8)

    def test_rejects_non_finite_points(self):
        with pytest.raises(DomainError):
            displaced_parity(FockSpec(0), math.nan, 0.0)
        with pytest.raises(DomainError):
            displaced_parity(FockSpec(0), 0.0, math.inf)


class TestLaguerre:
    def test_order_zero(self):
        assert laguerre(0, 3.7) == 1.0

    def test_at_zero(self):
        assert laguerre(2, 0.0) == 1.0

    def test_quadratic(self):
        z = 0.876488
        assert laguerre(2, z) == pytest.approx(1 - 2 * z + z * z / 2, abs=1e-15)
        assert laguerre(2, z) == pytest.approx(-0.36886, abs=5e-6)

    def test_against_scipy(self, rng):
        from scipy.special import eval_laguerre

        for _ in range(40):
            n = int(rng.integers(0, 25))
            z = rng.uniform(-2, 20)
            assert laguerre(n, z) == pytest.approx(eval_laguerre(n, z), rel=1e-10, abs=1e-10)

    def test_rejects_bad_order(self):
        with pytest.raises(ValidationError):
            laguerre(-1, 0.5)


class TestCoherentOverlap:
    def test_normalization(self):
        assert coherent_overlap(0.7 + 0.2j, 0.7 + 0.2j) == pytest.approx(1.0, abs=1e-15)

    def test_vacuum(self):
        g = 1.1 - 0.4j
        assert coherent_overlap(0, g) == pytest.approx(math.exp(-abs(g) ** 2 / 2), abs=1e-15)

    def test_modulus_identity(self):
        assert abs(coherent_overlap(1, 1j)) ** 2 == pytest.approx(math.exp(-2.0), abs=1e-15)


class TestConstructors:
    def test_cat_zero_is_vacuum(self):
        cat = make_cat(0.0)
        assert displaced_parity(cat, 0.0, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_cat_vacuum_mixture_weights(self):
        mix = make_cat_vacuum_mixture(1.0)
        w = [wi for wi, _ in mix.components]
        assert w[0] == pytest.approx(math.exp(-1) * math.sinh(1), abs=1e-12)
        assert w[1] == pytest.approx(math.exp(-1) * math.cosh(1), abs=1e-12)
        assert sum(w) == pytest.approx(1.0, abs=1e-12)

    def test_cat_normalized(self):
        assert make_cat(1.0).norm_squared() == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_covariance_determinant(self, rng):
        for _ in range(20):
            spec = GaussianSpec(
                r=rng.uniform(0, 2), phi=rng.uniform(0, math.pi), nbar=rng.uniform(0, 3)
            )
            cov = spec.covariance()
            det = np.linalg.det(cov)
            assert det == pytest.approx(((spec.nbar + 0.5) / 2) ** 2, rel=1e-12)
            assert np.all(np.linalg.eigvalsh(cov) > 0)

    def test_purity(self):
        assert GaussianSpec(nbar=0.5).purity == pytest.approx(0.5)


class TestValidation:
    def test_negative_squeeze(self):
        with pytest.raises(ValidationError):
            GaussianSpec(r=-0.1)

    def test_negative_thermal(self):
        with pytest.raises(ValidationError):
            GaussianSpec(nbar=-0.5)

    def test_non_finite_gaussian(self):
        with pytest.raises(DomainError):
            GaussianSpec(alpha=complex("inf"))

    def test_fock_negative(self):
        with pytest.raises(ValidationError):
            FockSpec(-2)

    def test_fock_non_integer(self):
        with pytest.raises(ValidationError):
            FockSpec(1.5)

    def test_empty_superposition(self):
        with pytest.raises(ValidationError):
            CoherentSuperpositionSpec([])

    def test_cancelled_superposition(self):
        with pytest.raises(ValidationError):
            CoherentSuperpositionSpec([(1.0, 0.5), (-1.0, 0.5)])

    def test_mixture_negative_weight(self):
        with pytest.raises(ValidationError):
            MixtureSpec([(-0.1, FockSpec(0)), (1.1, FockSpec(1))])

    def test_mixture_bad_sum(self):
        with pytest.raises(ValidationError):
            MixtureSpec([(0.4, FockSpec(0)), (0.4, FockSpec(1))])

    def test_mixture_flattening(self):
        inner = MixtureSpec([(0.5, FockSpec(0)), (0.5, FockSpec(2))])
        outer = MixtureSpec([(0.4, inner), (0.6, FockSpec(1))])
        assert all(not isinstance(s, MixtureSpec) for _, s in outer.components)
        assert sum(w for w, _ in outer.components) == pytest.approx(1.0, abs=1e-12)
        assert outer.components[0][0] == pytest.approx(0.2)


class TestSerialization:
    @pytest.mark.parametrize(
        "spec",
        [
            GaussianSpec(alpha=0.2 - 0.3j, r=0.7, phi=1.0, nbar=0.25),
            FockSpec(3),
            make_cat(1.2),
            MixtureSpec([(0.25, FockSpec(0)), (0.75, GaussianSpec(r=0.4))]),
        ],
    )
    def test_round_trip(self, spec):
        doc = json.loads(json.dumps(state_to_dict(spec)))
        again = state_from_dict(doc)
        assert again == spec

    def test_field_names(self):
        doc = state_to_dict(GaussianSpec(alpha=1j, r=0.1, phi=0.2, nbar=0.3))
        assert set(doc) == {"type", "alpha", "r", "phi", "nbar"}
        doc = state_to_dict(make_cat(0.5))
        assert set(doc["terms"][0]) == {"coefficient", "amplitude"}

    def test_unknown_type(self):
        with pytest.raises(ValidationError):
            state_from_dict({"type": "husimi"})

    def test_malformed(self):
        with pytest.raises(ValidationError):
            state_from_dict({"type": "fock"})
        with pytest.raises(ValidationError):
            state_from_dict([1, 2])

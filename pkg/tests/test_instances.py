import math
from fractions import Fraction

import numpy as np
import pytest

from affmed.instances import (ContaminationSpec, DistributionSpec, breakdown_family, contaminate,
                              discrete_law, heavytailed_bound, heavytailed_eps, mixture_holds, moments,
                              quant_family, sample)


def binomial_band(count, n, p, z=3.0):
    return abs(count - n * p) <= z * math.sqrt(n * p * (1 - p))


def atom_counts(X, atoms):
    hits = np.all(np.abs(X[:, None, :] - atoms[None, :, :]) < 1e-12, axis=2)
    return hits.sum(axis=0)


def test_intuition_masses_and_frequencies():
    spec = DistributionSpec("intuition_gamma", 3, {"gamma": 0.1})
    atoms, probs = discrete_law(spec)
    np.testing.assert_allclose([float(p) for p in probs], [0.35, 0.65 / 3, 0.65 / 3, 0.65 / 3])
    assert sum(probs) == 1
    n = 100_000
    X = sample(spec, n, 0)
    for c, p in zip(atom_counts(X, atoms), probs):
        assert binomial_band(c, n, float(p))


def test_intuition_gamma_zero_is_uniform():
    _, probs = discrete_law(DistributionSpec("intuition_gamma", 5, {"gamma": 0.0}))
    assert probs == [Fraction(1, 6)] * 6


def test_heavytailed_masses():
    d, eps = 5, 0.3
    _, probs = discrete_law(DistributionSpec("heavytailed_lb", d, {"index": 2, "eps": eps}))
    e2 = Fraction(eps) ** 2
    assert probs[1] == e2 / d ** 2
    assert all(probs[j] == e2 / d for j in (0, 2, 3, 4))
    assert sum(probs) == 1


def test_heavytailed_eps():
    assert heavytailed_eps(1000, 4, 0.001) == pytest.approx(0.25 * math.sqrt(4 * math.log(250) / (1000 * math.log(4))))
    assert heavytailed_eps(1000, 4, 0.001) == pytest.approx(0.0316, abs=5e-5)
    assert heavytailed_eps(4000, 4, 0.001) == pytest.approx(heavytailed_eps(1000, 4, 0.001) / 2)
    n = 100
    assert heavytailed_eps(n, 2, 1 / (2 * math.e)) == pytest.approx(0.25 * math.sqrt(2 / (n * math.log(2))))
    with pytest.raises(ValueError):
        heavytailed_eps(100, 4, 0.25)


def test_heavytailed_cov_dominated():
    for i in (1, 3):
        spec = DistributionSpec("heavytailed_lb", 4, {"index": i, "eps": 0.4})
        gap = heavytailed_bound(spec) - moments(spec).cov
        assert np.linalg.eigvalsh(gap)[0] >= -1e-12


def test_moments_point_mass():
    spec = DistributionSpec("custom_discrete", 2, {"atoms": [[1.0, 2.0]], "probs": [1.0]})
    mom = moments(spec)
    np.testing.assert_array_equal(mom.mean, [1.0, 2.0])
    np.testing.assert_array_equal(mom.cov, np.zeros((2, 2)))
    assert not mom.nonsingular


def test_moments_match_monte_carlo():
    spec = DistributionSpec("intuition_gamma", 2, {"gamma": 0.0})
    mom = moments(spec)
    np.testing.assert_allclose(mom.mean, [1 / 3, 1 / 3])
    np.testing.assert_allclose(mom.cov, np.eye(2) / 3 - np.full((2, 2), 1 / 9))
    X = sample(spec, 1_000_000, 3)
    np.testing.assert_allclose(np.cov(X.T, bias=True), mom.cov, atol=5e-3)


def test_breakdown_cov_floor():
    spec = breakdown_family(5, 0.7)[2]
    sigma = 1 / (2 * 5 * 0.7)
    assert spec.noise == pytest.approx(sigma)
    assert np.linalg.eigvalsh(moments(spec).cov)[0] >= sigma ** 2 - 1e-12


def test_breakdown_mixture_identity():
    d = 5
    fam = breakdown_family(d, 1.0)
    assert len(fam) == d + 2
    _, p0 = discrete_law(fam[0])
    for i in range(1, d + 1):
        _, pi = discrete_law(fam[i])
        point = [Fraction(int(j == i - 1)) for j in range(d + 1)]
        assert mixture_holds(p0, pi, point, Fraction(1, d + 1))
    _, plast = discrete_law(fam[d + 1])
    assert plast[-1] == 0


def test_quant_parameters():
    spec = quant_family(4, 0.1)[1]
    r = 0.5 * math.sqrt(0.4 / 0.6)
    assert r == pytest.approx(0.4082, abs=1e-4)
    assert spec.noise == pytest.approx(0.1 / (4 * r))
    assert spec.noise == pytest.approx(0.06124, abs=1e-5)


def test_quant_masses():
    d, eta = 5, 0.05
    fam = quant_family(d, eta)
    _, pi = discrete_law(fam[2])
    e = Fraction(eta)
    assert pi[1] == 0
    assert all(pi[j] == Fraction(d, d - 1) * e for j in (0, 2, 3, 4))
    assert pi[-1] == 1 - d * e
    assert sum(pi) == 1


def test_quant_replacement_identity():
    d, eta = 6, 0.04
    fam = quant_family(d, eta)
    _, p0 = discrete_law(fam[0])
    e = Fraction(eta)
    for i in range(1, d + 1):
        _, pi = discrete_law(fam[i])
        q = [Fraction(0) if j == i - 1 or j == d else Fraction(1, d - 1) for j in range(d + 1)]
        delta = [Fraction(int(j == i - 1)) for j in range(d + 1)]
        assert [a + e * (b - c) for a, b, c in zip(pi, delta, q)] == p0
        # the Huber form with weight eta does not hold for these masses
        assert not mixture_holds(p0, pi, delta, e)


def test_family_parameter_checks():
    with pytest.raises(ValueError):
        breakdown_family(3, 1.0)
    with pytest.raises(ValueError):
        quant_family(4, 0.25)


def test_sampling_mean_converges():
    specs = [DistributionSpec("intuition_gamma", 4, {"gamma": 0.02, "noise": 0.3}),
             breakdown_family(4 + 1, 1.0)[0], quant_family(5, 0.05)[3],
             DistributionSpec("gaussian", 3, {"mean": [1.0, 2.0, 3.0], "cov": np.diag([1.0, 4.0, 0.25])})]
    n = 1_000_000
    for spec in specs:
        mom = moments(spec)
        hits = total = 0
        for seed in range(4):
            X = sample(spec, n, seed)
            sd = np.sqrt(np.diag(mom.cov) / n)
            hits += int(np.sum(np.abs(X.mean(axis=0) - mom.mean) <= 5 * sd))
            total += spec.d
        assert hits >= 0.99 * total


def test_rademacher_noise_symmetric():
    spec = DistributionSpec("custom_discrete", 3, {"atoms": [[0.0, 0.0, 0.0]], "probs": [1.0], "noise": 1.0})
    n = 50_000
    X = sample(spec, n, 4)
    assert set(np.unique(X).tolist()) == {-1.0, 1.0}
    assert np.all(np.abs(X.mean(axis=0)) <= 5 / math.sqrt(n))


def test_sampling_deterministic():
    spec = DistributionSpec("intuition_gamma", 3, {"gamma": 0.05, "noise": 0.1})
    np.testing.assert_array_equal(sample(spec, 100, 7), sample(spec, 100, 7))


def test_spec_validation():
    with pytest.raises(ValueError):
        DistributionSpec("pareto", 2)
    with pytest.raises(ValueError):
        DistributionSpec("intuition_gamma", 3, {"gamma": 0.9})  # negative masses
    with pytest.raises(ValueError):
        DistributionSpec("custom_discrete", 1, {"atoms": [[0.0], [1.0]], "probs": [0.5, 0.6]})


def test_spec_roundtrip():
    spec = DistributionSpec("quant_lb", 5, {"index": 2, "eta": 0.05})
    assert DistributionSpec.from_dict(spec.to_dict()) == spec
    c = ContaminationSpec("huber_mix", 0.1, {"distribution": spec})
    assert ContaminationSpec.from_dict(c.to_dict()) == c


def test_contaminate_none():
    X = np.random.default_rng(0).standard_normal((20, 2))
    Y, idx = contaminate(X, ContaminationSpec(), 1)
    np.testing.assert_array_equal(X, Y)
    assert idx.size == 0


def test_contaminate_replace_count():
    X = np.random.default_rng(1).standard_normal((100, 3))
    c = ContaminationSpec("replace", 0.1, {"strategy": "point_mass_at", "point": [1.0, 0.0, 0.0]})
    Y, idx = contaminate(X, c, 2)
    assert idx.size == 10
    assert np.sum(np.all(Y == [1.0, 0.0, 0.0], axis=1)) == 10


def test_contaminate_far_along_min_variance():
    spec = DistributionSpec("gaussian", 2, {"cov": [[4.0, 0.0], [0.0, 0.25]]})
    X = sample(spec, 50, 3)
    c = ContaminationSpec("replace", 0.2, {"strategy": "far_along_min_variance", "scale": 10.0})
    Y, idx = contaminate(X, c, 4, base=spec)
    np.testing.assert_allclose(np.abs(Y[idx]), np.tile([0.0, 5.0], (10, 1)), atol=1e-12)


def test_huber_mix_frequency():
    d = 4
    clean = DistributionSpec("gaussian", d)
    point = DistributionSpec("custom_discrete", d, {"atoms": [np.eye(d)[1]], "probs": [1.0]})
    n, eta = 100_000, 1 / (d + 1)
    Y, idx = contaminate(sample(clean, n, 5), ContaminationSpec("huber_mix", eta, {"distribution": point}), 6)
    hits = int(np.sum(np.all(Y == np.eye(d)[1], axis=1)))
    assert hits == idx.size
    assert binomial_band(hits, n, eta)

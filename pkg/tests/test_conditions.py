import math

import numpy as np
import pytest

from wnilab.conditions import (EnvelopeNotStrict, InverseRelationViolated,
                               glued_condition, gm_power_range,
                               hardy_pair_condition, lorentz_necessity_condition,
                               oinarov_check, power_hardy_verdict,
                               power_pair_verdict_analytic, power_pitt_range,
                               special_case_222, vanishing_moment_range)
from wnilab.kernels import PowerEnvelope, custom_kernel, model_min_kernel
from wnilab.transforms import (MissingPrimitiveBound, NoSeriesKernel, cosine,
                               hankel, model_min, scripth, sine)
from wnilab.weights import ExponentSet, Weight

ES22 = ExponentSet(p=2.0, q=2.0, a=1.0)


def _hankel0_weights(beta, gamma):
    # The two-factor setting of the Hankel transform of order 0:
    # s = w = x^(2a+1) = x, u = y^(-beta q), v = x^(gamma p).
    return (Weight.power(-2.0 * beta), Weight.power(2.0 * gamma),
            Weight.power(1.0), Weight.power(1.0))


def test_hardy_pair_hankel_setting_inside():
    u, v, s, w = _hankel0_weights(0.25, 0.25)
    r1, r2 = hardy_pair_condition(u, v, s, w, ES22)
    assert r1.finite and r2.finite
    # Pure powers on the relation: the product is constant, sup = 2 exactly.
    assert r1.sup_value == pytest.approx(2.0, rel=1e-6)
    assert r2.sup_value == pytest.approx(2.0, rel=1e-6)


def test_hardy_pair_endpoint_divergence():
    u, v, s, w = _hankel0_weights(0.5, 0.25)
    r1, _ = hardy_pair_condition(u, v, s, w, ES22)
    assert r1.verdict == "divergent"
    assert r1.divergence_site == "inner-integral endpoint"


def test_hardy_pair_model_setting():
    # s = w = x^delta with delta = 1 and beta = gamma = 0.25: finite, and
    # the sup is stable to 2% under scan-grid refinement.
    u = Weight.power(-0.5)
    v = Weight.power(0.5)
    sw = Weight.power(1.0)
    r1, r2 = hardy_pair_condition(u, v, sw, sw, ES22)
    assert r1.finite and r2.finite
    assert len(r1.scan_trace) >= 50
    r1d, r2d = hardy_pair_condition(u, v, sw, sw, ES22, scan_points=120)
    assert abs(r1d.sup_value - r1.sup_value) / r1.sup_value < 0.02
    assert abs(r2d.sup_value - r2.sup_value) / r2.sup_value < 0.02


def test_scan_sup_scale_invariance():
    # Replacing u(y) by u(lam y) scales the first supremum by lam^(-beta);
    # the verdict is unchanged.
    beta, lam = 0.25, 7.0
    u, v, s, w = _hankel0_weights(beta, 0.25)
    u_scaled = Weight.power(-2.0 * beta, coefficient=lam ** (-2.0 * beta))
    r1, _ = hardy_pair_condition(u, v, s, w, ES22)
    r1s, _ = hardy_pair_condition(u_scaled, v, s, w, ES22)
    assert r1s.finite == r1.finite
    assert r1s.sup_value / r1.sup_value == pytest.approx(lam ** -beta, rel=1e-6)


def test_divergent_verdict_monotone_in_u():
    u, v, s, w = _hankel0_weights(0.5, 0.25)
    bigger_u = Weight.power(-1.0, coefficient=2.0)
    r1, _ = hardy_pair_condition(bigger_u, v, s, w, ES22)
    assert r1.verdict == "divergent"


def test_glued_matches_pair_and_duality_check():
    u, v, s, w = _hankel0_weights(0.25, 0.25)
    g = glued_condition(u, v, s, w, ES22)
    assert g.finite
    with pytest.raises(InverseRelationViolated):
        glued_condition(u, v, Weight.power(1.0), Weight.power(2.0), ES22)
    # Divergent case carries over.
    u2, v2, s2, w2 = _hankel0_weights(0.5, 0.25)
    assert glued_condition(u2, v2, s2, w2, ES22).verdict == "divergent"
    with pytest.raises(ValueError):
        glued_condition(u, v, s, w, ExponentSet(p=2, q=2, a=2.0))


def _random_piecewise_tuple(rng, q, p_prime, delta):
    """Piecewise-power weights with analytic margins away from every
    verdict boundary, plus the known pair verdict."""
    lo = 1.0 / q - 0.5 * delta
    hi = 1.0 / q
    rel = 1.0 / q - 1.0 / p_prime
    case = rng.integers(0, 4)
    def draw_inside():
        return rng.uniform(lo + 0.12, hi - 0.12)
    b1, b2 = draw_inside(), draw_inside()
    g1, g2 = b1 - rel, b2 - rel
    expected = True
    if case == 1:      # second component beyond the upper endpoint
        b2 = hi + rng.uniform(0.12, 0.8)
        g2 = b2 - rel
        expected = False
    elif case == 2:    # first component below the lower endpoint
        b1 = lo - rng.uniform(0.12, 0.8)
        g1 = b1 - rel
        expected = False
    elif case == 3:    # exponent relation broken: sup grows without bound.
        # The growth detector resolves exponents above log10(1.5) = 0.176
        # per decade, so keep the break clear of that threshold.
        off = rng.choice([-1.0, 1.0]) * rng.uniform(0.25, 0.7)
        g1, g2 = b1 - rel - off, b2 - rel - off
        expected = False
    u = Weight.piecewise_power(-b2 * q, -b1 * q)
    v = Weight.piecewise_power(g1 * (p_prime / (p_prime - 1.0)),
                               g2 * (p_prime / (p_prime - 1.0)))
    return u, v, expected


def test_gluing_equivalence_randomized():
    # On tuples satisfying the s-w duality, the glued verdict equals the
    # conjunction of the pair verdicts.
    rng = np.random.default_rng(20260808)
    agreements = 0
    for _ in range(20):
        q = rng.choice([1.5, 2.0, 2.5])
        p = rng.uniform(1.3, q)
        exps = ExponentSet(p=float(p), q=float(q), a=1.0)
        delta = rng.uniform(0.8, 2.5)
        sw = Weight.power(float(delta))
        u, v, expected = _random_piecewise_tuple(rng, exps.q, exps.p_prime, delta)
        r1, r2 = hardy_pair_condition(u, v, sw, sw, exps)
        pair = r1.finite and r2.finite
        g = glued_condition(u, v, sw, sw, exps)
        assert g.finite == pair
        assert pair == expected
        agreements += 1
    assert agreements == 20


def test_special_case_222():
    u = Weight.power(-0.5)
    v = Weight.power(0.5)
    sw = Weight.power(1.0)
    rep = special_case_222(u, v, sw, sw)
    assert "experimental" in rep.label
    assert rep.finite


def test_lorentz_condition_examples():
    ones = Weight.power(0.0)
    rep = lorentz_necessity_condition(ones, ones, ones, ES22)
    assert rep.finite
    assert rep.sup_value == pytest.approx(1.0, rel=1e-6)

    # Hankel-consistent powers inside the range: the Lorentz inequality
    # compares Ff and f directly, so v carries the full exponent
    # gamma = beta + 2a + 1 - 1/q + 1/p' (= 1.25 at beta = 0.25, a = 0).
    rep = lorentz_necessity_condition(Weight.power(-0.5), Weight.power(2.5),
                                      Weight.power(1.0), ES22)
    assert rep.finite

    # beta = 1/q endpoint: the inner u integral is log-divergent.
    rep = lorentz_necessity_condition(Weight.power(-1.0), Weight.power(0.5),
                                      Weight.power(1.0), ES22)
    assert rep.verdict == "divergent"
    assert rep.divergence_site == "inner-integral endpoint"


def test_power_ranges_match_known_values():
    suff, sharp = power_pitt_range(hankel(0.0), ES22)
    assert (suff.lo, suff.hi) == (0.0, 0.5)
    assert (sharp.lo, sharp.hi) == (-0.5, 0.5)
    assert sharp.lo_closed and not sharp.hi_closed

    suff, sharp = power_pitt_range(sine(), ES22)
    assert (suff.lo, suff.hi) == (0.5, 1.5)
    assert (sharp.lo, sharp.hi) == (0.0, 1.5)

    suff, sharp = power_pitt_range(scripth(1.0), ES22)
    assert (suff.lo, suff.hi) == (1.0, 3.0)
    assert sharp is not None and sharp.sharp and (sharp.lo, sharp.hi) == (1.0, 3.0)

    suff, sharp = power_pitt_range(scripth(0.25), ES22)
    assert (suff.lo, suff.hi) == (0.5, 2.25)
    assert sharp is None

    with pytest.raises(EnvelopeNotStrict):
        power_pitt_range(cosine(), ES22)


def test_power_range_relation_offset():
    # Hankel relation: beta = gamma - 2a - 1 + 1/q - 1/p'.
    suff, _ = power_pitt_range(hankel(1.0), ExponentSet(p=2.0, q=4.0))
    assert suff.relation_offset == pytest.approx(-3.0 + 0.25 - 0.5)
    v = suff.query(beta=0.1, gamma=0.1 + 3.0 + 0.25)
    assert v.satisfied
    v = suff.query(beta=0.1, gamma=0.0)
    assert not v.satisfied


def test_gm_ranges_match_known_values():
    assert (lambda r: (r.lo, r.hi))(gm_power_range(sine(), ES22)) == (-0.5, 1.5)
    assert (lambda r: (r.lo, r.hi))(gm_power_range(hankel(0.0), ES22)) == (-1.0, 0.5)
    r = gm_power_range(scripth(0.0), ES22)
    assert (r.lo, r.hi) == (0.0, 2.0) and r.sharp
    r = gm_power_range(cosine(), ES22)
    assert (r.lo, r.hi) == (-0.5, 0.5)
    with pytest.raises(MissingPrimitiveBound):
        gm_power_range(model_min(1.0), ES22)


def test_vanishing_moment_ranges():
    r = vanishing_moment_range(hankel(1.0), 2, ES22)
    assert (r.lo, r.hi) == (0.5, 4.5)
    assert r.excluded == (2.5,)
    r = vanishing_moment_range(sine(), 1, ES22)
    assert (r.lo, r.hi) == (1.5, 3.5) and r.excluded == ()
    r = vanishing_moment_range(scripth(0.5), 1, ES22)
    assert (r.lo, r.hi) == (2.5, 4.5)
    with pytest.raises(NoSeriesKernel):
        vanishing_moment_range(model_min(1.0), 1, ES22)
    # Interior lattice points are excluded from satisfaction.
    r = vanishing_moment_range(hankel(1.0), 2, ES22, beta=2.5)
    assert not r.satisfied and r.indeterminate


def test_endpoint_indeterminate_flag():
    suff, _ = power_pitt_range(hankel(0.0), ES22, beta=0.48)
    assert suff.indeterminate
    suff, _ = power_pitt_range(hankel(0.0), ES22, beta=0.25)
    assert not suff.indeterminate and suff.satisfied


def test_scan_agrees_with_closed_form_relation_enforced():
    for spec in (hankel(0.0), sine(), scripth(1.0)):
        suff, _ = power_pitt_range(spec, ES22)
        for beta in (suff.lo - 0.2, suff.lo + 0.15, 0.5 * (suff.lo + suff.hi),
                     suff.hi - 0.15, suff.hi + 0.2):
            gamma = beta - suff.relation_offset
            r1, r2 = power_hardy_verdict(spec, ES22, beta, gamma)
            scan = r1.finite and r2.finite
            analytic = suff.query(beta, gamma).satisfied
            assert scan == analytic, (spec.name, beta)


def test_analytic_pair_predicate():
    # Pure power weights in the model setting: verdicts from exponents.
    fin1, fin2 = power_pair_verdict_analytic(-0.5, 0.5, 1.0, 1.0, ES22)
    assert fin1 and fin2
    fin1, _ = power_pair_verdict_analytic(-1.2, 0.7, 1.0, 1.0, ES22)
    assert fin1 is False
    # Within the endpoint tolerance nothing is asserted.
    fin1, _ = power_pair_verdict_analytic(-0.98, 0.5, 1.0, 1.0, ES22)
    assert fin1 is None


def test_oinarov_model_kernel_unbounded():
    # K = min{1, (xy)^-1}: required d grows like N^((a-b)/2) on the triples.
    rep = oinarov_check(model_min_kernel(2.0), n_grid=(10.0, 100.0, 1000.0),
                        ab_pairs=((2.0, 1.0),))
    assert rep.verdict == "unbounded"
    for d, n in zip(rep.d_required, (10.0, 100.0, 1000.0)):
        assert d == pytest.approx(math.sqrt(n), rel=0.05)


def test_oinarov_constant_kernel_bounded():
    const = custom_kernel(lambda x, y: np.ones_like(np.asarray(x * y, dtype=float)),
                          PowerEnvelope(0.0, 0.0, 0.0, 0.0))
    rep = oinarov_check(const)
    assert rep.verdict == "bounded"
    assert rep.feasible_d == pytest.approx(2.0)


def test_oinarov_exponential_kernel_diagnostic():
    # e^{-xy} on the same triples: the scan reports whatever it finds.
    expk = custom_kernel(lambda x, y: np.exp(-np.asarray(x * y, dtype=float)),
                         PowerEnvelope(0.0, 0.0, 0.0, 0.0))
    rep = oinarov_check(expk)
    assert rep.verdict in ("bounded", "unbounded")
    assert all(d >= 1.0 for d in rep.d_required)


def test_condition_report_serializes():
    u, v, s, w = _hankel0_weights(0.25, 0.25)
    r1, _ = hardy_pair_condition(u, v, s, w, ES22)
    d = r1.to_dict()
    assert d["verdict"] == "finite"
    assert isinstance(d["scan_trace"][0][0], float)

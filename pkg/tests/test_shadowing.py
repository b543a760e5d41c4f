from fractions import Fraction

import pytest

from k3cert import shadowing as SH
from k3cert.balls import BallContext, BallMat
from k3cert.errors import CertificationFailure, PreconditionError
from k3cert.surface import ChartSpec

CTX = BallContext(512)
ORBIT = SH.PseudoOrbit.bundled()


def test_ambient_derivative_bounds():
    df, d2f = SH.ambient_derivative_bounds(10, CTX)
    assert df.contains(9000)
    assert d2f.contains(81 * 200**3)
    df1, _ = SH.ambient_derivative_bounds(1, CTX)
    assert df1.contains(9)
    with pytest.raises(PreconditionError):
        SH.ambient_derivative_bounds(0, CTX)


def test_ledger_reproduces_table_maxima():
    led = SH.discriminant_ledger(ORBIT, CTX)
    assert abs(float(led.K.upper()) - 114.24) < 0.01
    assert abs(float(led.R.upper()) - 162.94) < 0.01
    assert abs(float(led.M_dd.upper()) - 441.48) < 0.01
    assert float(led.K.upper()) < 115
    assert float(led.R.upper()) < 163
    assert float(led.M_dd.upper()) < 442
    assert led.C1 == 115 and led.C2 == 442
    assert abs(float(led.min_D.lower()) - 8.59) < 0.01


def test_eps_zero_chain_collapses_to_base_maxima():
    zero = CTX.ball(0)
    led = SH.discriminant_ledger(ORBIT, CTX)
    sqrt2 = CTX.ball(2).sqrt()
    sup2 = sqrt2 * led.third_bound * zero + led.M_dd
    sup1 = sqrt2 * sup2 * zero + led.R
    sup0 = sqrt2 * sup1 * zero + led.K
    assert sup2.contains(led.M_dd) and sup1.contains(led.R) and sup0.contains(led.K)


def test_chart_bounds():
    led = SH.discriminant_ledger(ORBIT, CTX)
    # formula at C1=115, C2=442 comes out a hair above 120; the chain
    # only needs max(2 dp^2, d2p) <= 3e4
    assert float(led.dp_bound.upper()) <= 121
    assert float(led.d2p_bound.upper()) <= 2.5e4
    assert float(led.chart_jet_factor.upper()) < 7e4
    assert float(led.ambient_jet_factor.upper()) <= 3 * 81 * 200**3
    assert float(led.second_deriv.upper()) < 1.4e14


def test_chart_bound_formula_minimal_inputs():
    led = SH.BoundLedger(C1=1, C2=0)
    dp, d2p = SH.chart_derivative_bounds(led, CTX)
    assert dp.contains(Fraction(11, 2))
    assert d2p.contains(11)


def test_third_partial_bound_exceeds_printed_constant():
    t3 = SH.third_partial_bound()
    assert float(t3.lower()) > 2000
    assert float(t3.upper()) < 20000


def test_hyperbolicity_values():
    hyp = SH.hyperbolicity(ORBIT, CTX)
    assert abs(float(hyp.frobenius_inv.mid) - 19.8966) < 1e-3
    assert float(hyp.c_bound.upper()) < 21
    # the crude Gershgorin fallback must stay below the certified value
    assert hyp.gershgorin_sigma_lo <= 1 / Fraction(hyp.frobenius_inv.interval_fractions()[0])


def test_block_matrix_structure():
    blocks = ORBIT.jacobians(CTX)
    big = SH.build_cyclic_matrix(blocks, CTX)
    n = len(blocks)
    for i in range(n):
        for j in range(n):
            on_super = j == i + 1
            on_corner = i == n - 1 and j == 0
            for r in range(2):
                for c in range(2):
                    e = big[2 * i + r, 2 * j + c]
                    if not (on_super or on_corner):
                        assert e.mid == 0 and e.rad == 0


def test_scalar_block_c_bound():
    # n = 1, L_0 = 2I: the true norm ||(2I - I)^{-1}|| is 1; the
    # Frobenius route certifies it from above, overshooting by at most
    # the dimension factor sqrt(2)
    two = BallMat([[CTX.ball(2), CTX.ball(0)], [CTX.ball(0), CTX.ball(2)]])
    hyp = SH.c_bound_from_blocks([two], CTX)
    _, hi = hyp.c_bound.interval_fractions()
    assert 1 <= hi <= Fraction(143, 100)
    assert hyp.frobenius_inv.contains(CTX.ball(2).sqrt())


def test_determinant_product_near_one():
    blocks = ORBIT.jacobians(CTX)
    prod = blocks[-1]
    for i in range(len(blocks) - 2, -1, -1):
        prod = prod.matmul(blocks[i])
    det = prod[0, 0] * prod[1, 1] - prod[0, 1] * prod[1, 0]
    lo, hi = det.interval_fractions()
    assert lo <= 1 <= hi or abs(float(det.mid) - 1) < 1e-6
    assert abs(float(det.mid) - 1) < 1e-6


def test_certificate_passes_and_serializes():
    cert = SH.certify(ORBIT, CTX)
    assert cert.passed
    assert cert.delta == Fraction(1, 10**29)
    assert abs(float(cert.threshold) / 3.97e-21 - 1) < 0.02
    assert cert.localization < Fraction(1, 10**26)
    js = cert.to_json()
    assert js["passed"] and SH.recheck(js)


def test_perturbed_orbit_fails_hypothesis_3():
    charts = list(ORBIT.charts)
    c = charts[0]
    charts[0] = ChartSpec(c.axis, c.branch, c.a + Fraction(1, 1000), c.b)
    with pytest.raises(CertificationFailure) as exc:
        SH.certify(SH.PseudoOrbit(charts), CTX)
    assert exc.value.hypothesis == "(3)"


def test_error_model_closed_form():
    em = SH.error_model(500)
    r = Fraction(1, 2**499)
    assert em["delta_alpha"] == 2000 * r
    assert em["delta_D"] == 10**6 * r
    assert em["delta_p"] == Fraction(16, 10) * 10**6 * r
    assert em["delta_sigma"] == 20014 * r
    assert em["delta_f"] == 111 * em["delta_sigma"]
    assert em["delta_fc"] == 4 * 10**6 * r
    assert float(em["delta_fc"]) < 2.5e-144
    with pytest.raises(PreconditionError):
        SH.error_model(33)
    em34 = SH.error_model(34)
    assert abs(float(em34["delta_fc"]) - 4.66e-4) < 1e-5


def test_error_model_monotone_in_precision():
    prev = None
    for n in (34, 64, 128, 256, 512, 1024):
        val = SH.error_model(n)["delta_fc"]
        if prev is not None:
            assert val < prev
        prev = val


def test_residual_radii_dominated_by_model():
    out = SH.residual_radius_check(ORBIT)
    for n, (worst, model, ok) in out.items():
        assert ok, f"N={n}: radius {float(worst)} above model {float(model)}"


def test_coordinate_range_bound():
    enc = SH.coordinate_range_bound(Fraction(1, 20))
    lo, hi = float(enc.lower()), float(enc.upper())
    assert 2.25 <= lo <= hi <= 2.35
    coarse = SH.coordinate_range_bound(Fraction(2, 10))
    assert float(coarse.upper()) <= 2.5
    # the resultant boundary points sit well inside the range
    assert (1 + 2**0.5) ** 0.5 < lo


def test_higher_precision_never_weakens():
    # enclosures shrink with precision; certified inequalities persist
    small = BallContext(128)
    cert_small = SH.certify(SH.PseudoOrbit.bundled(), small, delta_target=Fraction(1, 10**22))
    cert_big = SH.certify(SH.PseudoOrbit.bundled(), CTX, delta_target=Fraction(1, 10**22))
    assert cert_small.passed and cert_big.passed
    r_small = max(b.rad_fraction() for b in cert_small.residual_balls)
    r_big = max(b.rad_fraction() for b in cert_big.residual_balls)
    assert r_big < r_small

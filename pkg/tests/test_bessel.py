"""Bessel routes: series with certified bounds, reference quadrature,
regime dispatch, and the envelope certification scan.

mpmath's own bessel evaluators (hypergeometric engine) serve as the
independent oracle; the package reference is pure quadrature, so agreement
is meaningful.
"""

import json
import math
import random
import time

import mpmath as mp
import pytest

from supnormlab.bessel import (
    DECAY_SMALL, FAR_OSCILLATORY, GAP_SMALL, OSCILLATORY, SERIES_SMALL,
    TRANSITION, bessel_j, bessel_langer, bessel_ref, bessel_series,
    certify_regime_bounds, classify_regime, series_majorant_log,
)
from supnormlab.errors import AccuracyError

mp.mp.dps = 30


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_series_pins():
    assert _rel(bessel_series("J", 0.5, math.pi / 2, terms=40).value, 2 / math.pi) < 1e-12
    # 30-term alternating sum, written out independently of the module
    acc = 0.0
    for m in range(29, -1, -1):
        acc += (-1) ** m * 0.25 ** m / (math.factorial(m) * math.factorial(m + 1))
    acc *= 0.5
    assert _rel(bessel_series("J", 1.0, 1.0, terms=40).value, acc) < 1e-14
    assert _rel(bessel_series("I", 0.5, 1.0, terms=40).value,
                math.sqrt(2 / math.pi) * math.sinh(1.0)) < 1e-13
    assert _rel(bessel_series("K", 0.5, 1.0, terms=40).value,
                math.sqrt(math.pi / 2) * math.exp(-1.0)) < 1e-12


def test_series_error_bound_honest():
    sv = bessel_series("J", 2.5, 6.0, terms=10)
    true = float(mp.besselj(2.5, 6.0))
    assert abs(sv.value - true) <= sv.error_bound.to_float() * (1 + 1e-6) + 1e-300
    tight = bessel_series("J", 2.5, 6.0, terms=40)
    assert tight.error_bound.to_float() < 1e-20
    # the bound certifies truncation; roundoff under cancellation adds ~1e-13
    assert _rel(tight.value, true) < 1e-11


def test_series_not_geometric_raises():
    with pytest.raises(AccuracyError):
        bessel_series("J", 0.5, 30.0, terms=10)
    with pytest.raises(AccuracyError):
        bessel_series("I", 0.5, 40.0, terms=5)
    # the reflection path lifts the cutoff past the order on its own
    got = bessel_series("Y", 80.5, 1.0, terms=10)
    assert got.terms_used >= 90


def test_series_underflow_keeps_log_value():
    sv = bessel_series("J", 200.25, 1.0, terms=40)
    assert sv.value == 0.0
    first = 200.25 * math.log(0.5) - math.lgamma(201.25)
    assert sv.log_value.sign == 1
    # the first term dominates; later terms shift the log by ~x^2/(4 rho)
    assert abs(sv.log_value.log_abs - first) < 0.01
    # relative truncation is still certified tiny
    assert sv.error_bound.log_abs - sv.log_value.log_abs < -40


def test_series_reflection_vs_mpmath():
    assert _rel(bessel_series("Y", 0.3, 0.7, terms=40).value,
                float(mp.bessely(0.3, 0.7))) < 1e-12
    assert _rel(bessel_series("K", 3.25, 0.5, terms=40).value,
                float(mp.besselk(3.25, 0.5))) < 1e-12
    # integer order goes through the straddled average
    assert _rel(bessel_series("Y", 2.0, 1.1, terms=40).value,
                float(mp.bessely(2, 1.1))) < 1e-9
    assert _rel(bessel_series("K", 0.0, 0.8, terms=40).value,
                float(mp.besselk(0, 0.8))) < 1e-9


def test_ref_vs_mpmath_j():
    for rho, x in [(0.0, 1.0), (0.5, math.pi / 2), (3.0, 7.0), (12.25, 10.0),
                   (40.0, 35.0), (40.0, 45.0), (7.0, 300.0), (100.5, 90.0)]:
        assert _rel(bessel_ref("J", rho, x), float(mp.besselj(rho, x))) < 1e-10


def test_ref_vs_mpmath_y():
    for rho, x in [(0.5, 1.0), (2.0, 5.0), (10.5, 8.0), (0.0, 2.2)]:
        assert _rel(bessel_ref("Y", rho, x), float(mp.bessely(rho, x))) < 1e-9


def test_ref_vs_mpmath_i():
    for rho, x in [(0.0, 1.0), (2.5, 3.0), (15.0, 2.0), (1.0, 80.0), (-0.3, 0.44)]:
        assert _rel(bessel_ref("I", rho, x), float(mp.besseli(rho, x))) < 1e-10


def test_ref_vs_mpmath_k():
    for rho, x in [(0.5, 1.0), (3.25, 0.5), (10.0, 20.0), (0.0, 1.3)]:
        assert _rel(bessel_ref("K", rho, x), float(mp.besselk(rho, x))) < 1e-10


def test_ref_half_order_closed_forms():
    x = 2.3
    assert _rel(bessel_ref("J", 0.5, x),
                math.sqrt(2 / (math.pi * x)) * math.sin(x)) < 1e-11
    x = 1.7
    assert _rel(bessel_ref("Y", 0.5, x),
                -math.sqrt(2 / (math.pi * x)) * math.cos(x)) < 1e-11
    x = 0.9
    assert _rel(bessel_ref("I", 0.5, x),
                math.sqrt(2 / (math.pi * x)) * math.sinh(x)) < 1e-11


def test_ref_underflow_certified():
    t0 = time.time()
    assert bessel_ref("J", 300.0, 3.0) == 0.0
    assert time.time() - t0 < 1.0  # the majorant guard, not a deep quadrature
    assert series_majorant_log(300.0, 3.0) / math.log(10) < -330


def test_ref_validation():
    with pytest.raises(ValueError):
        bessel_ref("Q", 1.0, 1.0)
    with pytest.raises(ValueError):
        bessel_ref("J", 1.0, -1.0)
    with pytest.raises(ValueError):
        bessel_ref("Y", 1.0, 0.0)
    with pytest.raises(ValueError):
        bessel_ref("Y", -2.5, 1.0)
    with pytest.raises(ValueError):
        bessel_ref("J", 1.0, 3.0e4)
    assert bessel_ref("J", 0.0, 0.0) == 1.0
    assert bessel_ref("I", 2.0, 0.0) == 0.0


def test_classify_pinned_tags():
    assert classify_regime(100.0, 3.0).tag == SERIES_SMALL
    assert classify_regime(100.0, 80.0).tag == DECAY_SMALL
    assert classify_regime(100.0, 93.0).tag == GAP_SMALL
    assert classify_regime(100.0, 99.0).tag == TRANSITION
    assert classify_regime(100.0, 103.0).tag == TRANSITION
    assert classify_regime(100.0, 200.0).tag == OSCILLATORY
    assert classify_regime(2.0, 1000.0).tag == FAR_OSCILLATORY
    assert classify_regime(0.0, 0.0).tag == SERIES_SMALL


def test_classify_partitions_quadrant():
    rng = random.Random(7)
    for _ in range(300):
        rho = rng.uniform(0.0, 300.0)
        x = rng.uniform(0.0, 1.0e4)
        reg = classify_regime(rho, x)
        th = reg.thresholds
        # recompute the tag from the thresholds alone
        if 2 * x * x <= rho:
            want = SERIES_SMALL
        elif x <= th["decay"]:
            want = DECAY_SMALL
        elif x <= th["gap"]:
            want = GAP_SMALL
        elif x <= th["transition"]:
            want = TRANSITION
        elif x <= th["oscillatory"]:
            want = OSCILLATORY
        else:
            want = FAR_OSCILLATORY
        assert reg.tag == want
    th = classify_regime(50.0, 1.0).thresholds
    assert th["series"] < th["decay"] < th["gap"] < th["transition"] < th["oscillatory"]


def test_dispatcher_matches_reference():
    for rho, x in [(12.0, 3.0), (100.0, 80.0), (100.0, 98.0), (100.0, 100.5),
                   (100.0, 140.0), (3.0, 2000.0), (0.5, 0.2), (40.0, 40.0)]:
        j = bessel_j(rho, x)
        ref = bessel_ref("J", rho, x)
        assert abs(j - ref) <= 1e-9 * abs(ref) + 1e-300
    # certified underflow on both routes
    assert bessel_j(250.0, 9.0) == 0.0 == bessel_ref("J", 250.0, 9.0)
    with pytest.raises(ValueError):
        bessel_j(-1.0, 1.0)
    with pytest.raises(ValueError):
        bessel_j(1.0, -1.0)


def test_langer_error_decays():
    errs = {}
    for rho in (30.0, 120.0):
        cube = rho ** (1 / 3)
        for u in (-2.0, 2.0):
            x = rho + u * cube
            err = abs(bessel_langer(rho, x) - bessel_ref("J", rho, x))
            assert err * rho ** (4 / 3) < 0.01
            errs[(rho, u)] = err
    assert errs[(120.0, -2.0)] < errs[(30.0, -2.0)]
    assert errs[(120.0, 2.0)] < errs[(30.0, 2.0)]
    with pytest.raises(ValueError):
        bessel_langer(50.0, 50.0)


def test_certify_report():
    rep = certify_regime_bounds(rho_values=(8.0, 16.0, 32.0),
                                langer_rho_values=(30.0,),
                                points_per_band=6)
    assert rep.passed
    assert rep.suite == "bessel_regimes"
    assert len(rep.rows) > 100
    assert 0.3 < rep.fitted_constant < 1.5
    names = {r.name for r in rep.rows}
    for want in ("series_small", "decay_small", "gap_small", "transition",
                 "oscillatory_alpha", "series_majorant", "seam_agreement", "langer"):
        assert want in names
    # serialization is deterministic and schema-stable
    assert rep.to_csv_text() == rep.to_csv_text()
    assert rep.to_csv_text().splitlines()[0] == "name,k,y,x,lhs,envelope,ratio"
    blob = json.loads(rep.to_json_text())
    assert set(blob) == {"suite", "max_ratio", "argmax", "fitted_constant", "passed"}
    assert set(blob["argmax"]) == {"k", "y", "x"}
    assert blob["passed"] is True
    assert rep.to_json_text().startswith('{"suite": "bessel_regimes", "max_ratio": ')

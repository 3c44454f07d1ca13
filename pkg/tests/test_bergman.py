"""Tests for the reproducing kernel, its diagonal, and the crude majorant."""

import dataclasses
import math
import random

import numpy as np
import pytest

from supnormlab.bergman import (basis_sum_diag, crude_majorant,
                                crude_majorant_scan, diag_grid, kernel,
                                reproduce_check)
from supnormlab.errors import BudgetError
from supnormlab.forms import delta_form, eta_power_form, eval_form
from supnormlab.modgroup import GroupElement, IDENTITY, S, U, parse_group
from supnormlab.multiplier import MultiplierSystem

# see tests/test_numerics.py for the provenance of this value
DELTA_NORM = 1.0353620573e-06

FULL = parse_group("full")
TRIV12 = MultiplierSystem.trivial(12)


def _normalized_delta():
    delta = delta_form()
    s = math.sqrt(DELTA_NORM)
    return dataclasses.replace(delta, coeffs=tuple(c / s for c in delta.coeffs))


def test_diag_matches_expansion_route():
    """Kernel diagonal equals |Delta|^2 / <Delta, Delta> in weight 12."""
    delta = delta_form()
    for z in (1.0j, 0.5 + 1.0j, 0.3 + 1.4j, 2.5j):
        lhs = basis_sum_diag(FULL, TRIV12, IDENTITY, z, tol=1e-12)
        rhs = abs(eval_form(delta, z)) ** 2 / DELTA_NORM
        assert abs(lhs - rhs) < 1e-8 * rhs


def test_kernel_modularity():
    w = 0.2 + 1.1j
    rng = random.Random(7)
    mats = [S, GroupElement(2, 1, 1, 1), GroupElement(1, -2, 0, 1) @ S]
    for _ in range(3):
        a, b = rng.randint(-2, 2), rng.randint(-2, 2)
        mats.append(GroupElement(1, a, 0, 1) @ S @ GroupElement(1, b, 0, 1))
    for tau in mats:
        z = 0.31 + 0.9j
        moved = kernel(FULL, TRIV12, tau.act(z), w, tol=1e-12)
        base = kernel(FULL, TRIV12, z, w, tol=1e-12)
        nu = TRIV12.nu(tau, z)
        assert abs(moved.value - nu * base.value) <= 1e-8 * abs(moved.value)


def test_kernel_modularity_subgroup():
    g02 = parse_group("gamma0:2")
    sys = MultiplierSystem.trivial(12, g02)
    tau = GroupElement(1, 0, 2, 1)
    z = 0.1 + 1.2j
    w = 1.0j
    moved = kernel(g02, sys, tau.act(z), w, tol=1e-11)
    base = kernel(g02, sys, z, w, tol=1e-11)
    nu = sys.nu(tau, z)
    assert abs(moved.value - nu * base.value) <= 1e-8 * abs(moved.value)


def test_kernel_refinement_stability():
    coarse = kernel(FULL, TRIV12, 1.0j, 1.0j, tol=1e-6)
    fine = kernel(FULL, TRIV12, 1.0j, 1.0j, tol=1e-8)
    assert abs(fine.value) > 0
    assert abs(coarse.value - fine.value) < 1e-6 * abs(fine.value)
    assert fine.tail_bound < coarse.tail_bound
    assert fine.truncation_radius > coarse.truncation_radius
    assert abs(math.exp(fine.log_mag) - abs(fine.value)) < 1e-12


def test_kernel_guards():
    with pytest.raises(ValueError):
        kernel(FULL, MultiplierSystem.trivial(2), 1.0j, 1.0j)
    with pytest.raises(ValueError):
        kernel(FULL, TRIV12, 1.0j, 0.5 - 1.0j)
    with pytest.raises(ValueError):
        kernel(FULL, TRIV12, 0.5 - 1.0j, 1.0j)
    with pytest.raises(BudgetError):
        kernel(FULL, TRIV12, 0.3 + 0.9j, 1.0j, tol=1e-12, max_rows=10)


def test_diag_scaling_invariance_full_group():
    # on the full group a scaled basis spans the same space, so the
    # diagonal sum cannot depend on the scaling element
    for z in (0.2 + 1.1j, 1.5j):
        base = basis_sum_diag(FULL, TRIV12, IDENTITY, z, tol=1e-12)
        moved = basis_sum_diag(FULL, TRIV12, S, z, tol=1e-12)
        assert abs(base - moved) < 1e-9 * base
        shifted = basis_sum_diag(FULL, TRIV12, U @ S, z, tol=1e-12)
        assert abs(base - shifted) < 1e-9 * base


def test_diag_subgroup_runs_positive():
    g02 = parse_group("gamma0:2")
    sys = MultiplierSystem.trivial(12, g02)
    for tau in (IDENTITY, S):
        val = basis_sum_diag(g02, sys, tau, 0.25 + 1.3j, tol=1e-12)
        assert val > 0.0
        assert math.isfinite(val)


def test_diag_grid_matches_pointwise():
    zs = np.array([0.1 + 1.0j, 1.3j, -0.3 + 2.0j])
    grid = diag_grid(FULL, TRIV12, IDENTITY, zs, tol=1e-11)
    for zi, gi in zip(zs, grid):
        assert abs(gi - basis_sum_diag(FULL, TRIV12, IDENTITY, zi, tol=1e-11)) \
            < 1e-10 * gi


def test_reproduce_probes():
    f = _normalized_delta()
    for w in (1.0j, 2.0j, 0.5 + 1.0j, -1.0 / 3.0 + 1.5j, 3.0j):
        lhs, rhs = reproduce_check(f, w, tol=1e-6)
        assert abs(lhs - rhs) <= 1e-3 * abs(rhs)


def test_reproduce_linearity():
    f = _normalized_delta()
    doubled = dataclasses.replace(f, coeffs=tuple(2 * c for c in f.coeffs))
    lhs1, rhs1 = reproduce_check(f, 1.0j, tol=1e-8)
    lhs2, rhs2 = reproduce_check(doubled, 1.0j, tol=1e-8)
    assert abs(lhs2 - 2.0 * lhs1) < 1e-8 * abs(lhs2)
    assert abs(rhs2 - 2.0 * rhs1) < 1e-12 * abs(rhs2)


def test_reproduce_rejects_low_weight():
    with pytest.raises(ValueError):
        reproduce_check(eta_power_form(4), 1.0j)  # weight 2


def test_crude_majorant_dominates_diagonal():
    """The absolute sum majorizes y^k |kernel| for the trivial system."""
    for z in (1.0j, 0.5 + 1.2j):
        m_val, m_tail = crude_majorant(z, 12.0, tol=1e-8)
        kv = kernel(FULL, TRIV12, z, -z.conjugate(), tol=1e-10)
        lhs = z.imag ** 12 * (abs(kv.value) - kv.tail_bound)
        assert m_val + m_tail >= lhs


def test_crude_majorant_scan_structure():
    rep = crude_majorant_scan(ks=(6.0, 12.0), y_values=(1.0, 4.0, 16.0),
                              x_values=(0.0, 0.5))
    assert len(rep.rows) == 12
    assert rep.fitted_constant == max(r.ratio for r in rep.rows)
    assert rep.passed
    assert all(r.ratio > 0 for r in rep.rows)
    # heavier weights sit closer to the envelope
    worst6 = max(r.ratio for r in rep.rows if r.k == 6.0)
    worst12 = max(r.ratio for r in rep.rows if r.k == 12.0)
    assert worst12 < worst6

"""Parameter container, theta/z transform, right-hand side, equilibria."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from lanestab import (
    State,
    ValidationError,
    equilibria,
    make_params,
    rhs,
    shift_to_origin,
    theta_from_z,
    z_from_theta,
)
from lanestab.model import STABLE_LEFT, UNSTABLE_ODD, UNSTABLE_RIGHT


def test_make_params_basic():
    p = make_params(2, 0.5)
    assert p.n == 2
    assert p.omega == 0.5
    assert p.theta0 == 1.0
    assert p.zeta_start == 1e-3
    assert p.gamma == 1.5
    assert p.stable_regime


def test_gamma_is_derived_from_n():
    assert make_params(3, 0.5).gamma == 1.0 + 1.0 / 3.0
    assert make_params(6, 0.5).gamma == 1.0 + 1.0 / 6.0


def test_stable_regime_window():
    # the trapped window is open at both ends
    assert not make_params(2, 0.0).stable_regime
    assert make_params(2, 1e-9).stable_regime
    assert make_params(2, 0.999).stable_regime
    assert not make_params(2, 1.0).stable_regime
    assert not make_params(2, 1.5).stable_regime


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(n=0, omega=0.5), "n"),
        (dict(n=-2, omega=0.5), "n"),
        (dict(n=2.5, omega=0.5), "n"),
        (dict(n=True, omega=0.5), "n"),
        (dict(n=2, omega=-0.1), "omega"),
        (dict(n=2, omega=float("nan")), "omega"),
        (dict(n=2, omega=float("inf")), "omega"),
        (dict(n=2, omega=0.5, theta0=0.0), "theta0"),
        (dict(n=2, omega=0.5, theta0=-1.0), "theta0"),
        (dict(n=2, omega=0.5, zeta_start=0.0), "zeta_start"),
        (dict(n=2, omega=0.5, zeta_start=-1e-3), "zeta_start"),
    ],
)
def test_make_params_rejections(kwargs, field):
    with pytest.raises(ValidationError) as exc:
        make_params(**kwargs)
    assert exc.value.field == field
    assert str(exc.value).startswith(field + ":")


def test_omega_zero_is_a_valid_parameter():
    """omega = 0 is the temperature-dominated limit; the params accept it
    even though no equilibrium exists there."""
    p = make_params(2, 0.0)
    assert p.omega == 0.0


def test_state_requires_positive_zeta():
    with pytest.raises(ValidationError) as exc:
        State(0.0, 1.0, 0.0)
    assert exc.value.field == "zeta"
    with pytest.raises(ValidationError):
        State(-1.0, 1.0, 0.0)


def test_immutability():
    p = make_params(2, 0.5)
    with pytest.raises(dataclasses.FrozenInstanceError):
        p.omega = 0.9
    s = State(1.0, 1.0, 0.0)
    with pytest.raises(dataclasses.FrozenInstanceError):
        s.z = 2.0


def test_theta_from_z_examples():
    assert theta_from_z(2.0, 3) == 8.0
    assert theta_from_z(-1.5, 2) == 2.25
    assert theta_from_z(0.0, 4) == 0.0


def test_z_from_theta_rejects_negative():
    with pytest.raises(ValidationError) as exc:
        z_from_theta(-1e-9, 2)
    assert exc.value.field == "theta"


def test_theta_round_trip():
    rng = np.random.default_rng(11)
    for n in range(1, 7):
        for theta in rng.uniform(0.0, 50.0, size=40):
            back = theta_from_z(z_from_theta(float(theta), n), n)
            assert math.isclose(back, float(theta), rel_tol=1e-12, abs_tol=1e-300)
    assert theta_from_z(z_from_theta(0.0, 3), 3) == 0.0


def test_rhs_values():
    p = make_params(2, 0.5)
    d = rhs(1.0, 1.0, 0.0, p)
    assert d[0] == 0.0
    assert d[1] == (0.5 - 1.0) / 3.0
    d = rhs(2.0, 1.0, 0.3, p)
    assert d[0] == 0.3
    assert d[1] == (0.5 - 1.0) / 3.0 - 0.3


def test_rhs_rejects_nonpositive_zeta():
    p = make_params(2, 0.5)
    for zeta in (0.0, -1.0):
        with pytest.raises(ValidationError) as exc:
            rhs(zeta, 1.0, 0.0, p)
        assert exc.value.field == "zeta"


def test_rhs_vanishes_at_equilibria():
    # omega = 0.25, n = 2 makes the equilibrium magnitude exactly 2.0
    p = make_params(2, 0.25)
    for z_eq in (-2.0, 2.0):
        for zeta in (0.01, 1.0, 50.0):
            assert rhs(zeta, z_eq, 0.0, p) == (0.0, 0.0)


def test_equilibria_even_pair():
    eqs = equilibria(make_params(2, 0.25))
    assert len(eqs) == 2
    assert eqs[0].z_eq == -2.0 and eqs[0].kind == STABLE_LEFT
    assert eqs[1].z_eq == 2.0 and eqs[1].kind == UNSTABLE_RIGHT


def test_equilibria_odd_single():
    eqs = equilibria(make_params(3, 0.125))
    assert len(eqs) == 1
    assert eqs[0].z_eq == 2.0 and eqs[0].kind == UNSTABLE_ODD


def test_equilibria_rejects_omega_zero():
    with pytest.raises(ValidationError) as exc:
        equilibria(make_params(2, 0.0))
    assert exc.value.field == "omega"


def test_equilibria_parity_symmetry_annihilation():
    """Count follows parity, the even pair is an exact negation, and every
    returned constant annihilates the forcing bracket to near round-off."""
    rng = np.random.default_rng(23)
    for n in range(1, 8):
        for omega in 10.0 ** rng.uniform(-2.0, 1.0, size=25):
            p = make_params(n, float(omega))
            eqs = equilibria(p)
            if n % 2 == 0:
                assert len(eqs) == 2
                assert eqs[0].z_eq == -eqs[1].z_eq
                assert eqs[0].z_eq < eqs[1].z_eq
            else:
                assert len(eqs) == 1
                assert eqs[0].z_eq > 0.0
            for eq in eqs:
                assert abs(p.omega * eq.z_eq ** n - 1.0) <= 1e-14


def test_shift_to_origin():
    p = make_params(2, 0.25)
    left = equilibria(p)[0]
    assert shift_to_origin(State(1.0, 1.0, 0.5), left) == (3.0, 0.5)
    right = equilibria(p)[1]
    assert shift_to_origin(State(1.0, 2.0, 0.0), right) == (0.0, 0.0)

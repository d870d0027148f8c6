"""Shared fixtures and independent numerical oracles for the test suite."""

from __future__ import annotations

import math
import random

import pytest

from ddecm import LinearPart, ModelSpec, build_eigendata, verify_hopf
from ddecm.quadrature import adaptive_simpson

# Benchmark system: x' = a x(t-r) + x(t)^2 + c x(t) x(t-r) with a = -1,
# r = pi/2, critical pair +-i. The two parameter values where the first
# Lyapunov coefficient vanishes have the closed forms below.
R2_A = 0.0
R2_B = -1.0
R2_R = math.pi / 2.0
R2_OMEGA = 1.0
_SQ = math.sqrt(36.0 + 212.0 * math.pi + math.pi**2)
C1 = (18.0 - 7.0 * math.pi + _SQ) / (2.0 * (3.0 * math.pi - 2.0))
C2 = (18.0 - 7.0 * math.pi - _SQ) / (2.0 * (3.0 * math.pi - 2.0))


@pytest.fixture(scope="session")
def bench_lin() -> LinearPart:
    return LinearPart(R2_A, R2_B, R2_R)


@pytest.fixture(scope="session")
def bench_eig(bench_lin):
    return build_eigendata(bench_lin, verify_hopf(bench_lin, R2_OMEGA))


@pytest.fixture(scope="session")
def bench_model_c1(bench_lin) -> ModelSpec:
    return ModelSpec(bench_lin, {(2, 0): 2.0, (1, 1): C1})


@pytest.fixture(scope="session")
def bench_model_c2(bench_lin) -> ModelSpec:
    return ModelSpec(bench_lin, {(2, 0): 2.0, (1, 1): C2})


def bilinear_quad(psi, phi, lin, tol=1e-13):
    """Quadrature-based pairing oracle, independent of the closed-form algebra."""
    r = lin.r
    integral = adaptive_simpson(lambda z: psi.eval(z + r) * phi.eval(z), -r, 0.0, tol=tol)
    return psi.eval(0.0) * phi.eval(0.0) + lin.B * integral


def random_hopf_model(rng: random.Random, max_cubic=True) -> ModelSpec:
    """A random model constructed to sit exactly on a Hopf point.

    omega and r are sampled, then B = -omega/sin(omega r) and
    A = -B cos(omega r) place +-i omega on the spectrum. Draws that would be
    ill-conditioned (near 1:2 resonance, near a zero eigenvalue, tiny
    normalization) are rejected so absolute tolerances stay meaningful.
    """
    while True:
        w = rng.uniform(0.6, 2.2)
        r = rng.uniform(0.6, 2.5)
        s = math.sin(w * r)
        if abs(s) < 0.25:
            continue
        B = -w / s
        A = -B * math.cos(w * r)
        if abs(B) > 9.0 or abs(A) > 9.0:
            continue
        # well away from the additional degeneracies
        char2 = abs(2j * w - A - B * complex(math.cos(2 * w * r), -math.sin(2 * w * r)))
        if char2 < 0.3 or abs(A + B) < 0.3:
            continue
        break
    keys = [(2, 0), (1, 1), (0, 2)]
    if max_cubic:
        keys += [(3, 0), (2, 1), (1, 2), (0, 3)]
    C = {key: rng.uniform(-2.0, 2.0) for key in keys if rng.random() > 0.2}
    return ModelSpec(LinearPart(A, B, r), C, omega_hint=w)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)

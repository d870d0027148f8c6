"""Center-manifold coefficients at criticality.

Second-order solves, the third-order right-hand sides, the degeneracy
identities of the singular w21 system, and the regularized limit formula for
w21(0). The quadratic machinery is shared with the perturbed problem: it is
written for a general critical/near-critical eigenvalue ``lam`` (``mu = Re
lam`` is exactly 0 at criticality) so both call sites use one code path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .chareq import LinearPart
from .errors import (
    DegenerateSystemError,
    InconsistencyError,
    ResonanceError,
    ZeroEigenvalueError,
)
from .exppoly import ExpMonomial, ExpPoly
from .spectral import EigenData, bilinear

_ORDER2 = ((2, 0), (1, 1), (0, 2))
_ORDER3 = ((3, 0), (2, 1), (1, 2), (0, 3))
_VALID_KEYS = frozenset(_ORDER2) | frozenset(_ORDER3)


@dataclass(frozen=True)
class ModelSpec:
    """A scalar one-delay model: linear part plus Taylor coefficients C[j, k]
    of the nonlinearity (orders 2 and 3 only; absent keys are zero)."""

    lin: LinearPart
    C: Mapping[tuple[int, int], float]
    omega_hint: float | None = None

    def __post_init__(self):
        clean: dict[tuple[int, int], float] = {}
        for key, val in dict(self.C).items():
            j, k = key
            if (j, k) not in _VALID_KEYS:
                raise ValueError(f"C key {key} invalid: need j,k >= 0 with 2 <= j+k <= 3")
            v = float(val)
            if not math.isfinite(v):
                raise ValueError(f"C[{j},{k}] must be finite")
            if v != 0.0:
                clean[(j, k)] = v
        object.__setattr__(self, "C", clean)

    def c(self, j: int, k: int) -> float:
        return self.C.get((j, k), 0.0)


@dataclass(frozen=True)
class SecondOrder:
    """Quadratic data: f/g coefficients and the w profiles with endpoints."""

    f20: complex
    f11: complex
    f02: complex
    g20: complex
    g11: complex
    g02: complex
    w20: ExpPoly
    w11: ExpPoly
    w02: ExpPoly
    w20_0: complex
    w20_mr: complex
    w11_0: complex
    w11_mr: complex
    w02_0: complex
    w02_mr: complex


class ThirdOrderRhs(NamedTuple):
    f21: complex
    g21: complex
    g12_bar: complex
    R1: complex
    R2: complex


@dataclass(frozen=True)
class ThirdOrder:
    """Cubic data around the singular system, including the limit w21."""

    f21: complex
    g21: complex
    g12_bar: complex
    R1: complex
    R2: complex
    Delta: complex
    degeneracy_residual: float
    w21_0: complex
    w21_mr: complex
    w21: ExpPoly


@dataclass(frozen=True)
class DegeneracyReport:
    Delta: complex
    residual_R1: float
    residual_R2: float
    residual_R3: float
    residual_R4: float
    BR1_minus_R2: float


# ---------------------------------------------------------------------------
# shared quadratic core (lam = i*omega at criticality, mu_eps + i*omega_eps
# for the perturbed problem)


def quadratic_data(
    A: float,
    B: float,
    r: float,
    lam: complex,
    psi0: complex,
    model: ModelSpec,
    det_tol_w20: float = 1e-10,
    det_tol_w11: float = 1e-10,
    perturbed: bool = False,
) -> SecondOrder:
    """Solve both quadratic boundary systems and assemble the w profiles."""
    mu = lam.real
    lamb = lam.conjugate()
    elr = cmath.exp(-lam * r)
    elbr = cmath.exp(-lamb * r)
    e2lr = cmath.exp(-2 * lam * r)
    e2mr = math.exp(-2 * mu * r)

    C20, C11, C02 = model.c(2, 0), model.c(1, 1), model.c(0, 2)
    f20 = C20 + 2 * C11 * elr + C02 * e2lr
    f11 = C20 + C11 * (elr + elbr) + C02 * e2mr
    f02 = C20 + 2 * C11 * elbr + C02 * e2lr.conjugate()
    g20, g11, g02 = psi0 * f20, psi0 * f11, psi0 * f02
    gb11, gb02 = g11.conjugate(), g02.conjugate()
    dom = (-r, 0.0)

    # w20: rows (-e^{-2 lam r}, 1), (A - 2 lam, B)
    det20 = 2 * lam - A - B * e2lr
    if abs(det20) <= det_tol_w20:
        raise ResonanceError(
            "singular quadratic system (1:2 resonance)"
            + (" in the perturbed problem" if perturbed else "")
            + f": |det| = {abs(det20):.3e}"
        )
    rr = 2 * lam - lamb  # = mu + 3 i omega
    rhs1 = -(g20 / lam) * (elr - e2lr) - (gb02 / rr) * (elbr - e2lr)
    rhs2 = g20 + gb02 - f20
    w20_0 = (rhs1 * B - rhs2) / det20
    w20_mr = (-e2lr * rhs2 - (A - 2 * lam) * rhs1) / det20
    w20 = ExpPoly(
        (
            _term(w20_0 + g20 / lam + gb02 / rr, 2 * lam),
            _term(-g20 / lam, lam),
            _term(-gb02 / rr, lamb),
        ),
        dom,
    )

    # w11: rows (-e^{-2 mu r}, 1), (A - 2 mu, B)
    det11 = 2 * mu - A - B * e2mr
    if abs(det11) <= det_tol_w11:
        if perturbed:
            raise ResonanceError(
                f"singular quadratic system in the perturbed problem: |det| = {abs(det11):.3e}"
            )
        raise ZeroEigenvalueError(
            f"w11 system singular: |A + B| = {abs(det11):.3e} (zero eigenvalue)"
        )
    rhs1b = -(g11 / lamb) * (elr - e2mr) - (gb11 / lam) * (elbr - e2mr)
    rhs2b = g11 + gb11 - f11
    w11_0 = (rhs1b * B - rhs2b) / det11
    w11_mr = (-e2mr * rhs2b - (A - 2 * mu) * rhs1b) / det11
    w11 = ExpPoly(
        (
            _term(w11_0 + g11 / lamb + gb11 / lam, 2 * mu),
            _term(-g11 / lamb, lam),
            _term(-gb11 / lam, lamb),
        ),
        dom,
    )

    w02 = w20.conjugate()
    return SecondOrder(
        f20=f20, f11=f11, f02=f02, g20=g20, g11=g11, g02=g02,
        w20=w20, w11=w11, w02=w02,
        w20_0=w20_0, w20_mr=w20_mr,
        w11_0=w11_0, w11_mr=w11_mr,
        w02_0=w20_0.conjugate(), w02_mr=w20_mr.conjugate(),
    )


def _term(coeff: complex, rate: complex) -> ExpMonomial:
    return ExpMonomial(coeff, rate, 0)


def cubic_f21(model: ModelSpec, lam: complex, so: SecondOrder, r: float) -> complex:
    """f21 from the quadratic endpoints and the cubic Taylor coefficients."""
    mu = lam.real
    lamb = lam.conjugate()
    elr = cmath.exp(-lam * r)
    elbr = cmath.exp(-lamb * r)
    return (
        model.c(2, 0) * (2 * so.w11_0 + so.w20_0)
        + model.c(1, 1)
        * (so.w20_0 * elbr + 2 * so.w11_0 * elr + so.w20_mr + 2 * so.w11_mr)
        + model.c(0, 2) * (2 * so.w11_mr * elr + so.w20_mr * elbr)
        + model.c(3, 0)
        + model.c(2, 1) * (2 * elr + elbr)
        + model.c(1, 2) * (2 * math.exp(-2 * mu * r) + cmath.exp(-2 * lam * r))
        + model.c(0, 3) * (elbr * cmath.exp(-2 * lam * r))
    )


# ---------------------------------------------------------------------------
# critical (unperturbed) pipeline


def second_order(model: ModelSpec, eig: EigenData) -> SecondOrder:
    """Quadratic coefficients and profiles at the Hopf point itself."""
    lin = model.lin
    return quadratic_data(lin.A, lin.B, lin.r, 1j * eig.omega, eig.Psi1_at_0, model)


def third_order_rhs(model: ModelSpec, eig: EigenData, so: SecondOrder) -> ThirdOrderRhs:
    """f21, g21, conj(g12) and the right-hand sides R1, R2 of the singular system."""
    lin = model.lin
    w, r, B = eig.omega, lin.r, lin.B
    elr = cmath.exp(-1j * w * r)
    eplr = cmath.exp(1j * w * r)
    f21 = cubic_f21(model, 1j * w, so, r)
    g21 = eig.Psi1_at_0 * f21
    g12_bar = eig.Psi1_at_0.conjugate() * f21  # f12 = conj(f21): the nonlinearity is real

    kernel = ExpPoly.monomial(1.0, -1j * w, 0, (-r, 0.0))
    i20 = (so.w20 * kernel).integrate()
    i11 = (so.w11 * kernel).integrate()
    i02 = (so.w02 * kernel).integrate()
    gb11, gb02 = so.g11.conjugate(), so.g02.conjugate()

    R1 = (
        -g21 * r * elr
        + (1j / (2 * w)) * g12_bar * (eplr - elr)
        - 2 * so.g11 * elr * i20
        - (so.g20 + 2 * gb11) * elr * i11
        - gb02 * elr * i02
    )
    R2 = (
        g21
        + g12_bar
        - f21
        + 2 * so.g11 * so.w20_0
        + (so.g20 + 2 * gb11) * so.w11_0
        + gb02 * so.w02_0
    )
    return ThirdOrderRhs(f21, g21, g12_bar, R1, R2)


def degeneracy_report(model: ModelSpec, eig: EigenData, so: SecondOrder) -> DegeneracyReport:
    """Residuals of the four identities proving the two system rows dependent."""
    lin = model.lin
    w, r, B = eig.omega, lin.r, lin.B
    elr = cmath.exp(-1j * w * r)
    eplr = cmath.exp(1j * w * r)
    rhs = third_order_rhs(model, eig, so)
    gb11, gb02 = so.g11.conjugate(), so.g02.conjugate()

    kernel = ExpPoly.monomial(1.0, -1j * w, 0, (-r, 0.0))
    i20 = (so.w20 * kernel).integrate()
    i11 = (so.w11 * kernel).integrate()
    i02 = (so.w02 * kernel).integrate()

    res1 = abs(
        B * (-rhs.g21 * r * elr + (1j / (2 * w)) * rhs.g12_bar * (eplr - elr))
        - (rhs.g21 + rhs.g12_bar - rhs.f21)
    )
    res2 = abs(-2 * B * so.g11 * elr * i20 - 2 * so.g11 * so.w20_0)
    res3 = abs(-B * (so.g20 + 2 * gb11) * elr * i11 - (so.g20 + 2 * gb11) * so.w11_0)
    res4 = abs(-B * gb02 * elr * i02 - gb02 * so.w02_0)
    return DegeneracyReport(
        Delta=1j * w - lin.A - B * elr,
        residual_R1=res1,
        residual_R2=res2,
        residual_R3=res3,
        residual_R4=res4,
        BR1_minus_R2=abs(B * rhs.R1 - rhs.R2),
    )


def resonant_kernels(omega: float, r: float) -> tuple[ExpPoly, ExpPoly]:
    """rho(s) = -2 s e^{i w s} on [-r, 0] and rho-tilde(z) = -2 z e^{-i w z} on [0, r]."""
    rho = ExpPoly.monomial(-2.0, 1j * omega, 1, (-r, 0.0))
    rho_t = ExpPoly.monomial(-2.0, -1j * omega, 1, (0.0, r))
    return rho, rho_t


def w21_at_zero(model: ModelSpec, eig: EigenData, so: SecondOrder, f21: complex) -> complex:
    """The admissible w21(0): limit of the perturbed solves as the perturbation vanishes."""
    lin = model.lin
    w, r = eig.omega, lin.r
    den = 2 * r * w * 1j - 2 * r * lin.A + 2.0
    if abs(den) <= 1e-10:
        raise DegenerateSystemError(
            f"limit denominator 2 r w i - 2 r A + 2 is numerically zero ({abs(den):.3e})"
        )
    rho, rho_t = resonant_kernels(w, r)
    pair_rho = bilinear(eig.Psi1, rho, lin) + bilinear(eig.Psi2, rho, lin)
    gb11, gb02 = so.g11.conjugate(), so.g02.conjugate()
    num = (
        f21 * pair_rho
        - 2 * so.g11 * bilinear(rho_t, so.w20, lin)
        - (so.g20 + 2 * gb11) * bilinear(rho_t, so.w11, lin)
        - gb02 * bilinear(rho_t, so.w02, lin)
    )
    return num / den


def w21_at_minus_r(
    lin: LinearPart,
    eig: EigenData,
    w21_0: complex,
    R1: complex,
    R2: complex | None = None,
    tol: float = 1e-9,
) -> complex:
    """w21(-r) from the first system row; optionally re-check the second row."""
    w = eig.omega
    value = cmath.exp(-1j * w * lin.r) * w21_0 + R1
    if R2 is not None:
        residual = abs(-(1j * w - lin.A) * w21_0 + lin.B * value - R2)
        if residual > tol * (1.0 + abs(R2)):
            raise InconsistencyError(
                f"second system row violated by {residual:.3e}; upstream computation is wrong"
            )
    return value


def w21_profile(model: ModelSpec, eig: EigenData, so: SecondOrder, w21_0: complex) -> ExpPoly:
    """Integrate the w21 equation from s = 0 in closed form.

    The forcing component at rate i*omega is resonant and yields the secular
    s * e^{i w s} term.
    """
    lin = model.lin
    w, r = eig.omega, lin.r
    dom = (-r, 0.0)
    rhs = third_order_rhs(model, eig, so)
    gb11, gb02 = so.g11.conjugate(), so.g02.conjugate()
    forcing = (
        ExpPoly.monomial(rhs.g21, 1j * w, 0, dom)
        + ExpPoly.monomial(rhs.g12_bar, -1j * w, 0, dom)
        + so.w20.scale(2 * so.g11)
        + so.w11.scale(so.g20 + 2 * gb11)
        + so.w02.scale(gb02)
    )
    # w(s) = e^{nu s} [w(0) + int_0^s e^{-nu t} forcing(t) dt],  nu = i*omega
    nu = 1j * w
    prim = forcing.mul_exp(-nu).antiderivative()
    inner = prim + ExpPoly.constant(w21_0 - prim.eval(0.0), dom)
    return inner.mul_exp(nu)


def third_order(model: ModelSpec, eig: EigenData, so: SecondOrder) -> ThirdOrder:
    """Assemble the full cubic stage: rhs, degeneracy residual, limit w21, profile."""
    rhs = third_order_rhs(model, eig, so)
    rep = degeneracy_report(model, eig, so)
    w0 = w21_at_zero(model, eig, so, rhs.f21)
    wmr = w21_at_minus_r(model.lin, eig, w0, rhs.R1, rhs.R2)
    return ThirdOrder(
        f21=rhs.f21,
        g21=rhs.g21,
        g12_bar=rhs.g12_bar,
        R1=rhs.R1,
        R2=rhs.R2,
        Delta=rep.Delta,
        degeneracy_residual=rep.BR1_minus_R2,
        w21_0=w0,
        w21_mr=wmr,
        w21=w21_profile(model, eig, so, w0),
    )

"""FE-level material wrappers and the Drucker-Prager backfill law.

All wrappers expose ``init_state()`` and ``integrate(strain, state) ->
(stress, tangent, new_state)``; solids work on the 6-component Voigt strain
in the element's LOCAL frame, interfaces on the 3-component relative
displacement. Weight densities enter in kN/m^3 (file units) and are stored
as consistent mass densities (tonne/mm^3, with N-mm-s units).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calibration import DirectionalParams
from .errors import NoConvergence
from .interface_law import InterfaceParams, InterfaceState, integrate as il_integrate
from .macro import LayerPointState, macro_integrate

GRAVITY = 9810.0  # mm/s^2

_VOIGT_ONE = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])


def weight_to_mass_density(weight_kn_m3: float) -> float:
    """kN/m^3 self-weight to tonne/mm^3 mass density."""
    return weight_kn_m3 * 1e-6 / GRAVITY


def elastic_C(E: float, nu: float) -> np.ndarray:
    lam = E * nu / ((1 + nu) * (1 - 2 * nu))
    G = E / (2 * (1 + nu))
    C = np.zeros((6, 6))
    C[:3, :3] = lam
    C[0, 0] = C[1, 1] = C[2, 2] = lam + 2 * G
    C[3, 3] = C[4, 4] = C[5, 5] = G
    return C


# ---------------------------------------------------------------------------
# Elastic solid
# ---------------------------------------------------------------------------


class ElasticMaterial:
    needs_frame = False
    kind = "elastic"

    def __init__(self, E: float, nu: float, weight: float = 0.0):
        self.E, self.nu, self.weight = E, nu, weight
        self.C = elastic_C(E, nu)
        self.density = weight_to_mass_density(weight)

    def init_state(self):
        return None

    def integrate(self, strain, state):
        sig = self.C @ strain
        return sig, self.C, None


# ---------------------------------------------------------------------------
# Homogenized masonry (three embedded layers)
# ---------------------------------------------------------------------------


class MacroMasonryMaterial:
    needs_frame = True
    kind = "macro"

    def __init__(self, params: DirectionalParams, weight: float = 0.0):
        self.params = params
        self.weight = weight
        self.density = weight_to_mass_density(weight)

    def init_state(self) -> LayerPointState:
        return LayerPointState.virgin(self.params.x, self.params.y, self.params.z)

    def integrate(self, strain, state):
        res = macro_integrate(state, strain)
        return res.sigma, res.K, res.new_state


# ---------------------------------------------------------------------------
# Zero-thickness interface
# ---------------------------------------------------------------------------


class InterfaceMaterial:
    needs_frame = False  # frame comes from the interface geometry
    kind = "interface"
    density = 0.0
    weight = 0.0

    def __init__(self, params: InterfaceParams):
        self.params = params

    def init_state(self) -> InterfaceState:
        return InterfaceState.virgin()

    def integrate(self, rel_disp, state):
        res = il_integrate(self.params, state, rel_disp)
        return res.s, res.tangent, res.new_state


# ---------------------------------------------------------------------------
# Drucker-Prager backfill
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BackfillParams:
    young_modulus: float
    poisson: float
    cohesion: float
    tan_phi_b: float
    tan_psi_b: float
    density: float = 0.0  # weight, kN/m^3

    def __post_init__(self):
        if self.young_modulus <= 0.0 or not 0.0 <= self.poisson < 0.5:
            raise ValueError("invalid backfill elasticity")
        if not 0.0 <= self.tan_psi_b <= self.tan_phi_b:
            raise ValueError("dilatancy must satisfy 0 <= tan_psi <= tan_phi")

    @property
    def eta(self) -> float:
        t = self.tan_phi_b
        return 3.0 * t / math.sqrt(9.0 + 12.0 * t * t)

    @property
    def eta_psi(self) -> float:
        t = self.tan_psi_b
        return 3.0 * t / math.sqrt(9.0 + 12.0 * t * t)

    @property
    def xi_c(self) -> float:
        t = self.tan_phi_b
        return 3.0 / math.sqrt(9.0 + 12.0 * t * t)


@dataclass(frozen=True)
class DPState:
    eps_p: np.ndarray = field(default_factory=lambda: np.zeros(6))
    w: float = 0.0


def _invariants(sig):
    p = (sig[0] + sig[1] + sig[2]) / 3.0
    s = sig - p * _VOIGT_ONE
    j2 = 0.5 * (s[0] ** 2 + s[1] ** 2 + s[2] ** 2) + s[3] ** 2 + s[4] ** 2 + s[5] ** 2
    return p, s, math.sqrt(max(j2, 0.0))


def dp_integrate(params: BackfillParams, state: DPState, strain) -> tuple:
    """Linear Drucker-Prager cone with apex projection, perfect plasticity.

    F = sqrt(J2) + eta*p - xi_c*c in mean-stress p (tension positive) /
    deviator-root space; non-associated with eta_psi. Returns
    (stress, algorithmic tangent, new_state).
    """
    eps = np.asarray(strain, dtype=float).reshape(6)
    C = elastic_C(params.young_modulus, params.poisson)
    G = params.young_modulus / (2.0 * (1.0 + params.poisson))
    K = params.young_modulus / (3.0 * (1.0 - 2.0 * params.poisson))
    eta, eta_psi, xic = params.eta, params.eta_psi, params.xi_c
    cb = params.cohesion

    sig_tr = C @ (eps - state.eps_p)
    p_tr, s_tr, q_tr = _invariants(sig_tr)
    F_tr = q_tr + eta * p_tr - xic * cb
    if F_tr <= 0.0:
        return sig_tr, C, state

    H0 = G + eta * eta_psi * K
    dlam = F_tr / H0
    q_new = q_tr - G * dlam

    if q_new < 0.0 or q_tr <= 1e-14:
        # apex: purely volumetric return to p = xi_c c / eta
        p_apex = xic * cb / eta if eta > 0.0 else p_tr
        sig_new = p_apex * _VOIGT_ONE
        tangent = 1e-8 * C
    else:
        p_new = p_tr - K * eta_psi * dlam
        fac = q_new / q_tr
        sig_new = fac * s_tr + p_new * _VOIGT_ONE

        # consistent tangent
        D_s = C - K * np.outer(_VOIGT_ONE, _VOIGT_ONE)
        shat = s_tr * np.array([1, 1, 1, 2, 2, 2])
        row_q = (shat @ D_s) / (2.0 * q_tr)
        row_p = K * _VOIGT_ONE
        row_dl = (row_q + eta * row_p) / H0
        row_qnew = row_q - G * row_dl
        row_fac = row_qnew / q_tr - (q_new / q_tr**2) * row_q
        row_pnew = row_p - K * eta_psi * row_dl
        tangent = fac * D_s + np.outer(s_tr, row_fac) + np.outer(_VOIGT_ONE, row_pnew)

    deps_p = np.linalg.solve(C, sig_tr - sig_new)
    sig_mid = 0.5 * (sig_tr + sig_new)
    dw = float(sig_mid @ deps_p)
    new_state = DPState(eps_p=state.eps_p + deps_p, w=state.w + max(dw, 0.0))
    return sig_new, tangent, new_state


class BackfillMaterial:
    needs_frame = False
    kind = "backfill"

    def __init__(self, params: BackfillParams):
        self.params = params
        self.weight = params.density
        self.density = weight_to_mass_density(params.density)

    def init_state(self) -> DPState:
        return DPState()

    def integrate(self, strain, state):
        return dp_integrate(self.params, state, strain)

"""Three-surface damage-plasticity law for masonry joints.

The law works on a 3-component generalized strain/stress pair
``d = [normal, shear1, shear2]`` and is used in two unit systems:

* internal layers of the homogenized continuum: ``d`` is strain [-],
  stiffnesses are moduli [MPa], fracture energies are bandwidth-regularized
  [N/mm per mm^3, i.e. MPa];
* zero-thickness interface elements: ``d`` is relative displacement [mm],
  stiffnesses are tractions per opening [N/mm^3], energies are per unit
  area [N/mm].

Sign convention: tension/opening positive, compression negative.

Mechanisms (each with yield surface, flow rule and dissipation bookkeeping):

* tension cutoff with a linear nominal softening envelope whose area equals
  ``g_t``; the inelastic strain splits into a plastic part (fraction ``mu``)
  and a stiffness-degrading part (fraction ``1 - mu``), so unloading from
  the fully damaged point leaves a residual strain of ``mu`` times the
  strain at that point;
* Coulomb cone ``|tau| + sigma*tan_phi - c'`` with non-associated flow
  (dilatancy ``tan_phi_g``), cohesion softening to pure friction once the
  cohesive work reaches ``g_s``;
* compression cap, perfectly plastic in effective stress with crushing
  damage driven by ``w_c/g_c``.

Nominal stress is ``(I - D)`` times the effective stress with
``D = diag{D_n, D_t, D_t}``. ``D_n`` switches between the tensile and
compressive index with the sign of the effective normal stress (crack
closure); the shear index is likewise only active while the joint is open,
which preserves the frictional residual of closed joints.

The work variables ``w_t, w_c, w_s`` accumulate the nominal dissipation of
each mechanism, so a full tension path dissipates exactly ``g_t`` and a
fully crushed point exactly ``g_c``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NoConvergence

# Damage floor: indices saturate at 1 - _DMG_EPS to keep the nominal
# stiffness positive definite.
_DMG_EPS = 1e-9
_DMG_CAP = 1.0 - _DMG_EPS

MAX_LOCAL_ITER = 50
LOCAL_RTOL = 1e-10


def _damage_parabolic(r: float) -> float:
    """Spec'd r*(2-r) evolution, capped just below full damage."""
    if r <= 0.0:
        return 0.0
    if r >= 1.0:
        return _DMG_CAP
    return min(_DMG_CAP, r * (2.0 - r))


@dataclass(frozen=True)
class InterfaceParams:
    """Constitutive parameters of one joint family / internal layer."""

    k_normal: float
    k_shear: float
    f_t: float
    f_c: float
    c: float
    tan_phi: float
    g_t: float
    g_s: float
    g_c: float
    tan_phi_g: float = 0.0
    mu: float = 0.0
    shear_nonlinear: bool = True

    def __post_init__(self):
        if self.k_normal <= 0.0 or self.k_shear <= 0.0:
            raise ValueError("stiffnesses must be positive")
        if self.f_t < 0.0:
            raise ValueError("f_t must be >= 0")
        if self.f_c <= 0.0:
            raise ValueError("f_c must be positive")
        if self.c < 0.0:
            raise ValueError("cohesion must be >= 0")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [0, 1]")
        if self.g_t <= 0.0 or self.g_s <= 0.0 or self.g_c <= 0.0:
            raise ValueError("fracture energies must be positive")
        if self.c < self.f_t * self.tan_phi - 1e-12 * max(self.c, 1.0):
            warnings.warn(
                "cohesion below f_t*tan_phi: shear cone does not enclose the "
                "tension cutoff",
                stacklevel=2,
            )
        if self.f_t > 0.0 and 2.0 * self.g_t * self.k_normal <= self.f_t**2:
            warnings.warn(
                "tensile softening steeper than elastic unloading (snapback); "
                "inelastic capacity clamped",
                stacklevel=2,
            )
        if (
            self.shear_nonlinear
            and self.c > 0.0
            and 2.0 * self.g_s * self.k_shear <= self.c**2
        ):
            warnings.warn(
                "shear cohesion softening steeper than elastic unloading "
                "(snapback); slip capacity clamped",
                stacklevel=2,
            )

    # -- derived constants -------------------------------------------------

    @property
    def q_lim(self) -> float:
        if self.tan_phi <= 0.0:
            return math.inf
        return self.c / self.tan_phi - self.f_t

    @property
    def kappa_tu(self) -> float:
        """Inelastic normal strain capacity of the tension envelope."""
        if self.f_t <= 0.0:
            return 0.0
        return max(2.0 * self.g_t / self.f_t, (1.0 + 1e-9) * self.f_t / self.k_normal)

    @property
    def kappa_su(self) -> float:
        """Slip capacity of the cohesion softening branch."""
        if self.c <= 0.0:
            return 0.0
        return max(2.0 * self.g_s / self.c, (1.0 + 1e-9) * self.c / self.k_shear)

    def elastic_stiffness(self) -> np.ndarray:
        return np.diag([self.k_normal, self.k_shear, self.k_shear])


@dataclass(frozen=True)
class InterfaceState:
    """Committed history of one integration point (immutable)."""

    d_p: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q: float = 0.0
    w_t: float = 0.0
    w_c: float = 0.0
    w_s: float = 0.0
    dmg_nt: float = 0.0
    dmg_nc: float = 0.0
    dmg_t: float = 0.0

    @staticmethod
    def virgin() -> "InterfaceState":
        return InterfaceState()


@dataclass(frozen=True)
class StressReturn:
    """Result of one constitutive update (trial, not committed)."""

    s: np.ndarray
    s_eff: np.ndarray
    tangent: np.ndarray
    new_state: InterfaceState


# ---------------------------------------------------------------------------
# Yield surfaces (documented effective-stress form)
# ---------------------------------------------------------------------------


def yield_values(params: InterfaceParams, q: float, s_eff) -> tuple[float, float, float]:
    """Evaluate the three surfaces at an effective stress state.

    Admissible iff all three values are <= 0. The cohesion grows once the
    hardening variable passes q_lim; the tensile strength is clamped at zero.
    """
    s_eff = np.asarray(s_eff, dtype=float).reshape(3)
    sig, t1, t2 = s_eff
    c_prime = params.c
    if q > params.q_lim:
        c_prime = params.c + (q - params.q_lim) * params.tan_phi
    f_s = math.hypot(t1, t2) + sig * params.tan_phi - c_prime
    f_t = sig - max(0.0, params.f_t - q)
    f_c = -sig - params.f_c
    return f_s, f_t, f_c


# ---------------------------------------------------------------------------
# Damage evolution
# ---------------------------------------------------------------------------


def _tension_x_from_ratio(params: InterfaceParams, r: float) -> float:
    """Invert the work ratio r = w_t/g_t to the envelope coordinate x = kappa/kappa_u.

    Along the envelope r(x) = (1+mu)*x - mu*x^2 (exact); the stable quadratic
    root below handles mu -> 0.
    """
    if r <= 0.0:
        return 0.0
    if r >= 1.0:
        return 1.0
    mu = params.mu
    disc = (1.0 + mu) ** 2 - 4.0 * mu * r
    return 2.0 * r / ((1.0 + mu) + math.sqrt(max(disc, 0.0)))


def _tension_damage(params: InterfaceParams, x: float) -> float:
    """Tensile index at envelope coordinate x: 1 - Y / ((1-mu) k_n kappa + Y)."""
    if params.f_t <= 0.0 or x <= 0.0:
        return 0.0
    if x >= 1.0:
        return _DMG_CAP
    y = params.f_t * (1.0 - x)
    denom = (1.0 - params.mu) * params.k_normal * params.kappa_tu * x + y
    return min(_DMG_CAP, max(0.0, 1.0 - y / denom))


def damage_update(
    params: InterfaceParams, w_t: float, w_c: float, w_s: float
) -> tuple[float, float, float]:
    """Map accumulated mechanism works to the three damage indices."""
    x = _tension_x_from_ratio(params, w_t / params.g_t) if params.f_t > 0.0 else 0.0
    dmg_nt = _tension_damage(params, x)
    dmg_nc = _damage_parabolic(w_c / params.g_c)
    dmg_t = _damage_parabolic(w_s / params.g_s) if params.shear_nonlinear else 0.0
    return dmg_nt, dmg_nc, dmg_t


def _tension_work(params: InterfaceParams, kappa: float) -> float:
    """Nominal dissipation accumulated up to envelope coordinate kappa (exact)."""
    ku = params.kappa_tu
    if ku <= 0.0:
        return 0.0
    x = min(kappa / ku, 1.0)
    return params.g_t * ((1.0 + params.mu) * x - params.mu * x * x)


def _shear_work(params: InterfaceParams, kappa_s: float) -> float:
    """Cohesive dissipation accumulated up to slip kappa_s (exact)."""
    ksu = params.kappa_su
    if ksu <= 0.0:
        return 0.0
    u = max(0.0, 1.0 - kappa_s / ksu)
    return params.g_s * (1.0 - u * u)


def _kappa_s_from_w(params: InterfaceParams, w_s: float) -> float:
    ksu = params.kappa_su
    if ksu <= 0.0:
        return 0.0
    u = math.sqrt(max(0.0, 1.0 - w_s / params.g_s))
    return ksu * (1.0 - u)


# ---------------------------------------------------------------------------
# Return mapping
# ---------------------------------------------------------------------------


class _Work:
    """Mutable scratch for the active-set loop."""

    __slots__ = (
        "kap_t", "p_other", "gam_p", "r_c", "w_s",
        "ten", "comp", "shear", "shear_open", "corner",
    )

    def __init__(self, params: InterfaceParams, state: InterfaceState):
        x = _tension_x_from_ratio(params, state.w_t / params.g_t)
        self.kap_t = x * params.kappa_tu
        self.p_other = float(state.d_p[0]) - params.mu * self.kap_t
        self.gam_p = np.array(state.d_p[1:], dtype=float)
        self.r_c = min(state.w_c / params.g_c, 1.0 - 1e-12)
        self.w_s = state.w_s
        self.ten = self.comp = self.shear = self.shear_open = self.corner = False

    def eps_p_n(self, params: InterfaceParams) -> float:
        return params.mu * self.kap_t + self.p_other


def _envelope_kappa(params: InterfaceParams, eps_eff: float) -> float:
    """Envelope coordinate reached by a monotonic pull to eps_eff (exact)."""
    ku = params.kappa_tu
    denom = params.k_normal - params.f_t / ku
    return (params.k_normal * eps_eff - params.f_t) / denom


def _return_map(params: InterfaceParams, state: InterfaceState, d: np.ndarray):
    """Run the active-set return; returns (_Work, dmg triple, s_eff)."""
    p = params
    w = _Work(p, state)
    kn, kt = p.k_normal, p.k_shear
    ref = max(p.f_t, p.f_c, p.c, kn * float(np.max(np.abs(d))) + 1e-30)
    tol = LOCAL_RTOL * ref

    dmg = damage_update(p, _tension_work(p, w.kap_t), w.r_c * p.g_c, w.w_s)
    dmg = tuple(max(a, b) for a, b in zip(dmg, (state.dmg_nt, state.dmg_nc, state.dmg_t)))

    for _ in range(MAX_LOCAL_ITER):
        changed = False
        sig_eff = kn * (d[0] - w.eps_p_n(p))

        # -- normal mechanism: tension envelope or compression cap ---------
        if sig_eff > tol:
            if p.f_t <= 0.0:
                w.p_other += sig_eff / kn
                w.ten = changed = True
            else:
                ybar = (1.0 - p.mu) * kn * w.kap_t + p.f_t * (1.0 - w.kap_t / p.kappa_tu)
                if w.kap_t < p.kappa_tu and sig_eff > ybar + tol:
                    eps_eff = d[0] - w.p_other
                    kap_new = min(_envelope_kappa(p, eps_eff), p.kappa_tu)
                    if kap_new > w.kap_t:
                        w.kap_t = kap_new
                        w.ten = changed = True
        elif -sig_eff - p.f_c > tol:
            dlam = (-p.f_c - sig_eff) / kn
            w.p_other -= dlam
            # exact integral of dw_c = (1-D_c) f_c dlam with D_c = r(2-r)
            w.r_c = 1.0 - 1.0 / (1.0 / (1.0 - w.r_c) + p.f_c * dlam / p.g_c)
            w.comp = changed = True

        if changed:
            dmg = damage_update(p, _tension_work(p, w.kap_t), w.r_c * p.g_c, w.w_s)
            dmg = tuple(
                max(a, b) for a, b in zip(dmg, (state.dmg_nt, state.dmg_nc, state.dmg_t))
            )

        # -- shear mechanism ------------------------------------------------
        if p.shear_nonlinear:
            sig_eff = kn * (d[0] - w.eps_p_n(p))
            open_joint = sig_eff > 0.0
            dn = dmg[0] if open_joint else dmg[1]
            sig_nom = (1.0 - dn) * sig_eff
            c_prime = _cohesion(p, w.w_s)
            q_now = p.f_t * min(w.kap_t / p.kappa_tu, 1.0) if p.f_t > 0.0 else 0.0
            if q_now > p.q_lim:
                c_prime += (q_now - p.q_lim) * p.tan_phi
            tau = kt * (d[1:] - w.gam_p)
            tnorm = float(np.hypot(tau[0], tau[1]))
            strength = c_prime - sig_nom * p.tan_phi
            if tnorm > max(strength, 0.0) + tol:
                that = tau / tnorm
                chi = p.tan_phi * (1.0 - dn) * kn
                dk = min(_slip_increment(p, w, tnorm, strength, chi), tnorm / kt)
                kap_s = _kappa_s_from_w(p, w.w_s) + dk
                w.w_s = _shear_work(p, kap_s)
                w.gam_p += dk * that
                w.p_other += p.tan_phi_g * dk
                w.shear = changed = True
                w.shear_open = w.shear_open or open_joint
            elif strength < -tol and p.tan_phi > 0.0 and sig_nom > 0.0:
                # tension cutoff poking outside a softened cone: relieve the
                # normal stress back to the cone apex (plastic opening)
                over = sig_nom - c_prime / p.tan_phi
                if over > tol / p.tan_phi:
                    w.p_other += over / ((1.0 - dn) * kn)
                    w.corner = changed = True

        if changed:
            dmg = damage_update(p, _tension_work(p, w.kap_t), w.r_c * p.g_c, w.w_s)
            dmg = tuple(
                max(a, b) for a, b in zip(dmg, (state.dmg_nt, state.dmg_nc, state.dmg_t))
            )
        else:
            break
    else:
        raise NoConvergence(
            "interface return mapping did not settle within "
            f"{MAX_LOCAL_ITER} passes (strain {d}, likely unstable parameters)"
        )

    eps_p = np.array([w.eps_p_n(p), w.gam_p[0], w.gam_p[1]])
    s_eff = np.array([kn * (d[0] - eps_p[0]), kt * (d[1] - eps_p[1]), kt * (d[2] - eps_p[2])])
    return w, dmg, s_eff


def _cohesion(params: InterfaceParams, w_s: float) -> float:
    if params.c <= 0.0:
        return 0.0
    return params.c * math.sqrt(max(0.0, 1.0 - w_s / params.g_s))


def _slip_increment(params, w, tnorm, strength, chi) -> float:
    """Slip needed to land back on the cone, crossing cohesion exhaustion if needed.

    Strength evolves during the slip: cohesion softens at beta = c/kappa_su per
    unit slip while dilatancy raises the frictional part at chi*tan_phi_g, so
    the consistency solve uses the net modulus k_t - beta + chi*tan_phi_g.
    """
    kt = params.k_shear
    dila = chi * params.tan_phi_g
    c_eff = _cohesion(params, w.w_s)
    frict = strength - c_eff  # non-softening part of the strength
    if c_eff > 0.0:
        beta = params.c / params.kappa_su
        denom = max(kt - beta + dila, 1e-6 * kt)
        dk = (tnorm - strength) / denom
        kap_rem = params.kappa_su - _kappa_s_from_w(params, w.w_s)
        if dk <= kap_rem:
            return max(dk, 0.0)
        # exhaust cohesion, then slide on dilatant friction alone
        dk = kap_rem
        resid = (tnorm - kt * dk) - max(frict + dila * dk, 0.0)
        return dk + max(resid, 0.0) / (kt + dila)
    return max(tnorm - max(frict, 0.0), 0.0) / (kt + dila)


def _nominal(params, sig_eff_vec, dmg) -> tuple[np.ndarray, float, float]:
    """Apply the active damage matrix; returns (s, D_n_active, D_t_active)."""
    open_joint = sig_eff_vec[0] > 0.0
    dn = dmg[0] if open_joint else dmg[1]
    dt = dmg[2] if open_joint else 0.0
    s = np.array(
        [
            (1.0 - dn) * sig_eff_vec[0],
            (1.0 - dt) * sig_eff_vec[1],
            (1.0 - dt) * sig_eff_vec[2],
        ]
    )
    return s, dn, dt


def integrate(
    params: InterfaceParams,
    state: InterfaceState,
    d_total,
    compute_tangent: bool = True,
) -> StressReturn:
    """Integrate the law over one strain step from a committed state.

    Pure function: `state` is never mutated; the returned state is a trial
    that the caller commits once its global increment converges.
    """
    d = np.asarray(d_total, dtype=float).reshape(3)
    w, dmg, s_eff = _return_map(params, state, d)
    s, dn_act, dt_act = _nominal(params, s_eff, dmg)

    q_new = max(
        state.q,
        params.f_t * min(w.kap_t / params.kappa_tu, 1.0) if params.f_t > 0.0 else 0.0,
    )
    new_state = InterfaceState(
        d_p=np.array([w.eps_p_n(params), w.gam_p[0], w.gam_p[1]]),
        q=q_new,
        w_t=max(state.w_t, _tension_work(params, w.kap_t)),
        w_c=max(state.w_c, w.r_c * params.g_c),
        w_s=max(state.w_s, w.w_s),
        dmg_nt=dmg[0],
        dmg_nc=dmg[1],
        dmg_t=dmg[2],
    )

    if not compute_tangent:
        return StressReturn(s=s, s_eff=s_eff, tangent=np.empty((3, 3)), new_state=new_state)

    tangent = _tangent(params, state, d, w, dmg, s_eff, dn_act, dt_act)
    return StressReturn(s=s, s_eff=s_eff, tangent=tangent, new_state=new_state)


# ---------------------------------------------------------------------------
# Algorithmic tangents
# ---------------------------------------------------------------------------


def _tangent(params, state, d, w, dmg, s_eff, dn_act, dt_act) -> np.ndarray:
    p = params
    kn, kt = p.k_normal, p.k_shear
    mechanisms = (w.ten, w.comp, w.shear)

    if w.corner or sum(mechanisms) > 1 or (w.shear and w.shear_open):
        return _fd_tangent(p, state, d)

    T = np.zeros((3, 3))
    if not any(mechanisms):
        T[0, 0] = (1.0 - dn_act) * kn
        T[1, 1] = T[2, 2] = (1.0 - dt_act) * kt
        return T

    if w.ten:
        if p.f_t <= 0.0 or w.kap_t >= p.kappa_tu:
            T[0, 0] = _DMG_EPS * kn
        else:
            yp = -p.f_t / p.kappa_tu  # envelope softening modulus
            T[0, 0] = kn * yp / (kn + yp)
        T[1, 1] = T[2, 2] = (1.0 - dt_act) * kt
        return T

    if w.comp:
        r = w.r_c
        # sigma_n = -(1 - r(2-r)) f_c; chain rule through the exact work update
        T[0, 0] = -2.0 * p.f_c**2 * (1.0 - r) ** 3 / p.g_c
        T[1, 1] = T[2, 2] = kt  # closed joint: shear damage inactive
        return T

    # single-mechanism closed-joint shear flow
    return _shear_tangent_closed(p, state, d, w, dmg)


def _shear_tangent_closed(p, state, d, w, dmg) -> np.ndarray:
    kn, kt = p.k_normal, p.k_shear
    tau_tr = kt * (d[1:] - np.asarray(state.d_p[1:], dtype=float))
    tn_tr = float(np.hypot(tau_tr[0], tau_tr[1]))
    if tn_tr <= 0.0:
        return _fd_tangent(p, state, d)
    that = tau_tr / tn_tr

    sig_eff = kn * (d[0] - w.eps_p_n(p))
    dnc = dmg[1] if sig_eff <= 0.0 else dmg[0]
    c_eff = _cohesion(p, w.w_s)
    beta = p.c / p.kappa_su if c_eff > 0.0 else 0.0
    chi = p.tan_phi * (1.0 - dnc) * kn
    denom = 1.0 - beta / kt + chi * p.tan_phi_g / kt
    if abs(denom) < 1e-12:
        return _fd_tangent(p, state, d)

    m = c_eff - (1.0 - dnc) * sig_eff * p.tan_phi
    m = max(m, 0.0)
    dm_dtn = (-beta / kt + chi * p.tan_phi_g / kt) / denom
    dm_de0 = -chi / denom

    T = np.zeros((3, 3))
    # shear rows: tau = m * that(gamma); that varies with the trial direction
    dir_part = (m / tn_tr) * kt * (np.eye(2) - np.outer(that, that))
    for i in range(2):
        for j in range(2):
            T[1 + i, 1 + j] = dir_part[i, j] + that[i] * dm_dtn * kt * that[j]
        T[1 + i, 0] = that[i] * dm_de0
    # normal row: dilatancy feeds plastic opening back into sigma
    # dkappa = (dtn - dm)/kt
    dsig = (1.0 - dnc) * kn
    for j in range(2):
        dk = (kt * that[j] - dm_dtn * kt * that[j]) / kt
        T[0, 1 + j] = -dsig * p.tan_phi_g * dk
    dk0 = -dm_de0 / kt
    T[0, 0] = dsig * (1.0 - p.tan_phi_g * dk0)
    return T


def _fd_tangent(params, state, d) -> np.ndarray:
    """Central-difference tangent of the branch map (corner regimes)."""
    scale = params.f_t / params.k_normal + params.c / params.k_shear
    h = 1e-5 * max(float(np.max(np.abs(d))), scale, 1e-9)
    T = np.zeros((3, 3))
    for j in range(3):
        dp = d.copy()
        dm = d.copy()
        dp[j] += h
        dm[j] -= h
        sp = integrate(params, state, dp, compute_tangent=False).s
        sm = integrate(params, state, dm, compute_tangent=False).s
        T[:, j] = (sp - sm) / (2.0 * h)
    return T

"""Homogenized continuum with three embedded interface layers.

A macroscopic engineering-strain vector ``eps = [ex ey ez gxy gxz gyz]``
(local material frame) is split onto three orthogonal internal layers:

* layer x carries ``(d_x, d_xy, d_xz)``,
* layer y carries ``(d_y, d_yx, d_yz)``,
* layer z carries ``(d_z, d_zx, d_zy)``,

with normals equal to the macro normals and each engineering shear
partitioned between its two layers, ``d_kh + d_hk = g_kh``. The three split
fractions are the unknowns of an inner Newton iteration that enforces shear
reciprocity ``s_kh = s_hk`` between the paired layer stresses. The internal
strain/stress bookkeeping uses the 9-component ordering

    d_int = [d_x d_y d_z d_xy d_xz d_yz d_yx d_zx d_zy]

On convergence the macroscopic stress is the virtual-work dual
``sigma = C^T s_int`` and the tangent ``K = C^T K_int C`` with the
compatibility matrix ``C`` built from the converged layer tangents. ``K`` is
mildly unsymmetric once layers go inelastic; global solvers must not assume
symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, SingularConstraint
from .interface_law import InterfaceParams, InterfaceState, integrate

MAX_INNER_ITER = 40
SUBSTEPS_ON_RETRY = 10
COND_LIMIT = 1e14

# d_int slots of each layer's (normal, shear1, shear2) components
_LAYER_SLOTS = ((0, 3, 4), (1, 6, 5), (2, 7, 8))


@dataclass(frozen=True)
class LayerPointState:
    """Committed state of one Gauss point: three layers plus internal strain."""

    layers: tuple  # ((InterfaceParams, InterfaceState) x3) for layers x, y, z
    d_int: np.ndarray

    @staticmethod
    def virgin(params_x: InterfaceParams, params_y: InterfaceParams,
               params_z: InterfaceParams) -> "LayerPointState":
        layers = tuple((p, InterfaceState.virgin()) for p in (params_x, params_y, params_z))
        return LayerPointState(layers=layers, d_int=np.zeros(9))

    def committed_eps(self) -> np.ndarray:
        """Macro strain consistent with the committed internal strains."""
        d = self.d_int
        return np.array([d[0], d[1], d[2], d[3] + d[6], d[4] + d[7], d[5] + d[8]])


@dataclass(frozen=True)
class MacroReturn:
    sigma: np.ndarray
    K: np.ndarray
    new_state: LayerPointState
    iterations: int


def assemble_A_B(S_x, S_y, S_z) -> tuple[np.ndarray, np.ndarray]:
    """Reciprocity Jacobian A (3x3) and macro-strain sensitivity B (3x6).

    A is the Jacobian of the residual [s_xy-s_yx, s_xz-s_zx, s_yz-s_zy] with
    respect to the first-layer shear strains (d_xy, d_xz, d_yz).
    """
    Sx, Sy, Sz = (np.asarray(S, dtype=float) for S in (S_x, S_y, S_z))
    A = np.array([
        [Sx[1, 1] + Sy[1, 1], Sx[1, 2], -Sy[1, 2]],
        [Sx[2, 1], Sx[2, 2] + Sz[1, 1], Sz[1, 2]],
        [-Sy[2, 1], Sz[2, 1], Sy[2, 2] + Sz[2, 2]],
    ])
    B = np.array([
        [Sx[1, 0], -Sy[1, 0], 0.0, -Sy[1, 1], 0.0, 0.0],
        [Sx[2, 0], 0.0, -Sz[1, 0], 0.0, -Sz[1, 1], -Sz[1, 2]],
        [0.0, Sy[2, 0], -Sz[2, 0], Sy[2, 1], -Sz[2, 1], -Sz[2, 2]],
    ])
    if np.linalg.cond(A) > COND_LIMIT:
        raise SingularConstraint(
            "shear-reciprocity matrix is singular (fully degraded layer pair)"
        )
    return A, B


def compatibility(S_x, S_y, S_z) -> np.ndarray:
    """9x6 matrix C mapping macro strain increments to internal ones."""
    A, B = assemble_A_B(S_x, S_y, S_z)
    AinvB = np.linalg.solve(A, B)
    C = np.zeros((9, 6))
    C[0:3, 0:3] = np.eye(3)
    C[3:6, :] = -AinvB
    C[6:9, 3:6] = np.eye(3)
    C[6:9, :] += AinvB
    return C


def _layer_strains(eps: np.ndarray, u: np.ndarray) -> tuple:
    """Distribute (macro strain, first-layer shears) onto the three layers."""
    dx = np.array([eps[0], u[0], u[1]])
    dy = np.array([eps[1], eps[3] - u[0], u[2]])
    dz = np.array([eps[2], eps[4] - u[1], eps[5] - u[2]])
    return dx, dy, dz


def _integrate_layers(layers, eps, u, want_tangent=True):
    ds = _layer_strains(eps, u)
    out = [integrate(p, st, d, compute_tangent=want_tangent)
           for (p, st), d in zip(layers, ds)]
    r = np.array([
        out[0].s[1] - out[1].s[1],
        out[0].s[2] - out[2].s[1],
        out[1].s[2] - out[2].s[2],
    ])
    return out, r


def _default_tol(layers, eps) -> float:
    kmax = max(max(p.k_normal, p.k_shear) for p, _ in layers)
    return max(1e-9 * kmax * float(np.linalg.norm(eps)), 1e-14)


def _solve_masked(A, r, live) -> np.ndarray:
    """Newton update with fully degraded shear pairs frozen at their split."""
    du = np.zeros(3)
    if not live.any():
        return du
    sub = A[np.ix_(live, live)]
    if np.linalg.cond(sub) > COND_LIMIT:
        raise SingularConstraint("reciprocity system singular beyond dead-pair freezing")
    du[live] = np.linalg.solve(sub, r[live])
    return du


def macro_integrate(state: LayerPointState, eps_new, tol: float | None = None) -> MacroReturn:
    """Inner equilibrium solve for one macro strain state (trial result)."""
    eps = np.asarray(eps_new, dtype=float).reshape(6)
    if tol is None:
        tol = _default_tol(state.layers, eps)
    kref = max(max(p.k_normal, p.k_shear) for p, _ in state.layers)

    try:
        return _macro_step(state, eps, tol, kref)
    except NoConvergence:
        # one retry with sub-incrementation from the committed strain
        eps0 = state.committed_eps()
        st = state
        total_iter = 0
        for i in range(1, SUBSTEPS_ON_RETRY + 1):
            frac = i / SUBSTEPS_ON_RETRY
            res = _macro_step(st, eps0 + frac * (eps - eps0), tol, kref)
            st = res.new_state
            total_iter += res.iterations
        return MacroReturn(sigma=res.sigma, K=res.K, new_state=st,
                           iterations=total_iter)


def _macro_step(state, eps, tol, kref) -> MacroReturn:
    layers = state.layers
    u = state.d_int[3:6].copy()

    # predictor: distribute the strain increment with the committed tangents
    eps_old = state.committed_eps()
    deps = eps - eps_old
    if np.any(deps):
        out0, _ = _integrate_layers(layers, eps_old, u)
        try:
            C0 = compatibility(*(o.tangent for o in out0))
            u += C0[3:6, :] @ deps
        except SingularConstraint:
            u += 0.5 * deps[3:6]

    # a pair whose combined shear tangent and stress mismatch both collapsed is
    # fully degraded: its split is frozen and exempt from the residual norm
    stress_ref = kref * max(float(np.linalg.norm(eps)), 1e-12)
    dead_tol = max(tol, 1e-7 * stress_ref)
    strain_cap = 10.0 * max(float(np.max(np.abs(eps))), float(np.max(np.abs(u))), 1e-6)

    iterations = 0
    out, r = _integrate_layers(layers, eps, u)
    for _ in range(MAX_INNER_ITER):
        iterations += 1
        A, _ = _assemble_raw(out)
        dead = (np.abs(np.diag(A)) <= 1e-6 * kref) & (np.abs(r) <= dead_tol)
        live = ~dead
        rnorm = float(np.max(np.abs(r[live]))) if live.any() else 0.0
        if rnorm <= tol:
            break
        du = _solve_masked(A, r, live)
        big = float(np.max(np.abs(du)))
        if big > strain_cap:
            du *= strain_cap / big
        # backtracking on the residual norm guards the softening branches
        alpha = 1.0
        for _ls in range(8):
            out_try, r_try = _integrate_layers(layers, eps, u - alpha * du)
            rn_try = float(np.max(np.abs(r_try[live]))) if live.any() else 0.0
            if rn_try < rnorm or alpha <= 1.0 / 128.0:
                u = u - alpha * du
                out, r = out_try, r_try
                break
            alpha *= 0.5
    else:
        raise NoConvergence(
            f"macro inner loop: reciprocity residual {np.max(np.abs(r)):.3e} "
            f"after {MAX_INNER_ITER} iterations (tol {tol:.3e})"
        )

    tangents = [o.tangent for o in out]
    A, B = _assemble_raw(out)
    live = np.abs(np.diag(A)) > 1e-6 * kref
    if live.all():
        C = compatibility(*tangents)
    else:
        # frozen split: dead pairs keep their last converged share
        C = np.zeros((9, 6))
        C[0:3, 0:3] = np.eye(3)
        C[6:9, 3:6] = np.eye(3)
        AinvB = np.zeros((3, 6))
        if live.any():
            sub = A[np.ix_(live, live)]
            AinvB[live] = np.linalg.solve(sub, B[live][:, :])
        C[3:6, :] = -AinvB
        C[6:9, :] += AinvB

    K_int = np.zeros((9, 9))
    s_int = np.zeros(9)
    for slots, o in zip(_LAYER_SLOTS, out):
        K_int[np.ix_(slots, slots)] = o.tangent
        s_int[list(slots)] = o.s
    sigma = C.T @ s_int
    K = C.T @ K_int @ C

    new_d_int = np.zeros(9)
    dx, dy, dz = _layer_strains(eps, u)
    for slots, d in zip(_LAYER_SLOTS, (dx, dy, dz)):
        new_d_int[list(slots)] = d
    new_layers = tuple((p, o.new_state) for (p, _), o in zip(layers, out))
    return MacroReturn(
        sigma=sigma, K=K,
        new_state=LayerPointState(layers=new_layers, d_int=new_d_int),
        iterations=iterations,
    )


def _assemble_raw(out) -> tuple[np.ndarray, np.ndarray]:
    """A and B without the conditioning check (dead pairs handled by caller)."""
    Sx, Sy, Sz = (o.tangent for o in out)
    A = np.array([
        [Sx[1, 1] + Sy[1, 1], Sx[1, 2], -Sy[1, 2]],
        [Sx[2, 1], Sx[2, 2] + Sz[1, 1], Sz[1, 2]],
        [-Sy[2, 1], Sz[2, 1], Sy[2, 2] + Sz[2, 2]],
    ])
    B = np.array([
        [Sx[1, 0], -Sy[1, 0], 0.0, -Sy[1, 1], 0.0, 0.0],
        [Sx[2, 0], 0.0, -Sz[1, 0], 0.0, -Sz[1, 1], -Sz[1, 2]],
        [0.0, Sy[2, 0], -Sz[2, 0], Sy[2, 1], -Sz[2, 1], -Sz[2, 2]],
    ])
    return A, B

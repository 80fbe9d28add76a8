"""Global assembly: internal forces, tangent, lumped mass, load vectors.

Element kinematics (B matrices, Jacobians, frame rotations) are precomputed
once per model; repeated assembly only evaluates materials. Elements are
grouped by (type, material) so elastic groups use a precomputed stiffness
and nonlinear groups loop over their Gauss points. The global tangent is
stored unsymmetric (macro and non-associated backfill tangents are).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .elements import (
    HEX20_FACES,
    TET10_FACES,
    face_shape,
    gauss_hex27,
    gauss_quad4,
    gauss_tet4,
    hex20_shape,
    interface_B,
    solid_B,
    strain_rotation,
    tet10_shape,
)
from .errors import NoConvergence
from .materials import GRAVITY

_SOLID_RULES = {
    "hex20": (hex20_shape, gauss_hex27(), 20),
    "tet10": (tet10_shape, gauss_tet4(), 10),
}


def _dof_map(conn: np.ndarray) -> np.ndarray:
    n_e, nn = conn.shape
    dofs = np.empty((n_e, 3 * nn), dtype=np.int64)
    dofs[:, 0::3] = 3 * conn
    dofs[:, 1::3] = 3 * conn + 1
    dofs[:, 2::3] = 3 * conn + 2
    return dofs


class _Group:
    """All elements of one block sharing one material."""

    def __init__(self, etype, elem_ids, conn, material, frames, frame_ids, nodes):
        self.etype = etype
        self.elem_ids = elem_ids  # indices within the block (for reporting)
        self.material = material
        self.conn = conn
        self.dofs = _dof_map(conn)
        n_e = conn.shape[0]

        if etype == "interface16":
            pts, wts = gauss_quad4()
            self.ngp = len(wts)
            self.B = np.zeros((n_e, self.ngp, 3, 48))
            self.detJw = np.zeros((n_e, self.ngp))
            for e in range(n_e):
                xe = nodes[conn[e]]
                mid = 0.5 * (xe[:8] + xe[8:])
                for g, ((xi, eta), w) in enumerate(zip(pts, wts)):
                    B, detJ, _ = interface_B(mid, xi, eta)
                    self.B[e, g] = B
                    self.detJw[e, g] = detJ * w
            self.M_rot = None
            self.intN = None
            self.mass_diag = np.zeros((n_e, conn.shape[1]))
        else:
            shape, (pts, wts), nn = _SOLID_RULES[etype]
            self.ngp = len(wts)
            nd = 3 * nn
            self.B = np.zeros((n_e, self.ngp, 6, nd))
            self.detJw = np.zeros((n_e, self.ngp))
            self.intN = np.zeros((n_e, nn))        # integral of N_i dV
            self.mass_diag = np.zeros((n_e, nn))   # HRZ diagonal masses
            shapes = [shape(*p) for p in pts]
            for e in range(n_e):
                xe = nodes[conn[e]]
                diag = np.zeros(nn)
                vol = 0.0
                for g, ((N, dN), w) in enumerate(zip(shapes, wts)):
                    B, detJ = solid_B(dN, xe)
                    self.B[e, g] = B
                    self.detJw[e, g] = detJ * w
                    self.intN[e] += N * detJ * w
                    diag += N * N * detJ * w
                    vol += detJ * w
                rho = material.density
                if rho > 0.0 and diag.sum() > 0.0:
                    self.mass_diag[e] = diag * (rho * vol / diag.sum())
            if material.needs_frame:
                self.M_rot = np.zeros((n_e, 6, 6))
                for e in range(n_e):
                    R = frames[frame_ids[e]]
                    self.M_rot[e] = strain_rotation(R)
            else:
                self.M_rot = None

        self.linear = material.kind == "elastic"
        if self.linear:
            C = material.C
            self.K_e = np.einsum(
                "egji,jk,egkl,eg->eil", self.B, C, self.B, self.detJw, optimize=True
            )

    # -- states -----------------------------------------------------------

    def init_states(self):
        if self.linear:
            return None
        return [[self.material.init_state() for _ in range(self.ngp)]
                for _ in range(self.conn.shape[0])]

    # -- response ---------------------------------------------------------

    def response(self, u, states, want_K=True, capture=None):
        """Element force vectors and tangents for the current displacements."""
        n_e, nd = self.dofs.shape
        u_e = u[self.dofs]
        if self.linear:
            f = np.einsum("eij,ej->ei", self.K_e, u_e)
            if capture is not None:
                eps = np.einsum("egij,ej->egi", self.B, u_e)
                sig = np.einsum("ij,egj->egi", self.material.C, eps)
                capture[self.key] = (sig, None)
            return f, (self.K_e if want_K else None), states

        strains = np.einsum("egij,ej->egi", self.B, u_e)
        f = np.zeros((n_e, nd))
        K = np.zeros((n_e, nd, nd)) if want_K else None
        new_states = []
        cap_sig = np.zeros((n_e, self.ngp, strains.shape[2])) if capture is not None else None
        for e in range(n_e):
            row_states = []
            for g in range(self.ngp):
                eps = strains[e, g]
                if self.M_rot is not None:
                    eps = self.M_rot[e] @ eps
                try:
                    sig, D, st = self.material.integrate(eps, states[e][g])
                except NoConvergence as err:
                    raise NoConvergence(
                        f"{self.etype} group mat={self.material.kind} elem "
                        f"{self.elem_ids[e]} gp {g}: {err}"
                    ) from err
                row_states.append(st)
                if self.M_rot is not None:
                    M = self.M_rot[e]
                    sig = M.T @ sig
                    D = M.T @ D @ M
                if cap_sig is not None:
                    cap_sig[e, g] = sig
                B = self.B[e, g]
                w = self.detJw[e, g]
                f[e] += (sig @ B) * w
                if want_K:
                    K[e] += B.T @ (D @ B) * w
            new_states.append(row_states)
        if capture is not None:
            capture[self.key] = (cap_sig, new_states)
        return f, K, new_states


class Assembler:
    """Caches element groups and assembles global vectors/matrices."""

    def __init__(self, model):
        self.model = model
        self.ndof = model.ndof
        nodes = model.mesh.nodes
        frames = model.mesh.frames
        self.groups = []
        for etype, block in model.mesh.blocks.items():
            for mid in np.unique(block.mat):
                sel = np.where(block.mat == mid)[0]
                g = _Group(
                    etype, sel, block.conn[sel], model.materials[int(mid)],
                    frames, block.frame[sel], nodes,
                )
                g.key = (etype, int(mid))
                self.groups.append(g)

    # -- states -----------------------------------------------------------

    def init_states(self):
        return [g.init_states() for g in self.groups]

    # -- global quantities --------------------------------------------------

    def assemble(self, u, states, want_K=True, capture=None):
        F = np.zeros(self.ndof)
        trial = []
        rows, cols, vals = [], [], []
        for g, st in zip(self.groups, states):
            f, K, new_st = g.response(u, st, want_K=want_K, capture=capture)
            trial.append(new_st)
            np.add.at(F, g.dofs, f)
            if want_K and K is not None:
                nd = g.dofs.shape[1]
                r = np.repeat(g.dofs, nd, axis=1).ravel()
                c = np.tile(g.dofs, (1, nd)).ravel()
                rows.append(r)
                cols.append(c)
                vals.append(K.ravel())
        Kg = None
        if want_K:
            Kg = sp.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(self.ndof, self.ndof),
            ).tocsc()
        return F, Kg, trial

    def lumped_mass(self) -> np.ndarray:
        m = np.zeros(self.ndof)
        for g in self.groups:
            if g.mass_diag.sum() == 0.0:
                continue
            for k in range(3):
                np.add.at(m, 3 * g.conn + k, g.mass_diag)
        return m

    def gravity_load(self, direction) -> np.ndarray:
        """Body force rho*g along `direction` (multiples of g)."""
        F = np.zeros(self.ndof)
        dvec = np.asarray(direction, dtype=float) * GRAVITY
        for g in self.groups:
            rho = g.material.density
            if rho == 0.0 or g.intN is None:
                continue
            for k in range(3):
                if dvec[k]:
                    np.add.at(F, 3 * g.conn + k, rho * dvec[k] * g.intN)
        return F

    def pressure_load(self, faces, p: float) -> np.ndarray:
        """Consistent nodal forces of a pressure p acting on solid faces.

        Positive p pushes against the outward face normal (compression).
        """
        F = np.zeros(self.ndof)
        mesh = self.model.mesh
        face_tables = {"hex20": HEX20_FACES, "tet10": TET10_FACES}
        for etype, elem, face in faces:
            conn = mesh.blocks[etype].conn[elem]
            fnodes = np.array(face_tables[etype][face])
            xe = mesh.nodes[conn[fnodes]]
            shape, (pts, wts) = face_shape(len(fnodes))
            for (a, b), w in zip(pts, np.atleast_1d(wts)):
                N, dN = shape(a, b)
                t1 = dN[:, 0] @ xe
                t2 = dN[:, 1] @ xe
                nvec = np.cross(t1, t2)  # outward * |J|
                for i, ni in enumerate(fnodes):
                    node = conn[ni]
                    F[3 * node: 3 * node + 3] += -p * N[i] * nvec * w
        return F

    def external_load(self, case) -> np.ndarray:
        """Static load vector of one LoadCase (no base excitation)."""
        F = np.zeros(self.ndof)
        for node, fvec in case.nodal:
            F[3 * node: 3 * node + 3] += np.asarray(fvec, dtype=float)
        if case.gravity is not None:
            F += self.gravity_load(case.gravity)
        for fset, p in case.pressures:
            F += self.pressure_load(self.model.mesh.fsets[fset], p)
        return F

"""Shape functions, quadrature and kinematics for the element library.

Element types: 20-node serendipity hexahedron (27-point Gauss), 10-node
tetrahedron (4-point), and a 16-node zero-thickness interface made of two
paired 8-node quadrilateral faces (2x2 Gauss on the midsurface).

Voigt order: [ex ey ez gxy gxz gyz] with engineering shears; stresses
[sx sy sz txy txz tyz]. Node orderings follow the VTK quadratic cells so
meshes export directly.
"""

from __future__ import annotations

import numpy as np

# natural coordinates of the hex20 nodes (VTK/Abaqus ordering)
_HEX20_XI = np.array([
    [-1, -1, -1], [1, -1, -1], [1, 1, -1], [-1, 1, -1],
    [-1, -1, 1], [1, -1, 1], [1, 1, 1], [-1, 1, 1],
    [0, -1, -1], [1, 0, -1], [0, 1, -1], [-1, 0, -1],
    [0, -1, 1], [1, 0, 1], [0, 1, 1], [-1, 0, 1],
    [-1, -1, 0], [1, -1, 0], [1, 1, 0], [-1, 1, 0],
], dtype=float)

# local faces of the hex20 as quad8 node index lists (outward normals)
HEX20_FACES = (
    (0, 3, 2, 1, 11, 10, 9, 8),     # zeta = -1
    (4, 5, 6, 7, 12, 13, 14, 15),   # zeta = +1
    (0, 1, 5, 4, 8, 17, 12, 16),    # eta = -1
    (2, 3, 7, 6, 10, 19, 14, 18),   # eta = +1
    (1, 2, 6, 5, 9, 18, 13, 17),    # xi = +1
    (3, 0, 4, 7, 11, 16, 15, 19),   # xi = -1
)

TET10_FACES = (
    (0, 2, 1, 6, 5, 4),
    (0, 1, 3, 4, 8, 7),
    (1, 2, 3, 5, 9, 8),
    (0, 3, 2, 7, 9, 6),
)


def hex20_shape(xi: float, eta: float, zeta: float):
    """Serendipity shape functions N (20,) and natural gradients dN (20, 3)."""
    N = np.zeros(20)
    dN = np.zeros((20, 3))
    for i, (a, b, c) in enumerate(_HEX20_XI):
        if a and b and c:  # corner
            f = (1 + a * xi) * (1 + b * eta) * (1 + c * zeta)
            g = a * xi + b * eta + c * zeta - 2.0
            N[i] = 0.125 * f * g
            dN[i, 0] = 0.125 * a * (1 + b * eta) * (1 + c * zeta) * (g + (1 + a * xi))
            dN[i, 1] = 0.125 * b * (1 + a * xi) * (1 + c * zeta) * (g + (1 + b * eta))
            dN[i, 2] = 0.125 * c * (1 + a * xi) * (1 + b * eta) * (g + (1 + c * zeta))
        elif a == 0:
            N[i] = 0.25 * (1 - xi * xi) * (1 + b * eta) * (1 + c * zeta)
            dN[i, 0] = -0.5 * xi * (1 + b * eta) * (1 + c * zeta)
            dN[i, 1] = 0.25 * b * (1 - xi * xi) * (1 + c * zeta)
            dN[i, 2] = 0.25 * c * (1 - xi * xi) * (1 + b * eta)
        elif b == 0:
            N[i] = 0.25 * (1 + a * xi) * (1 - eta * eta) * (1 + c * zeta)
            dN[i, 0] = 0.25 * a * (1 - eta * eta) * (1 + c * zeta)
            dN[i, 1] = -0.5 * eta * (1 + a * xi) * (1 + c * zeta)
            dN[i, 2] = 0.25 * c * (1 + a * xi) * (1 - eta * eta)
        else:  # c == 0
            N[i] = 0.25 * (1 + a * xi) * (1 + b * eta) * (1 - zeta * zeta)
            dN[i, 0] = 0.25 * a * (1 + b * eta) * (1 - zeta * zeta)
            dN[i, 1] = 0.25 * b * (1 + a * xi) * (1 - zeta * zeta)
            dN[i, 2] = -0.5 * zeta * (1 + a * xi) * (1 + b * eta)
    return N, dN


def tet10_shape(xi: float, eta: float, zeta: float):
    """Quadratic tetrahedron (VTK node order): N (10,), dN (10, 3)."""
    l1 = 1.0 - xi - eta - zeta
    l2, l3, l4 = xi, eta, zeta
    N = np.array([
        l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), l3 * (2 * l3 - 1), l4 * (2 * l4 - 1),
        4 * l1 * l2, 4 * l2 * l3, 4 * l1 * l3,
        4 * l1 * l4, 4 * l2 * l4, 4 * l3 * l4,
    ])
    dl = np.array([[-1, -1, -1], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
    dN = np.zeros((10, 3))
    for j in range(3):
        g = dl[:, j]
        dN[:, j] = [
            (4 * l1 - 1) * g[0], (4 * l2 - 1) * g[1], (4 * l3 - 1) * g[2],
            (4 * l4 - 1) * g[3],
            4 * (g[0] * l2 + l1 * g[1]), 4 * (g[1] * l3 + l2 * g[2]),
            4 * (g[0] * l3 + l1 * g[2]), 4 * (g[0] * l4 + l1 * g[3]),
            4 * (g[1] * l4 + l2 * g[3]), 4 * (g[2] * l4 + l3 * g[3]),
        ]
    return N, dN


def quad8_shape(xi: float, eta: float):
    """Serendipity quadrilateral: N (8,), dN (8, 2)."""
    co = np.array([
        [-1, -1], [1, -1], [1, 1], [-1, 1],
        [0, -1], [1, 0], [0, 1], [-1, 0],
    ], dtype=float)
    N = np.zeros(8)
    dN = np.zeros((8, 2))
    for i, (a, b) in enumerate(co):
        if a and b:
            N[i] = 0.25 * (1 + a * xi) * (1 + b * eta) * (a * xi + b * eta - 1)
            dN[i, 0] = 0.25 * a * (1 + b * eta) * (2 * a * xi + b * eta)
            dN[i, 1] = 0.25 * b * (1 + a * xi) * (a * xi + 2 * b * eta)
        elif a == 0:
            N[i] = 0.5 * (1 - xi * xi) * (1 + b * eta)
            dN[i, 0] = -xi * (1 + b * eta)
            dN[i, 1] = 0.5 * b * (1 - xi * xi)
        else:
            N[i] = 0.5 * (1 + a * xi) * (1 - eta * eta)
            dN[i, 0] = 0.5 * a * (1 - eta * eta)
            dN[i, 1] = -eta * (1 + a * xi)
    return N, dN


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

_G3 = np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_W3 = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
_G2 = np.array([-1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0)])


def gauss_hex27():
    pts, wts = [], []
    for a, wa in zip(_G3, _W3):
        for b, wb in zip(_G3, _W3):
            for c, wc in zip(_G3, _W3):
                pts.append((a, b, c))
                wts.append(wa * wb * wc)
    return np.array(pts), np.array(wts)


def gauss_tet4():
    a, b = 0.5854101966249685, 0.1381966011250105
    pts = np.array([
        [b, b, b], [a, b, b], [b, a, b], [b, b, a],
    ])
    wts = np.full(4, 1.0 / 24.0)  # reference volume 1/6
    return pts, wts


def gauss_quad4():
    pts, wts = [], []
    for a in _G2:
        for b in _G2:
            pts.append((a, b))
            wts.append(1.0)
    return np.array(pts), np.array(wts)


# ---------------------------------------------------------------------------
# Kinematics
# ---------------------------------------------------------------------------


def solid_B(dN_nat: np.ndarray, coords: np.ndarray):
    """Strain-displacement matrix (6, 3n) and |J| at one Gauss point."""
    J = dN_nat.T @ coords  # (3,3): dx/dxi
    detJ = float(np.linalg.det(J))
    if detJ <= 0.0:
        raise ValueError(f"non-positive Jacobian {detJ:.3e}")
    dN = dN_nat @ np.linalg.inv(J)  # (n,3) global gradients
    n = dN.shape[0]
    B = np.zeros((6, 3 * n))
    B[0, 0::3] = dN[:, 0]
    B[1, 1::3] = dN[:, 1]
    B[2, 2::3] = dN[:, 2]
    B[3, 0::3] = dN[:, 1]
    B[3, 1::3] = dN[:, 0]
    B[4, 0::3] = dN[:, 2]
    B[4, 2::3] = dN[:, 0]
    B[5, 1::3] = dN[:, 2]
    B[5, 2::3] = dN[:, 1]
    return B, detJ


def _voigt_to_tensor(v, shear_factor):
    return np.array([
        [v[0], shear_factor * v[3], shear_factor * v[4]],
        [shear_factor * v[3], v[1], shear_factor * v[5]],
        [shear_factor * v[4], v[5] * shear_factor, v[2]],
    ])


def strain_rotation(R: np.ndarray) -> np.ndarray:
    """6x6 map M with eps_local = M @ eps_global (engineering shears).

    R rows are the local axes in global components. Stresses pull back with
    M.T (work conjugacy), tangents as M.T @ D_local @ M.
    """
    M = np.zeros((6, 6))
    for j in range(6):
        e = np.zeros(6)
        e[j] = 1.0
        E = _voigt_to_tensor(e, 0.5)
        El = R @ E @ R.T
        M[:, j] = [El[0, 0], El[1, 1], El[2, 2],
                   2 * El[0, 1], 2 * El[0, 2], 2 * El[1, 2]]
    return M


def interface_frame(coords_mid: np.ndarray, xi: float, eta: float) -> np.ndarray:
    """Local triad (rows: normal, tangent1, tangent2) of an interface point."""
    _, dN = quad8_shape(xi, eta)
    t1 = dN[:, 0] @ coords_mid
    t2 = dN[:, 1] @ coords_mid
    n = np.cross(t1, t2)
    n /= np.linalg.norm(n)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    return np.vstack([n, t1, t2])


def interface_B(coords_mid: np.ndarray, xi: float, eta: float):
    """Relative-displacement matrix (3, 48) and surface |J| for interface16.

    Dof layout: 8 bottom-face nodes then 8 top-face nodes, xyz each. Local
    components are (normal opening, two tangential slips); the normal points
    from the bottom face toward the top face.
    """
    N, dN = quad8_shape(xi, eta)
    R = interface_frame(coords_mid, xi, eta)
    t1 = dN[:, 0] @ coords_mid
    t2 = dN[:, 1] @ coords_mid
    detJ = float(np.linalg.norm(np.cross(t1, t2)))
    B = np.zeros((3, 48))
    for i in range(8):
        blk = N[i] * R
        B[:, 3 * i: 3 * i + 3] = -blk
        B[:, 24 + 3 * i: 24 + 3 * i + 3] = blk
    return B, detJ, R


def face_shape(face_nodes: int):
    """Shape functions for a solid face: quad8 or tri6."""
    if face_nodes == 8:
        return quad8_shape, gauss_quad4()
    if face_nodes == 6:
        def tri6(xi, eta):
            l1 = 1 - xi - eta
            N = np.array([
                l1 * (2 * l1 - 1), xi * (2 * xi - 1), eta * (2 * eta - 1),
                4 * l1 * xi, 4 * xi * eta, 4 * l1 * eta,
            ])
            dN = np.array([
                [1 - 4 * l1, 1 - 4 * l1],
                [4 * xi - 1, 0],
                [0, 4 * eta - 1],
                [4 * (l1 - xi), -4 * xi],
                [4 * eta, 4 * xi],
                [-4 * eta, 4 * (l1 - eta)],
            ], dtype=float)
            return N, dN
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        wts = np.full(3, 1.0 / 6.0)
        return tri6, (pts, wts)
    raise ValueError(f"unsupported face node count {face_nodes}")

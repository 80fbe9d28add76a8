"""Mesh and model containers.

Nodes are 0-based internally; the text file format maps arbitrary integer
ids. Units: coordinates mm, forces N, pressures MPa, weight densities
kN/m^3 (converted to consistent mass inside the material wrappers).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DOF_NAMES = {"x": 0, "y": 1, "z": 2}


@dataclass
class ElementBlock:
    etype: str                # hex20 | tet10 | interface16
    conn: np.ndarray          # (n_e, nn) node indices
    mat: np.ndarray           # (n_e,) material ids
    frame: np.ndarray         # (n_e,) frame ids, -1 = global axes


@dataclass
class Mesh:
    nodes: np.ndarray
    blocks: dict = field(default_factory=dict)
    frames: np.ndarray = field(default_factory=lambda: np.zeros((0, 3, 3)))
    nsets: dict = field(default_factory=dict)
    fsets: dict = field(default_factory=dict)  # name -> [(etype, elem, face), ...]

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def n_elements(self) -> int:
        return sum(b.conn.shape[0] for b in self.blocks.values())


@dataclass
class LoadCase:
    nodal: list = field(default_factory=list)      # (node, [fx fy fz] N)
    gravity: np.ndarray | None = None              # direction, multiples of g
    pressures: list = field(default_factory=list)  # (fset name, MPa)


@dataclass
class Model:
    mesh: Mesh
    materials: dict                                # id -> material wrapper
    fixed: list = field(default_factory=list)      # (node, dof index)
    loads: dict = field(default_factory=dict)      # name -> LoadCase

    @property
    def ndof(self) -> int:
        return 3 * self.mesh.n_nodes

    def fixed_dofs(self) -> np.ndarray:
        if not self.fixed:
            return np.zeros(0, dtype=int)
        return np.unique([3 * n + d for n, d in self.fixed])

    def fix_set(self, name: str, dofs: str):
        """Fix the named node set in the given dof letters, e.g. 'xyz'."""
        for n in self.mesh.nsets[name]:
            for ch in dofs:
                self.fixed.append((int(n), DOF_NAMES[ch]))

    def dof(self, node: int, direction) -> int:
        d = DOF_NAMES[direction] if isinstance(direction, str) else int(direction)
        return 3 * int(node) + d

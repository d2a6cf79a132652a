"""Workbench for Auslander-Reiten theory of path algebras over Q.

Subpackages by concern:

- quiver:   ordinary and translation quivers, the plain-text file format,
            validation, length functions, meshes and sectional paths
- meshcat:  mesh categories of translation quivers with length, radical
            filtration of path classes
- cover:    truncated generic coverings of translation quivers
- reps:     quiver representations over Q, Hom/kernel/cokernel, radical
            powers, knitting of Auslander-Reiten components
- functors: well-behaved assignments from a cover into a knitted component
- degrees:  left/right degrees of irreducible morphisms and the
            finite-representation-type decision procedure
- cli:      command line front end
"""
from __future__ import annotations

__version__ = "0.1.0"

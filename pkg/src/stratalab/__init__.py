"""Finite-level verification engine for supersingular loci of GSp(4)-type Rapoport-Zink data.

Modules: ``ring`` (truncated Witt rings), ``lattice`` (symplectic lattices), ``building``
(vertex lattices of the Sp(4) building), ``fq`` and ``dl`` (Deligne-Lusztig strata),
``rz`` (Rapoport-Zink censuses and bijections), ``weyl`` (affine Weyl group of type C2),
``report`` and ``suites`` (verification reports), ``cli`` (the ``stratalab`` command).
"""

from __future__ import annotations

__version__ = "0.1.0"

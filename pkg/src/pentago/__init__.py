"""Rotation-abstracted pentago solving engine.

Subpackage map:

* :mod:`pentago.board` - board packing, rules, win detection (all conventions)
* :mod:`pentago.symmetry` - the 2048-element symmetry group and canonicalization
* :mod:`pentago.supers` - 256-bit rotation-abstracted predicates and values
* :mod:`pentago.census` - exact position counts and overcounting ratios
* :mod:`pentago.layout` - sections, quadrant dictionaries, blocks, block lines
* :mod:`pentago.partition` - deterministic pseudorandom work partitioning
* :mod:`pentago.search` - forward negamax oracle
* :mod:`pentago.engine` - asynchronous slice-by-slice retrograde solver
* :mod:`pentago.midgame` - serial many-stone solver with parity-halved tables
* :mod:`pentago.storage` - durable block-indexed solution files
* :mod:`pentago.server` - HTTP JSON position-value service
"""

__version__ = "0.1.0"

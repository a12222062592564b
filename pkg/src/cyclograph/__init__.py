"""Exact analysis of functional graphs of coset-wise monomial maps of finite fields.

The package decomposes such a map into affine maps of Z/sZ, one per
multiplicative coset, and derives cycle representatives, rooted-tree
isomorphism types and whole-component necklaces without walking all q
field elements.  A brute-force oracle (``cyclograph.cyclomap.brute_graph``)
cross-checks every fast path at desk scale.
"""

from cyclograph.errors import CapExceeded, MappingFormatError

__all__ = ["CapExceeded", "MappingFormatError"]

__version__ = "0.1.0"

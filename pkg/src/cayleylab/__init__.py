"""cayleylab: a desk-scale laboratory for expansion in finite matrix groups.

Submodules, roughly bottom-up:

- fields: F_{p^k} arithmetic on integer codes, vectorised
- groups: SL_m / Sp4 / SU3 (and a cyclic test family), canonical indexing
- bruhat: cell decomposition, exact uniform sampling
- words: free-group words, reduction, return probabilities
- walk: convolution random walks and mixing-phase traces
- spectral: power-iteration gap estimates, bipartite detection
- combinat: product sets, multiplicative energy, covering numbers
- nonconc: trap batteries and the span certificate for word images
- pingpong: exact rational freeness certificates
- sz: exhaustive polynomial zero-counting audits
- cli: batch front door (``cayleylab`` console script)

The compiled kernels are optional; set CAYLEYLAB_PURE=1 to force the
pure-numpy fallback.
"""

__version__ = "0.1.0"

from . import fields, groups  # noqa: F401  (the two roots everything builds on)

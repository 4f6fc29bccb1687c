"""Sturmian extremal words, Kronecker families of BTV pairs, and their binary lift.

The subpackages are plain modules:

``precision``  exact quadratic irrationals, interval reals, the two constants
``linalg``     exact/factored matrices, norms and spectral radii
``words``      sequence sources and subword complexity
``families``   BTV pairs, Kronecker families, the block lift
``jsr``        brute-force JSR brackets and growth diagnostics
``lift``       binary encoding and block-support bookkeeping
``cli``        command-line front end
"""

__version__ = "0.1.0"

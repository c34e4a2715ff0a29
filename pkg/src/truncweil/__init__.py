"""Galerkin truncations of the archimedean-plus-prime Weil quadratic form.

Subpackages and modules:

* ``mpkit``: precision contexts, digamma, quadrature, root finding
* ``weil_kernel``: the kernel psi and its tabulation
* ``galerkin``: matrix assembly, parity projection and the Jacobi eigensolver
* ``zeros``: Fourier-Mellin zeros of eigenvectors and reference scoring
* ``analysis``: fits, extrapolation and spectral statistics
* ``runner``, ``records``, ``cli``: cells, sweeps and their JSON records
"""

__version__ = "0.1.0"

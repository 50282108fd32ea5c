"""Exact computations for radial masas in right-angled Hecke algebras of
free Coxeter groups and for generator masas of q-Gaussian algebras.

Modules:

``coxeter``    words in the free product of copies of Z/2
``hecke``      the Hecke algebra with polynomial-in-p coefficients
``radial``     the radial subalgebra, spectral density, approximate vectors
``pukanszky``  the orbit families in the Hecke bimodule
``qfock``      q-Fock space, creation/annihilation, Wick words
``popa``       the intertwining decay experiments
``cli``        the ``qmasa`` command
"""

__version__ = "0.1.0"

"""GL(3) nested algebraic Bethe ansatz toolkit.

Subpackages:

* :mod:`gl3aba.ratcore` -- rational kernel (g, f, tau, partition streams)
* :mod:`gl3aba.bethe_solver` -- (twisted) Bethe systems and twist derivatives
* :mod:`gl3aba.chain_oracle` -- exact lattice realization of the monodromy algebra
* :mod:`gl3aba.ffactor` -- universal and physical form factors
* :mod:`gl3aba.partition_sums` -- scalar-product and zero-mode partition sums
* :mod:`gl3aba.highest_coefficient` -- highest-coefficient providers
* :mod:`gl3aba.cli` -- command-line surface
"""

__version__ = "0.1.0"

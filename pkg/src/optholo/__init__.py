"""Non-abelian Berry connections, curvatures and holonomies of coherent-operator
families on truncated bosonic Fock spaces."""

__version__ = "0.1.0"

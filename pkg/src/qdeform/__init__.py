"""qdeform: exact symbolic workbench for two-parameter quantum and Jordanian
deformations — R-matrix identities, RTT relation extraction, Hopf-structure
checks, contraction limits and homomorphism certification."""

__version__ = "0.1.0"

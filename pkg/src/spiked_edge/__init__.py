"""Soft-edge laws of spiked Gaussian and Wishart random matrices.

Three routes to the deformed Tracy-Widom laws ``F_beta(x; w_1..w_r)``:
finite-n band-matrix sampling, Monte Carlo of an explosion-counting
diffusion, and (beta = 2) Painleve II closed forms.
"""

__version__ = "0.1.0"

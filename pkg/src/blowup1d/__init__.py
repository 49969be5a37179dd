"""Self-similar blow-up in the 1D vorticity model family omega_t + a u omega_x = 2 omega u_x."""

__version__ = "0.1.0"

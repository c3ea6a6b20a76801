"""Reference states built directly in the configuration basis.

These constructions are independent of the MPS machinery (no matrix
products involved) and serve as oracles for the special couplings of the
two model families.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


def ghz_state(L: int) -> np.ndarray:
    """(|up..up> + |down..down>)/sqrt(2)."""
    psi = np.zeros(2**L, dtype=complex)
    psi[0] = psi[-1] = 1.0 / np.sqrt(2.0)
    return psi


def neel_cat(L: int) -> np.ndarray:
    """(|ud ud ..> + |du du ..>)/sqrt(2); requires even L."""
    if L % 2:
        raise ConfigurationError("the Neel cat needs an even chain length")
    a = int("01" * (L // 2), 2)
    b = int("10" * (L // 2), 2)
    psi = np.zeros(2**L, dtype=complex)
    psi[a] = psi[b] = 1.0 / np.sqrt(2.0)
    return psi


def x_polarized_state(L: int) -> np.ndarray:
    """Product state |+>^L, fully polarized along x."""
    return np.full(2**L, 2.0 ** (-L / 2.0), dtype=complex)


def cluster_state(L: int) -> np.ndarray:
    """Periodic 1D cluster state, built by the CZ circuit acting on |->^L.

    Sign convention: every stabilizer sigma^z_{i-1} sigma^x_i sigma^z_{i+1}
    has eigenvalue -1 on this state (the |+>^L seed gives the +1 convention
    instead, which is orthogonal to the state realized by the GHZ-family
    MPS at g = -1).
    """
    configs = np.arange(2**L, dtype=np.int64)
    popcount = np.zeros(2**L, dtype=np.int64)
    adjacent = np.zeros(2**L, dtype=np.int64)
    rolled = ((configs >> 1) | ((configs & 1) << (L - 1))) & ((1 << L) - 1)
    pairs = configs & rolled
    for _ in range(L):
        popcount += configs & 1
        adjacent += pairs & 1
        configs >>= 1
        pairs >>= 1
    signs = 1.0 - 2.0 * ((popcount + adjacent) % 2)
    return signs.astype(complex) * 2.0 ** (-L / 2.0)

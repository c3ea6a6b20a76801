"""Matrix product state families and their transfer-matrix observables.

Two spin-1/2, bond-dimension-2 MPS families are provided, both of which
undergo a phase transition at g = 0: a GHZ-type family (cluster state at
g = -1, GHZ state at g = 0, x-polarized product state at g = 1) and a
Z2-type family (Neel cat at g = 0).  States on a periodic chain are
materialized by tracing products of site matrices; expectation values are
evaluated with transfer matrices, either at finite L or in the
thermodynamic limit through the dominant transfer eigenvectors.

Conventions used throughout the package:
  * physical index: up = 0, down = 1;
  * configuration index: site 1 is the most significant bit;
  * entropies are reported in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, DegenerateStateError, TransitionPointError

UP, DOWN = 0, 1

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

FAMILIES = ("ghz", "z2")


@dataclass(frozen=True, eq=False)
class MPSDefinition:
    """Site matrices A^s of a translation-invariant MPS at one coupling g."""

    d: int
    chi: int
    matrices: dict
    g: float
    family: str

    @property
    def stack(self) -> np.ndarray:
        """Site matrices as a (d, chi, chi) array ordered (up, down)."""
        return np.stack([self.matrices["up"], self.matrices["down"]])


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized dense state on an L-site chain.

    ``norm_constant`` is the factor that multiplied the raw trace amplitudes,
    so amplitude(s_1..s_L) = norm_constant * tr(A^{s_1}..A^{s_L}).
    """

    L: int
    amplitudes: np.ndarray
    norm_constant: complex = 1.0 + 0.0j


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """chi^2 x chi^2 transfer matrix E_S carrying a single-site operator S."""

    matrix: np.ndarray
    operator_label: str


def build_model(family: str, g: float) -> MPSDefinition:
    """Site matrices of the requested family at coupling g.

    The z2 family uses the principal branch of the square root, so the
    up-matrix entry is i*sqrt(|g|) for g < 0.
    """
    if not np.isfinite(g):
        raise ConfigurationError(f"coupling g must be finite, got {g!r}")
    name = str(family).lower()
    if name == "ghz":
        a_up = np.array([[1.0, g], [0.0, 0.0]], dtype=complex)
        a_down = np.array([[0.0, 0.0], [1.0, 1.0]], dtype=complex)
    elif name == "z2":
        root = np.sqrt(complex(g))
        a_up = np.array([[root, 0.0], [1.0, 0.0]], dtype=complex)
        a_down = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    else:
        raise ConfigurationError(
            f"unknown MPS family {family!r}; expected one of {FAMILIES}"
        )
    return MPSDefinition(
        d=2, chi=2, matrices={"up": a_up, "down": a_down}, g=float(g), family=name
    )


def site_matrix_products(mps: MPSDefinition, n: int) -> np.ndarray:
    """All n-site products A^{s_1}...A^{s_n} as a (d**n, chi, chi) array.

    The flat index runs over configurations with site 1 as the most
    significant digit, matching the configuration index of StateVector.
    """
    mats = mps.stack
    out = mats.copy()
    for _ in range(n - 1):
        out = np.einsum("aij,sjk->asik", out, mats).reshape(-1, mps.chi, mps.chi)
    return out


def materialize(mps: MPSDefinition, L: int) -> StateVector:
    """Dense normalized state on L sites with amplitudes tr(A^{s_1}..A^{s_L}).

    The normalization constant is taken as 1/sqrt(tr E_1^L) when that trace
    is real and positive (it equals the squared norm of the raw amplitude
    vector), and falls back to the explicit vector norm otherwise.
    """
    if L < 3:
        raise ConfigurationError(f"chain length must be at least 3, got {L}")
    raw = np.trace(site_matrix_products(mps, L), axis1=1, axis2=2)
    norm_sq = float(np.vdot(raw, raw).real)
    if norm_sq < 1e-24:
        raise DegenerateStateError(
            f"all trace amplitudes vanish for family {mps.family!r} "
            f"at g={mps.g} and L={L}"
        )
    trace_norm = complex(np.trace(np.linalg.matrix_power(transfer_matrix(mps).matrix, L)))
    if trace_norm.real > 0 and abs(trace_norm.imag) <= 1e-12 * trace_norm.real:
        c = 1.0 / np.sqrt(trace_norm.real)
    else:
        c = 1.0 / np.sqrt(norm_sq)
    return StateVector(L=L, amplitudes=raw * c, norm_constant=complex(c))


def transfer_matrix(mps: MPSDefinition, operator: np.ndarray | None = None,
                    label: str | None = None) -> TransferMatrix:
    """Transfer matrix E_S = sum_{s,s'} <s'|S|s> A^s (x) conj(A^{s'})."""
    if operator is None:
        operator = IDENTITY
        label = label or "identity"
    operator = np.asarray(operator)
    if operator.shape != (mps.d, mps.d):
        raise ConfigurationError(
            f"single-site operator must be {mps.d}x{mps.d}, got {operator.shape}"
        )
    mats = mps.stack
    dim = mps.chi * mps.chi
    e = np.zeros((dim, dim), dtype=complex)
    for s in range(mps.d):
        for sp in range(mps.d):
            coeff = complex(operator[sp, s])
            if coeff != 0.0:
                e += coeff * np.kron(mats[s], mats[sp].conj())
    return TransferMatrix(matrix=e, operator_label=label or "custom")


def correlation(mps: MPSDefinition, L: int, ops) -> complex:
    """Expectation of operators S_1..S_m on m consecutive sites of an L-site ring.

    Evaluates tr[E_1^{L-m} E_{S_1}...E_{S_m}] / tr[E_1^L].
    """
    m = len(ops)
    if m > L:
        raise ConfigurationError(f"{m} operators do not fit on {L} sites")
    e_one = transfer_matrix(mps).matrix
    denom = complex(np.trace(np.linalg.matrix_power(e_one, L)))
    if abs(denom) < 1e-20:
        raise DegenerateStateError(
            f"tr E_1^{L} vanishes for family {mps.family!r} at g={mps.g}"
        )
    chain = np.linalg.matrix_power(e_one, L - m)
    for op in ops:
        chain = chain @ transfer_matrix(mps, op).matrix
    return complex(np.trace(chain) / denom)


def thermodynamic_correlation(mps: MPSDefinition, ops, gap_tol: float = 1e-10) -> complex:
    """Correlation of consecutive-site operators in the L -> infinity limit.

    Uses <l|E_{S_1}...E_{S_m}|r> / nu_1^m with the dominant left/right
    eigenvectors of E_1 normalized to <l|r> = 1.  Raises TransitionPointError
    when the two largest transfer eigenvalue magnitudes are degenerate
    (relative gap below ``gap_tol``), which happens at a phase transition.
    """
    e_one = transfer_matrix(mps).matrix
    w, vl, vr = scipy.linalg.eig(e_one, left=True, right=True)
    order = np.argsort(-np.abs(w))
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    scale = abs(w[0])
    if scale == 0.0 or (scale - abs(w[1])) < gap_tol * scale:
        raise TransitionPointError(
            f"degenerate dominant transfer eigenvalue at g={mps.g} "
            f"(|nu1|={scale:.6g}, |nu2|={abs(w[1]):.6g}); "
            "use the finite-L correlation instead"
        )
    left = vl[:, 0]
    right = vr[:, 0]
    right = right / np.vdot(left, right)
    chain = right
    for op in reversed(ops):
        chain = transfer_matrix(mps, op).matrix @ chain
    return complex(np.vdot(left, chain) / w[0] ** len(ops))


def _dominant_pair(family: str, g: float):
    """Two largest-magnitude eigenvalues of E_1 with their eigenvectors."""
    e_one = transfer_matrix(build_model(family, g)).matrix
    w, v = np.linalg.eig(e_one)
    order = np.argsort(-np.abs(w))
    return w[order[:2]], v[:, order[:2]]


def _swapped(pair_a, pair_b) -> bool:
    """True when the dominant transfer eigenvector at b continues the
    second branch of a, signalling a magnitude crossing in between."""
    _, va = pair_a
    _, vb = pair_b
    keep = abs(np.vdot(vb[:, 0], va[:, 0]))
    swap = abs(np.vdot(vb[:, 1], va[:, 0]))
    return swap > keep


def detect_transition(family: str, g_range, resolution: float,
                      coarse_points: int = 201) -> list:
    """Locate crossings of the two largest-magnitude transfer eigenvalues.

    Scans a coarse grid over ``g_range``, detects branch swaps through
    eigenvector continuity, and bisects each bracket down to ``resolution``.
    Points where the magnitudes are exactly degenerate count as crossings.
    """
    if resolution <= 0:
        raise ConfigurationError("resolution must be positive")
    lo, hi = float(g_range[0]), float(g_range[1])
    if not lo < hi:
        raise ConfigurationError("g_range must satisfy g_min < g_max")
    grid = np.linspace(lo, hi, coarse_points)
    pairs = [_dominant_pair(family, g) for g in grid]

    def gap(pair):
        w, _ = pair
        return abs(w[0]) - abs(w[1])

    candidates = []
    for i, (g, pair) in enumerate(zip(grid, pairs)):
        if gap(pair) < 1e-12 * max(1.0, abs(pair[0][0])):
            candidates.append(float(g))
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        pa, pb = pairs[i], pairs[i + 1]
        if gap(pa) < 1e-12 or gap(pb) < 1e-12:
            continue  # already counted as an exact touch
        if not _swapped(pa, pb):
            continue
        while b - a > resolution:
            mid = 0.5 * (a + b)
            pm = _dominant_pair(family, mid)
            if gap(pm) < 1e-12 * max(1.0, abs(pm[0][0])):
                a = b = mid
                break
            if _swapped(pa, pm):
                b, pb = mid, pm
            else:
                a, pa = mid, pm
        candidates.append(0.5 * (a + b))

    candidates.sort()
    merged: list[float] = []
    for g in candidates:
        if merged and abs(g - merged[-1]) <= resolution:
            merged[-1] = 0.5 * (merged[-1] + g)
        else:
            merged.append(g)
    return merged


def fidelity(family: str, g: float, delta: float, L: int) -> float:
    """|<psi(g)|psi(g+delta)>| for normalized materialized states."""
    psi = materialize(build_model(family, g), L)
    phi = materialize(build_model(family, g + delta), L)
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)))


def sigma_x_closed_form(g: float) -> float:
    """Thermodynamic-limit <sigma^x> for the GHZ family, as printed: 0 for
    g < 0 and 4g/(1+g^2) for g >= 0.

    This is the published closed form, returned verbatim ("as printed").
    It exceeds the operator bound at g = 1, where the state is an x-polarized
    product state, so downstream reports always place it next to a finite-L
    or dominant-eigenvector value instead of treating it as ground truth.
    """
    if g < 0:
        return 0.0
    return 4.0 * g / (1.0 + g * g)

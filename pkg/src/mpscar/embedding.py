"""Local subspace, its orthogonal complement, and the annihilating operators.

On D = 3 sites the 8-dimensional local space splits into a subspace spanned
by the four states sum_s tr(X A^{s_1}A^{s_2}A^{s_3}) |s_1 s_2 s_3> (one per
basis matrix X) and its orthogonal complement.  Hermitian 3-site operators
built purely from complement states annihilate the MPS; summed over the
ring they form a parent Hamiltonian with the MPS at energy zero.

For the GHZ family a closed-form complement basis with one free parameter
``a`` is available.  For the Z2 family the complement is found numerically
at each coupling, and a sequential orthogonal-Procrustes alignment keeps
the basis (and therefore the Hamiltonian) continuous in g.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ConfigurationError,
    ContinuityLossWarning,
    RankDeficiencyWarning,
    RankError,
)
from .mps_core import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    MPSDefinition,
    build_model,
    site_matrix_products,
)

LOCALITY = 3
NULL_SPACE_TOL = 1e-12

X_BASIS = (
    np.eye(2, dtype=complex) / np.sqrt(2.0),
    SIGMA_PLUS.copy(),
    SIGMA_MINUS.copy(),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex) / np.sqrt(2.0),
)

SCHEME_KINDS = ("scar", "ground")


@dataclass(frozen=True, eq=False)
class LocalSubspace:
    """Span of the four 3-site MPS block states at one coupling.

    ``basis_states`` holds the four states as columns of an 8x4 matrix, in
    the order of ``x_basis``; they are what the trace construction produces
    and are not orthonormalized.
    """

    D: int
    basis_states: np.ndarray
    x_basis: tuple
    g: float
    numerical_rank: int


@dataclass(frozen=True, eq=False)
class ComplementBasis:
    """Four states spanning (a frame inside) the orthogonal complement.

    ``provenance`` is "analytic_ghz" or "numerical_procrustes".  ``flag``
    records chain events at this coupling: "" (none), "restart" (Procrustes
    overlap singular, chain re-seeded) or "rank_fallback" (the subspace lost
    rank, so a best-aligned 4-frame was selected inside the larger
    complement).
    """

    states: np.ndarray
    g: float
    provenance: str
    a: float | None = None
    flag: str = ""


@dataclass(frozen=True)
class CoefficientScheme:
    """Hermitian coefficient matrix c_nm combining the complement states."""

    kind: str
    c: np.ndarray


@dataclass(frozen=True, eq=False)
class LocalAnnihilator:
    """Hermitian 3-site operator sum_nm c_nm |psi_n><psi_m| at one coupling."""

    h: np.ndarray
    scheme: CoefficientScheme
    g: float


def coefficient_scheme(kind: str) -> CoefficientScheme:
    """Coefficient matrices of the two embeddings.

    "scar" uses c = diag((-1)^n) with n = 1..4 over the ordered basis, i.e.
    diag(-1, +1, -1, +1); "ground" uses the identity, which makes each local
    term a positive-semidefinite projector.
    """
    name = str(kind).lower()
    if name == "scar":
        c = np.diag([-1.0, 1.0, -1.0, 1.0]).astype(complex)
    elif name == "ground":
        c = np.eye(4, dtype=complex)
    else:
        raise ConfigurationError(
            f"unknown embedding scheme {kind!r}; expected one of {SCHEME_KINDS}"
        )
    return CoefficientScheme(kind=name, c=c)


def _subspace_matrix(mps: MPSDefinition) -> tuple[np.ndarray, int]:
    """8x4 matrix of the trace-construction states and its numerical rank."""
    prods = site_matrix_products(mps, LOCALITY)
    columns = [np.einsum("ab,sba->s", x, prods) for x in X_BASIS]
    basis = np.stack(columns, axis=1)
    singular = np.linalg.svd(basis, compute_uv=False)
    rank = int((singular > NULL_SPACE_TOL).sum())
    return basis, rank


def build_A_subspace(mps: MPSDefinition) -> LocalSubspace:
    """The four 3-site block states of the MPS, with a rank check.

    The span generically has dimension chi^2 = 4; at special couplings it
    can lose rank, in which case a RankDeficiencyWarning carrying the
    numerical rank is emitted.
    """
    basis, rank = _subspace_matrix(mps)
    if rank < mps.chi**2:
        warnings.warn(
            f"local subspace span has rank {rank} < {mps.chi ** 2} "
            f"for family {mps.family!r} at g={mps.g}",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    return LocalSubspace(
        D=LOCALITY, basis_states=basis, x_basis=X_BASIS, g=mps.g, numerical_rank=rank
    )


def _null_space(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span."""
    u, singular, _ = np.linalg.svd(basis, full_matrices=True)
    keep = [i for i in range(u.shape[1])
            if i >= singular.size or singular[i] <= NULL_SPACE_TOL]
    return u[:, keep]


def numerical_complement(subspace: LocalSubspace) -> ComplementBasis:
    """Orthonormal basis of the orthogonal complement of the block span.

    Computed by singular value decomposition with null-space threshold
    1e-12.  Raises RankError when the complement does not have dimension 4,
    which signals rank deficiency of the block span at this coupling; no
    padding or truncation is attempted here (the chained variant handles
    those points by continuity).
    """
    null = _null_space(subspace.basis_states)
    expected = subspace.basis_states.shape[0] - subspace.basis_states.shape[1]
    if null.shape[1] != expected:
        raise RankError(
            f"complement dimension {null.shape[1]} != {expected} at g={subspace.g} "
            f"(block span rank {subspace.numerical_rank})"
        )
    return ComplementBasis(states=null, g=subspace.g, provenance="numerical_procrustes")


def ghz_analytic_complement(g: float, a: float = 0.009) -> ComplementBasis:
    """Closed-form complement basis for the GHZ family, normalized columns.

    The four states are mutually orthogonal for every g and every
    0 < a < 1; the endpoints a = 0 and a = 1 are rejected because they
    produce a zero-energy degeneracy in the assembled Hamiltonian.
    """
    if not 0.0 < a < 1.0:
        raise ConfigurationError(
            f"parameter a must lie strictly between 0 and 1, got {a}; "
            "the endpoint values leave a degeneracy at zero energy"
        )
    q = 0.5 * (1.0 + g * g)
    psi1 = np.array([-g, -1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    psi2 = np.array([0.0, 0.0, 0.0, 0.0, -1.0, -1.0, 1.0, g])
    psi3 = np.array(
        [-g * a, a * q, a, -a * q,
         -(1.0 - a) * q, (1.0 - a), (1.0 - a) * q, -g * (1.0 - a)]
    )
    psi4 = np.array(
        [-g * (1.0 - a), (1.0 - a) * q, (1.0 - a), -(1.0 - a) * q,
         a * q, -a, -a * q, g * a]
    )
    states = np.stack([psi1, psi2, psi3, psi4], axis=1).astype(complex)
    states /= np.linalg.norm(states, axis=0)
    return ComplementBasis(states=states, g=float(g), provenance="analytic_ghz", a=float(a))


def procrustes_rotation(target: np.ndarray, source: np.ndarray):
    """Unitary U minimizing ||target - source @ U||_F.

    U = P Q^dagger from the singular value decomposition
    source^dagger target = P Sigma Q^dagger.  Also returns the singular
    values, whose smallness signals loss of continuity between the frames.
    """
    overlap = source.conj().T @ target
    p, singular, qh = np.linalg.svd(overlap)
    return p @ qh, singular


def procrustes_align(previous: ComplementBasis, current: ComplementBasis) -> ComplementBasis:
    """Rotate ``current`` to resemble ``previous`` as closely as possible.

    Emits ContinuityLossWarning and returns ``current`` unrotated (chain
    restart semantics) when the overlap matrix is numerically singular.
    """
    if previous.states.shape != current.states.shape:
        raise ConfigurationError("bases must have identical shapes")
    u, singular = procrustes_rotation(previous.states, current.states)
    if singular.min() < NULL_SPACE_TOL:
        warnings.warn(
            f"singular Procrustes overlap at g={current.g}; basis chain restarts here",
            ContinuityLossWarning,
            stacklevel=2,
        )
        return replace(current, flag="restart")
    return replace(current, states=current.states @ u)


def _aligned_frame(null: np.ndarray, previous: np.ndarray):
    """Best-aligned orthonormal 4-frame inside the null space.

    Solves min ||previous - null @ V||_F over isometries V; for a
    4-dimensional null space this is exactly the orthogonal Procrustes
    rotation.  Returns (frame, isometry defect, smallest singular value).
    """
    p, singular, qh = np.linalg.svd(null.conj().T @ previous, full_matrices=False)
    isometry = p @ qh
    defect = float(np.linalg.norm(isometry.conj().T @ isometry - np.eye(isometry.shape[1])))
    return null @ isometry, defect, float(singular.min())


@dataclass(eq=False)
class BasisChain:
    """A sequential, Procrustes-aligned complement basis chain in g."""

    family: str
    delta_g: float
    anchor: float
    grid: np.ndarray
    bases: list
    step_distances: np.ndarray
    unitarity_defects: np.ndarray
    restarts: list
    rank_fallbacks: list

    def basis_at(self, g: float) -> ComplementBasis:
        idx = int(np.argmin(np.abs(self.grid - g)))
        if abs(self.grid[idx] - g) > 1e-9:
            raise ConfigurationError(f"g={g} is not on the chain grid")
        return self.bases[idx]


def _march_grid(anchor: float, targets: np.ndarray, delta_g: float) -> np.ndarray:
    """Anchor-based grid extended past the farthest target, with every
    target inserted exactly; ordered in march direction."""
    if targets.size == 0:
        return np.array([anchor])
    far = targets.max() if targets.max() >= anchor else targets.min()
    direction = 1.0 if far >= anchor else -1.0
    count = int(np.ceil(abs(far - anchor) / delta_g - 1e-12))
    grid = anchor + direction * delta_g * np.arange(count + 1)
    merged = np.concatenate([grid, targets])
    merged = np.unique(np.round(merged, 12))
    return merged if direction > 0 else merged[::-1]


def complement_chain(family: str, g_targets, delta_g: float = 0.005,
                     anchor: float = -1.0) -> BasisChain:
    """Numerical complement bases along a g chain, aligned step by step.

    Marches from ``anchor`` toward the targets in increments of
    ``delta_g`` (targets are inserted into the grid exactly), aligning each
    new complement to the previous one by solving the orthogonal Procrustes
    problem.  Targets on the other side of the anchor are reached by a
    second, independent march.  At couplings where the block span loses
    rank the complement is larger than 4-dimensional; there the chain keeps
    continuity by selecting the best-aligned 4-frame inside it and flags
    the basis with "rank_fallback".
    """
    targets = np.asarray(sorted(float(g) for g in np.atleast_1d(g_targets)))
    up = targets[targets >= anchor]
    down = targets[targets < anchor]

    grids = []
    if up.size or not down.size:
        grids.append(_march_grid(anchor, up, delta_g))
    if down.size:
        grids.append(_march_grid(anchor, down, delta_g))

    grid_points: list[float] = []
    bases: list[ComplementBasis] = []
    distances: list[float] = []
    defects: list[float] = []
    restarts: list[float] = []
    fallbacks: list[float] = []

    for grid in grids:
        previous = None
        for g in grid:
            basis_matrix, rank = _subspace_matrix(build_model(family, float(g)))
            null = _null_space(basis_matrix)
            flag = ""
            if null.shape[1] < 4:
                raise RankError(
                    f"complement dimension {null.shape[1]} < 4 at g={g}; "
                    "cannot build four annihilator states"
                )
            if previous is None:
                if null.shape[1] != 4:
                    raise RankError(
                        f"chain anchor g={g} has complement dimension "
                        f"{null.shape[1]} != 4; start elsewhere"
                    )
                states = null
                defect = 0.0
            else:
                states, defect, smallest = _aligned_frame(null, previous)
                if smallest < NULL_SPACE_TOL:
                    warnings.warn(
                        f"singular Procrustes overlap at g={g}; chain restarts",
                        ContinuityLossWarning,
                        stacklevel=2,
                    )
                    states = null[:, :4]
                    flag = "restart"
                    restarts.append(float(g))
                elif null.shape[1] > 4:
                    flag = "rank_fallback"
                    fallbacks.append(float(g))
                distances.append(float(np.linalg.norm(states - previous)))
                defects.append(defect)
            bases.append(
                ComplementBasis(states=states, g=float(g),
                                provenance="numerical_procrustes", flag=flag)
            )
            grid_points.append(float(g))
            previous = states

    order = np.argsort(grid_points)
    return BasisChain(
        family=str(family).lower(),
        delta_g=float(delta_g),
        anchor=float(anchor),
        grid=np.asarray(grid_points)[order],
        bases=[bases[i] for i in order],
        step_distances=np.asarray(distances),
        unitarity_defects=np.asarray(defects),
        restarts=restarts,
        rank_fallbacks=fallbacks,
    )


def complement_bases_for(family: str, g_values, a: float = 0.009,
                         delta_g: float = 0.005, mode: str = "auto"):
    """Complement bases for a list of couplings, using the family default.

    The GHZ family defaults to the closed-form basis (reproducible and
    step-size independent); the Z2 family always uses the numerically
    chained basis.  ``mode="numerical"`` forces the chain for GHZ, which is
    retained as a cross-check.
    """
    name = str(family).lower()
    if mode not in ("auto", "analytic", "numerical"):
        raise ConfigurationError(f"unknown complement mode {mode!r}")
    if mode == "analytic" and name != "ghz":
        raise ConfigurationError("the analytic complement exists only for the GHZ family")
    use_analytic = name == "ghz" and mode in ("auto", "analytic")
    if use_analytic:
        return [ghz_analytic_complement(float(g), a) for g in np.atleast_1d(g_values)]
    chain = complement_chain(name, g_values, delta_g=delta_g)
    return [chain.basis_at(float(g)) for g in np.atleast_1d(g_values)]


def build_local_operator(basis: ComplementBasis, scheme: CoefficientScheme) -> LocalAnnihilator:
    """Hermitian 3-site operator h = sum_nm c_nm |psi_n><psi_m|.

    Requires four normalized states and a Hermitian coefficient matrix; the
    result annihilates every block state of the MPS the basis was built
    from, because each |psi_n> is orthogonal to the block span.
    """
    states = basis.states
    if states.shape != (8, 4):
        raise ConfigurationError(f"complement basis must be 8x4, got {states.shape}")
    norms = np.linalg.norm(states, axis=0)
    if np.max(np.abs(norms - 1.0)) > 1e-10:
        raise ConfigurationError("complement states must be normalized")
    if not np.allclose(scheme.c, scheme.c.conj().T, atol=1e-12):
        raise ConfigurationError(
            f"coefficient matrix of scheme {scheme.kind!r} must be Hermitian"
        )
    h = states @ scheme.c @ states.conj().T
    h = 0.5 * (h + h.conj().T)
    return LocalAnnihilator(h=h, scheme=scheme, g=basis.g)


def complement_to_dict(basis: ComplementBasis) -> dict:
    """JSON-serializable form with complex entries as [re, im] pairs."""
    entry = {
        "g": basis.g,
        "provenance": basis.provenance,
        "flag": basis.flag,
        "states": [
            [[float(z.real), float(z.imag)] for z in row] for row in basis.states
        ],
    }
    if basis.a is not None:
        entry["a"] = basis.a
    return entry


def complement_from_dict(entry: dict) -> ComplementBasis:
    states = np.array(
        [[complex(re, im) for re, im in row] for row in entry["states"]]
    )
    return ComplementBasis(
        states=states,
        g=float(entry["g"]),
        provenance=str(entry["provenance"]),
        a=float(entry["a"]) if "a" in entry else None,
        flag=str(entry.get("flag", "")),
    )


def save_bases_json(path, family: str, bases, delta_g: float | None = None,
                    anchor: float | None = None) -> None:
    """Cache a list of complement bases (for example a sweep's chain)."""
    doc = {
        "family": str(family).lower(),
        "delta_g": delta_g,
        "anchor": anchor,
        "entries": [complement_to_dict(b) for b in bases],
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_bases_json(path) -> tuple[str, list]:
    with open(path) as fh:
        doc = json.load(fh)
    return doc["family"], [complement_from_dict(e) for e in doc["entries"]]

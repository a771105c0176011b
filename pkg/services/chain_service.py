"""Single-excitation dynamics of the XX chain: Hamiltonian, spectrum, propagators, transfer fidelity."""

from typing import Optional, Tuple

import numpy as np
import structlog
from scipy.linalg import LinAlgError, eigh_tridiagonal

from models.chain import ChainSpec, DisorderRealization, Propagator, SingleExcMatrix, Spectrum
from services.exceptions import InvalidInputError, NumericalError
from services.optimize import maximize_on_grid

logger = structlog.get_logger()

# Single-excitation matrix element of sigma_x sigma_x + sigma_y sigma_y.
HOPPING_FACTOR = 2.0

DEFAULT_GRID = 2000


def default_t_max(n_sites: int) -> float:
    """Default search window for arrival times."""
    return 2.0 * n_sites


def build_hamiltonian(spec: ChainSpec, real: Optional[DisorderRealization] = None) -> SingleExcMatrix:
    """
    Restrict H(delta) to the span of |1>, ..., |N>.

    Off-diagonal (n, n+1) is 2*c_n*(1 + delta_n); diagonal (n, n) is 2*(e_n + eps_n).
    """
    if real is None:
        real = DisorderRealization.zeros(spec)
    real.check_matches(spec)
    offdiag = HOPPING_FACTOR * spec.couplings * (1.0 + real.coupling_deltas)
    diag = HOPPING_FACTOR * (spec.onsite + real.onsite_deltas)
    if not (np.all(np.isfinite(offdiag)) and np.all(np.isfinite(diag))):
        raise InvalidInputError("disorder realization produces non-finite Hamiltonian entries")
    return SingleExcMatrix(diag=diag, offdiag=offdiag)


def eig_tridiag(m: SingleExcMatrix) -> Spectrum:
    """Eigendecomposition of the tridiagonal Hamiltonian, eigenvalues ascending."""
    if m.dim == 1:
        return Spectrum(eigenvalues=m.diag.copy(), eigenvectors=np.ones((1, 1)))
    try:
        eigenvalues, eigenvectors = eigh_tridiagonal(m.diag, m.offdiag)
    except (LinAlgError, ValueError) as e:
        logger.error("Tridiagonal eigensolver failed", fingerprint=m.fingerprint(), error=str(e))
        raise NumericalError(f"eigensolver failed: {e}", fingerprint=m.fingerprint()) from e
    if not (np.all(np.isfinite(eigenvalues)) and np.all(np.isfinite(eigenvectors))):
        raise NumericalError("eigensolver returned non-finite values", fingerprint=m.fingerprint())
    return Spectrum(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def spectrum_for(spec: ChainSpec, real: Optional[DisorderRealization] = None) -> Spectrum:
    return eig_tridiag(build_hamiltonian(spec, real))


def _check_time(t: float) -> float:
    t = float(t)
    if not np.isfinite(t) or t < 0.0:
        raise InvalidInputError(f"evolution time must be finite and non-negative, got {t}")
    return t


def propagator(s: Spectrum, t: float) -> Propagator:
    """U(t) = V diag(exp(-i lambda t)) V^T."""
    t = _check_time(t)
    if t == 0.0:
        return Propagator(time=0.0, entries=np.eye(s.dim, dtype=complex))
    phases = np.exp(-1j * s.eigenvalues * t)
    vectors = s.eigenvectors
    return Propagator(time=t, entries=(vectors * phases) @ vectors.T)


def transfer_amplitude(u: Propagator) -> complex:
    """f(t) = <N|U(t)|1>; F_0(t) = |f(t)|^2."""
    return complex(u.entries[-1, 0])


def arrival_amplitudes(s: Spectrum, phi: np.ndarray, times: np.ndarray) -> np.ndarray:
    """<N|U(t)|phi> for every t in `times`, without forming U(t)."""
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (s.dim,):
        raise InvalidInputError(f"state has shape {phi.shape}, expected ({s.dim},)")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    weights = s.eigenvectors[-1, :] * (s.eigenvectors.T @ phi)
    return np.exp(-1j * np.outer(times, s.eigenvalues)) @ weights


def transfer_curve(
    spec: ChainSpec, real: Optional[DisorderRealization], times: np.ndarray
) -> np.ndarray:
    """F_0(t) = |<N|U(t)|1>|^2 over an array of times."""
    s = spectrum_for(spec, real)
    start = np.zeros(s.dim, dtype=complex)
    start[0] = 1.0
    return np.abs(arrival_amplitudes(s, start, times)) ** 2


def bloch_average_fidelity(f: complex) -> float:
    """Fidelity averaged over pure input states for transfer amplitude f."""
    magnitude = abs(f)
    return magnitude / 3.0 + magnitude ** 2 / 6.0 + 0.5


def max_bose_fidelity(
    spec: ChainSpec,
    real: Optional[DisorderRealization] = None,
    t_max: Optional[float] = None,
    grid: int = DEFAULT_GRID,
) -> Tuple[float, float]:
    """
    Best unassisted transfer time and fidelity on t in (0, t_max].

    Grid search followed by golden-section refinement to 1e-6 in time.
    """
    if t_max is None:
        t_max = default_t_max(spec.n_sites)
    s = spectrum_for(spec, real)
    start = np.zeros(s.dim, dtype=complex)
    start[0] = 1.0

    def fidelity(times: np.ndarray) -> np.ndarray:
        return np.abs(arrival_amplitudes(s, start, times)) ** 2

    t_star, f_star = maximize_on_grid(fidelity, t_max, grid)
    f_star = min(max(f_star, 0.0), 1.0)
    logger.debug("Bose optimum", n_sites=spec.n_sites, t_star=t_star, fidelity=f_star)
    return t_star, f_star

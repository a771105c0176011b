"""Chain models: the ideal chain, its disorder, and the single-excitation operators."""

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from services.exceptions import InvalidInputError


def _frozen_array(values, dtype=float) -> np.ndarray:
    """Copy into a read-only 1-D/2-D array."""
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """Ideal XX chain of `n_sites` qubits (the target qubit is not counted)."""

    n_sites: int
    couplings: np.ndarray
    onsite: np.ndarray

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise InvalidInputError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        couplings = _frozen_array(self.couplings)
        onsite = _frozen_array(self.onsite)
        if couplings.shape != (self.n_sites - 1,):
            raise InvalidInputError(
                f"couplings must have {self.n_sites - 1} entries, got shape {couplings.shape}"
            )
        if onsite.shape != (self.n_sites,):
            raise InvalidInputError(f"onsite must have {self.n_sites} entries, got shape {onsite.shape}")
        if not (np.all(np.isfinite(couplings)) and np.all(np.isfinite(onsite))):
            raise InvalidInputError("chain parameters must be finite")
        # A zero coupling disconnects the chain.
        if np.any(couplings <= 0.0):
            raise InvalidInputError("couplings must be strictly positive")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "onsite", onsite)

    @classmethod
    def build(
        cls,
        n_sites: int,
        couplings: Optional[Sequence[float]] = None,
        onsite: Optional[Sequence[float]] = None,
    ) -> "ChainSpec":
        """Chain with unit couplings and zero on-site terms unless given."""
        if couplings is None:
            couplings = np.ones(max(n_sites - 1, 0))
        if onsite is None:
            onsite = np.zeros(max(n_sites, 0))
        return cls(n_sites=n_sites, couplings=couplings, onsite=onsite)

    @classmethod
    def uniform(cls, n_sites: int, coupling: float = 1.0) -> "ChainSpec":
        return cls.build(n_sites, couplings=np.full(max(n_sites - 1, 0), coupling))

    def __repr__(self) -> str:
        return f"<ChainSpec(n_sites={self.n_sites}, uniform={bool(np.all(self.couplings == self.couplings[0]))})>"


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    """One sampled set of relative coupling perturbations and on-site shifts."""

    coupling_deltas: np.ndarray
    onsite_deltas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coupling_deltas", _frozen_array(self.coupling_deltas))
        object.__setattr__(self, "onsite_deltas", _frozen_array(self.onsite_deltas))

    @classmethod
    def zeros(cls, spec: ChainSpec) -> "DisorderRealization":
        return cls(coupling_deltas=np.zeros(spec.n_sites - 1), onsite_deltas=np.zeros(spec.n_sites))

    def check_matches(self, spec: ChainSpec) -> None:
        if self.coupling_deltas.shape != (spec.n_sites - 1,) or self.onsite_deltas.shape != (spec.n_sites,):
            raise InvalidInputError(
                f"disorder shapes {self.coupling_deltas.shape}/{self.onsite_deltas.shape} "
                f"do not match a chain of {spec.n_sites} sites"
            )

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.coupling_deltas) or np.any(self.onsite_deltas))


@dataclass(frozen=True, eq=False)
class SingleExcMatrix:
    """Real symmetric tridiagonal Hamiltonian on the span of |1>, ..., |N>."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = _frozen_array(self.diag)
        offdiag = _frozen_array(self.offdiag)
        if diag.ndim != 1 or diag.size < 1 or offdiag.shape != (diag.size - 1,):
            raise InvalidInputError(
                f"tridiagonal shapes do not agree: diag {diag.shape}, offdiag {offdiag.shape}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise InvalidInputError("Hamiltonian entries must be finite")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def dim(self) -> int:
        return int(self.diag.size)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def fingerprint(self) -> str:
        """Short content hash used in error reports."""
        content = self.diag.tobytes() + b"|" + self.offdiag.tobytes()
        return hashlib.md5(content).hexdigest()[:12]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues; column m of `eigenvectors` pairs with eigenvalue m."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen_array(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen_array(self.eigenvectors))

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)


@dataclass(frozen=True, eq=False)
class Propagator:
    """U(t) = exp(-iHt) restricted to the single-excitation sector."""

    time: float
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries, dtype=complex))

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

"""Phase extraction and frequency-ratio rescaling of constant-modulus vectors.

The pair (unwrap_phases, from_phases) realizes the phase operator and its
inverse: unwrapping walks the antenna index keeping successive steps within
[-pi, pi] (exact for linear-phase vectors, a documented heuristic otherwise),
and reconstruction returns modulus-1/sqrt(N) entries so the round trip is the
identity on unit-norm constant-modulus vectors. Rescaling the unwrapped
phases by f_m / f_c maps a beamformer designed at the carrier to its
subcarrier-m counterpart; on steering vectors this is exactly
a(psi) -> a(ratio * psi).
"""

from __future__ import annotations

import numpy as np


_PI_TIE_TOL = 1e-12


def _unwrap_columns(angles: np.ndarray) -> np.ndarray:
    """Unwrap along axis 0 with steps forced into [-pi, pi).

    Steps within _PI_TIE_TOL of +pi are ties: they snap to -pi so that
    steering vectors at the sine-space boundary |psi| = 1, whose successive
    steps land on either side of pi only through rounding noise, unwrap to
    one consistent linear slope (the psi = +1 reading) and round-trip.
    """
    diffs = np.diff(angles, axis=0)
    wrapped = np.mod(diffs + np.pi, 2.0 * np.pi) - np.pi
    wrapped[wrapped > np.pi - _PI_TIE_TOL] = -np.pi
    out = np.empty_like(angles)
    out[0] = angles[0]
    out[1:] = angles[0] + np.cumsum(wrapped, axis=0)
    return out


def _check_constant_modulus(a: np.ndarray, rel_tol: float) -> None:
    mods = np.abs(a)
    peak = mods.max()
    if peak == 0:
        raise ValueError("zero vector is not constant-modulus")
    deviation = np.ptp(mods) / peak
    if deviation > rel_tol:
        raise ValueError(
            f"input is not constant-modulus: relative modulus spread {deviation:.3e} "
            f"exceeds {rel_tol:.0e}"
        )


def unwrap_phases(a: np.ndarray, rel_tol: float = 1e-6) -> np.ndarray:
    """Unwrapped phases of a constant-modulus vector.

    The first entry anchors at arg(a_1) in (-pi, pi]; each successive phase
    differs from its predecessor by at most pi in magnitude. For a steering
    vector at direction psi the result is the exact linear phase
    -pi (n-1) psi.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 1:
        raise ValueError("unwrap_phases expects a vector")
    _check_constant_modulus(a, rel_tol)
    return _unwrap_columns(np.angle(a))


def from_phases(psi: np.ndarray, n: int | None = None) -> np.ndarray:
    """Reconstruct the constant-modulus vector (1/sqrt(N)) exp(j psi_n).

    Inverse of unwrap_phases for any vector with entrywise modulus
    1/sqrt(N).
    """
    psi = np.asarray(psi, dtype=float)
    if not np.all(np.isfinite(psi)):
        raise ValueError("phases must be finite")
    if n is None:
        n = psi.shape[0]
    elif n != psi.shape[0]:
        raise ValueError(f"length mismatch: psi has {psi.shape[0]} entries, n={n}")
    return np.exp(1j * psi) / np.sqrt(n)


def scale_beamformer(f: np.ndarray, ratio: float) -> np.ndarray:
    """Rescale a constant-modulus beamformer's phases by ``ratio``.

    Maps steering_vector(N, psi) to steering_vector(N, ratio * psi) exactly;
    output entries have modulus 1/sqrt(N).
    """
    if ratio <= 0:
        raise ValueError(f"ratio must be positive, got {ratio}")
    return from_phases(unwrap_phases(f) * ratio)


def scale_analog_matrix(F_RF: np.ndarray, eta_m: float, rel_tol: float = 1e-6) -> np.ndarray:
    """Column-wise phase rescaling of a constant-modulus matrix."""
    F_RF = np.asarray(F_RF, dtype=complex)
    if F_RF.ndim == 1:
        return scale_beamformer(F_RF, eta_m)
    if eta_m <= 0:
        raise ValueError(f"eta_m must be positive, got {eta_m}")
    n_rows = F_RF.shape[0]
    for j in range(F_RF.shape[1]):
        _check_constant_modulus(F_RF[:, j], rel_tol)
    phases = _unwrap_columns(np.angle(F_RF))
    return np.exp(1j * phases * eta_m) / np.sqrt(n_rows)

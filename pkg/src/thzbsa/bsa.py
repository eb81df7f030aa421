"""Beam-split-aware baseband correction.

A single subcarrier-independent analog beamformer is kept; for each
subcarrier the ideal subcarrier-dependent analog beamformer is constructed
virtually by phase rescaling, and the baseband precoder is replaced with the
least-squares match of the fixed-analog hybrid product to that ideal, so the
split compensation lives entirely in the digital stage. The match is exact
iff the analog beamformer has a true left inverse (N_RF = N_T); otherwise
the correction is the orthogonal projection onto the analog column space.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelSet
from .omp import BeamformerSet, DegenerateChannelError, baseband_zf, effective_channel, with_bsa
from .phase_ops import scale_analog_matrix


def sd_analog(F_RF: np.ndarray, eta_m: float) -> np.ndarray:
    """Virtual subcarrier-dependent analog beamformer (phase-rescaled columns)."""
    return scale_analog_matrix(F_RF, eta_m)


def _left_inverse_factors(F_RF: np.ndarray, rcond: float = 1e-12):
    """Reduced QR of F_RF; raises on (near-)dependent columns."""
    q, r = np.linalg.qr(F_RF)
    diag = np.abs(np.diag(r))
    if diag.min() < rcond * max(diag.max(), 1e-300):
        raise DegenerateChannelError("analog beamformer columns are rank-deficient")
    return q, r


def bsa_baseband(F_RF: np.ndarray, F_BB_m: np.ndarray, eta_m: float,
                 normalize: bool = True,
                 F_bar_m: np.ndarray | None = None) -> np.ndarray:
    """Least-squares corrected baseband for one subcarrier.

    Solves min_X ||F_RF X - F_bar[m] F_BB[m]||_F via the pseudo-inverse,
    computed from a reduced QR factorization of F_RF for conditioning. With
    ``normalize`` the result is rescaled to the same per-subcarrier power
    convention as the zero-forcing stage (||F_RF X||_F^2 = K); disable it to
    inspect the raw minimizer.
    """
    if F_bar_m is None:
        F_bar_m = sd_analog(F_RF, eta_m)
    q, r = _left_inverse_factors(F_RF)
    target = F_bar_m @ F_BB_m
    corrected = np.linalg.solve(r, q.conj().T @ target)
    if normalize:
        K = F_BB_m.shape[1]
        corrected *= np.sqrt(K) / np.linalg.norm(F_RF @ corrected)
    return corrected


def apply_bsa(channels: ChannelSet, bf: BeamformerSet,
              recompute_target: bool = True) -> BeamformerSet:
    """Fill the corrected baseband stack for every subcarrier.

    The matching target is the ideal subcarrier-dependent hybrid pair: by
    default its baseband is the zero-forcing solution recomputed on the
    dilated-analog effective channel (the target the virtual SD beamformer
    would actually deploy). With ``recompute_target=False`` the existing
    baseband from the greedy design is matched instead; that variant leaves
    the rates essentially unchanged and is kept for comparison.
    """
    M = channels.M
    F_bar = np.stack([sd_analog(bf.F_RF, channels.eta[m]) for m in range(M)])
    if recompute_target:
        H_eff_sd = effective_channel(channels, bf.W_RF, F_bar)
        target_bb = baseband_zf(H_eff_sd, F_bar)
    else:
        target_bb = bf.F_BB
    q, r = _left_inverse_factors(bf.F_RF)
    K = target_bb.shape[2]
    F_BB_bsa = np.empty_like(target_bb)
    for m in range(M):
        corrected = np.linalg.solve(r, q.conj().T @ (F_bar[m] @ target_bb[m]))
        corrected *= np.sqrt(K) / np.linalg.norm(bf.F_RF @ corrected)
        F_BB_bsa[m] = corrected
    return with_bsa(bf, F_BB_bsa)


def sd_oracle_beamformers(channels: ChannelSet, bf: BeamformerSet
                          ) -> tuple[np.ndarray, np.ndarray]:
    """Ideal (hardware-infeasible) per-subcarrier analog stack and its ZF baseband.

    Returns (F_bar, F_BB_sd) with F_bar of shape (M, N_T, N_RF); used by the
    harness as the performance ceiling the correction is matched against.
    """
    M = channels.M
    F_bar = np.stack([sd_analog(bf.F_RF, channels.eta[m]) for m in range(M)])
    H_eff_sd = effective_channel(channels, bf.W_RF, F_bar)
    return F_bar, baseband_zf(H_eff_sd, F_bar)

"""Inverse scattering and long-time asymptotics for the nonlocal mKdV equation on a step background."""

__version__ = "0.1.0"

from .scattering import StepProfile, bump_step, pure_step, smooth_step  # noqa: E402
from .soliton import SolitonParams, one_soliton  # noqa: E402

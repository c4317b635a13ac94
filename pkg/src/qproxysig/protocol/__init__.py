"""The two signature protocols as deterministic message-passing simulations."""
from .config import (
    DEFAULT_DECOYS,
    DEFAULT_N,
    DEFAULT_SEED,
    ConfigError,
    ForgeProxyOutcome,
    InterceptResend,
    KeyGuessForgery,
    SchemeConfig,
    TamperTeleportedState,
)
from .experiments import MonteCarloResult, eavesdrop_experiment, key_guess_experiment, keyguess_config
from .runner import run
from .scheme1 import run_scheme1
from .scheme2 import run_scheme2
from .transcript import MalformedTranscript, Transcript, Verdict, party_view
from .verify import VerifyResult, verify_transcript

__all__ = [
    "DEFAULT_DECOYS", "DEFAULT_N", "DEFAULT_SEED", "ConfigError", "ForgeProxyOutcome",
    "InterceptResend", "KeyGuessForgery", "SchemeConfig", "TamperTeleportedState",
    "MonteCarloResult", "eavesdrop_experiment", "key_guess_experiment", "keyguess_config",
    "run", "run_scheme1", "run_scheme2", "MalformedTranscript", "Transcript", "Verdict",
    "party_view", "VerifyResult", "verify_transcript",
]

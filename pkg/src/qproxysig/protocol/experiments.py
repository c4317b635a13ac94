"""Monte Carlo security experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..sigcrypto import KeyId, otp_decrypt, otp_encrypt, registry_init, xor_bits
from .config import InterceptResend, KeyGuessForgery, SchemeConfig
from .runner import run


@dataclass(frozen=True)
class MonteCarloResult:
    successes: int
    trials: int
    expected: float

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    @property
    def sigma(self) -> float:
        """Binomial standard error at the expected rate."""
        p = self.expected
        return math.sqrt(p * (1 - p) / self.trials)

    def within(self, k: float = 3.0) -> bool:
        return abs(self.frequency - self.expected) <= k * self.sigma

    def summary(self, label: str) -> str:
        return (f"{label}: {self.successes}/{self.trials} = {self.frequency:.6g} "
                f"(expected {self.expected:.6g}, 3 sigma = {3 * self.sigma:.3g})")


def trial_seed(seed: int, trial: int) -> int:
    """Independent 64-bit seed per trial, so fan-out never changes results."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def guessed_bits(config: SchemeConfig) -> int:
    """Length of the S_C field in S_1, which is what Eve must re-encipher."""
    return config.blocks


def keyguess_config(key_bits: int, seed: int, scheme: int = 1, message: bytes = b"forgery target") -> SchemeConfig:
    """Smallest config whose S_C field is ``key_bits`` long."""
    if scheme == 1:
        return SchemeConfig(1, message=message, n=2 * key_bits, decoy_count=0, seed=seed)
    return SchemeConfig(2, message_a=message, message_b=message[::-1], n=key_bits, decoy_count=0, seed=seed)


def _forgery_trial(length: int, rng, control: bool) -> bool:
    # Charlie's record and the K_BC pad covering it are fresh per trial
    registry = registry_init(("Bob", "Charlie"), [("Bob", "Charlie")], [length], rng)
    kid = KeyId.of("Bob", "Charlie")
    record = "".join(map(str, rng.integers(0, 2, size=length)))
    honest = otp_encrypt(record, kid, registry, purpose="S_1")
    if control:
        guess = registry.stream(kid).bits[honest.offset:honest.offset + length]
    else:
        guess = "".join(map(str, rng.integers(0, 2, size=length)))
    forged = type(honest)(xor_bits(record, guess), kid, honest.offset)
    return otp_decrypt(forged, registry) == record


def key_guess_experiment(config: SchemeConfig, trials: int, *, control: bool = False,
                         full_protocol: bool = False) -> MonteCarloResult:
    """
    Fraction of forgeries accepted when Eve guesses the pad over S_C in S_1.

    With ``full_protocol`` every trial is a complete protocol run under
    :class:`KeyGuessForgery`.  Otherwise each trial runs only the pad, the
    forgery, and Bob's decryption, which decide the verdict on their own.
    """
    bits = guessed_bits(config)
    expected = 1.0 if control else 2.0 ** -bits
    wins = 0
    for t in range(trials):
        if full_protocol:
            cfg = replace(config, seed=trial_seed(config.seed, t), attack=KeyGuessForgery(control))
            wins += run(cfg).verdict.accepted
        else:
            wins += _forgery_trial(bits, np.random.default_rng([config.seed, t]), control)
    return MonteCarloResult(wins, trials, expected)


def eavesdrop_experiment(config: SchemeConfig, trials: int) -> MonteCarloResult:
    """Fraction of intercept-resend runs aborted at the decoy check."""
    expected = 1 - 0.75 ** config.decoy_count
    caught = 0
    for t in range(trials):
        cfg = replace(config, seed=trial_seed(config.seed, t), attack=InterceptResend())
        caught += run(cfg).verdict.reason == "eavesdropping detected"
    return MonteCarloResult(caught, trials, expected)

"""Multi-proxy blind signature: Alice delegates to Charlie and David, Bob receives, Trent arbitrates."""
from __future__ import annotations

from .. import channels
from ..sigcrypto import blind, bytes_to_bits, digest
from ..statevec import BellOutcome, tensor
from ..teleport import stage1_correction, stage2_correction
from .config import SchemeConfig
from .engine import ProtocolRun

HOLDERS = {"Alice": (3, 7), "Charlie": (4,), "David": (5,), "Bob": (6, 8)}


def split_sa(sa: str, block: int) -> tuple[BellOutcome, BellOutcome]:
    """S_A carries 4 bits per block: Bell(1,3) then Bell(2,7)."""
    chunk = sa[4 * block:4 * block + 4]
    return BellOutcome.from_bits(chunk[:2]), BellOutcome.from_bits(chunk[2:])


class Scheme1Run(ProtocolRun):
    scheme = 1
    parties = ("Alice", "Bob", "Charlie", "David", "Trent")
    bundle_for_field = {"S_A": "S_1", "S_C": "S_1", "S_D": "S_2"}
    message_labels = frozenset({
        "E_K_TA{S_A}", "E_K_AB{S_A}", "E_K_BC{S_A}", "E_K_BD{S_A}", "S_1", "S_2",
        "E_K_TC{S_A,S_C}", "E_K_TD{S_A,S_D}", "E_K_TB{S_A,S_C,S_D}",
    })
    tamper_default = 6
    tamper_targets = (6, 8)

    def key_budget(self):
        n, l = self.config.n, self.config.blocks
        return {
            ("Alice", "Bob"): 4 * l,
            ("Bob", "Charlie"): 4 * l + 5 * l,
            ("Bob", "David"): 4 * l + 5 * l,
            ("Trent", "Alice"): n + 4 * l,
            ("Trent", "Bob"): 6 * l,
            ("Trent", "Charlie"): 5 * l,
            ("Trent", "David"): 5 * l,
        }

    def execute(self):
        cfg = self.config
        blocks = range(cfg.blocks)

        # initial phase
        self.issue_keys()
        for i in blocks:
            self.states.append(channels.make_channel_scheme1())
            self.distribute(i, HOLDERS)
        self.eavesdrop_check()

        # blinding
        self.send("Alice", "Trent", "m", [("m", bytes_to_bits(cfg.message))], encrypt=False)
        M = blind(digest(cfg.message, cfg.n), self.take_blinding_pad("Alice"))
        for i in blocks:
            self.states[i] = tensor(channels.encode_block_scheme1(M[2 * i:2 * i + 2]), self.states[i])

        # authorizing and signing
        sa = "".join(self.bell("Alice", i, 1, 3).bits + self.bell("Alice", i, 2, 7).bits for i in blocks)
        self.send("Alice", "Trent", "E_K_TA{S_A}", [("S_A", sa)])
        self.send("Alice", "Bob", "E_K_AB{S_A}", [("S_A", sa)])

        sa_bob = self.receive("Bob", "E_K_AB{S_A}")["S_A"]
        for i in blocks:
            self.correct("Bob", i, stage1_correction(self.table, *split_sa(sa_bob, i)))
        self.send("Bob", "Charlie", "E_K_BC{S_A}", [("S_A", sa_bob)])
        self.send("Bob", "David", "E_K_BD{S_A}", [("S_A", sa_bob)])

        sa_c = self.receive("Charlie", "E_K_BC{S_A}")["S_A"]
        sa_d = self.receive("David", "E_K_BD{S_A}")["S_A"]
        sc = "".join(str(self.hadamard_z("Charlie", i, 4)) for i in blocks)
        sd = "".join(str(self.hadamard_z("David", i, 5)) for i in blocks)
        self.send("Charlie", "Bob", "S_1", [("S_A", sa_c), ("S_C", sc)])
        self.send("David", "Bob", "S_2", [("S_A", sa_d), ("S_D", sd)])
        self.send("Charlie", "Trent", "E_K_TC{S_A,S_C}", [("S_A", sa_c), ("S_C", sc)])
        self.send("David", "Trent", "E_K_TD{S_A,S_D}", [("S_A", sa_d), ("S_D", sd)])

        # verifying: Bob
        s1 = self.receive("Bob", "S_1")
        s2 = self.receive("Bob", "S_2")
        self.verify("S_A match (S_1)")
        self.verify("S_A match (S_2)")
        for i in blocks:
            self.correct("Bob", i, stage2_correction(int(s1["S_C"][i]), int(s2["S_D"][i])))
            self.hand_to_trent("Bob", i, (6, 8))
        self.send("Bob", "Trent", "E_K_TB{S_A,S_C,S_D}",
                  [("S_A", sa_bob), ("S_C", s1["S_C"]), ("S_D", s2["S_D"])])

        # verifying: Trent
        for label in ("m", "E_K_TA{S_A}", "E_K_TC{S_A,S_C}", "E_K_TD{S_A,S_D}", "E_K_TB{S_A,S_C,S_D}"):
            self.receive("Trent", label)
        self.verify("S_A cross-check")
        self.verify("proxy record consistency")
        self.evidence["decoded"]["M'"] = "".join(self.z_readout("Trent", i, (6, 8)) for i in blocks)
        self.evidence["blind"]["K_TA"] = self.trent_pad("Alice")
        self.verify("M' = M")


def run_scheme1(config: SchemeConfig):
    return Scheme1Run(config).run()

"""Two-way proxy blind signature: Alice and Bob sign for each other through proxy Charlie."""
from __future__ import annotations

from .. import channels
from ..channels import QUBIT_A, QUBIT_B
from ..sigcrypto import blind, bytes_to_bits, digest
from ..statevec import BellOutcome, tensor
from ..teleport import Scheme2Outcomes
from .config import SchemeConfig
from .engine import ProtocolRun

HOLDERS = {"Alice": (1, 5), "Charlie": (4,), "Bob": (2, 3)}


class Scheme2Run(ProtocolRun):
    scheme = 2
    parties = ("Alice", "Bob", "Charlie", "Trent")
    bundle_for_field = {"S_A": "S_1", "S_B": "S_2", "S_C": "S_1"}
    message_labels = frozenset({
        "E_K_AB{S_A}", "E_K_AC{S_A}", "E_K_AB{S_B}", "E_K_BC{S_B}", "S_1", "S_2",
        "E_K_TC{S_A,S_C}", "E_K_TC{S_B,S_C}", "E_K_TB{S_A,S_C}", "E_K_TA{S_B,S_C}",
    })
    tamper_default = 5
    tamper_targets = (2, 5)

    def key_budget(self):
        n, q = self.config.n, self.config.blocks
        return {
            ("Alice", "Bob"): 4 * q,
            ("Alice", "Charlie"): 2 * q + 3 * q,
            ("Bob", "Charlie"): 2 * q + 3 * q,
            ("Trent", "Alice"): n + 3 * q,
            ("Trent", "Bob"): n + 3 * q,
            ("Trent", "Charlie"): 6 * q,
        }

    def _outcomes(self, sa: str, sb: str, sc: str, i: int) -> Scheme2Outcomes:
        return Scheme2Outcomes(BellOutcome.from_bits(sa[2 * i:2 * i + 2]),
                               BellOutcome.from_bits(sb[2 * i:2 * i + 2]), int(sc[i]))

    def execute(self):
        cfg = self.config
        blocks = range(cfg.blocks)

        # initial phase
        self.issue_keys()
        for i in blocks:
            self.states.append(channels.make_channel_scheme2())
            self.distribute(i, HOLDERS)
        self.eavesdrop_check()

        # blinding, both directions
        self.send("Alice", "Trent", "m'", [("m", bytes_to_bits(cfg.message_a))], encrypt=False)
        self.send("Bob", "Trent", "m''", [("m", bytes_to_bits(cfg.message_b))], encrypt=False)
        Ma = blind(digest(cfg.message_a, cfg.n), self.take_blinding_pad("Alice"))
        Mb = blind(digest(cfg.message_b, cfg.n), self.take_blinding_pad("Bob"))
        for i in blocks:
            self.states[i] = tensor(channels.encode_bit_scheme2(int(Mb[i]), QUBIT_B),
                                    channels.encode_bit_scheme2(int(Ma[i]), QUBIT_A), self.states[i])

        # authorizing and signing
        sa = "".join(self.bell("Alice", i, QUBIT_A, 1).bits for i in blocks)
        sb = "".join(self.bell("Bob", i, QUBIT_B, 3).bits for i in blocks)
        self.send("Alice", "Bob", "E_K_AB{S_A}", [("S_A", sa)])
        self.send("Alice", "Charlie", "E_K_AC{S_A}", [("S_A", sa)])
        self.send("Bob", "Alice", "E_K_AB{S_B}", [("S_B", sb)])
        self.send("Bob", "Charlie", "E_K_BC{S_B}", [("S_B", sb)])

        sa_c = self.receive("Charlie", "E_K_AC{S_A}")["S_A"]
        sb_c = self.receive("Charlie", "E_K_BC{S_B}")["S_B"]
        sc = "".join(str(self.x_measure("Charlie", i, 4)) for i in blocks)
        self.send("Charlie", "Bob", "S_1", [("S_A", sa_c), ("S_C", sc)])
        self.send("Charlie", "Alice", "S_2", [("S_B", sb_c), ("S_C", sc)])
        self.send("Charlie", "Trent", "E_K_TC{S_A,S_C}", [("S_A", sa_c), ("S_C", sc)])
        self.send("Charlie", "Trent", "E_K_TC{S_B,S_C}", [("S_B", sb_c), ("S_C", sc)])

        # verifying: each original signer checks the other's outcomes
        self.receive("Bob", "E_K_AB{S_A}")
        s1 = self.receive("Bob", "S_1")
        self.verify("S_A match (S_1)")
        self.receive("Alice", "E_K_AB{S_B}")
        s2 = self.receive("Alice", "S_2")
        self.verify("S_B match (S_2)")

        for i in blocks:
            out = self._outcomes(s1["S_A"], sb, s1["S_C"], i)
            self.correct("Bob", i, {2: self.table.for_qubit(out, 2)})
            out = self._outcomes(sa, s2["S_B"], s2["S_C"], i)
            self.correct("Alice", i, {5: self.table.for_qubit(out, 5)})
            self.hand_to_trent("Bob", i, (2,))
            self.hand_to_trent("Alice", i, (5,))
        self.send("Bob", "Trent", "E_K_TB{S_A,S_C}", [("S_A", s1["S_A"]), ("S_C", s1["S_C"])])
        self.send("Alice", "Trent", "E_K_TA{S_B,S_C}", [("S_B", s2["S_B"]), ("S_C", s2["S_C"])])

        # verifying: Trent
        for label in ("m'", "m''", "E_K_TC{S_A,S_C}", "E_K_TC{S_B,S_C}", "E_K_TB{S_A,S_C}", "E_K_TA{S_B,S_C}"):
            self.receive("Trent", label)
        self.verify("proxy record consistency")
        self.evidence["decoded"]["M'''"] = "".join(self.z_readout("Trent", i, (2,)) for i in blocks)
        self.evidence["decoded"]["M''''"] = "".join(self.z_readout("Trent", i, (5,)) for i in blocks)
        self.evidence["blind"]["K_TA"] = self.trent_pad("Alice")
        self.evidence["blind"]["K_TB"] = self.trent_pad("Bob")
        self.verify("M''' = M'")
        self.verify("M'''' = M''")


def run_scheme2(config: SchemeConfig):
    return Scheme2Run(config).run()

"""Stabilizer-tableau Clifford simulator with exact mod-4 phases.

The tableau keeps 2n rows (destabilizers first, stabilizers second) as
numpy bit arrays, following the standard destabilizer/stabilizer layout.
Row r represents i^{phase[r]} * prod_q X_q^{x[r,q]} Z_q^{z[r,q]}; valid
stabilizer rows are always Hermitian, so their phases are 0 or 2, but the
intermediate arithmetic runs mod 4 to keep products sign-exact.
"""

from __future__ import annotations

import numpy as np

from .pauli import PauliString

__all__ = ["StabilizerTableau"]


class StabilizerTableau:
    """Mutable stabilizer state of n qubits, initialized to |0...0>."""

    def __init__(self, n: int):
        if n <= 0:
            raise ValueError("need at least one qubit")
        self.n = n
        # destabilizers: rows 0..n-1 start as X_q; stabilizers: rows n..2n-1 as Z_q
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.phase = np.zeros(2 * n, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1
        self.z[n + idx, idx] = 1

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.n = self.n
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.phase = self.phase.copy()
        return t

    def row_pauli(self, r: int) -> PauliString:
        x = z = 0
        for q in range(self.n):
            x |= int(self.x[r, q]) << q
            z |= int(self.z[r, q]) << q
        return PauliString(self.n, x, z, int(self.phase[r]))

    def stabilizers(self):
        return [self.row_pauli(self.n + i) for i in range(self.n)]

    # -- row arithmetic -----------------------------------------------

    def _rowmult(self, h: int, i: int):
        """Row h <- row i * row h (left multiply), phase-exact."""
        # crossing Z bits of row i over X bits of row h gives (-1) each
        self.phase[h] = (
            self.phase[h] + self.phase[i]
            + 2 * int(np.sum(self.z[i] & self.x[h]))
        ) % 4
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    # -- gates ---------------------------------------------------------

    def apply_gate(self, kind: str, *qubits: int):
        kind = kind.upper()
        for q in qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit {q} out of range")
        x, z, ph = self.x, self.z, self.phase
        if kind == "H":
            (q,) = qubits
            ph += 2 * (x[:, q] & z[:, q])
            x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
        elif kind == "S":
            (q,) = qubits
            ph += x[:, q]
            z[:, q] ^= x[:, q]
        elif kind == "SDG":
            (q,) = qubits
            ph += 3 * x[:, q]
            z[:, q] ^= x[:, q]
        elif kind == "X":
            (q,) = qubits
            ph += 2 * z[:, q]
        elif kind == "Y":
            (q,) = qubits
            ph += 2 * (x[:, q] ^ z[:, q])
        elif kind == "Z":
            (q,) = qubits
            ph += 2 * x[:, q]
        elif kind == "CNOT":
            c, t = qubits
            x[:, t] ^= x[:, c]
            z[:, c] ^= z[:, t]
        elif kind == "CZ":
            c, t = qubits
            self.apply_gate("H", t)
            self.apply_gate("CNOT", c, t)
            self.apply_gate("H", t)
            return self
        elif kind == "SWAP":
            a, b = qubits
            x[:, a], x[:, b] = x[:, b].copy(), x[:, a].copy()
            z[:, a], z[:, b] = z[:, b].copy(), z[:, a].copy()
        else:
            raise ValueError(f"unknown Clifford gate {kind!r}")
        np.mod(ph, 4, out=ph)
        return self

    def apply_pauli(self, p: PauliString):
        """Conjugation by a Pauli only flips stabilizer signs."""
        if p.n != self.n:
            raise ValueError("length mismatch")
        for q in range(self.n):
            if (p.x >> q) & 1:
                self.apply_gate("X", q)
            if (p.z >> q) & 1:
                self.apply_gate("Z", q)
        return self

    # -- measurement ----------------------------------------------------

    def measure_z(self, q: int, rng: np.random.Generator,
                  forced: int | None = None, strict: bool = True) -> int:
        """Measure Z_q; returns 0 (+1 outcome) or 1 (-1 outcome).

        forced pins the outcome of a random measurement (used to replay
        reference trajectories); when strict it must not disagree with a
        deterministic outcome, otherwise it is ignored there.
        """
        n = self.n
        live = np.nonzero(self.x[n:, q])[0]
        if live.size:
            # random outcome: pivot on the first anticommuting stabilizer
            p = n + int(live[0])
            for r in range(2 * n):
                if r != p and self.x[r, q]:
                    self._rowmult(r, p)
            # old stabilizer becomes the destabilizer
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.phase[p - n] = self.phase[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, q] = 1
            outcome = int(rng.integers(2)) if forced is None else int(forced)
            self.phase[p] = 2 * outcome
            return outcome
        # deterministic: accumulate stabilizer rows whose destabilizer
        # partner anticommutes with Z_q
        acc_x = np.zeros(n, dtype=np.uint8)
        acc_z = np.zeros(n, dtype=np.uint8)
        acc_ph = 0
        for i in np.nonzero(self.x[:n, q])[0]:
            r = n + int(i)
            acc_ph = (acc_ph + self.phase[r]
                      + 2 * int(np.sum(self.z[r] & acc_x))) % 4
            acc_x ^= self.x[r]
            acc_z ^= self.z[r]
        outcome = 0 if acc_ph == 0 else 1
        if strict and forced is not None and forced != outcome:
            raise ValueError("forced outcome contradicts a deterministic one")
        return outcome

    def reset_z(self, q: int, rng: np.random.Generator):
        """Project qubit q to |0>."""
        if self.measure_z(q, rng):
            self.apply_gate("X", q)
        return self

    # -- queries --------------------------------------------------------

    def expectation(self, p: PauliString) -> int:
        """<P> for a Pauli P on a stabilizer state: +1, -1, or 0."""
        if p.n != self.n:
            raise ValueError("length mismatch")
        n = self.n
        # P anticommutes with some stabilizer -> expectation 0
        stab_anti = []
        for i in range(n):
            if not self.row_pauli(n + i).commutes(p):
                return 0
        # P is in +-(stabilizer group); reconstruct it from the rows whose
        # destabilizer partners anticommute with P
        acc = PauliString.identity(n)
        for i in range(n):
            if not self.row_pauli(i).commutes(p):
                acc = acc * self.row_pauli(n + i)
                stab_anti.append(i)
        if acc.x != p.x or acc.z != p.z:
            raise ValueError("operator is not Pauli-measurable here")
        diff = (acc.phase_exp - p.phase_exp) % 4
        if diff == 0:
            return 1
        if diff == 2:
            return -1
        raise AssertionError("non-Hermitian comparison")

    def measure_pauli(self, p: PauliString, rng: np.random.Generator) -> int:
        """Measure a (Hermitian) Pauli observable; returns +1 or -1."""
        e = self.expectation(p)
        if e != 0:
            return e
        # rotate P into Z_0 via an ad-hoc basis change is overkill here:
        # project by adding P as a stabilizer against the first
        # anticommuting stabilizer row
        n = self.n
        pivot = None
        for i in range(n):
            if not self.row_pauli(n + i).commutes(p):
                pivot = n + i
                break
        assert pivot is not None
        for r in range(2 * n):
            if r != pivot and not self.row_pauli(r).commutes(p):
                self._rowmult(r, pivot)
        # old stabilizer row -> destabilizer slot, P -> stabilizer slot
        self.x[pivot - n] = self.x[pivot]
        self.z[pivot - n] = self.z[pivot]
        self.phase[pivot - n] = self.phase[pivot]
        outcome = int(rng.integers(2))
        for q in range(n):
            self.x[pivot, q] = (p.x >> q) & 1
            self.z[pivot, q] = (p.z >> q) & 1
        self.phase[pivot] = (p.phase_exp + 2 * outcome) % 4
        return -1 if outcome else 1

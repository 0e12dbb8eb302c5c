"""Built-in gate corpus: textbook gates and seeded Haar-random draws."""

from __future__ import annotations

import numpy as np

from .linalg import GateSplitError, TensorSpace, kron_all

_S2 = 1 / np.sqrt(2)

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
H = np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128)
S = np.diag([1, 1j]).astype(np.complex128)
T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(np.complex128)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)
ISWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)
TOFFOLI = np.eye(8, dtype=np.complex128)
TOFFOLI[[6, 7]] = TOFFOLI[[7, 6]]

NAMED = {"cnot": CNOT, "cz": CZ, "swap": SWAP, "iswap": ISWAP, "toffoli": TOFFOLI}
RANDOM = ("random-product", "random-unitary")


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed d x d unitary: QR of a complex Gaussian with phase-fixed R."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_product(dims, rng: np.random.Generator) -> tuple[np.ndarray, list[np.ndarray]]:
    factors = [haar_unitary(d, rng) for d in dims]
    return kron_all(factors), factors


def make_gate(name: str, n: int | None = None, seed: int | None = None) -> tuple[np.ndarray, TensorSpace]:
    """Matrix and space for a corpus entry."""
    name = name.lower()
    if name in NAMED:
        m = NAMED[name]
        return m.copy(), TensorSpace.infer(m.shape[0])
    if name in RANDOM:
        if n is None or seed is None:
            raise GateSplitError(f"{name} needs a qubit count and a seed")
        if n < 1:
            raise GateSplitError(f"qubit count must be >= 1, got {n}")
        if not -(2**63) <= seed < 2**64:
            raise GateSplitError("seed must fit in 64 bits")
        space = TensorSpace.qubits(n)
        rng = np.random.default_rng(seed % 2**64)
        if name == "random-product":
            return random_product(space.dims, rng)[0], space
        return haar_unitary(space.total, rng), space
    raise GateSplitError(f"unknown gate {name!r}; known: {', '.join([*NAMED, *RANDOM])}")

"""Pauli algebra and Jordan-Wigner qubit realisations in one and two dimensions."""

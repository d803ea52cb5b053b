"""Occupation-number oracle for fermionic Fock space."""

"""Single-particle automaton, emergent Hamiltonians and momentum-space analysis."""

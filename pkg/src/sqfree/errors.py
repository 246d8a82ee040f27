"""Exception types shared across the package."""


class MemoryBudgetError(Exception):
    """A sieve or table would exceed its configured memory cap."""


class DegenerateTupleError(ValueError):
    """The offset pattern covers every residue class modulo some prime square,
    so the tuple density is exactly zero and density-dependent machinery
    cannot be constructed."""


class ContractViolation(Exception):
    """An internal mathematical guarantee failed (distinct from bad input)."""

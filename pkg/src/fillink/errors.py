"""Shared exception hierarchy.

StructuralError marks convention or module-structure failures (torsion,
offset collisions, block-structure mismatches); callers map it to exit
code 3, while plain ValueError-style usage problems map to exit code 2.
"""


class StructuralError(ValueError):
    """A structural invariant of the construction failed."""

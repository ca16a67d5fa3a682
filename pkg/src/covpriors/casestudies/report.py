"""Container for named case-study outputs."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CaseStudyReport:
    """Scalar and tabular outputs of one case study, with provenance.

    ``scalars`` maps name -> float; ``tables`` maps table name -> ordered
    mapping of column name -> array.  ``flags`` records qualitative facts a
    consumer must not ignore (evidence defined only up to a constant,
    integration domain extended approximately, and the like).
    """

    name: str
    inputs: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def scalar_items(self):
        return list(self.scalars.items())

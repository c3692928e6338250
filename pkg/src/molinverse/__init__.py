"""molinverse: molecular inverse design from small property tables.

Learn a substructure-count regression model, search feature space for
property targets under chemical-feasibility constraints, and expand the
resulting vectors into concrete molecules by isomorph-free generation.
"""

__version__ = "0.1.0"

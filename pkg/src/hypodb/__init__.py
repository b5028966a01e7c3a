"""hypodb: deterministic hypotheses managed as uncertain, probabilistic data.

The pipeline: parse hypothesis structures, extract their causal ordering,
encode it into functional dependencies, learn empirical uncertainty factors
from simulation trials, synthesize a claim-centered probabilistic database
(U-relations with condition columns and a world table), and rank competing
hypotheses by Bayesian conditioning on observations.
"""

__version__ = "0.1.0"

"""Survey platform and estimation pipeline for inequality-aversion preferences.

The package regenerates a web experiment on the perception of income
inequality: a catalog of pairwise distribution comparisons built from
equalising transfers, a survey service running the questionnaire protocol,
descriptive analysis of the responses, and per-respondent ordered-probit
estimation of utilitarian and rank-weighted social welfare functions.
"""

__version__ = "0.1.0"

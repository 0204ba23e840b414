"""spinlab: pattern analysis, long-range-order condition checking, exact
restricted partition functions, Gibbs sampling, and breakup extraction for
discrete spin systems."""

__version__ = "0.1.0"

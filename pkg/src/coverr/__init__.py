"""Coverage error of t and Norm confidence intervals for a mean."""

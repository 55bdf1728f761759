"""Alternant and Goppa code cryptanalysis via quadratic relations."""

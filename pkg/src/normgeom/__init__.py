"""
Geometric constants of real normed spaces.
"""

"""Mathematics of Derived Chronicles: algebras, complexes, dg algebras and the equivalence pipelines"""

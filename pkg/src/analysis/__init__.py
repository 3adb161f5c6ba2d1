"""QuadTorsion analysis module
Classification engine, fixture verification and the density experiment
"""

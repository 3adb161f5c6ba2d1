"""QuadTorsion command line module"""

"""Vector field synthesis for heteroclinic network realizations"""

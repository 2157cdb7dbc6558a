"""Utilities: paths, settings and sample export"""

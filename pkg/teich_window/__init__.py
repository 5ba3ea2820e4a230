"""Teichmüller distances on windows of infinite-type surfaces."""
__version__ = '0.1.0'

"""Ramification of finite flat group schemes attached to mod-p Kisin modules."""

__version__ = "0.1.0"

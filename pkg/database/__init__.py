"""Data access package: text format codec and run ledger"""
from .database_manager import RunLedger

__all__ = ['RunLedger']

"""Small-world shortcut and channel-assignment toolkit for multi-radio multi-channel CRNs."""

__version__ = "0.1.0"

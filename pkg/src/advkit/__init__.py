"""advkit: exact query-complexity measures, gadget verification, and
communication-protocol analysis for small Boolean functions and relations."""

__version__ = "0.1.0"

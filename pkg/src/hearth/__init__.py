"""hearth: a fully local personal-assistant engine.

Diarizes speaker-embedding streams, keeps tiered vector memory, fuses
smart-home sensor data, routes events through marker-based dialogue policies
with role-adapted privacy, and runs automated watch rules, all without a
network connection.
"""

__version__ = "0.1.0"

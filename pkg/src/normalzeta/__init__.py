"""Local normal zeta functions of class-two nilpotent groups with smooth Pfaffian."""

__version__ = "0.1.0"

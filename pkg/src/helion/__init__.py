"""Statistical modeling of user-driven home-automation event sequences."""

__version__ = "0.1.0"

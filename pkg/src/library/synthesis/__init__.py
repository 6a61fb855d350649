from library.synthesis import microcanonical

__all__ = ("microcanonical", )

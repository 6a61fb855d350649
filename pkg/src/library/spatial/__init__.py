from library.spatial import model

__all__ = ("model", )

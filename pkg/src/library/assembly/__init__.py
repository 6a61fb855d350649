from library.assembly import clipping, placement, window

__all__ = ("clipping", "placement", "window")

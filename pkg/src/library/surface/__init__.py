from library.surface import filtering, io, surface_map

__all__ = ("filtering", "io", "surface_map")

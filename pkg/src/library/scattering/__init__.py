from library.scattering import export, filters, statistics, transform

__all__ = ("export", "filters", "statistics", "transform")

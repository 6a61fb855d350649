from library.loading import load_stages

__all__ = ("load_stages", )

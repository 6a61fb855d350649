from library.data_acquisition import synthetic_parts

__all__ = ("synthetic_parts", )

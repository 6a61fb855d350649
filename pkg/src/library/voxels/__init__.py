from library.voxels import io, labeling, volume

__all__ = ("io", "labeling", "volume")

from library.gan import bank, networks, pore_archive, training

__all__ = ("bank", "networks", "pore_archive", "training")

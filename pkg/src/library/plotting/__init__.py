from library.plotting import common, plot_pores, plot_scattering, plot_surfaces

__all__ = ("common", "plot_pores", "plot_scattering", "plot_surfaces")

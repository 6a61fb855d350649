"""
Module contains reusable constants.
"""
# phase encoding of voxel volumes
SOLID = 0
PORE = 1
EXTERIOR = 2
PHASES = {"solid": SOLID, "pore": PORE, "exterior": EXTERIOR}

# tomography
VOXEL_SIZE = 4.0
"""Default edge length of a voxel in micrometres"""
MIN_PORE_VOXELS = 8
"""Smallest number of contiguous voxels that counts as a pore"""
RELIABLE_VOLUME_UM3 = 2700.0
"""Pores below this volume cannot be identified reliably in CT data"""
CONNECTIVITY = 26

# surface roughness
SAVGOL_WINDOW_UM = 100.0
SAVGOL_ORDER = 4
SURFACE_IMAGE_SIDE = 256

# scattering transform
SCATTERING_J = 4
SCATTERING_L = 4
LOG_FLOOR = 1e-12

# generative model of pores
CUBE_SIDE_FULL = 64
CUBE_SIDE_DESK = 16
BANK_SIZE = 50000
PROFILES = {
    "full": {"side": CUBE_SIDE_FULL, "channel_divisor": 1},
    "desk": {"side": CUBE_SIDE_DESK, "channel_divisor": 8},
}
"""Network profiles: cube side and the factor dividing all channel counts"""

# spatial model and assembly
N_BINS = 30
WINDOW_DZ_VOXELS = 256
PLACEMENT_RETRIES = 100
LOCATION_ATTEMPTS = 1000

# validation
METRIC_NAMES = ("x", "y", "volume_um3", "anisotropy", "theta_z", "nn_um")
"""The six metrics compared between ground truth and generated parts"""
UNIVARIATE_BINS = 64
BIVARIATE_BINS = 32

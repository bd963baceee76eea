import math

from bosonic_capacity.channel import C_LIGHT, FarFieldGeometry


def geometry_with_cutoff_fresnel(d_c, omega_c=1.0, area_t=1.0, area_r=1.0):
    """Far-field geometry whose Fresnel number at ``omega_c`` equals ``d_c``."""
    path_len = omega_c * math.sqrt(area_t * area_r / d_c) / (2.0 * math.pi * C_LIGHT)
    return FarFieldGeometry(area_t, area_r, path_len, omega_c)

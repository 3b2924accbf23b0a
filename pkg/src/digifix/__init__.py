"""Digital images, continuous self-maps and their fixed point sets."""

__version__ = "0.1.0"

from .fixsets import (
    construct_cold,
    construct_freezing,
    find_minimum_freezing,
    is_minimal_freezing,
    verify_cold,
    verify_freezing,
)
from .homotopy import (
    are_homotopic,
    homotopy_class,
    is_contractible,
    is_deformation_retract,
    is_pointed_rigid,
    is_reducible,
    is_rigid,
    reduction_points_fast,
)
from .lattice import CU, NPU, DigitalImage, box, cube, cycle, interval, make_image, product, tree, wedge
from .maps import Budget, PartialMap, PointMap, Status, Verdict, enumerate_continuous_extensions, is_continuous
from .spectra import fixed_point_spectrum, homotopy_spectrum, pointed_fixed_point_spectrum

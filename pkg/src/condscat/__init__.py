"""2-D acoustic scattering toolkit for anisotropic scatterers with a
conductive transmission boundary: two independent forward solvers
(separation of variables for disks, boundary-element collocation for
smooth shapes) and two direct sampling reconstruction functionals.
"""

from .bie import (BieMaterial, DensityPair, KernelBlockSystem, assemble_bie_data,
                  assemble_system, eval_farfield, eval_scattered, phi, phi_tilde,
                  solve_all_directions, solve_densities)
from .disk import (Material2D, ModalCoefficients, assemble_disk_data,
                   far_field_disk, modal_solve, scattered_field_disk)
from .errors import (CondscatError, ConfigError, DataFormatError, DomainError,
                     NumericalError, SingularModeError, SingularSystemError)
from .geometry import (AnisotropyMatrix, BoundaryCurve, Circle, CollocationMesh,
                       DirectionSet, Kite, Peanut, SamplingGrid, contains,
                       distance_to_boundary, make_curve, make_mesh,
                       region_centroid, sqrt_spd)
from .imaging import (ImagingMap, envelope_decay_slope, funk_hecke_check, probe,
                      sweep, w_farfield, w_reciprocity_gap, write_pgm,
                      write_text_grid)
from .measurement import (CauchyDataSet, FarFieldMatrix, NoiseDescriptor,
                          add_noise, load, perturb_cauchy, perturb_farfield,
                          save)
from .special import bessel_j, bessel_j_prime, bessel_y, hankel1, hankel1_prime

__version__ = "0.1.0"

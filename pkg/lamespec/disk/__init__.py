from .perturbation import (
    K_MAX,
    FourierMode,
    FourierPerturbation,
    NonOptimalityCertificate,
    area_derivative,
    big_c_coefficient,
    c_coefficient,
    c_ratio_profile,
    coercivity_constant,
    first_derivative_F,
    first_shape_derivative,
    m11_bracket,
    m11_gateaux,
    non_optimality_certificate,
    second_derivative_area,
    second_derivative_F,
    second_derivative_lambda,
)
from .spectrum import (
    Branch,
    DiskEigenvalue,
    Regime,
    eigenfunction,
    first_eigenvalue,
    nu_star,
    radial_candidates,
    small_omega_coefficient,
    transcendental_f,
    transcendental_f_det,
    transcendental_f_psi,
    transcendental_f_shifted,
)

from .charges import ChargeFamily, RadialCharge, combine_charges, random_charges
from .mellin import GridCoverageError, MellinGrid, MellinSamples, mellin_diagonalize
from .components import (
    FormComponent, FormQuery, ThetaValue, f_diag, f_off, f_reg, f_component_diagonalized,
    theta_eval, check_bounds, run_bound_suite, hardy_rellich_check
)
from .coupling import ProfileKind, RegularizerProfile, alpha_tilde, alpha_tilde_range, running_coupling

from stmreg.forms import ChargeFamily, RadialCharge

gaussian_s = RadialCharge(ChargeFamily.gaussian, (1.0, 1.0), 0)
gaussian_p = RadialCharge(ChargeFamily.gaussian, (0.8, 0.6), 1, 1)
gaussian_d = RadialCharge(ChargeFamily.gaussian, (1.0, 0.7, -0.4, 1.5), 2, -1)
gaussian_f = RadialCharge(ChargeFamily.gaussian, (1.2, 0.9), 3)
poly_s = RadialCharge(ChargeFamily.poly_gaussian, (1.0, 2.0, 1.0), 0)
poly_d = RadialCharge(ChargeFamily.poly_gaussian, (0.5, 1.0, 0.8, -0.3, 0.0, 2.0), 2)
log_s = RadialCharge(ChargeFamily.log_gaussian, (1.0, 0.0, 0.7071067811865476), 0)
log_p = RadialCharge(ChargeFamily.log_gaussian, (1.0, 0.5, 0.5), 1)

even_only = [gaussian_s, gaussian_d, poly_d]
mixed = [gaussian_s, gaussian_p, gaussian_d, gaussian_f]
route_cases = [
    (0, gaussian_s), (1, gaussian_p), (2, gaussian_d), (3, gaussian_f), (4, gaussian_s),
    (0, poly_s), (2, poly_d), (0, log_s), (1, log_p),
]

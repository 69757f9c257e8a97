import os

ORDER = int(os.getenv("SERIES_CORE_ORDER", "64"))
COEFF_TOL = float(os.getenv("SERIES_CORE_COEFF_TOL", "1e-14"))
FINITE_DIFFERENCE_STEP = float(os.getenv("SERIES_CORE_FD_STEP", "1e-5"))
FINITE_DIFFERENCE_TOL = float(os.getenv("SERIES_CORE_FD_TOL", "1e-6"))
RECENTER_TOL = float(os.getenv("SERIES_CORE_RECENTER_TOL", "1e-8"))

import os

from continuation_framework.config.settings import QuadratureSpec

QUADRATURE = QuadratureSpec.load_config()
LOOP_STEPS = int(os.getenv("LEWY_TEST_LOOP_STEPS", "8"))
LOOP_POINTS = (1.0 + 0j, 1.5 + 0j, 1.0 + 0.2j)
LOOP_REL_TOL = float(os.getenv("LEWY_TEST_LOOP_REL_TOL", "1e-6"))
SECTOR_SAMPLE_COUNT = int(os.getenv("LEWY_TEST_SECTOR_SAMPLES", "20"))
SECTOR_TOL = float(os.getenv("LEWY_TEST_SECTOR_TOL", "1e-7"))

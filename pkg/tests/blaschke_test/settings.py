import os

DEMO_PAIRS = int(os.getenv("BLASCHKE_TEST_DEMO_PAIRS", "8"))
DEMO_ANGLE_STEP = float(os.getenv("BLASCHKE_TEST_DEMO_ANGLE_STEP", "0.3"))
SAMPLE_PAIRS = int(os.getenv("BLASCHKE_TEST_SAMPLE_PAIRS", "3"))
GERM_ORDER = int(os.getenv("BLASCHKE_TEST_GERM_ORDER", "48"))
RANDOM_POINTS = int(os.getenv("BLASCHKE_TEST_RANDOM_POINTS", "500"))
SEED = int(os.getenv("BLASCHKE_TEST_SEED", "42"))
CHAIN_RULE_TOL = float(os.getenv("BLASCHKE_TEST_CHAIN_RULE_TOL", "1e-8"))

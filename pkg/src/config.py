import os

from dotenv import load_dotenv

load_dotenv()

# Worker pool size for sweeps
JOBS = int(os.getenv("PTOMIT_JOBS", str(os.cpu_count() or 1)))

# Where CSV/JSON artefacts are written
OUT_DIR = os.getenv("PTOMIT_OUT_DIR", "out")

LOG_LEVEL = os.getenv("PTOMIT_LOG_LEVEL", "INFO")

# Run catalog
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///ptomit_runs.db")
CATALOG_ENABLED = os.getenv("PTOMIT_CATALOG", "1") not in ("0", "false", "False", "")

TOOL_VERSION = "1.0.0"

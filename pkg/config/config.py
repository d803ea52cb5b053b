import os
import logging
from dotenv import load_dotenv

# Configure logger for this module
logger = logging.getLogger(__name__)

# Load environment variables from .env file
load_dotenv()

# Hard ceiling for dense 2^n vectors (256 MiB of complex128 at 24 qubits)
QUBIT_CEILING = 24


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        error_msg = f"Environment variable {name} must be an integer, got {raw!r}"
        logger.error(error_msg)
        raise EnvironmentError(error_msg)


LOG_MODE = os.getenv("LQCA_LOG_MODE", os.getenv("LOG_MODE", "normal"))
LOG_FILE = os.getenv("LQCA_LOG_FILE", "lqca.log")
OUTPUT_DIR = os.getenv("LQCA_OUTPUT_DIR", ".")

MAX_QUBITS = _int_from_env("LQCA_MAX_QUBITS", QUBIT_CEILING)
if MAX_QUBITS > QUBIT_CEILING:
    logger.warning(f"LQCA_MAX_QUBITS={MAX_QUBITS} exceeds {QUBIT_CEILING}; clamping")
    MAX_QUBITS = QUBIT_CEILING
if MAX_QUBITS < 1:
    error_msg = f"LQCA_MAX_QUBITS must be positive, got {MAX_QUBITS}"
    logger.error(error_msg)
    raise EnvironmentError(error_msg)

THREADS = _int_from_env("LQCA_THREADS", os.cpu_count() or 1)

logger.debug(f"Configuration loaded: max_qubits={MAX_QUBITS}, threads={THREADS}, output_dir={OUTPUT_DIR}")

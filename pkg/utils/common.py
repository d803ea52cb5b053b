# Standard library imports
import ast
import logging
import math
import operator
from typing import Any, Callable, Dict, Union

# Third-party imports
import numpy as np

# Local application imports
from config.config import MAX_QUBITS
from processor.errors import ConfigError, MemoryGuardError

# Configure logger for this module
logger = logging.getLogger(__name__)

_BINARY_OPERATORS: Dict[type, Callable[[float, float], float]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _evaluate(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _evaluate(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _evaluate(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY_OPERATORS:
        return _BINARY_OPERATORS[type(node.op)](_evaluate(node.left), _evaluate(node.right))
    raise ConfigError(f"Unsupported element in angle expression: {ast.dump(node)}")


def parse_theta(value: Union[str, float, int]) -> float:
    """
    Parse a mass angle given as a number or an expression such as "pi/8".

    Only numbers, the name pi and the operators + - * / are accepted.

    Args:
        value: Float, int or expression string

    Returns:
        The angle in radians

    Raises:
        ConfigError: If the expression is malformed or uses anything else
    """
    if isinstance(value, bool):
        raise ConfigError(f"Invalid angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    if not text:
        raise ConfigError("Empty angle expression")
    try:
        tree = ast.parse(text, mode="eval")
        result = _evaluate(tree)
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ConfigError(f"Invalid angle expression {text!r}: {exc}") from exc
    if not math.isfinite(result):
        raise ConfigError(f"Angle expression {text!r} is not finite")
    return result


def format_float(value: Any) -> str:
    """
    Format a value for CSV output; floats use the shortest round-trip repr.

    Args:
        value: Number (Python or numpy scalar) or any other printable value

    Returns:
        Text representation
    """
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == 0.0:
            # avoid "-0.0" in golden files
            return "0.0"
        return repr(value)
    return str(value)


def check_dense_budget(n_bits: int, what: str = "register") -> None:
    """
    Reject dense 2^n vectors above the configured qubit ceiling.

    Args:
        n_bits: Number of qubits or fermionic modes
        what: Label used in the error message

    Raises:
        MemoryGuardError: If n_bits exceeds LQCA_MAX_QUBITS
    """
    if n_bits > MAX_QUBITS:
        message = f"Dense {what} over {n_bits} bits exceeds the limit of {MAX_QUBITS}"
        logger.error(message)
        raise MemoryGuardError(message)


def max_abs(matrix: Any) -> float:
    """Largest entry magnitude of a dense or scipy.sparse matrix (0 for empty)."""
    if hasattr(matrix, "tocoo"):
        data = matrix.tocoo().data
        return float(np.max(np.abs(data))) if data.size else 0.0
    array = np.asarray(matrix)
    return float(np.max(np.abs(array))) if array.size else 0.0

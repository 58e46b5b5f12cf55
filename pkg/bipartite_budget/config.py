"""Configuration management for the bipartite budget solvers."""
import os
from dataclasses import dataclass


# --- CONSTANTS ---
DEFAULT_EXACT_LIMIT = 26
DEFAULT_ORACLE_LIMIT = 14
DEFAULT_POSITIVE_SEARCH_BOUND = 4
DEFAULT_WORK_BUDGET = 200_000
DEFAULT_MINMAX_SEARCH_LIMIT = 20_000
DEFAULT_MAX_ALTERNATIVES = 4096
REPORT_SEPARATOR_WIDTH = 80
MAX_TOTAL_WEIGHT = 2**63 - 1  # sum of all weights must fit a signed 64-bit integer
DP_BYTES_PER_STATE = 24  # mask + value + prefix cost, int64 each
MASK_BITS = 62  # vertex masks are signed 64-bit integers


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"Environment variable {name} must be an integer, got '{raw}'") from e
    if value < 0:
        raise ValueError(f"Environment variable {name} must be non-negative, got {value}")
    return value


@dataclass
class Config:
    """Configuration for the solvers, recognizers and CLI."""

    # Size limits
    exact_limit: int = DEFAULT_EXACT_LIMIT
    oracle_limit: int = DEFAULT_ORACLE_LIMIT

    # Search budgets
    positive_search_bound: int = DEFAULT_POSITIVE_SEARCH_BOUND
    work_budget: int = DEFAULT_WORK_BUDGET
    minmax_search_limit: int = DEFAULT_MINMAX_SEARCH_LIMIT
    max_alternatives: int = DEFAULT_MAX_ALTERNATIVES

    # Debug configuration
    debug_report: bool = False

    @classmethod
    def from_env(cls) -> "Config":
        """Create configuration from environment variables."""
        config = cls()

        config.exact_limit = _env_int("BGP_EXACT_LIMIT", DEFAULT_EXACT_LIMIT)
        config.oracle_limit = _env_int("BGP_ORACLE_LIMIT", DEFAULT_ORACLE_LIMIT)
        config.positive_search_bound = _env_int(
            "BGP_POSITIVE_SEARCH_BOUND",
            DEFAULT_POSITIVE_SEARCH_BOUND
        )
        config.work_budget = _env_int("BGP_WORK_BUDGET", DEFAULT_WORK_BUDGET)
        config.minmax_search_limit = _env_int(
            "BGP_MINMAX_SEARCH_LIMIT",
            DEFAULT_MINMAX_SEARCH_LIMIT
        )
        config.max_alternatives = _env_int("BGP_MAX_ALTERNATIVES", DEFAULT_MAX_ALTERNATIVES)

        debug_env = os.environ.get("BGP_DEBUG_REPORT", "false").lower()
        config.debug_report = debug_env in ("1", "true", "yes")

        return config

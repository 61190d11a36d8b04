"""Data models for the triangle composition toolkit."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from dataclasses_json import config, dataclass_json

APP_VERSION = "1.0.0"

FOUND = "Found"
NOT_FOUND = "NotFound"
ANOMALOUS = "Anomalous"
ERROR = "Error"


def _omit_none():
    return field(default=None, metadata=config(exclude=lambda v: v is None))


@dataclass
class ToolSettings:
    """Persisted defaults; command-line flags override them per run."""
    backtrack_degree_cap: int = 9
    default_budget: int = 20000
    default_seed: int = 0
    default_k: int = 1
    sweep_workers: int = 1
    log_level: str = 'INFO'  # DEBUG, INFO, WARNING, ERROR
    log_dir: str = './logs'
    output_dir: str = './runs'
    strict_orders: bool = False

    def to_dict(self) -> dict:
        """Convert settings to dictionary for JSON serialization."""
        return {
            'backtrack_degree_cap': self.backtrack_degree_cap,
            'default_budget': self.default_budget,
            'default_seed': self.default_seed,
            'default_k': self.default_k,
            'sweep_workers': self.sweep_workers,
            'log_level': self.log_level,
            'log_dir': self.log_dir,
            'output_dir': self.output_dir,
            'strict_orders': self.strict_orders,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ToolSettings':
        """Create ToolSettings from dictionary."""
        return cls(
            backtrack_degree_cap=int(data.get('backtrack_degree_cap', 9)),
            default_budget=int(data.get('default_budget', 20000)),
            default_seed=int(data.get('default_seed', 0)),
            default_k=int(data.get('default_k', 1)),
            sweep_workers=int(data.get('sweep_workers', 1)),
            log_level=str(data.get('log_level', 'INFO')).upper(),
            log_dir=data.get('log_dir', './logs'),
            output_dir=data.get('output_dir', './runs'),
            strict_orders=bool(data.get('strict_orders', False)),
        )


@dataclass_json
@dataclass
class RepFile:
    """On-disk representation: cycle lists of 1-based points."""
    p: int
    q: int
    r: int
    degree: int
    x: List[List[int]]
    y: List[List[int]]
    handles: Optional[List[List[int]]] = _omit_none()  # [a, b, k]
    provenance: Optional[Dict[str, Any]] = _omit_none()


@dataclass_json
@dataclass
class RunManifest:
    """Reproducibility record written next to every randomized command's output."""
    command: str
    command_line: List[str]
    seed: Optional[int]
    app_version: str
    python_version: str
    numpy_version: str
    platform: str
    started_at: str
    elapsed_seconds: float = 0.0
    memory_rss_bytes: int = 0
    outcome: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SweepTask:
    """One degree of a conjecture sweep, picklable for the worker pool."""
    conjecture: int
    p: int
    q: int
    r: int
    degree: int
    seed: int
    budget: int
    k: int = 1
    m: Optional[int] = None


@dataclass_json
@dataclass
class SweepRow:
    conjecture: int
    p: int
    q: int
    r: int
    degree: int
    seed: int
    status: str  # Found, NotFound, Anomalous, Error
    message: str = ""
    verdict: Optional[str] = _omit_none()
    attempts: Optional[int] = _omit_none()
    group_order: Optional[int] = _omit_none()
    kernel_order: Optional[int] = _omit_none()
    m: Optional[int] = _omit_none()
    preconditions: Dict[str, bool] = field(default_factory=dict)

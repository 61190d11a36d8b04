"""Pipeline controller: conjecture sweeps, worker pool and run manifests."""

import logging
import platform
import signal
import sys
import time
from concurrent.futures import CancelledError, Future, ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import psutil

from .analyze import ANOMALOUS as VERDICT_ANOMALOUS
from .analyze import HypothesisFailed, classify_thm7, verify_thm8
from .compose import compose_alpha_beta, compose_clone_p
from .errors import TriangleToolError
from .models import (ANOMALOUS, APP_VERSION, ERROR, FOUND, NOT_FOUND, RunManifest, SweepRow,
                     SweepTask, ToolSettings)
from .triangle import NotFound, TrianglePresentation, is_prime, search_alpha_beta, search_alternating

logger = logging.getLogger(__name__)


def degree_seed(seed: int, degree: int) -> int:
    """Independent per-degree seed, stable for a given base seed."""
    return int(np.random.SeedSequence([seed, degree]).generate_state(1)[0])


def default_copies(p: int, degree: int) -> int:
    """Smallest admissible number of copies for the wreath sweep."""
    m = max(5, p)
    while m == degree - 1:
        m += 1
    return m


def _preconditions(task: SweepTask) -> Dict[str, bool]:
    p, q, r, deg = task.p, task.q, task.r, task.degree
    flags = {
        "p_prime": is_prime(p),
        "p_le_q_le_r": p <= q <= r,
    }
    if task.conjecture == 1:
        flags["p_not_divides_qr"] = (q * r) % p != 0
        flags["p_not_divides_deg"] = deg % p != 0
    else:
        m = task.m or default_copies(p, deg)
        flags["m_ge_5"] = m >= 5
        flags["m_ne_deg_minus_1"] = m != deg - 1
    return flags


def _clone_cell(task: SweepTask, pres: TrianglePresentation, row: SweepRow) -> SweepRow:
    hit = search_alternating(pres, task.degree, 1, task.k, task.seed, task.budget)
    row.attempts = hit.attempts
    comp = compose_clone_p(hit.representation, hit.handles[0])
    verdict = classify_thm7(comp)
    row.verdict = verdict.case
    row.group_order = verdict.group_order
    row.kernel_order = verdict.kernel_order
    row.status = ANOMALOUS if verdict.case == VERDICT_ANOMALOUS else FOUND
    row.message = verdict.reason
    return row


def _wreath_cell(task: SweepTask, pres: TrianglePresentation, row: SweepRow) -> SweepRow:
    m = task.m or default_copies(task.p, task.degree)
    row.m = m
    hit = search_alternating(pres, task.degree, 2, task.k, task.seed, task.budget)
    pair = search_alpha_beta(task.p, m, task.seed, task.budget)
    row.attempts = hit.attempts + pair.attempts
    h1, h2 = hit.handles
    comp = compose_alpha_beta(hit.representation, h1, h2, pair.alpha, pair.beta, m)
    verdict = verify_thm8(comp, m)
    row.verdict = "verified" if verdict.verified else "not verified"
    row.group_order = verdict.found_order
    row.status = FOUND if verdict.verified else ANOMALOUS
    row.message = f"expected order {verdict.expected_order}"
    return row


def run_sweep_cell(task: SweepTask) -> SweepRow:
    """Search, compose and classify at one degree; never raises."""
    row = SweepRow(conjecture=task.conjecture, p=task.p, q=task.q, r=task.r, degree=task.degree,
                   seed=task.seed, status=ERROR, preconditions=_preconditions(task))
    try:
        pres = TrianglePresentation(task.p, task.q, task.r)
        if task.conjecture == 1:
            return _clone_cell(task, pres, row)
        return _wreath_cell(task, pres, row)
    except NotFound as e:
        row.status = NOT_FOUND
        row.message = f"no witness within budget: {e}"
    except HypothesisFailed as e:
        row.status = ERROR
        row.message = str(e)
    except TriangleToolError as e:
        logger.error(f"Sweep cell at degree {task.degree} failed: {e}")
        row.status = ERROR
        row.message = str(e)
    except Exception as e:
        logger.exception(f"Unexpected error in sweep cell at degree {task.degree}: {e}")
        row.status = ERROR
        row.message = f"unexpected: {e}"
    return row


class PipelineController:
    """Runs sweeps over a degree range and records run manifests."""

    def __init__(self, settings: Optional[ToolSettings] = None):
        self.settings = settings or ToolSettings()
        self.logger = logging.getLogger(__name__)
        self.is_shutting_down = False
        self._pending: List[Future] = []
        self._previous_handlers: Dict[int, object] = {}

    def _setup_signal_handlers(self):
        """Set up signal handlers for graceful shutdown."""
        try:
            for signum in (signal.SIGINT, signal.SIGTERM):
                self._previous_handlers[signum] = signal.signal(signum, self._signal_handler)
            self.logger.debug("Signal handlers configured")
        except Exception as e:
            self.logger.warning(f"Could not set up signal handlers: {e}")

    def _restore_signal_handlers(self):
        for signum, handler in self._previous_handlers.items():
            try:
                signal.signal(signum, handler)
            except Exception as e:
                self.logger.debug(f"Could not restore handler for signal {signum}: {e}")
        self._previous_handlers.clear()

    def _signal_handler(self, signum, frame):
        """Handle system signals by cancelling outstanding sweep cells."""
        self.logger.info(f"Received signal {signum}, cancelling pending sweep cells")
        self.shutdown()

    def shutdown(self):
        if self.is_shutting_down:
            return
        self.is_shutting_down = True
        cancelled = sum(1 for f in self._pending if f.cancel())
        self.logger.info(f"Shutdown: {cancelled} pending cells cancelled")

    def sweep_tasks(self, conjecture: int, p: int, q: int, r: int, degrees: Sequence[int],
                    budget: int, seed: int, k: int = 1, m: Optional[int] = None) -> List[SweepTask]:
        return [SweepTask(conjecture, p, q, r, deg, degree_seed(seed, deg), budget, k, m) for deg in degrees]

    def _collect(self, futures: Sequence[Future]) -> List[SweepRow]:
        """Results of the futures; ones cancelled by a shutdown signal are skipped."""
        rows: List[SweepRow] = []
        for future in futures:
            try:
                rows.append(future.result())
            except CancelledError:
                self.logger.info("Sweep cell cancelled during shutdown")
        return rows

    def run_sweep(self, tasks: Sequence[SweepTask], workers: Optional[int] = None) -> List[SweepRow]:
        """Run every cell; rows come back ordered by degree."""
        workers = workers or self.settings.sweep_workers
        self.is_shutting_down = False
        self.logger.info(f"Sweep over {len(tasks)} degrees with {workers} worker(s)")
        rows: List[SweepRow] = []
        if workers <= 1:
            for task in tasks:
                if self.is_shutting_down:
                    break
                rows.append(run_sweep_cell(task))
                self.logger.info(f"degree {task.degree}: {rows[-1].status}")
        else:
            self._setup_signal_handlers()
            try:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    self._pending = [pool.submit(run_sweep_cell, task) for task in tasks]
                    rows = self._collect(self._pending)
            finally:
                self._pending = []
                self._restore_signal_handlers()
        return sorted(rows, key=lambda row: row.degree)

    def start_manifest(self, command: str, argv: Sequence[str], seed: Optional[int]) -> RunManifest:
        return RunManifest(
            command=command,
            command_line=list(argv),
            seed=seed,
            app_version=APP_VERSION,
            python_version=platform.python_version(),
            numpy_version=np.__version__,
            platform=platform.platform(),
            started_at=datetime.now(timezone.utc).isoformat(),
        )

    def finish_manifest(self, manifest: RunManifest, started: float, outcome: Dict,
                        out_dir: Path, stem: str) -> Optional[Path]:
        """Fill timing and memory, then write ``<stem>.manifest.json``."""
        manifest.elapsed_seconds = round(time.perf_counter() - started, 3)
        manifest.memory_rss_bytes = psutil.Process().memory_info().rss
        manifest.outcome = outcome
        path = Path(out_dir) / f"{stem}.manifest.json"
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(manifest.to_json(indent=2) + "\n", encoding="utf-8")
            self.logger.info(f"Run manifest written to {path}")
            return path
        except OSError as e:
            self.logger.error(f"Could not write manifest {path}: {e}")
            return None

    def get_application_info(self) -> dict:
        return {
            'name': 'triangle-compose',
            'version': APP_VERSION,
            'python_version': f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}",
            'numpy_version': np.__version__,
            'workers': self.settings.sweep_workers,
        }

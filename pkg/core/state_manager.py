"""
Pipeline State Manager
Tracks the status of each pipeline stage per pair for the running process
"""

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

from utils.constants import StageStatus


@dataclass
class PipelineSession:
    """One stage run for one pair"""
    pair: str
    stage: str
    output_dir: Path
    start_time: datetime = field(default_factory=datetime.now)
    end_time: Optional[datetime] = None
    status: StageStatus = StageStatus.IDLE
    total_steps: int = 0
    completed_steps: int = 0
    artifacts: List[Path] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)


class PipelineState:
    """
    Process-wide record of stage sessions.
    Single source of truth for progress reporting.
    """

    def __init__(self):
        self.current_session: Optional[PipelineSession] = None
        self.sessions: List[PipelineSession] = []

    # ========================================================================
    # STAGE METHODS
    # ========================================================================

    def start_stage(self, pair: str, stage: str, output_dir: Path, total_steps: int = 0) -> PipelineSession:
        """Open a new session and make it current"""
        session = PipelineSession(pair=pair, stage=stage, output_dir=Path(output_dir),
                                  status=StageStatus.RUNNING, total_steps=total_steps)
        self.current_session = session
        self.sessions.append(session)
        return session

    def update_progress(self, completed: int, total: Optional[int] = None):
        if self.current_session:
            self.current_session.completed_steps = completed
            if total is not None:
                self.current_session.total_steps = total

    def add_artifacts(self, paths: List[Path]):
        if self.current_session:
            self.current_session.artifacts.extend(Path(p) for p in paths)

    def complete_stage(self):
        if self.current_session:
            self.current_session.status = StageStatus.COMPLETED
            self.current_session.end_time = datetime.now()

    def set_stage_error(self, error_message: str):
        if self.current_session:
            self.current_session.status = StageStatus.ERROR
            self.current_session.end_time = datetime.now()
            self.current_session.errors.append(error_message)

    # ========================================================================
    # UTILITY METHODS
    # ========================================================================

    def get_progress_percentage(self) -> float:
        """Progress of the current stage as a percentage"""
        session = self.current_session
        if not session or session.total_steps == 0:
            return 0.0
        return (session.completed_steps / session.total_steps) * 100

    def get_elapsed_time(self) -> Optional[int]:
        """Seconds since the current stage started"""
        if self.current_session:
            return int((datetime.now() - self.current_session.start_time).total_seconds())
        return None

    def to_dict(self) -> Dict:
        return {
            "sessions": [
                {
                    "pair": s.pair,
                    "stage": s.stage,
                    "status": s.status.name,
                    "artifacts": [str(p) for p in s.artifacts],
                    "errors": list(s.errors),
                }
                for s in self.sessions
            ]
        }

    def reset(self):
        self.current_session = None
        self.sessions = []


# ============================================================================
# GLOBAL STATE INSTANCE
# ============================================================================
# Single instance to be imported everywhere
pipeline_state = PipelineState()

import time
from typing import Dict, Optional


class PhaseTimer:
    """Wall and CPU time of a pipeline phase, used as a context manager."""

    def __init__(self, name: str, sink: Optional[Dict[str, Dict[str, float]]] = None):
        self.name = name
        self.sink = sink
        self.start_time = 0.0
        self.end_time = 0.0
        self.start_cpu = 0.0
        self.end_cpu = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        self.start_cpu = time.process_time()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.end_time = time.perf_counter()
        self.end_cpu = time.process_time()
        if self.sink is not None:
            self.sink[self.name] = self.get_metrics()

    def get_metrics(self) -> Dict[str, float]:
        return {
            "wall_time": self.end_time - self.start_time,
            "cpu_time": self.end_cpu - self.start_cpu,
        }

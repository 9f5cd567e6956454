"""Throughput benchmark on the synthetic 10-page article."""
from __future__ import annotations

import statistics
import time

from .pipeline import PipelineParams, translate_stream
from .synth import synthetic_article

BUDGET_SEC_PER_PAGE = 1.5


def run_benchmark(pages: int = 10, runs: int = 5, service: str = "identity", workers: int = 4) -> dict:
    """Median wall time of ``runs`` full passes (parse, rules layout, translate, render)."""
    data = synthetic_article(pages)
    times = []
    for _ in range(runs):
        params = PipelineParams(service=service, lang_in="en", lang_out="fr", worker_count=workers)
        t0 = time.perf_counter()
        translate_stream(data, params)
        times.append(time.perf_counter() - t0)
    median = statistics.median(times)
    return {
        "service": service,
        "pages": pages,
        "runs": runs,
        "median_sec": median,
        "sec_per_page": median / pages,
        "budget_sec_per_page": BUDGET_SEC_PER_PAGE,
        "within_budget": median / pages <= BUDGET_SEC_PER_PAGE,
    }

"""Bytes in, translated PDFs out.

Stages: parse, detect layout, segment and mask, translate paragraphs on a
worker pool, lay the results back into their boxes, write mono and dual
documents. Everything happens in memory; the translation cache is the only
thing that touches disk.
"""
from __future__ import annotations

import logging
import re
import threading
import time
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from typing import Any, Callable

from .layout import DetectorConfig, LayoutBox, assign_runs, detect_layout_rules
from .layout.raster import Rasterizer, default_rasterizer
from .model import PageIR
from .pdf import parse_document
from .renderer import PageRender, ParagraphRender, emit_dual, emit_pdf, layout_text, select_font
from .renderer.fonts import RTL_SCRIPTS, TargetFont, download_remote_fonts
from .segmenter import (
    Paragraph,
    PlaceholderViolation,
    Segment,
    assemble_paragraphs,
    protect_elements,
    restore_elements,
    strip_placeholders,
)
from .translators import (
    BaseTranslator,
    CallStats,
    PromptTemplate,
    RateLimiter,
    RetryPolicy,
    ServiceRegistry,
    TranslateRequest,
    TranslationCache,
    TranslationClient,
    lookup_language,
    registry as default_registry,
)

logger = logging.getLogger(__name__)

STAGES = ("parse", "detect", "translate", "render")
DEFAULT_WORKERS = 4


class Cancelled(Exception):
    pass


class BadPageSpec(ValueError):
    pass


class CancellationToken:
    """Set-once flag shared between the caller and worker threads."""

    def __init__(self) -> None:
        self._event = threading.Event()

    def cancel(self) -> None:
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()

    def check(self) -> None:
        if self._event.is_set():
            raise Cancelled("translation cancelled")


@dataclass(frozen=True)
class ProgressEvent:
    stage: str
    page: int | None
    done: int
    total: int


ProgressSink = Callable[[ProgressEvent], None]

_RANGE = re.compile(r"^\s*(\d+)\s*(?:-\s*(\d+)\s*)?$")


def select_pages(spec: str) -> list[int]:
    """Parse "1-3,5" style 1-based ranges into sorted 0-based indices."""
    if spec is None or not spec.strip():
        raise BadPageSpec("empty page spec")
    out: set[int] = set()
    for part in spec.split(","):
        m = _RANGE.match(part)
        if not m:
            raise BadPageSpec(f"bad page range {part.strip()!r}")
        a = int(m.group(1))
        b = int(m.group(2)) if m.group(2) else a
        if a == 0 or b == 0:
            raise BadPageSpec("pages are numbered from 1")
        if b < a:
            raise BadPageSpec(f"range {a}-{b} runs backwards")
        out.update(range(a - 1, b))
    return sorted(out)


@dataclass
class PipelineParams:
    lang_in: str = "en"
    lang_out: str = "zh-CN"
    service: str = "identity"
    service_config: dict[str, Any] = field(default_factory=dict)
    pages: list[int] | None = None
    worker_count: int = DEFAULT_WORKERS
    ignore_cache: bool = False
    prompt: PromptTemplate | None = None
    layout_backend: str = "rules"
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    font_dirs: list[str] = field(default_factory=list)
    font_path: str | None = None
    download_fonts: bool = False
    font_cache_dir: str = "~/.cache/pdftrans/fonts"
    cache: TranslationCache | None = None
    qps: float | None = None
    retry: RetryPolicy | None = None
    registry: ServiceRegistry | None = None
    # a ready translator instance takes precedence over ``service``
    translator: BaseTranslator | None = None
    rasterizer: Rasterizer | None = None
    session_factory: Callable | None = None

    def validate(self) -> None:
        if self.worker_count < 1:
            raise ValueError("worker_count must be at least 1")
        if self.layout_backend not in ("rules", "model"):
            raise ValueError(f"unknown layout backend {self.layout_backend!r}")
        lookup_language(self.lang_in)
        lookup_language(self.lang_out)


@dataclass
class _Job:
    paragraph: Paragraph
    page: int


class _Progress:
    def __init__(self, sink: ProgressSink | None) -> None:
        self.sink = sink
        self.lock = threading.Lock()
        self.done = {s: 0 for s in STAGES}

    def step(self, stage: str, page: int | None, total: int) -> None:
        with self.lock:
            self.done[stage] += 1
            if self.sink is not None:
                self.sink(ProgressEvent(stage, page, self.done[stage], total))


def _has_letters(text: str) -> bool:
    return any(c.isalpha() for c in strip_placeholders(text))


def _make_client(params: PipelineParams, stats: CallStats) -> TranslationClient:
    translator = params.translator
    if translator is None:
        reg = params.registry or default_registry
        config = dict(params.service_config)
        if params.prompt is not None and reg.descriptor(params.service).kind == "llm-chat":
            config["prompt"] = params.prompt
        translator = reg.create(params.service, config)
    prompt_digest = params.prompt.digest() if params.prompt is not None else ""
    return TranslationClient(
        translator,
        cache=params.cache,
        limiter=RateLimiter(params.qps) if params.qps else None,
        retry=params.retry,
        ignore_cache=params.ignore_cache,
        prompt_digest=prompt_digest,
        stats=stats,
    )


def _detect(page: PageIR, params: PipelineParams, source: bytes, detector) -> list[LayoutBox]:
    if params.layout_backend == "rules" or not page.runs:
        return detect_layout_rules(page.runs, page.media_box)
    raster = params.rasterizer or default_rasterizer()
    image = raster.render(source, page.index, page.media_box, page.runs)
    return detector.detect(image, page.media_box)


def _translate_one(
    client: TranslationClient, job: _Job, params: PipelineParams, violations: list, lock: threading.Lock
) -> list[Segment] | None:
    """Translated segments, or None when the paragraph stays as it was."""
    p = job.paragraph
    req = TranslateRequest(p.masked_text, params.lang_in, params.lang_out)
    for attempt in range(2):
        out = client.translate(req, refresh=attempt > 0)
        if out == p.masked_text:
            return None
        try:
            return restore_elements(out, p.placeholders)
        except PlaceholderViolation as exc:
            with lock:
                violations.append({"page": job.page, "paragraph": p.id, "kind": exc.kind, "attempt": attempt + 1})
            logger.warning("paragraph %d: %s (attempt %d)", p.id, exc, attempt + 1)
    logger.warning("paragraph %d: keeping source text after repeated placeholder damage", p.id)
    return None


def _run_translations(
    jobs: list[_Job],
    client: TranslationClient,
    params: PipelineParams,
    cancel: CancellationToken,
    progress: _Progress,
    violations: list,
) -> tuple[dict[int, list[Segment] | None], dict[int, float]]:
    results: dict[int, list[Segment] | None] = {}
    lock = threading.Lock()
    total = len(jobs)

    def work(job: _Job):
        cancel.check()  # no new service call once cancelled
        t0 = time.perf_counter()
        res = _translate_one(client, job, params, violations, lock)
        return job, res, time.perf_counter() - t0

    timings: dict[int, float] = {}
    pending: set[Future] = set()
    it = iter(jobs)
    with ThreadPoolExecutor(max_workers=params.worker_count, thread_name_prefix="pdftrans") as pool:
        try:
            exhausted = False
            while True:
                while not exhausted and len(pending) < params.worker_count * 2:
                    if cancel.cancelled:
                        break
                    job = next(it, None)
                    if job is None:
                        exhausted = True
                        break
                    pending.add(pool.submit(work, job))
                if not pending:
                    break
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    job, res, dt = fut.result()
                    results[job.paragraph.id] = res
                    timings[job.page] = timings.get(job.page, 0.0) + dt
                    progress.step("translate", job.page, total)
            cancel.check()
        except BaseException:
            for fut in pending:
                fut.cancel()
            raise
    return results, timings


def translate_stream(
    data: bytes,
    params: PipelineParams | None = None,
    cancel: CancellationToken | None = None,
    progress: ProgressSink | None = None,
) -> tuple[bytes, bytes, dict]:
    """Translate a PDF held in memory; returns (mono, dual, report)."""
    params = params or PipelineParams()
    params.validate()
    cancel = cancel or CancellationToken()
    prog = _Progress(progress)
    t_start = time.perf_counter()
    stats = CallStats()
    client = _make_client(params, stats)
    cancel.check()

    t0 = time.perf_counter()
    doc = parse_document(data)
    parse_time = time.perf_counter() - t0
    n_pages = len(doc.pages)
    for page in doc.pages:
        prog.step("parse", page.index, n_pages)
    selected = list(range(n_pages)) if params.pages is None else sorted(set(params.pages))
    bad = [i for i in selected if not 0 <= i < n_pages]
    if bad:
        raise BadPageSpec(f"page {bad[0] + 1} is beyond the document's {n_pages} pages")

    detector = None
    if params.layout_backend == "model":
        from .layout.model import OnnxLayoutDetector

        detector = OnnxLayoutDetector(params.detector, params.session_factory)

    page_times: dict[int, dict[str, float]] = {i: {} for i in selected}
    paragraphs: dict[int, list[Paragraph]] = {}
    next_id = 0
    for i in selected:
        cancel.check()
        page = doc.pages[i]
        t0 = time.perf_counter()
        boxes = _detect(page, params, data, detector)
        assignment = assign_runs(page.runs, boxes)
        paras = assemble_paragraphs(page.runs, assignment, boxes, doc.warnings, first_id=next_id)
        for p in paras:
            protect_elements(p, doc.fonts, doc.warnings)
        next_id += len(paras)
        paragraphs[i] = paras
        page_times[i]["detect"] = time.perf_counter() - t0
        prog.step("detect", i, len(selected))

    jobs = [
        _Job(p, i)
        for i in selected
        for p in paragraphs[i]
        if p.translatable and _has_letters(p.masked_text)
    ]
    violations: list[dict] = []
    cancel.check()
    results, timings = _run_translations(jobs, client, params, cancel, prog, violations)
    for i, dt in timings.items():
        page_times[i]["translate"] = dt

    script = lookup_language(params.lang_out).script
    font: TargetFont | None = None
    renders: list[PageRender] = []
    overflows: list[dict] = []
    fits: dict[str, int] = {"exact": 0, "shrunk": 0, "overflow": 0}
    missing_glyphs = 0
    for i in selected:
        cancel.check()
        t0 = time.perf_counter()
        render = PageRender(i)
        for p in paragraphs[i]:
            segments = results.get(p.id)
            if segments is None:
                continue
            if font is None:
                font = _pick_font(script, params)
            lines, report = layout_text(
                segments, p.box, font, p.size, [g.bbox for g in p.placeholders.groups], rtl=script in RTL_SCRIPTS
            )
            fits[report.status] += 1
            missing_glyphs += report.missing_glyphs
            if report.overflow:
                overflows.append({"page": i, "paragraph": p.id, "size": round(report.size, 3)})
            render.paragraphs.append(ParagraphRender(p, lines, font, report))
        renders.append(render)
        page_times[i]["render"] = time.perf_counter() - t0
        prog.step("render", i, len(selected))

    cancel.check()
    t0 = time.perf_counter()
    mono = emit_pdf(doc, renders)
    dual = emit_dual(doc, mono)
    emit_time = time.perf_counter() - t0
    total = time.perf_counter() - t_start
    report = {
        "pages": n_pages,
        "translated_pages": [i + 1 for i in selected],
        "paragraphs": sum(len(v) for v in paragraphs.values()),
        "translated_paragraphs": len(jobs),
        "service": client.translator.descriptor.name,
        "lang_in": params.lang_in,
        "lang_out": params.lang_out,
        "translator_calls": stats.calls,
        "cache_hits": stats.cache_hits,
        "cache_misses": stats.calls,
        "attempts": stats.attempts,
        "fit": fits,
        "overflow": overflows,
        "placeholder_violations": sorted(violations, key=lambda v: (v["paragraph"], v["attempt"])),
        "missing_glyphs": missing_glyphs,
        "font": font.path if font is not None else None,
        "warnings": list(doc.warnings),
        "timing": {
            "parse": parse_time,
            "emit": emit_time,
            "total": total,
            "sec_per_page": total / n_pages,
            "per_page": {str(i + 1): t for i, t in page_times.items()},
        },
    }
    return mono, dual, report


def _pick_font(script: str, params: PipelineParams) -> TargetFont:
    downloader = None
    if params.download_fonts:
        def downloader(name: str):
            return download_remote_fonts(name, params.font_cache_dir)

    return select_font(script, params.font_dirs, font_path=params.font_path, downloader=downloader)


def translate_document(doc_bytes: bytes, **kwargs) -> tuple[bytes, bytes, dict]:
    """Keyword-argument convenience wrapper around :func:`translate_stream`."""
    return translate_stream(doc_bytes, PipelineParams(**kwargs))


__all__ = [
    "BadPageSpec",
    "Cancelled",
    "CancellationToken",
    "PipelineParams",
    "ProgressEvent",
    "select_pages",
    "translate_document",
    "translate_stream",
]

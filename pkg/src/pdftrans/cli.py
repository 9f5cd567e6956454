"""``pdftrans`` command line.

Exit codes: 0 success, 1 at least one input failed, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import signal
import sys
import time
from pathlib import Path
from typing import Sequence, TextIO

from .config import ConfigParseError, CliConfig, default_config_path, load_config
from .layout import DetectorConfig
from .pdf.objects import PdfError
from .pipeline import (
    BadPageSpec,
    Cancelled,
    CancellationToken,
    PipelineParams,
    ProgressEvent,
    select_pages,
    translate_stream,
)
from .translators import (
    LANGUAGES,
    MissingConfig,
    TranslationCache,
    UnknownLanguage,
    UnknownService,
    default_cache_path,
    load_plugin,
    load_prompt,
    lookup_language,
    registry,
)
from .translators.base import load_entry_points
from .translators.errors import InvalidTemplate, ServiceError, UnknownVariable

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 as well; keep the message format
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdftrans", description="Translate PDF documents while keeping their layout.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    t = sub.add_parser("translate", help="translate one or more PDF files")
    t.add_argument("files", nargs="+", metavar="FILE", help="input PDF, or - for stdin")
    t.add_argument("--lang-in", "-li", dest="lang_in")
    t.add_argument("--lang-out", "-lo", dest="lang_out")
    t.add_argument("--service", "-s")
    t.add_argument("--pages", "-p", help='1-based pages, e.g. "1-3,5"')
    t.add_argument("--threads", "-t", type=int)
    t.add_argument("--ignore-cache", action="store_true", default=None)
    t.add_argument("--prompt", help="prompt template file (.txt or .json)")
    t.add_argument("--output", "-o", help="output directory")
    t.add_argument("--layout", choices=["rules", "model"])
    t.add_argument("--layout-model", help="ONNX layout model file")
    t.add_argument("--font-dir")
    t.add_argument("--font", help="font file for translated text")
    t.add_argument("--cache-path", help='translation cache file, or "none"')
    t.add_argument("--qps", type=float, help="max translation requests per second")
    t.add_argument("--config", help="config file (key = value lines)")
    t.add_argument("--print-config", action="store_true", help="show the effective settings and exit")
    t.add_argument("--plugin", action="append", default=[], help="module or .py file registering services")
    t.add_argument("--json", action="store_true", help="machine-readable diagnostics")
    t.add_argument("--quiet", "-q", action="store_true", help="no progress on stderr")

    s = sub.add_parser("services", help="list translation services")
    s.add_argument("--plugin", action="append", default=[])
    s.add_argument("--json", action="store_true")

    la = sub.add_parser("languages", help="list supported languages")
    la.add_argument("--json", action="store_true")

    b = sub.add_parser("bench", help="throughput benchmark on a synthetic article")
    b.add_argument("--runs", type=int, default=5)
    b.add_argument("--pages", type=int, default=10)
    b.add_argument("--service", default="identity")
    b.add_argument("--json", action="store_true")
    return parser


def _flags(ns: argparse.Namespace) -> dict:
    return {
        "lang-in": ns.lang_in,
        "lang-out": ns.lang_out,
        "service": ns.service,
        "pages": ns.pages,
        "threads": ns.threads,
        "ignore-cache": ns.ignore_cache,
        "prompt": ns.prompt,
        "output": ns.output,
        "layout": ns.layout,
        "layout-model": ns.layout_model,
        "font-dir": ns.font_dir,
        "font": ns.font,
        "cache-path": ns.cache_path,
        "qps": ns.qps,
    }


def _load_plugins(names: Sequence[str]) -> None:
    load_entry_points()
    for name in names:
        try:
            load_plugin(name)
        except Exception as exc:  # noqa: BLE001 - report any import failure as usage error
            raise UsageError(f"cannot load plugin {name!r}: {exc}") from exc


def _params(cfg: CliConfig) -> PipelineParams:
    service = cfg["service"]
    if service not in registry:
        raise UsageError(f"unknown service {service!r}; available: {', '.join(registry.names())}")
    for key in ("lang-in", "lang-out"):
        try:
            lookup_language(cfg[key])
        except UnknownLanguage as exc:
            raise UsageError(f"{exc}; run 'pdftrans languages' for the list") from exc
    pages = None
    if cfg["pages"]:
        try:
            pages = select_pages(str(cfg["pages"]))
        except BadPageSpec as exc:
            raise UsageError(str(exc)) from exc
    threads = cfg.get("threads", 4)
    if threads < 1:
        raise UsageError("--threads must be at least 1")
    prompt = None
    if cfg["prompt"]:
        try:
            prompt = load_prompt(cfg["prompt"])
        except (OSError, ValueError, UnknownVariable, InvalidTemplate) as exc:
            raise UsageError(f"bad prompt file: {exc}") from exc
    layout = cfg.get("layout", "rules")
    if layout == "model" and not cfg["layout-model"]:
        raise UsageError("--layout model needs --layout-model PATH")
    cache_path = cfg["cache-path"]
    if cache_path and str(cache_path).lower() == "none":
        cache = TranslationCache(None)
    else:
        cache = TranslationCache(cache_path or default_cache_path())
    service_config = cfg.service_config()
    try:
        registry.create(service, dict(service_config))
    except MissingConfig as exc:
        env = f"{service.upper().replace('-', '_')}_{exc.key.upper().replace('-', '_')}"
        raise UsageError(f"service {service!r} needs {exc.key!r} (flag, config file, or ${env})") from exc
    return PipelineParams(
        lang_in=cfg["lang-in"],
        lang_out=cfg["lang-out"],
        service=service,
        service_config=service_config,
        pages=pages,
        worker_count=threads,
        ignore_cache=bool(cfg["ignore-cache"]),
        prompt=prompt,
        layout_backend=layout,
        detector=DetectorConfig(model_path=cfg["layout-model"]),
        font_dirs=[cfg["font-dir"]] if cfg["font-dir"] else [],
        font_path=cfg["font"],
        download_fonts=bool(cfg["download-fonts"]),
        cache=cache,
        qps=cfg["qps"],
    )


def _emit(out: TextIO, as_json: bool, record: dict, text: str) -> None:
    if as_json:
        out.write(json.dumps(record, ensure_ascii=False) + "\n")
    else:
        out.write(text + "\n")
    out.flush()


def _progress_printer(err: TextIO, as_json: bool, name: str):
    def sink(ev: ProgressEvent) -> None:
        page = "" if ev.page is None else f" page {ev.page + 1}"
        _emit(
            err,
            as_json,
            {"event": "progress", "file": name, "stage": ev.stage, "page": ev.page, "done": ev.done, "total": ev.total},
            f"[{ev.stage}] {name}{page} {ev.done}/{ev.total}",
        )

    return sink


def _translate_one(
    path: str, params: PipelineParams, cfg: CliConfig, ns, out: TextIO, err: TextIO, cancel: CancellationToken
) -> bool:
    name = "<stdin>" if path == "-" else path
    try:
        data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as exc:
        _emit(err, ns.json, {"event": "error", "file": name, "error": str(exc)}, f"error: {name}: {exc}")
        return False
    sink = None if ns.quiet else _progress_printer(err, ns.json, name)
    t0 = time.perf_counter()
    try:
        mono, dual, report = translate_stream(data, params, cancel, progress=sink)
    except Cancelled:
        _emit(err, ns.json, {"event": "cancelled", "file": name}, f"cancelled: {name}")
        return False
    except (PdfError, BadPageSpec, ServiceError, OSError, ValueError, RuntimeError) as exc:
        _emit(err, ns.json, {"event": "error", "file": name, "error": f"{type(exc).__name__}: {exc}"},
              f"error: {name}: {type(exc).__name__}: {exc}")
        return False
    elapsed = time.perf_counter() - t0
    summary = {
        "event": "done",
        "file": name,
        "pages": report["pages"],
        "sec_per_page": round(elapsed / max(report["pages"], 1), 4),
        "translator_calls": report["translator_calls"],
        "cache_hits": report["cache_hits"],
        "overflow": len(report["overflow"]),
        "placeholder_violations": len(report["placeholder_violations"]),
        "warnings": len(report["warnings"]),
    }
    if path == "-":
        sys.stdout.buffer.write(mono)
        sys.stdout.buffer.flush()
        summary["outputs"] = ["<stdout>"]
        target = err
    else:
        outdir = Path(cfg.get("output", "."))
        outdir.mkdir(parents=True, exist_ok=True)
        stem = Path(path).stem
        mono_path, dual_path = outdir / f"{stem}-mono.pdf", outdir / f"{stem}-dual.pdf"
        mono_path.write_bytes(mono)
        dual_path.write_bytes(dual)
        summary["outputs"] = [str(mono_path), str(dual_path)]
        target = out
    _emit(
        target,
        ns.json,
        summary,
        f"{name}: {summary['pages']} pages, {summary['sec_per_page']:.3f} s/page, "
        f"{summary['cache_hits']} cache hits, {summary['translator_calls']} calls, "
        f"{summary['warnings']} warnings -> {', '.join(summary['outputs'])}",
    )
    return True


def _cmd_translate(ns, out: TextIO, err: TextIO, cancel: CancellationToken) -> int:
    _load_plugins(ns.plugin)
    config_path = ns.config or os.environ.get("PDFTRANS_CONFIG")
    paths = [config_path] if config_path else [default_config_path()]
    try:
        cfg = load_config(paths, os.environ, _flags(ns), explicit_path=bool(config_path))
    except ConfigParseError as exc:
        raise UsageError(str(exc)) from exc
    if ns.print_config:
        out.write(cfg.dump())
        return EXIT_OK
    params = _params(cfg)
    if ns.files.count("-") > 1:
        raise UsageError("stdin can be read only once")
    ok = True
    for path in ns.files:
        if cancel.cancelled:
            _emit(err, ns.json, {"event": "cancelled", "file": path}, f"cancelled: {path}")
            ok = False
            continue
        ok = _translate_one(path, params, cfg, ns, out, err, cancel) and ok
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_services(ns, out: TextIO) -> int:
    _load_plugins(ns.plugin)
    for d in registry.descriptors():
        rec = {"name": d.name, "kind": d.kind, "required": list(d.required_config), "description": d.description}
        needs = f" (needs {', '.join(d.required_config)})" if d.required_config else ""
        _emit(out, ns.json, rec, f"{d.name:<12} {d.kind:<16} {d.description}{needs}")
    return EXIT_OK


def _cmd_languages(ns, out: TextIO) -> int:
    for lang in LANGUAGES:
        _emit(out, ns.json, {"code": lang.code, "name": lang.name, "script": lang.script},
              f"{lang.code:<6} {lang.name}")
    return EXIT_OK


def _cmd_bench(ns, out: TextIO) -> int:
    from .bench import run_benchmark

    res = run_benchmark(pages=ns.pages, runs=ns.runs, service=ns.service)
    verdict = "PASS" if res["within_budget"] else "FAIL"
    _emit(out, ns.json, res,
          f"{res['pages']} pages, median of {res['runs']} runs: {res['median_sec']:.3f} s "
          f"= {res['sec_per_page']:.3f} s/page (budget {res['budget_sec_per_page']}) {verdict}")
    return EXIT_OK if res["within_budget"] else EXIT_FAILED


def run_cli(
    argv: Sequence[str] | None = None,
    out: TextIO | None = None,
    err: TextIO | None = None,
    cancel: CancellationToken | None = None,
) -> int:
    """Run one command; ``cancel`` lets a caller (or a signal handler) stop translation."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
        if ns.command is None:
            parser.print_help(err)
            return EXIT_USAGE
        logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        if ns.command == "translate":
            return _cmd_translate(ns, out, err, cancel or CancellationToken())
        if ns.command == "services":
            return _cmd_services(ns, out)
        if ns.command == "languages":
            return _cmd_languages(ns, out)
        return _cmd_bench(ns, out)
    except UsageError as exc:
        as_json = getattr(locals().get("ns"), "json", False)
        _emit(err, bool(as_json), {"event": "usage-error", "error": str(exc)}, f"pdftrans: error: {exc}")
        return EXIT_USAGE
    except UnknownService as exc:
        err.write(f"pdftrans: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    cancel = CancellationToken()

    def on_interrupt(signum, frame) -> None:
        # the first Ctrl-C stops cleanly, a second one kills the process
        cancel.cancel()
        signal.signal(signal.SIGINT, signal.default_int_handler)

    signal.signal(signal.SIGINT, on_interrupt)
    sys.exit(run_cli(cancel=cancel))


if __name__ == "__main__":
    main()

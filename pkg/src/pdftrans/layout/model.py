"""ONNX object-detection backend for layout regions.

Expects a YOLO-style layout detector export: one image input (N,3,S,S) float32 in
[0,1], and an output either of shape (1,K,6) holding ``x1,y1,x2,y2,score,class``
rows in letterbox pixels, or the raw (1,4+C,K) YOLO head with ``cx,cy,w,h``
followed by per-class scores.
"""
from __future__ import annotations

import ast
import logging
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..model import BBox
from .types import DetectorConfig, LayoutBox, LayoutClass

logger = logging.getLogger(__name__)

# training order of the DocStructBench checkpoints
DOCSTRUCT_CLASSES = (
    LayoutClass.TITLE,
    LayoutClass.PLAIN_TEXT,
    LayoutClass.ABANDON,
    LayoutClass.FIGURE,
    LayoutClass.FIGURE_CAPTION,
    LayoutClass.TABLE,
    LayoutClass.TABLE_CAPTION,
    LayoutClass.TABLE_FOOTNOTE,
    LayoutClass.ISOLATE_FORMULA,
    LayoutClass.FORMULA_CAPTION,
)
_NAME_ALIASES = {"plain text": LayoutClass.PLAIN_TEXT}
PAD_VALUE = 114


class ModelLoadError(RuntimeError):
    pass


class InferenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Letterbox:
    """Mapping between page user space, page image pixels and model input."""

    media_box: BBox
    image_width: int
    image_height: int
    size: int

    @property
    def scale(self) -> float:
        return min(self.size / self.image_width, self.size / self.image_height)

    @property
    def resized(self) -> tuple[int, int]:
        return (round(self.image_width * self.scale), round(self.image_height * self.scale))

    @property
    def pad(self) -> tuple[float, float]:
        w, h = self.resized
        return ((self.size - w) / 2, (self.size - h) / 2)

    def user_to_input(self, x: float, y: float) -> tuple[float, float]:
        mb = self.media_box
        px = (x - mb.x0) / mb.width * self.image_width
        py = (mb.y1 - y) / mb.height * self.image_height
        padx, pady = self.pad
        return px * self.scale + padx, py * self.scale + pady

    def input_to_user(self, lx: float, ly: float) -> tuple[float, float]:
        mb = self.media_box
        padx, pady = self.pad
        px = (lx - padx) / self.scale
        py = (ly - pady) / self.scale
        return mb.x0 + px / self.image_width * mb.width, mb.y1 - py / self.image_height * mb.height

    def points_per_input_pixel(self) -> float:
        return max(self.media_box.width / self.image_width, self.media_box.height / self.image_height) / self.scale


def letterbox_image(image, size: int) -> np.ndarray:
    """Resize a PIL image into a padded square; returns float32 NCHW in [0,1]."""
    from PIL import Image

    image = image.convert("RGB")
    scale = min(size / image.width, size / image.height)
    w, h = round(image.width * scale), round(image.height * scale)
    canvas = Image.new("RGB", (size, size), (PAD_VALUE,) * 3)
    resized = image.resize((max(w, 1), max(h, 1)), Image.BILINEAR)
    canvas.paste(resized, (int((size - w) / 2), int((size - h) / 2)))
    arr = np.asarray(canvas, dtype=np.float32) / 255.0
    return arr.transpose(2, 0, 1)[None]


def nms(boxes: np.ndarray, scores: np.ndarray, iou_threshold: float) -> list[int]:
    """Greedy NMS over (K,4) xyxy boxes; returns kept indices by descending score."""
    order = sorted(range(len(scores)), key=lambda i: (-float(scores[i]), i))
    keep: list[int] = []
    for i in order:
        bi = boxes[i]
        suppressed = False
        for j in keep:
            bj = boxes[j]
            iw = min(bi[2], bj[2]) - max(bi[0], bj[0])
            ih = min(bi[3], bj[3]) - max(bi[1], bj[1])
            if iw <= 0 or ih <= 0:
                continue
            inter = iw * ih
            union = (bi[2] - bi[0]) * (bi[3] - bi[1]) + (bj[2] - bj[0]) * (bj[3] - bj[1]) - inter
            if union > 0 and inter / union > iou_threshold:
                suppressed = True
                break
        if not suppressed:
            keep.append(i)
    return keep


def decode_output(raw: np.ndarray, n_classes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalize a detector output into (xyxy boxes, scores, class ids)."""
    out = np.asarray(raw, dtype=np.float32)
    if out.ndim == 3 and out.shape[0] == 1:
        out = out[0]
    if out.ndim != 2:
        raise InferenceError(f"unexpected output shape {np.shape(raw)}")
    if out.shape[1] == 6:
        return out[:, :4], out[:, 4], out[:, 5].astype(np.int64)
    if out.shape[0] == 4 + n_classes:
        out = out.T
        cx, cy, w, h = out[:, 0], out[:, 1], out[:, 2], out[:, 3]
        cls_scores = out[:, 4:]
        cls = cls_scores.argmax(axis=1)
        scores = cls_scores[np.arange(len(cls)), cls]
        boxes = np.stack([cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2], axis=1)
        return boxes, scores, cls
    raise InferenceError(f"unexpected output shape {np.shape(raw)}")


def postprocess(
    raw: np.ndarray,
    geometry: Letterbox,
    cfg: DetectorConfig,
    classes: tuple[LayoutClass, ...] = DOCSTRUCT_CLASSES,
) -> list[LayoutBox]:
    boxes, scores, cls = decode_output(raw, len(classes))
    keep_mask = scores > cfg.confidence_threshold
    result: list[tuple[float, int, LayoutBox]] = []
    for c in sorted(set(int(v) for v in cls[keep_mask])):
        idx = np.nonzero(keep_mask & (cls == c))[0]
        if c < 0 or c >= len(classes):
            logger.warning("dropping %d detections of unknown class %d", len(idx), c)
            continue
        for k in nms(boxes[idx], scores[idx], cfg.nms_iou_threshold):
            i = int(idx[k])
            x0, y0, x1, y1 = (float(v) for v in boxes[i])
            ux0, uy1 = geometry.input_to_user(x0, y0)
            ux1, uy0 = geometry.input_to_user(x1, y1)
            mb = geometry.media_box
            ux0, ux1 = sorted((max(mb.x0, min(mb.x1, ux0)), max(mb.x0, min(mb.x1, ux1))))
            uy0, uy1 = sorted((max(mb.y0, min(mb.y1, uy0)), max(mb.y0, min(mb.y1, uy1))))
            score = float(min(max(scores[i], 0.0), 1.0))
            result.append((score, i, LayoutBox(classes[c], BBox(ux0, uy0, ux1, uy1), score)))
    result.sort(key=lambda t: (-t[0], t[1]))
    return [b for _, _, b in result]


def _default_session_factory(path: str):
    try:
        import onnxruntime as ort
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise ModelLoadError("onnxruntime is not installed") from exc
    try:
        return ort.InferenceSession(path, providers=["CPUExecutionProvider"])
    except Exception as exc:  # noqa: BLE001 - runtime raises assorted types
        raise ModelLoadError(f"cannot load layout model {path!r}: {exc}") from exc


def _classes_from_metadata(session) -> tuple[LayoutClass, ...]:
    try:
        meta = session.get_modelmeta().custom_metadata_map
        names = ast.literal_eval(meta["names"])
    except Exception:  # noqa: BLE001 - metadata is optional
        return DOCSTRUCT_CLASSES
    out = []
    for k in sorted(names):
        label = str(names[k]).strip().lower()
        cls = _NAME_ALIASES.get(label)
        if cls is None:
            try:
                cls = LayoutClass(label.replace(" ", "_"))
            except ValueError:
                return DOCSTRUCT_CLASSES
        out.append(cls)
    return tuple(out)


class OnnxLayoutDetector:
    """Runs one inference session; calls are serialized with a lock."""

    def __init__(self, cfg: DetectorConfig, session_factory: Callable[[str], object] | None = None) -> None:
        if not cfg.model_path:
            raise ModelLoadError("no layout model path configured")
        self.cfg = cfg
        self.session = (session_factory or _default_session_factory)(cfg.model_path)
        self.classes = _classes_from_metadata(self.session)
        self._lock = threading.Lock()
        try:
            self.input_name = self.session.get_inputs()[0].name
        except Exception as exc:  # noqa: BLE001
            raise ModelLoadError(f"model has no usable input: {exc}") from exc

    def detect(self, page_image, media_box: BBox) -> list[LayoutBox]:
        if page_image.width == 0 or page_image.height == 0:
            raise InferenceError("empty page image")
        size = self.cfg.input_size
        tensor = letterbox_image(page_image, size)
        geometry = Letterbox(media_box, page_image.width, page_image.height, size)
        with self._lock:
            try:
                outputs = self.session.run(None, {self.input_name: tensor})
            except Exception as exc:  # noqa: BLE001
                raise InferenceError(f"layout inference failed: {exc}") from exc
        return postprocess(outputs[0], geometry, self.cfg, self.classes)


def detect_layout_model(page_image, media_box: BBox, cfg: DetectorConfig) -> list[LayoutBox]:
    return OnnxLayoutDetector(cfg).detect(page_image, media_box)

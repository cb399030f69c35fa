"""Map and table file formats.

Maps travel as a deliberately small NPY subset (version 1.0 header,
C-order, little-endian float32 or uint8, exactly two dimensions) or as
binary PGM (P5, maxval 255). The NPY subset is the bridge format the
extractor writes; PGM exists so maps can be eyeballed with standard
image tools. Annotations, predictions, and patient metadata are CSV.
"""

import ast
import csv
import struct
from pathlib import Path

import numpy as np

from salbox.boxgen import BoundingBox
from salbox.errors import DataError, MapFormatError
from salbox.evaluate import GroundTruthRecord, PredictionRecord
from salbox.maps import as_map
from salbox.sampling import MetadataRecord

_NPY_MAGIC = b"\x93NUMPY"
_NPY_DTYPES = {"<f4": np.dtype("<f4"), "|u1": np.dtype("u1")}

ANNOTATION_COLUMNS = ["image_id", "label", "x", "y", "w", "h", "img_w", "img_h"]
PREDICTION_COLUMNS = ["image_id", "label", "x1", "y1", "x2", "y2", "map_w", "map_h"]
METADATA_COLUMNS = ["image_id", "patient_id", "labels"]


def load_map(path) -> np.ndarray:
    """Read a 2-D map file (NPY subset or PGM P5) as float64.

    The format is sniffed from the leading bytes, not the extension.
    """
    path = Path(path)
    with open(path, "rb") as f:
        lead = f.read(2)
        f.seek(0)
        if lead == _NPY_MAGIC[:2]:
            return _load_npy(f, path)
        if lead == b"P5":
            return _load_pgm(f, path)
    raise MapFormatError(f"{path}: unrecognized map format (expected NPY or PGM P5)")


def save_map(values, path) -> None:
    """Write a map as float32 NPY or PGM P5, chosen by file extension.

    NPY is lossless for float32 data. PGM quantizes: values are expected
    in [0, 255] and are rounded to uint8.
    """
    path = Path(path)
    arr = as_map(values)
    suffix = path.suffix.lower()
    if suffix == ".npy":
        _save_npy(arr, path)
    elif suffix == ".pgm":
        _save_pgm(arr, path)
    else:
        raise MapFormatError(
            f"{path}: unsupported map extension {suffix!r} (use .npy or .pgm)"
        )


def _load_npy(f, path) -> np.ndarray:
    magic = f.read(6)
    if magic != _NPY_MAGIC:
        raise MapFormatError(f"{path}: bad NPY magic {magic!r}")
    version = f.read(2)
    if version != b"\x01\x00":
        raise MapFormatError(
            f"{path}: unsupported NPY version {version!r}, only 1.0 is supported"
        )
    raw_len = f.read(2)
    if len(raw_len) != 2:
        raise MapFormatError(f"{path}: truncated NPY header")
    (header_len,) = struct.unpack("<H", raw_len)
    header = f.read(header_len)
    if len(header) != header_len:
        raise MapFormatError(f"{path}: truncated NPY header")
    try:
        meta = ast.literal_eval(header.decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise MapFormatError(f"{path}: malformed NPY header ({exc})") from exc
    if not isinstance(meta, dict) or not {"descr", "fortran_order", "shape"} <= set(meta):
        raise MapFormatError(f"{path}: NPY header missing required fields")

    descr = meta["descr"]
    if descr not in _NPY_DTYPES:
        raise MapFormatError(
            f"{path}: unsupported dtype {descr!r} "
            "(only little-endian float32 '<f4' and uint8 '|u1' are supported)"
        )
    if meta["fortran_order"]:
        raise MapFormatError(f"{path}: Fortran-order arrays are not supported")
    shape = meta["shape"]
    if not (isinstance(shape, tuple) and len(shape) == 2):
        dims = len(shape) if isinstance(shape, tuple) else "?"
        raise MapFormatError(f"{path}: map must have exactly 2 dimensions, got {dims}")
    h, w = shape
    if not (isinstance(h, int) and isinstance(w, int) and h >= 1 and w >= 1):
        raise MapFormatError(f"{path}: invalid shape {shape}")

    dtype = _NPY_DTYPES[descr]
    expected = h * w * dtype.itemsize
    payload = f.read(expected + 1)
    if len(payload) != expected:
        raise MapFormatError(
            f"{path}: payload size mismatch (expected {expected} bytes, "
            f"got {min(len(payload), expected + 1)})"
        )
    arr = np.frombuffer(payload, dtype=dtype).reshape(h, w)
    return arr.astype(np.float64)


def _save_npy(arr: np.ndarray, path) -> None:
    h, w = arr.shape
    header = "{'descr': '<f4', 'fortran_order': False, 'shape': (%d, %d), }" % (h, w)
    base = len(_NPY_MAGIC) + 2 + 2 + len(header) + 1
    header = header + " " * ((-base) % 64) + "\n"
    with open(path, "wb") as f:
        f.write(_NPY_MAGIC)
        f.write(b"\x01\x00")
        f.write(struct.pack("<H", len(header)))
        f.write(header.encode("latin1"))
        f.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def _load_pgm(f, path) -> np.ndarray:
    def next_token() -> bytes:
        tok = b""
        while True:
            ch = f.read(1)
            if ch == b"":
                raise MapFormatError(f"{path}: truncated PGM header")
            if ch == b"#":  # comment runs to end of line
                while ch not in (b"\n", b""):
                    ch = f.read(1)
                continue
            if ch.isspace():
                if tok:
                    return tok
                continue
            tok += ch

    if next_token() != b"P5":
        raise MapFormatError(f"{path}: not a binary PGM (P5) file")
    try:
        w = int(next_token())
        h = int(next_token())
        maxval = int(next_token())
    except ValueError as exc:
        raise MapFormatError(f"{path}: malformed PGM header ({exc})") from exc
    if w < 1 or h < 1:
        raise MapFormatError(f"{path}: invalid PGM dimensions {w}x{h}")
    if maxval != 255:
        raise MapFormatError(f"{path}: unsupported PGM maxval {maxval}, only 255")
    payload = f.read(w * h + 1)
    if len(payload) != w * h:
        raise MapFormatError(
            f"{path}: payload size mismatch (expected {w * h} bytes, "
            f"got {min(len(payload), w * h + 1)})"
        )
    return np.frombuffer(payload, dtype=np.uint8).reshape(h, w).astype(np.float64)


def _save_pgm(arr: np.ndarray, path) -> None:
    if arr.min() < 0 or arr.max() > 255:
        raise MapFormatError(
            f"{path}: PGM requires values in [0, 255]; scale the map first"
        )
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(np.round(arr).astype(np.uint8).tobytes())


def _read_csv_rows(path, columns) -> list[dict]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty CSV, expected header {','.join(columns)}")
        if list(reader.fieldnames) != columns:
            raise DataError(
                f"{path}: unexpected header {','.join(reader.fieldnames)}; "
                f"expected {','.join(columns)}"
            )
        return list(reader)


def _row_int(path, row_num, row, field) -> int:
    try:
        return int(row[field])
    except (TypeError, ValueError):
        raise DataError(
            f"{path}: row {row_num}: field {field!r} must be an integer, "
            f"got {row.get(field)!r}"
        ) from None


def read_annotations(path) -> list[GroundTruthRecord]:
    """Load ground-truth boxes from CSV (x,y = top-left corner; w,h = extent)."""
    records = []
    for i, row in enumerate(_read_csv_rows(path, ANNOTATION_COLUMNS), start=2):
        x = _row_int(path, i, row, "x")
        y = _row_int(path, i, row, "y")
        w = _row_int(path, i, row, "w")
        h = _row_int(path, i, row, "h")
        img_w = _row_int(path, i, row, "img_w")
        img_h = _row_int(path, i, row, "img_h")
        if w <= 0 or h <= 0:
            raise DataError(f"{path}: row {i}: box extent must be positive, got {w}x{h}")
        if x < 0 or y < 0 or x + w > img_w or y + h > img_h:
            raise DataError(
                f"{path}: row {i}: box ({x},{y},{w},{h}) exceeds image {img_w}x{img_h}"
            )
        try:
            records.append(
                GroundTruthRecord(
                    image_id=row["image_id"],
                    label=row["label"],
                    box=BoundingBox(x, y, x + w, y + h),
                    image_w=img_w,
                    image_h=img_h,
                )
            )
        except ValueError as exc:
            raise DataError(f"{path}: row {i}: {exc}") from exc
    return records


def read_predictions(path) -> list[PredictionRecord]:
    """Load generated boxes from CSV (x1,y1 inclusive; x2,y2 exclusive)."""
    records = []
    for i, row in enumerate(_read_csv_rows(path, PREDICTION_COLUMNS), start=2):
        values = {f: _row_int(path, i, row, f) for f in PREDICTION_COLUMNS[2:]}
        try:
            records.append(
                PredictionRecord(
                    image_id=row["image_id"],
                    label=row["label"],
                    box=BoundingBox(
                        values["x1"], values["y1"], values["x2"], values["y2"]
                    ),
                    map_w=values["map_w"],
                    map_h=values["map_h"],
                )
            )
        except ValueError as exc:
            raise DataError(f"{path}: row {i}: {exc}") from exc
    return records


def write_predictions(records: list[PredictionRecord], path) -> None:
    """Write predictions sorted by (image_id, label) so output is reproducible."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(PREDICTION_COLUMNS)
        for rec in sorted(records, key=lambda r: (r.image_id, r.label)):
            writer.writerow(
                [rec.image_id, rec.label, *rec.box.as_tuple(), rec.map_w, rec.map_h]
            )


def read_metadata(path) -> list[MetadataRecord]:
    """Load patient metadata from CSV; the labels column is '|'-separated."""
    records = []
    seen = set()
    for i, row in enumerate(_read_csv_rows(path, METADATA_COLUMNS), start=2):
        image_id = row["image_id"]
        if image_id in seen:
            raise DataError(f"{path}: row {i}: duplicate image_id {image_id!r}")
        seen.add(image_id)
        labels = frozenset(s for s in (row["labels"] or "").split("|") if s)
        records.append(
            MetadataRecord(image_id=image_id, patient_id=row["patient_id"], labels=labels)
        )
    return records

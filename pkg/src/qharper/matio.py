"""File formats: the QHRP binary matrix dump, deterministic CSV, manifests.

Binary layout: 16-byte header — magic b"QHRP", little-endian u32 dimension N,
u32 flags, u32 reserved (zero) — followed by N*N (real, imag) float64 pairs,
little-endian, row-major. Floats in CSV are printed with 17 significant
digits so identical runs emit byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"QHRP"
HEADER = struct.Struct("<4sIII")
MAX_DIM = 1 << 20

FLAG_HERMITIAN = 0x1
FLAG_UNITARY = 0x2


class MatrixFormatError(ValueError):
    pass


def write_matrix(path, m: np.ndarray, flags: int = 0) -> None:
    m = np.ascontiguousarray(m, dtype=complex)
    n = m.shape[0]
    if m.shape != (n, n):
        raise MatrixFormatError(f"expected a square matrix, got shape {m.shape}")
    if n > MAX_DIM:
        raise MatrixFormatError(f"dimension {n} exceeds format limit {MAX_DIM}")
    interleaved = np.empty((n, n, 2), dtype="<f8")
    interleaved[..., 0] = m.real
    interleaved[..., 1] = m.imag
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, n, flags, 0))
        fh.write(interleaved.tobytes())


def read_matrix(path) -> tuple[np.ndarray, int]:
    """Read a QHRP dump; returns (matrix, flags). Bit-exact round-trip."""
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise MatrixFormatError(f"{path}: truncated header")
    magic, n, flags, _ = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise MatrixFormatError(f"{path}: bad magic {magic!r}")
    if n > MAX_DIM:
        raise MatrixFormatError(f"{path}: dimension {n} exceeds format limit")
    expected = HEADER.size + 16 * n * n
    if len(raw) != expected:
        raise MatrixFormatError(
            f"{path}: expected {expected} bytes for N={n}, found {len(raw)}"
        )
    data = np.frombuffer(raw, dtype="<f8", offset=HEADER.size).reshape(n, n, 2)
    return (data[..., 0] + 1j * data[..., 1]).astype(complex), flags


def fmt(x) -> str:
    """Fixed 17-significant-digit float formatting (round-trip exact)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_heatmap_png(path, values: np.ndarray, vmax: float | None = None) -> None:
    """8-bit grayscale dump of a nonnegative array, linear up to vmax."""
    from PIL import Image

    v = np.asarray(values, dtype=float)
    top = vmax if vmax is not None else (v.max() or 1.0)
    img = np.round(255.0 * np.clip(v / top, 0.0, 1.0)).astype(np.uint8)
    Image.fromarray(img, mode="L").save(path)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


@dataclass
class Manifest:
    """Run record: config echo, versions, outputs with content hashes."""

    command: str
    config: dict
    seed: int
    root: Path | None = None
    warnings: list[str] = field(default_factory=list)
    outputs: list[dict] = field(default_factory=list)
    started: float = field(default_factory=time.monotonic)

    def add(self, path) -> Path:
        path = Path(path)
        rel = path.relative_to(self.root).as_posix() if self.root else path.name
        self.outputs.append({"path": rel, "sha256": sha256_file(path)})
        return path

    def write(self, path) -> None:
        import scipy

        from . import __version__

        doc = {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "versions": {
                "qharper": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
            },
            "wall_time_s": round(time.monotonic() - self.started, 3),
            "warnings": self.warnings,
            "outputs": self.outputs,
        }
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

#!/usr/bin/env python3
"""Regenerates the files in data/.

predictor.json is fitted by `wavelut predictor` on synthetic pairs: smooth
random frames and their darkened copies (gain * x ** gamma with gamma drawn
from [1.6, 2.6] and gain from [0.3, 0.7]).

embeddings.bin holds deterministic stand-ins for CLIP vectors: unit text
vectors for "high light image" and "clean image" and image vectors for
"reference" and "enhanced" mixed from them with noise.
"""

import argparse
import json
import pathlib
import struct
import subprocess
import tempfile

import numpy as np
from PIL import Image


def natural_frame(rng, h, w):
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    lum = np.full((h, w), 0.2 + 0.5 * rng.random())
    for _ in range(4):
        fy, fx = rng.random() * 4.0 / h, rng.random() * 4.0 / w
        lum += (0.1 + 0.2 * rng.random()) * np.sin(2 * np.pi * (fy * y + fx * x) + 2 * np.pi * rng.random())
    tint = 0.8 + 0.4 * rng.random(3)
    f = lum[..., None] * tint + rng.normal(0.0, 0.02, (h, w, 3))
    return np.clip(f, 0.0, 1.0)


def save_png(path, f):
    Image.fromarray(np.round(f * 255.0).astype(np.uint8), "RGB").save(path)


def write_embeddings(path, vectors):
    out = bytearray()
    for name, source, values in vectors:
        header = json.dumps({"name": name, "length": len(values), "source": source}).encode()
        out += struct.pack("<I", len(header)) + header
        out += np.asarray(values, dtype="<f4").tobytes()
    path.write_bytes(bytes(out))


def unit(v):
    return v / np.linalg.norm(v)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--cli", required=True, help="path to the wavelut binary")
    p.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    p.add_argument("--pairs", type=int, default=32)
    p.add_argument("--size", type=int, default=96)
    args = p.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(2024)

    with tempfile.TemporaryDirectory() as tmp:
        dark, clean = pathlib.Path(tmp, "dark"), pathlib.Path(tmp, "clean")
        dark.mkdir()
        clean.mkdir()
        for i in range(args.pairs):
            f = natural_frame(rng, args.size, args.size)
            gamma, gain = rng.uniform(1.6, 2.6), rng.uniform(0.3, 0.7)
            save_png(clean / f"frame_{i:04d}.png", f)
            save_png(dark / f"frame_{i:04d}.png", gain * f**gamma)
        subprocess.run([args.cli, "predictor", "-i", str(dark), "-r", str(clean), "-o", str(out / "predictor.json")],
                       check=True)

    t1, t2 = unit(rng.normal(size=512)), unit(rng.normal(size=512))
    ref = unit(0.30 * t1 + 0.25 * t2 + 0.04 * rng.normal(size=512))
    enh = unit(0.22 * t1 + 0.28 * t2 + 0.04 * rng.normal(size=512))
    write_embeddings(out / "embeddings.bin", [("high light image", "text", t1), ("clean image", "text", t2),
                                              ("reference", "image", ref), ("enhanced", "image", enh)])


if __name__ == "__main__":
    main()

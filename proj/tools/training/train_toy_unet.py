#!/usr/bin/env python3
"""Train the toy blob-segmentation Unet and export it for the C++ engine.

Writes <out>/toy_unet.json (architecture document) and <out>/toy_unet.iodw
(weights), plus a reference forward pass used by the engine parity test.

The slice generator mirrors iodeep::synthetic::generate_blobs in
distribution (blob count, size, amplitude, spacing, noise, 12-bit
quantization); it does not reproduce the C++ random stream.
"""

import argparse
import json
import struct
import zlib
from pathlib import Path

import numpy as np
import torch
from torch import nn

ROWS = COLS = 64
BITS_STORED = 12


def generate_blobs(rng, rows=ROWS, cols=COLS, min_blobs=1, max_blobs=3, min_sigma=3.0, max_sigma=5.0,
                   min_amp=0.6, max_amp=1.0, min_sep=20.0, margin=10.0, noise=0.02):
    wanted = rng.integers(min_blobs, max_blobs + 1)
    blobs = []
    for _ in range(1000):
        if len(blobs) >= wanted:
            break
        b = (rng.uniform(margin, cols - 1 - margin), rng.uniform(margin, rows - 1 - margin),
             rng.uniform(min_sigma, max_sigma), rng.uniform(min_amp, max_amp))
        if all(np.hypot(b[0] - o[0], b[1] - o[1]) >= min_sep for o in blobs):
            blobs.append(b)
    yy, xx = np.mgrid[0:rows, 0:cols].astype(np.float64)
    image = rng.normal(0.0, noise, size=(rows, cols)) if noise > 0 else np.zeros((rows, cols))
    truth = np.zeros((rows, cols), dtype=bool)
    for cx, cy, sigma, amp in blobs:
        profile = np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * sigma * sigma))
        image += amp * profile
        truth |= profile >= 0.5
    image = np.clip(image, 0.0, 1.0)
    max_value = (1 << BITS_STORED) - 1
    stored = np.rint(image * max_value)
    # What the engine's decoder produces from the stored samples.
    return (stored / max_value).astype(np.float32), truth.astype(np.float32)


def batch(rng, n):
    xs, ys = zip(*(generate_blobs(rng) for _ in range(n)))
    return torch.from_numpy(np.stack(xs)[:, None]), torch.from_numpy(np.stack(ys)[:, None])


ARCHITECTURE = {
    "name": "toy_unet",
    "description": "Two-level Unet segmenting Gaussian blobs on 64x64 MONOCHROME2 slices",
    "input_shape": [1, ROWS, COLS],
    "architecture": [
        {"id": "enc1", "type": "conv2d", "kernel": 3, "stride": 1, "padding": "same", "out_channels": 8},
        {"id": "enc1_act", "type": "relu"},
        {"id": "enc2", "type": "conv2d", "kernel": 3, "stride": 1, "padding": "same", "out_channels": 8},
        {"id": "enc2_act", "type": "relu"},
        {"id": "down", "type": "max_pool2d", "kernel": 2, "stride": 2},
        {"id": "mid1", "type": "conv2d", "kernel": 3, "stride": 1, "padding": "same", "out_channels": 16},
        {"id": "mid1_act", "type": "relu"},
        {"id": "mid2", "type": "conv2d", "kernel": 3, "stride": 1, "padding": "same", "out_channels": 16},
        {"id": "mid2_act", "type": "relu"},
        {"id": "up", "type": "upsample_nearest", "scale": 2},
        {"id": "merge", "type": "concat"},
        {"id": "dec1", "type": "conv2d", "kernel": 3, "stride": 1, "padding": "same", "out_channels": 8},
        {"id": "dec1_act", "type": "relu"},
        {"id": "head", "type": "conv2d", "kernel": 1, "stride": 1, "padding": "same", "out_channels": 1},
        {"id": "prob", "type": "sigmoid"},
    ],
    "skip_connections": [{"from": "enc2_act", "to": "merge"}],
}


class ToyUnet(nn.Module):
    def __init__(self):
        super().__init__()
        self.enc1 = nn.Conv2d(1, 8, 3, padding=1)
        self.enc2 = nn.Conv2d(8, 8, 3, padding=1)
        self.mid1 = nn.Conv2d(8, 16, 3, padding=1)
        self.mid2 = nn.Conv2d(16, 16, 3, padding=1)
        self.dec1 = nn.Conv2d(24, 8, 3, padding=1)
        self.head = nn.Conv2d(8, 1, 1)

    def forward(self, x):
        skip = torch.relu(self.enc2(torch.relu(self.enc1(x))))
        y = nn.functional.max_pool2d(skip, 2)
        y = torch.relu(self.mid2(torch.relu(self.mid1(y))))
        y = nn.functional.interpolate(y, scale_factor=2, mode="nearest")
        y = torch.cat([y, skip], dim=1)
        y = torch.relu(self.dec1(y))
        return torch.sigmoid(self.head(y))


def dice(pred, truth):
    inter = (pred * truth).sum()
    total = pred.sum() + truth.sum()
    return 1.0 if total == 0 else float(2 * inter / total)


def write_iodw(path, tensors):
    out = bytearray(b"IODW")
    out += struct.pack("<II", 1, len(tensors))
    for name in sorted(tensors):
        array = np.ascontiguousarray(tensors[name], dtype="<f4")
        encoded = name.encode()
        out += struct.pack("<I", len(encoded)) + encoded
        out += struct.pack("<I", array.ndim) + struct.pack(f"<{array.ndim}I", *array.shape)
        out += array.tobytes()
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    Path(path).write_bytes(bytes(out))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("assets/networks"))
    parser.add_argument("--fixture", type=Path, default=Path("tests/data/toy_unet_reference.json"))
    parser.add_argument("--steps", type=int, default=2500)
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    torch.manual_seed(args.seed)
    torch.set_num_threads(max(torch.get_num_threads(), 1))
    rng = np.random.default_rng(args.seed)
    model = ToyUnet()
    optimizer = torch.optim.Adam(model.parameters(), lr=3e-3)
    schedule = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, args.steps)
    bce = nn.BCELoss()
    for step in range(args.steps):
        x, y = batch(rng, args.batch)
        pred = model(x)
        soft_dice = 1 - (2 * (pred * y).sum() + 1) / (pred.sum() + y.sum() + 1)
        loss = bce(pred, y) + soft_dice
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        schedule.step()
        if step % 250 == 0 or step == args.steps - 1:
            print(f"step {step:5d} loss {loss.item():.4f}", flush=True)

    model.eval()
    eval_rng = np.random.default_rng(args.seed + 1000)
    scores = []
    with torch.no_grad():
        for _ in range(200):
            x, y = batch(eval_rng, 1)
            scores.append(dice((model(x) >= 0.5).float(), y))
    print(f"held-out mean Dice {np.mean(scores):.4f} (min {np.min(scores):.4f})")

    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "toy_unet.json").write_text(json.dumps(ARCHITECTURE, indent=2) + "\n")
    tensors = {name: p.detach().numpy() for name, p in model.state_dict().items()}
    write_iodw(args.out / "toy_unet.iodw", tensors)

    # Reference forward pass for the engine parity test.
    ref_rng = np.random.default_rng(12345)
    image, _ = generate_blobs(ref_rng)
    with torch.no_grad():
        output = model(torch.from_numpy(image)[None, None])[0, 0].numpy()
    args.fixture.parent.mkdir(parents=True, exist_ok=True)
    args.fixture.write_text(json.dumps({
        "shape": [1, ROWS, COLS],
        "input": [round(float(v), 8) for v in image.ravel()],
        "output": [round(float(v), 8) for v in output.ravel()],
    }) + "\n")


if __name__ == "__main__":
    main()

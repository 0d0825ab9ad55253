import numpy as np
import pytest

from lanekeep.camera.pngio import save_gray_png
from lanekeep.dataset.manifest import Dataset, Sample, save_manifest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_synthetic_dataset(tmp_path, swas, expedition_ids, speed=16.0, seed=0):
    """Dataset of small random-texture frames with the given swa labels."""
    gen = np.random.default_rng(seed)
    frames_dir = tmp_path / "frames"
    samples = []
    for i, (swa, exp) in enumerate(zip(swas, expedition_ids)):
        frame = gen.integers(0, 256, size=(240, 320), dtype=np.uint8)
        path = frames_dir / exp / f"{i:06d}.png"
        save_gray_png(frame, path)
        samples.append(
            Sample(frame_path=path, swa=float(swa), speed=speed, timestamp=i * 0.05, expedition_id=exp)
        )
    d = Dataset(samples=tuple(samples))
    return save_manifest(d, tmp_path / "manifest.csv")

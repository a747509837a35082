import math

import numpy as np
import pytest

import retina_codec as rc


def random_image(n, seed):
    return np.random.default_rng(seed).uniform(0, 255, size=(n, n))


@pytest.fixture(scope="module")
def stream():
    return rc.encode(random_image(32, 1), seed=3)


def test_schedule():
    assert rc.schedule_us(9) == [10000, 12908, 15952, 19145, 22504, 26045, 29791, 33766, 38000]


def test_spike_times():
    tau = 1.5e-10 / 2e-9
    isi = -tau * math.log(1 - 2e-3 * 2e-9 / 8e-12)
    spikes = rc.spike_times(8e-12, 0.16)
    assert len(spikes) == 3
    assert all(abs(t - (i + 1) * isi) <= 1e-5 for i, t in enumerate(spikes))
    assert rc.spike_times(3e-12, 1.0) == []


def test_round_trip(stream):
    dec = rc.Decoder(stream)
    assert dec.size == 32
    assert not dec.dithered
    assert dec.events > 0
    early, late = dec.image(20), dec.image(80)
    assert early.shape == (32, 32)
    ref = random_image(32, 1)
    assert np.sum((late - ref) ** 2) <= np.sum((early - ref) ** 2)
    assert dec.bpp(20) <= dec.bpp(50) <= dec.bpp(80)
    c40, c60 = np.array(dec.counts(40)), np.array(dec.counts(60))
    assert np.all(c40 <= c60)
    assert np.all(dec.image(5) == 0)


def test_deterministic_and_dither(stream):
    assert rc.encode(random_image(32, 1), seed=3, threads=1) == stream
    noisy = rc.encode(random_image(32, 1), dither=True, seed=3)
    assert noisy != stream
    assert rc.Decoder(noisy).dithered


def test_truncation(stream):
    dec = rc.Decoder(stream)
    cut = rc.Decoder(rc.truncate(stream, dec.events // 2))
    assert cut.events == dec.events // 2


def test_metrics_match_scikit_image():
    metrics = pytest.importorskip("skimage.metrics")
    a = np.round(random_image(48, 5))
    b = np.clip(a + np.random.default_rng(6).normal(0, 12, a.shape), 0, 255).round()
    ssim = metrics.structural_similarity(
        a, b, data_range=255, gaussian_weights=True, sigma=1.5, use_sample_covariance=False
    )
    assert rc.mean_ssim(a, b) == pytest.approx(ssim, abs=1e-6)
    assert rc.psnr(a, b) == pytest.approx(metrics.peak_signal_noise_ratio(a, b, data_range=255), abs=1e-9)


def test_errors(tmp_path):
    with pytest.raises(rc.FormatError):
        rc.Decoder(b"not a stream at all")
    with pytest.raises(rc.ConfigError):
        rc.encode(np.zeros((24, 24)))
    with pytest.raises(rc.IoError):
        rc.read_pgm(str(tmp_path / "missing.pgm"))
    with pytest.raises(rc.ConfigError):
        rc.encode(random_image(16, 2), dither=True, t_star_ms=20)
    assert issubclass(rc.FormatError, rc.CodecError)


def test_pgm_io(tmp_path):
    img = np.arange(64, dtype=float).reshape(8, 8) * 3
    rc.write_pgm(str(tmp_path / "a.pgm"), img)
    assert np.array_equal(rc.read_pgm(str(tmp_path / "a.pgm")), img)

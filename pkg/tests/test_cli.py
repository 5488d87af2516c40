import json

import numpy as np
import pytest

from vc3 import DEFAULT_LAYOUT, compress
from vc3.cli import main
from vc3.stream import read_csv, read_stream, write_csv, write_f32, write_stream


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compress_decompress_round_trip_binary(tmp_path, capsys):
    v = np.random.default_rng(5).uniform(-1, 1, (100, 3)).astype(np.float32)
    raw = tmp_path / "in.f32"
    packed = tmp_path / "out.vc3"
    restored = tmp_path / "back.f32"
    write_f32(raw, v)
    code, _, err = run(capsys, "compress", "--input", str(raw),
                       "--output", str(packed), "--layout", "0,7,22-17-18")
    assert code == 0 and "compressed 100 vectors" in err
    assert packed.stat().st_size == 20 + 8 * 100
    code, _, _ = run(capsys, "decompress", "--input", str(packed),
                     "--output", str(restored))
    assert code == 0
    assert restored.stat().st_size == 1200
    back = np.fromfile(restored, dtype="<f4").reshape(-1, 3)
    nv = np.linalg.norm(v.astype(np.float64), axis=1)
    err_ = np.linalg.norm(back.astype(np.float64) - v.astype(np.float64), axis=1)
    assert (err_ <= 3e-4 * nv + 1e-12).all()


def test_single_zero_triplet_file_size(tmp_path, capsys):
    raw = tmp_path / "z.f32"
    write_f32(raw, np.zeros((1, 3), np.float32))
    out = tmp_path / "z.vc3"
    code, _, _ = run(capsys, "compress", "--input", str(raw), "--output", str(out))
    assert code == 0
    assert out.stat().st_size == 28  # 20-byte header + one word


def test_csv_round_trip(tmp_path, capsys):
    v = np.random.default_rng(6).uniform(-1, 1, (100, 3)).astype(np.float32)
    csv_in = tmp_path / "in.csv"
    write_csv(csv_in, v)
    packed = tmp_path / "out.vc3"
    code, _, _ = run(capsys, "compress", "--input", str(csv_in),
                     "--output", str(packed), "--input-format", "csv")
    assert code == 0
    csv_out = tmp_path / "back.csv"
    code, _, _ = run(capsys, "decompress", "--input", str(packed),
                     "--output", str(csv_out), "--output-format", "csv")
    assert code == 0
    back = read_csv(csv_out)
    assert back.shape == (100, 3)
    rel = np.linalg.norm(back - v, axis=1) / np.linalg.norm(v, axis=1)
    assert rel.max() <= 3e-4


def test_layout_flag_parses_notation(tmp_path, capsys):
    raw = tmp_path / "r.f32"
    write_f32(raw, np.eye(3, dtype=np.float32))
    out = tmp_path / "r.vc3"
    code, _, _ = run(capsys, "compress", "--input", str(raw),
                     "--output", str(out), "--layout", "0,8,23-16-17")
    assert code == 0
    _, layout = read_stream(out)
    assert (layout.exponent_bits, layout.phi_bits, layout.theta_bits) == (8, 16, 17)
    assert layout.exponent_bias == 127


def test_corrupted_magic_is_data_error(tmp_path, capsys):
    packed = tmp_path / "bad.vc3"
    write_stream(packed, compress(np.eye(3, dtype=np.float32)), DEFAULT_LAYOUT)
    data = bytearray(packed.read_bytes())
    data[:4] = b"XXXX"
    packed.write_bytes(bytes(data))
    code, _, err = run(capsys, "decompress", "--input", str(packed),
                       "--output", str(tmp_path / "x.f32"))
    assert code == 2
    assert "magic" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--domain"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1


def test_bad_domain_is_data_error(capsys):
    code, _, err = run(capsys, "analyze", "--domain", "torus", "--samples", "10")
    assert code == 2 and "unknown domain" in err


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", "--samples", "20000", "--seed", "1",
                       "--domain", "sphere", "--json", "--normalised")
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 20000
    assert doc["layout"] == "<0,7,22>-17-18"
    assert 5e-6 < doc["mean"] < 1.2e-5


def test_misses_json(capsys):
    code, out, _ = run(capsys, "misses", "--samples", "50000", "--seed", "42", "--json")
    assert code == 0
    doc = json.loads(out)
    assert 0 <= doc["misses_theta"] < 0.01
    assert 0 <= doc["misses_phi"] < 0.01


def test_anisotropy_csv(capsys):
    code, out, _ = run(capsys, "anisotropy", "--samples", "30000", "--grid", "8x4")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "theta_cell,phi_cell,mean_error"
    assert len(lines) == 1 + 8 * 4
    i, j, m = lines[1].split(",")
    assert 0 <= int(i) < 8 and 0 <= int(j) < 4 and float(m) > 0


def test_sweep_text(capsys):
    code, out, _ = run(capsys, "sweep", "--bits", "35",
                       "--splits", "131072,196608", "--samples", "20000")
    assert code == 0
    assert out.count("n_phi_max+1") == 2


def test_compand_json(capsys):
    code, out, _ = run(capsys, "compand", "--kind", "cosine", "--samples", "30000",
                       "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["mean"] > doc["uniform_mean"]


def test_idempotence_json(capsys):
    code, out, _ = run(capsys, "idempotence", "--samples", "1000", "--seed", "3",
                       "--policy", "theta=D,phi=D,quant=D", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["word_miss_fraction"] == 0.0


def test_bench_csv_output(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "4096,8192", "--repeats", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,time_raw_ns,time_comp_ns,speedup,bytes_ratio"
    assert len(lines) == 3
    assert all(line.endswith(",1.5") for line in lines[1:])

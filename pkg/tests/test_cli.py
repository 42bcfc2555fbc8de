import numpy as np
import pytest

from morphoseg import FilterParams, io
from morphoseg.cli import main
from morphoseg.groundtruth import PolylineSet, make_edge_gt, make_label_gt, save_polylines
from morphoseg.watershed import segment


@pytest.fixture
def sheet(tmp_path):
    rect = ((3, 3), (20, 3), (20, 20), (3, 20), (3, 3))
    ps = PolylineSet((rect,), 24, 24)
    edges = make_edge_gt(ps)
    gt = make_label_gt(edges)
    epm = np.where(edges == 1, 200, 2).astype(np.uint8)
    epm_path = tmp_path / "epm.pgm"
    gt_path = tmp_path / "gt.slab"
    io.write_graymap(epm, epm_path)
    io.write_labelmap(gt, gt_path)
    ann_path = tmp_path / "ann.txt"
    save_polylines(ps, ann_path)
    return tmp_path, epm, gt, str(epm_path), str(gt_path), str(ann_path)


def test_filter_subcommand(sheet):
    tmp, epm, _, epm_path, _, _ = sheet
    rc = main(["filter", epm_path, "--h", "2", "--lambda", "10",
               "--out", str(tmp) + "/f_"])
    assert rc == 0
    out = io.read_graymap(tmp / "f_filtered.pgm")
    assert (out >= epm).all()


def test_watershed_subcommand(sheet, capsys):
    tmp, epm, _, epm_path, _, _ = sheet
    rc = main(["watershed", epm_path, "--h", "1", "--lambda", "4",
               "--out", str(tmp) + "/ws_"])
    assert rc == 0
    assert "regions:" in capsys.readouterr().out
    labels = io.read_labelmap(tmp / "ws_labels.slab")
    ref = segment(epm, FilterParams(1, 4))
    assert np.array_equal(labels, ref.labels)


def test_baseline_subcommand(sheet):
    tmp, _, _, epm_path, _, _ = sheet
    rc = main(["baseline", epm_path, "--threshold", "9", "--out", str(tmp) + "/cc_"])
    assert rc == 0
    labels = io.read_labelmap(tmp / "cc_labels.slab")
    assert labels.max() == 2  # inside and outside of the rectangle


def test_rasterize_gt_subcommand(sheet):
    tmp, _, gt, _, _, ann_path = sheet
    rc = main(["rasterize-gt", ann_path, "--width", "24", "--height", "24",
               "--out", str(tmp) + "/gt_"])
    assert rc == 0
    assert np.array_equal(io.read_labelmap(tmp / "gt_labels.slab"), gt)
    edges = io.read_binary_mask(tmp / "gt_edges.pgm")
    strokes = io.read_binary_mask(tmp / "gt_strokes.pgm")
    assert (edges >= strokes).all()


def test_calibrate_subcommand(sheet, capsys):
    tmp, _, _, epm_path, gt_path, _ = sheet
    rc = main(["calibrate", "--epm", epm_path, "--gt", gt_path,
               "--arm", "baseline", "--rows", "0:24", "--t-grid", "5:15",
               "--out", str(tmp) + "/cal_"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "best: threshold=" in out
    grid = (tmp / "cal_grid.csv").read_text().splitlines()
    assert grid[0] == "threshold,score"
    assert len(grid) == 11


def test_calibrate_watershed_grid_flags(sheet, capsys):
    tmp, _, _, epm_path, gt_path, _ = sheet
    rc = main(["calibrate", "--epm", epm_path, "--gt", gt_path,
               "--arm", "watershed", "--rows", "0:24",
               "--h-grid", "1:3", "--lambda-grid", "4:9:4"])
    assert rc == 0
    assert "best: h=" in capsys.readouterr().out


def test_evaluate_subcommand(sheet, capsys):
    tmp, _, _, _, gt_path, _ = sheet
    rc = main(["evaluate", "--ref", gt_path, "--pred", gt_path,
               "--rows", "0:24", "--out", str(tmp) + "/ev_"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "AUC-F1: 0.500000" in out
    assert (tmp / "ev_curve.csv").exists()


def test_evaluate_no_shapes_exit_1(sheet, capsys):
    tmp, _, _, _, gt_path, _ = sheet
    empty = np.zeros((24, 24), np.int32)
    empty_path = tmp / "empty.slab"
    io.write_labelmap(empty, empty_path)
    rc = main(["evaluate", "--ref", gt_path, "--pred", str(empty_path),
               "--rows", "0:24", "--out", str(tmp) + "/ev0_"])
    assert rc == 1
    assert "no shapes" in capsys.readouterr().err


def test_render_maps_subcommand(sheet):
    tmp, _, _, _, gt_path, _ = sheet
    rc = main(["render-maps", "--ref", gt_path, "--pred", gt_path,
               "--background", "black", "--out", str(tmp) + "/qm_"])
    assert rc == 0
    img = io.read_colormap(tmp / "qm_precision.ppm")
    assert img.shape == (24, 24, 3)


def test_tiles_subcommand(capsys):
    rc = main(["tiles", "--width", "8500", "--height", "6500"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "train: rows [0, 4000), 136 tiles" in out
    assert "total tiles: 221" in out


def test_tiles_export(sheet):
    tmp, _, _, epm_path, _, _ = sheet
    rc = main(["tiles", "--width", "24", "--height", "24",
               "--train", "0:8", "--val", "8:16", "--test", "16:24",
               "--tile-size", "16", "--image", epm_path, "--out", str(tmp / "tiles")])
    assert rc == 0
    assert (tmp / "tiles" / "tile_r00000_c00000.pgm").exists()
    assert (tmp / "tiles" / "tile_r00000_c00016.pgm").exists()
    partial = io.read_graymap(tmp / "tiles" / "tile_r00000_c00016.pgm")
    assert partial.shape == (16, 8)


def test_missing_input_exit_2(tmp_path, capsys):
    rc = main(["watershed", str(tmp_path / "nope.pgm"), "--out", str(tmp_path) + "/x_"])
    assert rc == 2
    assert "nope.pgm" in capsys.readouterr().err


def test_bad_rows_argument_exit_2(sheet):
    tmp, _, _, _, gt_path, _ = sheet
    with pytest.raises(SystemExit) as exc:
        main(["evaluate", "--ref", gt_path, "--pred", gt_path,
              "--rows", "banana", "--out", str(tmp) + "/x_"])
    assert exc.value.code == 2


def test_cli_deterministic_files(sheet):
    tmp, _, _, epm_path, _, _ = sheet
    for prefix in ("d1_", "d2_"):
        assert main(["watershed", epm_path, "--h", "1", "--lambda", "4",
                     "--out", str(tmp) + "/" + prefix]) == 0
    assert (tmp / "d1_labels.slab").read_bytes() == (tmp / "d2_labels.slab").read_bytes()
    assert (tmp / "d1_lines.pgm").read_bytes() == (tmp / "d2_lines.pgm").read_bytes()

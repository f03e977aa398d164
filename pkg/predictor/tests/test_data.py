import numpy as np
import pytest

from xlris_predictor.data import load_dataset, split_indices, train_eval_split

from helpers import write_dataset


def test_load_shapes_and_values(tmp_path):
    feats, labels = write_dataset(tmp_path / "ds")
    ds = load_dataset(tmp_path / "ds")
    assert len(ds) == 10 and ds.q == 6
    assert ds.features.dtype == np.complex64
    assert np.array_equal(ds.features.real, feats[..., 0])
    assert np.array_equal(ds.features.imag, feats[..., 1])
    assert np.array_equal(ds.labels, labels.astype(np.int64))


def test_axis_classes_are_zero_based(tmp_path):
    _, labels = write_dataset(tmp_path / "ds")
    ds = load_dataset(tmp_path / "ds")
    assert np.array_equal(ds.axis_classes("x"), labels[:, 0].astype(np.int64) - 1)
    assert np.array_equal(ds.axis_classes("y"), labels[:, 1].astype(np.int64) - 1)
    assert ds.head_dim("x") == 4 and ds.head_dim("y") == 3
    with pytest.raises(ValueError):
        ds.axis_classes("z")


def test_truncated_files_rejected(tmp_path):
    write_dataset(tmp_path / "ds")
    raw = (tmp_path / "ds" / "features.bin").read_bytes()
    (tmp_path / "ds" / "features.bin").write_bytes(raw[:-8])
    with pytest.raises(ValueError):
        load_dataset(tmp_path / "ds")


def test_split_sizes_partition_determinism():
    a_train, a_eval = split_indices(7, 100, 0.9)
    b_train, b_eval = split_indices(7, 100, 0.9)
    assert len(a_train) == 90 and len(a_eval) == 10
    assert np.array_equal(a_train, b_train) and np.array_equal(a_eval, b_eval)
    assert set(a_train) | set(a_eval) == set(range(100))
    assert set(a_train).isdisjoint(a_eval)
    c_train, _ = split_indices(8, 100, 0.9)
    assert not np.array_equal(a_train, c_train)
    with pytest.raises(ValueError):
        split_indices(7, 100, 1.0)


def test_train_eval_split_views(tmp_path):
    write_dataset(tmp_path / "ds", n=20)
    ds = load_dataset(tmp_path / "ds")
    train, evald = train_eval_split(ds, 0.75)
    assert len(train) == 15 and len(evald) == 5
    joined = np.concatenate([train.features, evald.features])
    assert sorted(map(tuple, joined.view(np.float32).reshape(20, -1).tolist())) == \
        sorted(map(tuple, ds.features.view(np.float32).reshape(20, -1).tolist()))

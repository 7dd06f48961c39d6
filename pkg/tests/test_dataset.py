import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from astskin.dataset import (
    CSV_COLUMNS,
    CalibrationDataset,
    CalibrationRecord,
    kfold,
    parse_csv_text,
    read_csv,
    split_holdout,
    write_csv,
)
from astskin.dsp import SpectralFeatures
from astskin.errors import KTooLarge, MalformedCsv, MixedSkinIds, TooFewRecords
from astskin.simskin import bundled_profile, generate_dataset


def small_ds(counts, skin="S"):
    records = []
    for label, n in counts.items():
        for i in range(n):
            records.append(
                CalibrationRecord(skin, label, 17.0, 10.0, float(i % 30),
                                  SpectralFeatures(0.1, 0.2, 0.3, 0.01 * i))
            )
    return CalibrationDataset(records)


def test_csv_round_trip(tmp_path, calib):
    path = tmp_path / "calib.csv"
    write_csv(calib, path)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert "\r" not in text
    back = read_csv(path)
    assert back.records == calib.records
    assert back.to_csv_text() == text


def test_csv_missing_column():
    text = "skin_id,location,x_mm,y_mm,force_n,a300,a500,a700\nS,A,1,2,3,0.1,0.1,0.1\n"
    with pytest.raises(MalformedCsv, match="a900"):
        parse_csv_text(text)


def test_csv_bad_row_diagnostics():
    head = ",".join(CSV_COLUMNS) + "\n"
    with pytest.raises(MalformedCsv, match=r":3: column 'force_n'"):
        parse_csv_text(head + "S,A,1,2,3,0.1,0.1,0.1,0.1\nS,A,1,2,x,0.1,0.1,0.1,0.1\n")
    with pytest.raises(MalformedCsv, match=r":2: expected 9 columns"):
        parse_csv_text(head + "S,A,1,2,3,0.1\n")


def test_csv_mixed_skins():
    head = ",".join(CSV_COLUMNS) + "\n"
    rows = "S1,A,1,2,3,0.1,0.1,0.1,0.1\nS2,A,1,2,3,0.1,0.1,0.1,0.1\n"
    with pytest.raises(MixedSkinIds):
        parse_csv_text(head + rows)


def test_header_only_is_empty_dataset():
    ds = parse_csv_text(",".join(CSV_COLUMNS) + "\n")
    assert len(ds) == 0


def test_split_default_counts(calib_split):
    train, test = calib_split
    assert (len(train), len(test)) == (4590, 510)
    labels = test.labels()
    assert [int(np.sum(labels == l)) for l in "ABC"] == [170, 170, 170]


def test_split_disjoint_exhaustive_deterministic(calib):
    a_train, a_test = split_holdout(calib, 0.9, 3)
    b_train, b_test = split_holdout(calib, 0.9, 3)
    assert a_train.records == b_train.records and a_test.records == b_test.records
    ids = {id(r) for r in a_train.records} | {id(r) for r in a_test.records}
    assert len(ids) == len(calib)
    c_train, _ = split_holdout(calib, 0.9, 4)
    assert c_train.records != a_train.records


def test_split_ten_rows():
    train, test = split_holdout(small_ds({"A": 10}), 0.9, 1)
    assert (len(train), len(test)) == (9, 1)


def test_split_too_few():
    with pytest.raises(TooFewRecords):
        split_holdout(small_ds({"A": 9}), 0.9, 1)


def test_kfold_default_train_partition(calib_split):
    folds = kfold(calib_split[0], 10, 7)
    assert folds.sizes() == [459] * 10


def test_kfold_singletons():
    folds = kfold(small_ds({"A": 4, "B": 3, "C": 3}), 10, 0)
    assert folds.sizes() == [1] * 10


@pytest.mark.parametrize("k", [1, 0, 11])
def test_kfold_invalid_k(k):
    with pytest.raises(KTooLarge):
        kfold(small_ds({"A": 10}), k, 0)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 40), st.integers(1, 40), st.integers(0, 40),
    st.integers(2, 12), st.integers(0, 2**64 - 1),
)
def test_kfold_properties(na, nb, nc, k, seed):
    counts = {"A": na, "B": nb}
    if nc:
        counts["C"] = nc
    ds = small_ds(counts)
    if k > len(ds):
        return
    folds = kfold(ds, k, seed)
    assert folds.assignment.shape == (len(ds),)
    assert set(folds.assignment.tolist()) <= set(range(k))
    sizes = folds.sizes()
    assert max(sizes) - min(sizes) <= 1 and sum(sizes) == len(ds)
    labels = ds.labels()
    for label, n in counts.items():
        per_fold = np.bincount(folds.assignment[labels == label], minlength=k)
        expected = n / k
        assert np.all(np.abs(per_fold - expected) <= 1)
    assert np.array_equal(folds.assignment, kfold(ds, k, seed).assignment)

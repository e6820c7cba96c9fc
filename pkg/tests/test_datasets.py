import numpy as np
import pytest

from noisytrees.datasets import (
    Dataset,
    SplitSpec,
    checkerboard_label,
    dataset_to_lines,
    generate_checkerboard,
    generate_imbalanced_linear,
    load_table,
    save_dataset,
    split_dataset,
)


class TestDataset:
    def test_validates_labels(self):
        with pytest.raises(ValueError, match="labels"):
            Dataset(np.zeros((3, 2)), [1, 0, -1])

    def test_validates_finite(self):
        X = np.array([[0.0, np.inf], [1.0, 2.0]])
        with pytest.raises(ValueError, match="finite"):
            Dataset(X, [1, -1])

    def test_immutable(self):
        ds = generate_checkerboard(2, 10, 0)
        with pytest.raises(ValueError):
            ds.X[0, 0] = 3.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((3, 2)), [1, -1])


class TestCheckerboard:
    def test_quadrant_labels(self):
        assert checkerboard_label(np.array([[0.5, 0.5]]), 2)[0] == 1
        assert checkerboard_label(np.array([[1.5, 0.5]]), 2)[0] == -1
        assert checkerboard_label(np.array([[1.5, 1.5]]), 2)[0] == 1

    def test_boundary_takes_floor_cell(self):
        # x=1 belongs to the second column of cells
        assert checkerboard_label(np.array([[1.0, 0.5]]), 2)[0] == -1
        # a coordinate equal to the grid edge maps to the last cell
        assert checkerboard_label(np.array([[2.0, 0.5]]), 2)[0] == -1
        assert checkerboard_label(np.array([[2.0, 1.5]]), 2)[0] == 1

    def test_labels_are_function_of_features(self):
        ds = generate_checkerboard(4, 5000, 123)
        np.testing.assert_array_equal(ds.y, checkerboard_label(ds.X, 4))

    def test_balanced_grid4(self):
        ds = generate_checkerboard(4, 100_000, 5)
        assert abs((ds.y == 1).mean() - 0.5) < 0.01

    def test_range(self):
        ds = generate_checkerboard(2, 1000, 9)
        assert ds.X.min() >= 0.0 and ds.X.max() <= 2.0

    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError, match="grid"):
            generate_checkerboard(3, 10, 0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            generate_checkerboard(2, 0, 0)

    def test_deterministic_and_serializable(self):
        a = generate_checkerboard(2, 200, 77)
        b = generate_checkerboard(2, 200, 77)
        assert dataset_to_lines(a) == dataset_to_lines(b)


class TestImbalancedLinear:
    def test_prior_variant3(self):
        ds = generate_imbalanced_linear(3, 40000, 21)
        n_pos = int((ds.y == 1).sum())
        sigma = np.sqrt(40000 * 0.9 * 0.1)
        assert abs(n_pos - 36000) <= 3 * sigma

    def test_variant4_negative_box(self):
        ds = generate_imbalanced_linear(4, 20000, 22)
        neg = ds.X[ds.y == -1]
        assert neg[:, 0].min() >= 0.5 and neg[:, 0].max() <= 0.7
        assert neg[:, 1].min() >= 0.4 and neg[:, 1].max() <= 0.6

    def test_single_sample(self):
        ds = generate_imbalanced_linear(3, 1, 23)
        assert ds.n == 1 and ds.y[0] in (-1, 1)

    def test_rejects_other_variants(self):
        with pytest.raises(ValueError, match="variant"):
            generate_imbalanced_linear(5, 10, 0)

    def test_prior_converges(self):
        ds = generate_imbalanced_linear(3, 1_000_000, 24)
        assert abs((ds.y == 1).mean() - 0.9) < 0.005

    def test_positive_box(self):
        ds = generate_imbalanced_linear(3, 5000, 25)
        pos = ds.X[ds.y == 1]
        assert pos[:, 0].max() <= 0.5 and pos[:, 1].max() <= 1.0


class TestLoadTable:
    def test_small_file(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1.0,2.0,a\n3.0,4.0,b\n5.0,6.0,a\n")
        ds = load_table(path)
        assert (ds.n, ds.d) == (3, 2)
        # 'b' is lexicographically larger -> +1
        np.testing.assert_array_equal(ds.y, [-1, 1, -1])

    def test_numeric_labels(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1.0,0\n2.0,1\n")
        ds = load_table(path)
        np.testing.assert_array_equal(ds.y, [-1, 1])

    def test_roundtrip_preserves_everything(self, tmp_path):
        ds = generate_checkerboard(2, 50, 3)
        path = tmp_path / "cb.csv"
        save_dataset(ds, path)
        back = load_table(path)
        np.testing.assert_array_equal(back.X, ds.X)
        np.testing.assert_array_equal(back.y, ds.y)
        save_dataset(back, tmp_path / "cb2.csv")
        assert (tmp_path / "cb.csv").read_text() == (tmp_path / "cb2.csv").read_text()

    def test_class_counts_wide_file(self, tmp_path):
        # 683 rows, 9 features plus a 2/4 label column
        rng = np.random.default_rng(0)
        rows = []
        for i in range(683):
            label = "4" if i < 239 else "2"
            rows.append(",".join(f"{v:.3f}" for v in rng.random(9)) + f",{label}")
        path = tmp_path / "bc.csv"
        path.write_text("\n".join(rows) + "\n")
        ds = load_table(path)
        assert (ds.n, ds.d) == (683, 9)
        assert int((ds.y == 1).sum()) == 239 and int((ds.y == -1).sum()) == 444

    def test_parse_error_reports_row_and_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0,a\n1.0,oops,b\n")
        with pytest.raises(ValueError, match="row 2, column 2"):
            load_table(path)

    def test_three_label_values_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,a\n2,b\n3,c\n")
        with pytest.raises(ValueError, match="two label values"):
            load_table(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            load_table(path)

    def test_header_autodetected(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("f0,f1,label\n1.0,2.0,+1\n3.0,4.0,-1\n")
        ds = load_table(path)
        assert ds.n == 2
        np.testing.assert_array_equal(ds.y, [1, -1])

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "inf.csv"
        path.write_text("1.0,inf,a\n2.0,3.0,b\n")
        with pytest.raises(ValueError, match="non-finite"):
            load_table(path)

    def test_custom_delimiter_and_label_column(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("a\t1.0\t2.0\nb\t3.0\t4.0\n")
        ds = load_table(path, delimiter="\t", label_column=0)
        assert ds.d == 2
        np.testing.assert_array_equal(ds.y, [-1, 1])


class TestSplitDataset:
    def test_exact_sizes(self):
        ds = generate_checkerboard(2, 10, 1)
        train, val, test = split_dataset(ds, SplitSpec(0.6, 0.2, 0.2, seed=5))
        assert (train.n, val.n, test.n) == (6, 2, 2)

    def test_benchmark_scale_sizes(self):
        ds = generate_imbalanced_linear(3, 40000, 2)
        train, val, test = split_dataset(ds, SplitSpec(seed=6))
        assert (train.n, val.n, test.n) == (24000, 8000, 8000)

    def test_deterministic(self):
        ds = generate_checkerboard(2, 100, 3)
        a = split_dataset(ds, SplitSpec(seed=9))
        b = split_dataset(ds, SplitSpec(seed=9))
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.X, y.X)

    def test_partition(self):
        ds = generate_checkerboard(2, 101, 4)
        parts = split_dataset(ds, SplitSpec(seed=10))
        rows = np.vstack([p.X for p in parts])
        assert rows.shape[0] == 101
        assert len(np.unique(rows, axis=0)) == len(np.unique(ds.X, axis=0))

    def test_remainder_goes_to_train(self):
        ds = generate_checkerboard(2, 11, 5)
        train, val, test = split_dataset(ds, SplitSpec(seed=11))
        assert (train.n, val.n, test.n) == (7, 2, 2)

    def test_empty_test_rejected(self):
        ds = generate_checkerboard(2, 3, 6)
        with pytest.raises(ValueError, match="empty test"):
            split_dataset(ds, SplitSpec(0.4, 0.3, 0.3, seed=0))

    def test_fractions_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            SplitSpec(0.5, 0.2, 0.2, seed=0)

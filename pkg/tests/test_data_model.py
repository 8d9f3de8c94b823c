"""Ingest, normalization, and synthetic-generator contracts."""

import numpy as np
import pytest

from gbc_chroma.data_model import (
    ClusterSpec,
    DataError,
    DataTable,
    InconsistentArity,
    MissingHeader,
    NonNumericCell,
    SpecMismatch,
    TooFewAttributes,
    generate_synthetic,
    load_table,
    normalize,
    save_table,
)


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadTable:
    def test_minimal_well_formed_file(self, tmp_path):
        t = load_table(write(tmp_path, "x,y,As,Cd,Cr\n0,0,1,2,3\n"))
        assert t.n_attributes == 3
        assert t.n_samples == 1
        assert t.attribute_names == ("As", "Cd", "Cr")
        assert np.array_equal(t.values, [[1.0, 2.0, 3.0]])
        assert np.array_equal(t.locations, [[0.0, 0.0]])

    def test_non_numeric_cell_coordinates(self, tmp_path):
        with pytest.raises(NonNumericCell) as exc:
            load_table(write(tmp_path, "x,y,As,Cd,Cr\n0,0,1,x,3\n"))
        assert exc.value.row == 2
        assert exc.value.col == 4

    def test_inconsistent_arity(self, tmp_path):
        with pytest.raises(InconsistentArity) as exc:
            load_table(write(tmp_path, "x,y,a,b,c\n0,0,1,2,3\n0,0,1,2\n"))
        assert exc.value.row == 3

    def test_missing_header(self, tmp_path):
        with pytest.raises(MissingHeader):
            load_table(write(tmp_path, "0,0,1,2,3\n"))
        with pytest.raises(MissingHeader):
            load_table(write(tmp_path, "", name="empty.csv"))

    def test_too_few_attributes(self, tmp_path):
        with pytest.raises(TooFewAttributes):
            load_table(write(tmp_path, "x,y,a,b\n0,0,1,2\n"))

    def test_row_order_preserved(self, tmp_path):
        t = load_table(write(tmp_path, "x,y,a,b,c\n0,0,9,9,9\n1,1,1,1,1\n"))
        assert t.values[0, 0] == 9.0
        assert t.values[1, 0] == 1.0

    def test_rejects_non_finite(self):
        with pytest.raises(DataError):
            DataTable(("a", "b", "c"), [[0, 0]], [[1.0, np.nan, 2.0]])


class TestSaveLoadRoundTrip:
    def test_identity_on_synthetic(self, tmp_path, synth300):
        p = tmp_path / "round.csv"
        save_table(synth300, p)
        back = load_table(p)
        assert back.attribute_names == synth300.attribute_names
        assert np.array_equal(back.values, synth300.values)
        assert np.array_equal(back.locations, synth300.locations)

    def test_identity_on_awkward_floats(self, tmp_path):
        t = DataTable(
            ("a", "b", "c"),
            [[0.1, -1e-17], [1e17, 3.0]],
            [[1 / 3, 2 / 7, 1e-300], [0.1 + 0.2, 5e222, 4.0]],
        )
        p = tmp_path / "floats.csv"
        save_table(t, p)
        back = load_table(p)
        assert np.array_equal(back.values, t.values)
        assert np.array_equal(back.locations, t.locations)


class TestNormalize:
    def test_linear_minmax(self):
        t = DataTable(("a", "b", "c"), [[0, 0]] * 3, [[2, 0, 0], [4, 1, 0], [6, 2, 0]])
        norm = normalize(t)
        assert np.allclose(norm.norm_values[:, 0], [0.0, 0.5, 1.0])

    def test_constant_column_rule(self):
        t = DataTable(("a", "b", "c"), [[0, 0]] * 3, [[5, 0, 1], [5, 1, 2], [5, 2, 3]])
        norm = normalize(t)
        assert np.all(norm.norm_values[:, 0] == 0.5)

    def test_raw_sum_weight(self):
        t = DataTable(("a", "b", "c"), [[0, 0]], [[1, 2, 3]])
        assert normalize(t, "raw_sum").sample_weights[0] == 6.0

    def test_normalized_sum_weight(self):
        t = DataTable(("a", "b", "c"), [[0, 0]] * 2, [[0, 0, 0], [2, 4, 8]])
        norm = normalize(t, "normalized_sum")
        assert norm.sample_weights[1] == pytest.approx(3.0)

    def test_nonconstant_columns_hit_bounds_exactly(self, synth300):
        norm = normalize(synth300)
        spans = synth300.values.max(axis=0) - synth300.values.min(axis=0)
        for c in np.nonzero(spans > 0)[0]:
            assert norm.norm_values[:, c].min() == 0.0
            assert norm.norm_values[:, c].max() == 1.0

    def test_idempotent_on_normalized_data(self, synth300):
        norm = normalize(synth300)
        again = normalize(
            DataTable(synth300.attribute_names, synth300.locations, norm.norm_values)
        )
        assert np.allclose(again.norm_values, norm.norm_values, atol=1e-12)

    def test_bad_weight_mode(self, synth300):
        with pytest.raises(ValueError):
            normalize(synth300, "median")


class TestGenerateSynthetic:
    def test_reference_scale(self, synth300):
        assert synth300.values.shape == (300, 8)
        assert synth300.attribute_names == ("As", "Cd", "Cr", "Cu", "Hg", "Ni", "Pb", "Zn")
        assert np.all(synth300.values >= 0)
        assert np.all(synth300.locations >= 0) and np.all(synth300.locations <= 1)

    def test_degenerate_cluster(self):
        t = generate_synthetic(1, 3, [ClusterSpec((1, 0, 0), 0.0, 1)], seed=3)
        w = t.values[0, 0]
        assert w > 0
        assert t.values[0, 1] == 0 and t.values[0, 2] == 0

    def test_determinism_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        save_table(generate_synthetic(50, 5, seed=42), a)
        save_table(generate_synthetic(50, 5, seed=42), b)
        assert a.read_bytes() == b.read_bytes()

    def test_different_seeds_differ(self):
        t1 = generate_synthetic(20, 3, seed=1)
        t2 = generate_synthetic(20, 3, seed=2)
        assert not np.array_equal(t1.values, t2.values)

    def test_count_mismatch(self):
        with pytest.raises(SpecMismatch):
            generate_synthetic(10, 3, [ClusterSpec((1, 1, 1), 0.1, 4)], seed=0)

    def test_proportion_length_mismatch(self):
        with pytest.raises(SpecMismatch):
            generate_synthetic(2, 3, [ClusterSpec((1, 0), 0.1, 2)], seed=0)

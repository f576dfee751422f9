"""Tests of the instance container and the run output writers."""
import json
import numpy as np
import pandas as pd
import pytest
from spicepc.Data.constants import HISTORY_COLUMNS
from spicepc.IO.HistoryWriter import (
    read_summary_json, run_summary, write_history_csv, write_long_csv,
    write_summary_json
)
from spicepc.IO.QcqpIO import export_qcqp, import_qcqp
from spicepc.Qcqp.QcqpGenerator import QcqpConfig, generate_data
from spicepc.Solver.SpiceSolver import SolveConfig, solve


class TestQcqpContainer:

    def test_round_trip_is_exact(self, tmp_path):
        data = generate_data(QcqpConfig(n=4, m=3, q=5, p=2, seed=8, p_eq=1))
        path = tmp_path/'instance.npz'
        export_qcqp(data, path)
        loaded = import_qcqp(path)
        for key in ('W', 'a', 'pi', 'V', 'c', 'A_eq', 'B_eq', 'b_eq'):
            np.testing.assert_array_equal(getattr(loaded, key), getattr(data, key))
        assert loaded.meta['seed'] == 8
        assert loaded.meta['rng'] == data.meta['rng']

    def test_single_block(self, tmp_path, small_generated):
        _, data = small_generated
        export_qcqp(data, tmp_path/'single.npz')
        loaded = import_qcqp(tmp_path/'single.npz')
        assert loaded.V is None
        assert loaded.p_eq == 0
        np.testing.assert_array_equal(loaded.WtW, data.WtW)

    def test_foreign_container(self, tmp_path):
        path = tmp_path/'other.npz'
        np.savez(path, header=np.array(json.dumps({'format': 'other'})))
        with pytest.raises(ValueError, match='not a spicepc-qcqp container'):
            import_qcqp(path)


class TestRunOutputs:

    @pytest.fixture
    def history(self, interval_instance):
        return solve(interval_instance, SolveConfig(tol=1e-6), x0=[0.5])

    def test_history_csv(self, tmp_path, history):
        path = tmp_path/'run.history.csv'
        write_history_csv(history.to_dataframe(extra=True), path)
        header = path.read_text(encoding='utf-8').splitlines()[0]
        assert header == ','.join(HISTORY_COLUMNS)
        loaded = pd.read_csv(path)
        np.testing.assert_array_equal(loaded.f.to_numpy(), history.to_dataframe().f.to_numpy())
        np.testing.assert_array_equal(loaded.k.to_numpy(), np.arange(history.iterations))

    def test_long_csv(self, tmp_path, history):
        frames = {'constant': history.to_dataframe(), 'again': history.to_dataframe()}
        path = tmp_path/'long.csv'
        write_long_csv(frames, path)
        loaded = pd.read_csv(path)
        assert list(loaded.columns) == ['schedule', *HISTORY_COLUMNS]
        assert len(loaded) == 2*history.iterations

    def test_summary_json(self, tmp_path, history):
        summary = run_summary(history)
        assert summary['wall_time_ms'] is None
        assert summary['status'] == history.status
        path = tmp_path/'run.summary.json'
        write_summary_json(summary, path)
        assert read_summary_json(path) == summary
        assert '"wall_time_ms": null' in path.read_text(encoding='utf-8')

"""Writers for run outputs: the per-iteration history CSV and the JSON run
summary."""
import json
import pandas as pd
from spicepc.Data.constants import CSV_FLOAT_FORMAT, HISTORY_COLUMNS

def write_history_csv(history_df, path):
    """Write the history columns with 17 significant digits. The '%.17g'
    format uses '.' as the decimal separator regardless of locale."""
    history_df = history_df[list(HISTORY_COLUMNS)]
    history_df.to_csv(
        path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n'
    )

def write_long_csv(frames, path, key='schedule'):
    """Concatenate labelled history frames into one long-format CSV with a
    leading `key` column."""
    parts = []
    for label, df in frames.items():
        df = df[list(HISTORY_COLUMNS)].copy()
        df.insert(0, key, label)
        parts.append(df)
    pd.concat(parts, ignore_index=True).to_csv(
        path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n'
    )

def _json_float(value):
    if value is None:
        return None
    return float(value)

def run_summary(history, wall_time_ms=None):
    """JSON-ready summary of a solve."""
    return {
        'status': history.status,
        'iterations': history.iterations,
        'final_f': _json_float(history.final_f),
        'final_feas': _json_float(history.final_feas),
        'wall_time_ms': wall_time_ms,
    }

def write_summary_json(summary, path):
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write('\n')

def read_summary_json(path):
    with open(path, 'r', encoding='utf-8') as fh:
        return json.load(fh)

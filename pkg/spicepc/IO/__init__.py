from spicepc.IO.QcqpIO import export_qcqp, import_qcqp
from spicepc.IO.HistoryWriter import (
    write_history_csv, write_long_csv, write_summary_json, read_summary_json,
    run_summary
)

from spicepc.Bench.RunSpec import RunSpec
from spicepc.Bench.Runner import run, table, figure, execute

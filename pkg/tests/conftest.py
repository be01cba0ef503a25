# Pin BLAS to one thread before numpy is imported anywhere, so reductions
# have a fixed order and runs are bit-reproducible.
import os

for _var in (
    "OPENBLAS_NUM_THREADS",
    "OMP_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
):
    os.environ.setdefault(_var, "1")

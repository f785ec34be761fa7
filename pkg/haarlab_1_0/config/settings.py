import os

# ========= 并行 =========
HAARLAB_THREADS = int(os.getenv("HAARLAB_THREADS", os.cpu_count() or 1))

# ========= 网格 / 容差 =========
DEFAULT_DEPTH = int(os.getenv("HAARLAB_DEPTH", 10))
REL_TOL = float(os.getenv("HAARLAB_REL_TOL", 1e-10))
DOMAIN_TOL = float(os.getenv("HAARLAB_DOMAIN_TOL", 1e-12))
SEGMENT_PRE_TOL = float(os.getenv("HAARLAB_SEGMENT_PRE_TOL", 1e-9))
MARGIN_TOL = float(os.getenv("HAARLAB_MARGIN_TOL", 1e-9))

# ========= 范数估计 =========
POWER_TOL = float(os.getenv("HAARLAB_POWER_TOL", 1e-8))
POWER_MAX_ITER = int(os.getenv("HAARLAB_POWER_MAX_ITER", 5000))
# 2^N <= 该值时直接稠密 SVD
DENSE_MAX_LEAVES = int(os.getenv("HAARLAB_DENSE_MAX_LEAVES", 256))

# ========= 日志 =========
LOG_LEVEL = os.getenv("HAARLAB_LOG_LEVEL", "INFO")

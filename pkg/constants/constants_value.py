# Training defaults (overridable from configs/config_training.yml)
DEFAULT_P_PERCENT = 5.0
DEFAULT_EPOCHS = 25
DEFAULT_BATCH_SIZE = 64
DEFAULT_LR_START = 1e-3
DEFAULT_LR_END = 1e-4
DEFAULT_N_BLOCKS = 4
DEFAULT_DN2_K = 30

ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8

# Numeric floors
TRAINING_ERROR_FLOOR = 1e-12
EIGENVALUE_FLOOR = 1e-12
EIGENVALUE_CLAMP = -1e-10
STANDARDIZE_MIN_SCALE = 1e-8

# Neighbours
KNN_NEIGHBOURS = 2
KNN_CHUNK_ROWS = 512

# Byte formats
MODEL_MAGIC = b"NLINV1\0"
MATRIX_MAGIC = b"NLFM1\0"
CONTAINER_FORMAT = "nlinv-detector"
CONTAINER_VERSION = 1
ZIP_TIMESTAMP = (1980, 1, 1, 0, 0, 0)

# Environment
THREADS_ENV = "NLINV_THREADS"
LOG_FILE_ENV = "NLINV_LOG_FILE"
DATA_DIR_ENV = "NLINV_DATA_DIR"

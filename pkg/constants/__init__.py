from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
CONFIG_FILE_PATH = PROJECT_ROOT / "configs" / "config_training.yml"
DATASETS_FILE_PATH = PROJECT_ROOT / "configs" / "config_datasets.json"

import pathlib
import sys

REPO = pathlib.Path(__file__).resolve().parent.parent
CONFIGS = REPO / "configs"

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

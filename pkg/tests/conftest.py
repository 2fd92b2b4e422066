import sys
from pathlib import Path

# Test helpers (oracles shared between modules) live next to the tests.
sys.path.insert(0, str(Path(__file__).resolve().parent))

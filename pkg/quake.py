"""
Command line wrapper
Run `python quake.py --help` from the repository root
"""

from ads_earthquake.cli import RunConfig, build_parser, main
from ads_earthquake.pipeline import EarthquakeExtractor

__all__ = [
    'EarthquakeExtractor',
    'RunConfig',
    'build_parser',
    'main'
]

# Allow running as script
if __name__ == "__main__":
    import sys
    sys.exit(main())

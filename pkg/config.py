"""
Configuration module for the AdS earthquake extractor
Centralizes environment variable loading and validation
"""
import os

from dotenv import load_dotenv

from ads_earthquake.schemas import Tolerances

# Load environment variables from .env file
load_dotenv()


def _float(name: str, default: float) -> float:
    try:
        return float(os.getenv(name, default))
    except ValueError:
        return float("nan")


def _int(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, default))
    except ValueError:
        return -1


class Config:
    """Central configuration class for the application"""

    # ============================================================
    # Run defaults
    # ============================================================
    SAMPLES: int = _int("ADSQ_SAMPLES", 2000)
    LEAF_T: float = _float("ADSQ_LEAF_T", 0.5)
    SEED: int = _int("ADSQ_SEED", 0)
    WORKERS: int = _int("ADSQ_WORKERS", 1)
    LOG_LEVEL: str = os.getenv("ADSQ_LOG_LEVEL", "WARNING").upper()

    # ============================================================
    # Numerical tolerances
    # ============================================================
    PARABOLIC_EPS: float = _float("ADSQ_PARABOLIC_EPS", 1e-9)
    PLANE_TAU: float = _float("ADSQ_PLANE_TAU", 1e-10)
    HULL_EPS: float = _float("ADSQ_HULL_EPS", 1e-9)
    MERGE_EPS: float = _float("ADSQ_MERGE_EPS", 1e-7)
    SNAP_EPS: float = _float("ADSQ_SNAP_EPS", 1e-6)
    SEPARATION_EPS: float = _float("ADSQ_SEPARATION_EPS", 1e-9)

    @classmethod
    def validate_config(cls) -> list[str]:
        """
        Check the loaded values.
        Returns a list of problems, empty when the configuration is usable.
        """
        problems = []
        if cls.SAMPLES < 4:
            problems.append("ADSQ_SAMPLES must be an integer >= 4")
        if not 0.0 <= cls.LEAF_T <= 1.0:
            problems.append("ADSQ_LEAF_T must lie in [0, 1]")
        if cls.WORKERS < 1:
            problems.append("ADSQ_WORKERS must be a positive integer")
        if cls.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            problems.append(f"ADSQ_LOG_LEVEL {cls.LOG_LEVEL!r} is not a logging level")
        tolerances = [
            ("ADSQ_PARABOLIC_EPS", cls.PARABOLIC_EPS),
            ("ADSQ_PLANE_TAU", cls.PLANE_TAU),
            ("ADSQ_HULL_EPS", cls.HULL_EPS),
            ("ADSQ_MERGE_EPS", cls.MERGE_EPS),
            ("ADSQ_SNAP_EPS", cls.SNAP_EPS),
            ("ADSQ_SEPARATION_EPS", cls.SEPARATION_EPS),
        ]
        for name, value in tolerances:
            if not value > 0:
                problems.append(f"{name} must be a positive number")
        return problems

    @classmethod
    def tolerances(cls) -> Tolerances:
        return Tolerances(
            parabolic_eps=cls.PARABOLIC_EPS,
            plane_tau=cls.PLANE_TAU,
            hull_eps=cls.HULL_EPS,
            merge_eps=cls.MERGE_EPS,
            snap_eps=cls.SNAP_EPS,
            separation_eps=cls.SEPARATION_EPS,
        )

    @classmethod
    def print_config_status(cls):
        """Print configuration status for debugging"""
        print("\n" + "=" * 60)
        print("Configuration Status")
        print("=" * 60)

        problems = cls.validate_config()
        if not problems:
            print("[OK] Configuration is valid")
        else:
            print("[ERROR] Invalid configuration values:")
            for problem in problems:
                print(f"   - {problem}")

        print("\nRun defaults:")
        print(f"   Samples: {cls.SAMPLES}")
        print(f"   Leaf parameter t: {cls.LEAF_T}")
        print(f"   Seed: {cls.SEED}")
        print(f"   Verifier workers: {cls.WORKERS}")
        print(f"   Log level: {cls.LOG_LEVEL}")
        print("\nTolerances:")
        print(f"   Parabolic: {cls.PARABOLIC_EPS:g}   Plane kind: {cls.PLANE_TAU:g}")
        print(f"   Hull: {cls.HULL_EPS:g}   Merge: {cls.MERGE_EPS:g}")
        print(f"   Snap: {cls.SNAP_EPS:g}   Separation: {cls.SEPARATION_EPS:g}")
        print("=" * 60 + "\n")


# Create a singleton instance
config = Config()


def get_config() -> Config:
    """Get the configuration instance"""
    return config


if __name__ == "__main__":
    Config.print_config_status()

    problems = Config.validate_config()
    if problems:
        print("\n[WARNING] Fix the ADSQ_* variables in your .env file.")
    else:
        print("\n[OK] Configuration is complete and ready to use!")

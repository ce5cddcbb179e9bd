import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent


class ConfigError(ValueError):
    """Invalid or inconsistent configuration record."""


def _number(raw, cast):
    try:
        return cast(raw)
    except (TypeError, ValueError):
        return None


class Config:
    CONFIG_DIR = Path(os.getenv("QSPACE_CONFIG_DIR", str(BASE_DIR / "data")))
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    Q_VALUE = _number(os.getenv("QSPACE_Q", "1.1"), float)
    SEED = _number(os.getenv("QSPACE_SEED", "0"), int)
    QEXP_DEGREE = _number(os.getenv("QSPACE_QEXP_DEGREE", "8"), int)
    WINDOW = _number(os.getenv("QSPACE_WINDOW", "6"), int)

    REQUIRED_FILES = ("spaces.json", "grassmann_tables.json")

    @staticmethod
    def validate():
        problems = []
        if not Config.CONFIG_DIR.is_dir():
            problems.append(f"QSPACE_CONFIG_DIR ({Config.CONFIG_DIR}) is not a directory")
        else:
            for name in Config.REQUIRED_FILES:
                if not (Config.CONFIG_DIR / name).is_file():
                    problems.append(f"missing {name} in {Config.CONFIG_DIR}")
        if Config.Q_VALUE is None:
            problems.append("QSPACE_Q is not a number")
        elif Config.Q_VALUE <= 0:
            problems.append("QSPACE_Q must be positive")
        if Config.SEED is None:
            problems.append("QSPACE_SEED is not an integer")
        if Config.QEXP_DEGREE is None or Config.QEXP_DEGREE < 0:
            problems.append("QSPACE_QEXP_DEGREE must be a non-negative integer")
        if Config.WINDOW is None or Config.WINDOW < 0:
            problems.append("QSPACE_WINDOW must be a non-negative integer")

        if problems:
            raise ConfigError(f"Invalid configuration: {'; '.join(problems)}")

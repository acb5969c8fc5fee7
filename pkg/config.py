import os
import sys

BASE_DIR = os.path.abspath(os.path.dirname(__file__))

# Default seed for stochastic subcommands; a --seed flag always wins
DEFAULT_SEED = None
_seed_env = os.environ.get('RISKREG_SEED')
if _seed_env:
    try:
        DEFAULT_SEED = int(_seed_env)
    except ValueError:
        print(f"WARNING: RISKREG_SEED={_seed_env!r} is not an integer, ignoring it.", file=sys.stderr)

THREADS = 1
_threads_env = os.environ.get('RISKREG_THREADS')
if _threads_env:
    try:
        THREADS = max(1, int(_threads_env))
    except ValueError:
        print(f"WARNING: RISKREG_THREADS={_threads_env!r} is not an integer, using 1.", file=sys.stderr)

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')
LOG_LEVEL = os.environ.get('RISKREG_LOG_LEVEL', 'WARNING').upper()
if LOG_LEVEL not in LOG_LEVELS:
    print(f"WARNING: RISKREG_LOG_LEVEL={LOG_LEVEL!r} is not one of {', '.join(LOG_LEVELS)}, using WARNING.", file=sys.stderr)
    LOG_LEVEL = 'WARNING'

# Batch exhibit output (generate_exhibits.py)
OUTPUT_DIR = os.environ.get('RISKREG_OUTPUT_DIR', os.path.join(BASE_DIR, 'instance', 'exhibits'))
TOY_PANEL = os.path.join(BASE_DIR, 'data', 'toy_panel.csv')

# Model defaults
MONTHLY_PERIODS = 60            # five years of monthly returns
TRADING_DAYS_PER_YEAR = 252
DAILY_PERIODS = 5 * TRADING_DAYS_PER_YEAR   # 1,260
SECURITIES = 1000
FAT_TAIL_EPSILON = 0.01
FAT_TAIL_JUMP = 10.0
FAT_TAIL_DRAWS = 1_000_000
BASEL_HORIZON_DAYS = 10
BASEL_CONFIDENCE = 0.99
BASEL_SUPERVISORY_FACTOR = 3.0
BASEL_MULTIPLIER = 22.0         # sqrt(10) * 2.33 * 3, as rounded in the accord discussion
TAIL_ALPHAS = (0.01, 0.001)
CURVE_N_MIN = 30
CURVE_N_MAX = 1200
CURVE_N_STEP = 10
TAIL_COUNT_BETA = 0.8
QUANTILE_BREAKPOINTS = (0.01, 0.10, 0.90, 0.99)
MIN_FUTURE = 2
HISTOGRAM_BIN_WIDTH = 0.025

# Bank response model
BANKS = 10
BANK_BUDGET = 1.0
CAPITAL_RULES = ('basel1', 'basel2', 'market_value_100')

# Synthetic empirical panel
SYNTHETIC_SECURITIES = 1000
SYNTHETIC_AS_OF_DATES = 20
SYNTHETIC_SIGMA = 0.08          # monthly return volatility

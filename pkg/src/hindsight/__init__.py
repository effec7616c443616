"""Hindsight-optimal multi-currency trading trajectories and ML labels."""

from hindsight.analytics import (
    EvaluationReport,
    LabelSeries,
    buy_and_hold,
    emit_labels,
    summary_return,
    evaluate_trajectory,
)
from hindsight.costs import CostSchedule, fx_convert, max_integer_buy, sell_to_cash
from hindsight.diversification import (
    DiversificationPlan,
    PortfolioResult,
    extract_trade_schedule,
    solve_portfolio,
    solve_portfolio_sync,
)
from hindsight.dynamics import State, WaitPolicy, initial_state, revalue, successors
from hindsight.errors import (
    AlignmentError,
    DomainError,
    EmptySeriesError,
    HindsightError,
    InfeasibleError,
    OracleTooLargeError,
    PropagationError,
    QuoteParseError,
)
from hindsight.market_data import (
    AssetUniverse,
    MarketPanel,
    QuoteSeries,
    align_calendar,
    cross_rate,
    load_quotes,
    normalize_prices,
)
from hindsight.optimizer import (
    GraphStats,
    Layer,
    MaxTrades,
    MinWait,
    Trajectory,
    Unconstrained,
    brute_force_oracle,
    expand_layer,
    predicted_state_count,
    prune_k_heuristic,
    prune_wait_heuristic,
    solve,
)

__version__ = "0.1.0"

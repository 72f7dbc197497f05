"""Command-line surface: tables, matchups, dealer summaries, scenario
queries, change-on-14 comparisons, simulation, and the advisor service.

Exit codes: 0 success, 2 input parse error, 3 semantic/consistency error
(including an unusable port for serve), 4 internal arithmetic failure.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from fractions import Fraction

import click

from . import __version__
from .cards import Hand
from .exact import ShoeTooSmallError, round_half_up
from .matchup import DealerRules, DealerVariant, dealer_match, open_match, policy_summary
from .montecarlo import SimConfig, simulate
from .policy import parse_policy
from .scenario import (
    InconsistentStateError,
    ObservedState,
    RuleSet,
    StateParseError,
    change_on_14_comparison,
    evaluate_actions,
    parse_observed_state,
    recommend,
    standing_showdown,
)
from .tables import SOURCES, TableData, build_table, dealer_summary_grid

EXIT_PARSE = 2
EXIT_SEMANTIC = 3
EXIT_INTERNAL = 4


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _fmt(value: Fraction | float | None, precision: int, exact: bool) -> str:
    if value is None:
        return ""
    q = round_half_up(value, precision)
    text = f"{float(q):.{precision}f}"
    if exact and isinstance(value, Fraction):
        text += f" ({value.numerator}/{value.denominator})"
    return text


def _json_value(value, precision: int, exact: bool):
    if value is None:
        return None
    out = float(round_half_up(value, precision))
    if exact and isinstance(value, Fraction):
        return {"value": out, "fraction": f"{value.numerator}/{value.denominator}"}
    return out


output_options = [
    click.option("--format", "fmt", type=click.Choice(["csv", "json", "table"]),
                 default="table", show_default=True, help="Output format."),
    click.option("--precision", type=click.IntRange(1, 12), default=3,
                 show_default=True, help="Decimal places (half-up)."),
    click.option("--exact", "exact_fractions", is_flag=True,
                 help="Include exact fractions in the output."),
]

source_options = [
    click.option("--decks", type=click.IntRange(1), default=1, show_default=True,
                 help="Number of 52-card decks."),
    click.option("--source", type=click.Choice(list(SOURCES)), default="exact",
                 show_default=True,
                 help="exact = enumeration engine; reference = bundled published tables."),
]


def _apply(options):
    def wrap(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return wrap


def _emit_table(data: TableData, fmt: str, precision: int, exact: bool, row_header: str = "row") -> None:
    if fmt == "json":
        payload = {
            "id": data.id,
            "title": data.title,
            "source": data.source,
            "decks": data.decks,
            "columns": data.columns,
            "rows": data.rows,
            "values": [
                [_json_value(v, precision, exact) for v in row] for row in data.values
            ],
            "notes": data.notes,
        }
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([row_header] + data.columns)
        for name, row in zip(data.rows, data.values):
            writer.writerow([name] + [_fmt(v, precision, exact) for v in row])
        click.echo(buf.getvalue(), nl=False)
    else:
        width = max(12, precision + 9 if not exact else precision + 24)
        head = f"{data.title}  [source={data.source}, decks={data.decks}]"
        click.echo(head)
        click.echo(f"{'':>12}" + "".join(f"{c:>{width}}" for c in data.columns))
        for name, row in zip(data.rows, data.values):
            cells = "".join(f"{_fmt(v, precision, exact):>{width}}" for v in row)
            click.echo(f"{name:>12}{cells}")
        for note in data.notes:
            click.echo(f"  note: {note}")


@click.group()
@click.version_option(__version__, prog_name="einz")
def main() -> None:
    """Exact probabilities, simulation, and advice for the einz game."""


@main.command()
@click.argument("table_id", type=click.IntRange(1, 6))
@_apply(source_options)
@_apply(output_options)
def tables(table_id: int, decks: int, source: str, fmt: str, precision: int,
           exact_fractions: bool) -> None:
    """Print one of the six standard tables (1..6)."""
    try:
        data = build_table(table_id, decks=decks, source=source)
    except ValueError as e:
        _fail(EXIT_SEMANTIC, str(e))
    _emit_table(data, fmt, precision, exact_fractions)


@main.command()
@click.option("--players", "-p", default="stand17,stand17", show_default=True,
              help="Comma-separated seat policies, e.g. stand17,stand18.")
@_apply(source_options)
@_apply(output_options)
def match(players: str, decks: int, source: str, fmt: str, precision: int,
          exact_fractions: bool) -> None:
    """Open-game result probabilities for the given seat policies."""
    try:
        policies = [parse_policy(p) for p in players.split(",") if p.strip()]
    except ValueError as e:
        _fail(EXIT_PARSE, str(e))
    try:
        laws = [policy_summary(p, decks, source) for p in policies]
        result = open_match(laws)
    except ValueError as e:
        _fail(EXIT_SEMANTIC, str(e))
    rows = [f"player {i + 1} wins ({p.name})" for i, p in enumerate(policies)] + ["tied"]
    values = [[w] for w in result.win] + [[result.tie]]
    data = TableData(0, "open match result", ["probability"], rows, values, source, decks)
    _emit_table(data, fmt, precision, exact_fractions)


@main.command()
@click.option("--variant", type=click.Choice([v.value for v in DealerVariant]),
              default=None, help="Dealer variant; omit for the full summary grid.")
@click.option("--player", "player_policy", default="stand17", show_default=True)
@click.option("--dealer-policy", default="stand17", show_default=True)
@click.option("--v3-rule", type=click.Choice(["stand18", "chase"]), default="stand18",
              show_default=True)
@_apply(source_options)
@_apply(output_options)
def dealer(variant: str | None, player_policy: str, dealer_policy: str, v3_rule: str,
           decks: int, source: str, fmt: str, precision: int, exact_fractions: bool) -> None:
    """Dealer-game win probabilities (single variant or summary grid)."""
    try:
        if variant is None:
            data = dealer_summary_grid(decks=decks, source=source)
            _emit_table(data, fmt, precision, exact_fractions)
            return
        player = policy_summary(parse_policy(player_policy), decks, source)
        from .cards import fresh_shoe

        rules = DealerRules(v3_rule=v3_rule, source=source, dealer_shoe=fresh_shoe(decks))
        result = dealer_match(player, parse_policy(dealer_policy),
                              DealerVariant(variant), rules)
    except ValueError as e:
        _fail(EXIT_SEMANTIC, str(e))
    rows = ["player wins", "tied", "dealer wins"]
    values = [[result.win[0]], [result.tie], [result.win[1]]]
    data = TableData(0, f"dealer game {variant}", ["probability"], rows, values, source, decks)
    _emit_table(data, fmt, precision, exact_fractions)


@main.command()
@click.argument("state_file", type=click.Path(exists=True, dir_okay=False))
@_apply(output_options)
def scenario(state_file: str, fmt: str, precision: int, exact_fractions: bool) -> None:
    """Evaluate an observed state (JSON file) and recommend an action."""
    try:
        with open(state_file, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as e:
        _fail(EXIT_PARSE, f"{state_file}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    try:
        if isinstance(payload, dict) and payload.get("query") == "standing":
            _standing_query(payload, fmt, precision, exact_fractions)
            return
        state, options = parse_observed_state(payload)
        evals = evaluate_actions(state, source=options["source"],
                                 opponent_model=options["opponent_model"])
    except StateParseError as e:
        _fail(EXIT_PARSE, str(e))
    except (InconsistentStateError, ShoeTooSmallError) as e:
        _fail(EXIT_SEMANTIC, str(e))
    best = recommend(evals)
    best_eval = next(e for e in evals if e.action is best)
    if fmt == "json":
        click.echo(json.dumps({
            "evaluations": [
                {
                    "action": e.action.value,
                    "win": _json_value(e.win, precision, exact_fractions),
                    "tie": _json_value(e.tie, precision, exact_fractions),
                    "tie_breakdown": {str(m): _json_value(p, precision, exact_fractions)
                                      for m, p in sorted(e.tie_breakdown.items())},
                    "lose": _json_value(e.lose, precision, exact_fractions),
                    "rank": e.recommendation_rank,
                }
                for e in evals
            ],
            "recommendation": best.value,
            "win": _json_value(best_eval.win, precision, exact_fractions),
        }, indent=2, sort_keys=True))
    else:
        for e in evals:
            click.echo(
                f"{e.action.value:<9} win {_fmt(e.win, precision, exact_fractions)}"
                f"  tie {_fmt(e.tie, precision, exact_fractions)}"
                f"  lose {_fmt(e.lose, precision, exact_fractions)}  rank {e.recommendation_rank}"
            )
        click.echo(f"{best.value.upper()} (win {_fmt(best_eval.win, precision, False)})")


def _standing_query(payload: dict, fmt: str, precision: int, exact_fractions: bool) -> None:
    known = {"query", "decks", "policy", "my_cards", "opponent_cards", "source", "dealer_variant"}
    unknown = set(payload) - known
    if unknown:
        raise StateParseError(f"unknown fields: {sorted(unknown)}")
    result = standing_showdown(
        decks=payload.get("decks", 1),
        my_cards=payload["my_cards"],
        opponent_cards=payload["opponent_cards"],
        policy=parse_policy(payload.get("policy", "stand17")),
        source=payload.get("source", "exact"),
    )
    if fmt == "json":
        click.echo(json.dumps(
            {k: _json_value(v, precision, exact_fractions) for k, v in result.items()},
            indent=2, sort_keys=True))
    else:
        for k, v in result.items():
            click.echo(f"{k:<14} {_fmt(v, precision, exact_fractions)}")


@main.command()
@click.option("--hand", default="10,4", show_default=True, help="Comma-separated card values.")
@click.option("--stand-on", type=click.IntRange(12, 21), default=17, show_default=True)
@click.option("--decks", type=click.IntRange(1), default=1, show_default=True)
@click.option("--mode", type=click.Choice(["exact", "hybrid", "infinite"]),
              default="exact", show_default=True)
@_apply(output_options)
def change14(hand: str, stand_on: int, decks: int, mode: str, fmt: str,
             precision: int, exact_fractions: bool) -> None:
    """Compare continuing a 14-hand against discarding and redealing."""
    try:
        values = tuple(int(v) for v in hand.split(","))
        h = Hand(values)
    except ValueError as e:
        _fail(EXIT_PARSE, f"bad hand {hand!r}: {e}")
    try:
        state = ObservedState(
            my_hand=h, removed=tuple(sorted(values)),
            rules=RuleSet(decks=decks, change_on_14_allowed=True),
        )
        cont, restart = change_on_14_comparison(state, stand_on, mode=mode)
    except (InconsistentStateError, ValueError) as e:
        _fail(EXIT_SEMANTIC, str(e))
    if fmt == "json":
        click.echo(json.dumps({
            "hand": list(values), "stand_on": stand_on, "mode": mode,
            "continue": _json_value(cont, precision, exact_fractions),
            "restart": _json_value(restart, precision, exact_fractions),
            "better": "restart" if restart >= cont else "continue",
        }, indent=2, sort_keys=True))
    else:
        click.echo(f"continue {_fmt(cont, precision, exact_fractions)}")
        click.echo(f"restart  {_fmt(restart, precision, exact_fractions)}")
        click.echo("restart is the better choice" if restart >= cont
                   else "continuing is the better choice")


@main.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--engine", type=click.Choice(["numpy", "python"]), default="numpy",
              show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
def simulate_cmd(config_file: str, engine: str, fmt: str) -> None:
    """Run a seeded simulation from a JSON config file."""
    try:
        with open(config_file, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as e:
        _fail(EXIT_PARSE, f"{config_file}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    try:
        config = SimConfig.from_json(payload)
    except (KeyError, TypeError, ValueError) as e:
        _fail(EXIT_PARSE, f"bad simulation config: {e}")
    try:
        report = simulate(config, engine=engine)
    except Exception as e:  # arithmetic/internal failure
        _fail(EXIT_INTERNAL, f"simulation failed: {e}")
    if fmt == "json":
        click.echo(report.to_json())
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["event", "count", "estimate", "std_error"])
        for key in sorted(report.counts):
            writer.writerow([key, report.counts[key],
                             repr(report.estimates[key]), repr(report.std_errors[key])])
        click.echo(buf.getvalue(), nl=False)


main.add_command(simulate_cmd, name="simulate")


@main.command()
@click.option("--port", type=int, default=None, envvar="EINZ_PORT", show_default="8715",
              help="Port (or set EINZ_PORT).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed CORS origin (repeatable; default allows any).")
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the built web UI to serve at /.")
def serve(port: int | None, host: str, cors_origins: tuple[str, ...],
          static_dir: str | None) -> None:
    """Run the advisor HTTP service (blocks until interrupted)."""
    import uvicorn

    from .api import create_app

    app = create_app(cors_origins=list(cors_origins) or None, static_dir=static_dir)
    try:
        uvicorn.run(app, host=host, port=port if port is not None else 8715,
                    log_level="warning")
    except (OSError, SystemExit) as e:
        if isinstance(e, SystemExit) and not e.code:
            return
        _fail(EXIT_SEMANTIC, f"cannot serve on {host}:{port}: {e}")


if __name__ == "__main__":
    main()

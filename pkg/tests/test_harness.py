"""
Tests: configuration, aggregation, manifest, executor, experiments and CLI
"""

import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

sys.path.insert(0, str(Path(__file__).parent.parent))

from cli.rrnash_cli import EXIT_CONFIG, EXIT_FAILURE, cli
from core.dynamics import InfoMode, RunTrace
from core.errors import AggregationError, ConfigurationError, PairingError, ScheduleError
from core.game import GameKind
from core.harness import (
    RunExecutor,
    RunManifest,
    aggregate,
    build_jobs,
    check_experiment,
    dump_config,
    load_config,
    parse_config_text,
    prepare,
    run_experiment,
    variance_study,
    write_csv,
)
from core.harness.aggregate import AGGREGATE_COLUMNS
from core.sampling import SamplingMode, ScheduleKind

SMALL_CONFIG = """\
# small paired experiment
game.kind = ev
game.n = 3
game.m = 4
game.seed = 1
network.kind = ring
schedule.kind = constant
schedule.K = 8
runs.count = 2
runs.info = full, partial
"""

FIXED_TIME = datetime(2024, 1, 1, tzinfo=timezone.utc)


def _trace(e, mode="rr", info="full", seed=0):
    e = np.asarray(e, dtype=float)
    nan = np.full_like(e, np.nan)
    return RunTrace(
        mode=SamplingMode(mode),
        info=InfoMode(info),
        seed=seed,
        e=e,
        sq_err=nan,
        disagreement=nan,
        alpha=nan,
        w=nan,
        iterates=np.zeros((e.size, 1)),
    )


@pytest.fixture
def small_config():
    return parse_config_text(SMALL_CONFIG)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "experiment.cfg"
    path.write_text(SMALL_CONFIG)
    return path


class TestConfig:
    """Config file parsing and validation"""

    def test_minimal(self):
        """Only game.kind and schedule.kind are required"""
        config = parse_config_text("game.kind = edge\nschedule.kind = diminishing\n")
        assert config.game.kind is GameKind.EDGE
        assert config.schedule.kind is ScheduleKind.DIMINISHING
        assert config.schedule.alpha0 == "auto"
        assert config.runs.seed_list() == list(range(20))

    def test_values_and_lists(self, small_config):
        """Scalars and lists parse to typed values"""
        assert small_config.game.n == 3
        assert small_config.runs.info == [InfoMode.FULL, InfoMode.PARTIAL]
        assert small_config.runs.modes == [SamplingMode.RR, SamplingMode.SGD]
        assert small_config.runs.seed_list(offset=10) == [10, 11]

    def test_explicit_seeds_and_ranges(self):
        """Explicit seeds, ranges and step sizes"""
        config = parse_config_text(
            "game.kind = ev\ngame.ev.q = 1.5, 2.5\nschedule.kind = constant\n"
            "schedule.alpha0 = 0.01\nruns.seeds = 7\n"
        )
        assert config.game.ev.q == (1.5, 2.5)
        assert config.schedule.alpha0 == 0.01
        assert config.runs.seed_list() == [7]

    def test_dump_reloads_equal(self, small_config):
        """Dumped config parses back to the same model"""
        assert parse_config_text(dump_config(small_config)) == small_config

    def test_bad_enum_value(self):
        """A typo in game.kind names the key and its line"""
        with pytest.raises(ConfigurationError) as exc_info:
            parse_config_text("schedule.kind = constant\ngame.kind = evv\n")
        assert exc_info.value.key == "game.kind"
        assert exc_info.value.line == 2

    def test_duplicate_key(self):
        """A repeated key is reported at its second line"""
        with pytest.raises(ConfigurationError) as exc_info:
            parse_config_text("game.kind = ev\ngame.kind = edge\nschedule.kind = constant\n")
        assert exc_info.value.line == 2

    def test_unknown_key(self):
        """Unknown keys are named with their line"""
        with pytest.raises(ConfigurationError) as exc_info:
            parse_config_text("game.kind = ev\ngame.players = 3\nschedule.kind = constant\n")
        assert exc_info.value.key == "game.players"
        assert exc_info.value.line == 2

    def test_missing_section(self):
        """The schedule section is required"""
        with pytest.raises(ConfigurationError) as exc_info:
            parse_config_text("game.kind = ev\n")
        assert exc_info.value.key == "schedule"

    def test_wrong_type(self):
        """Non-numeric n is rejected"""
        with pytest.raises(ConfigurationError) as exc_info:
            parse_config_text("game.kind = ev\ngame.n = many\nschedule.kind = constant\n")
        assert exc_info.value.key == "game.n"

    def test_malformed_line(self):
        """A line without '=' is rejected"""
        with pytest.raises(ConfigurationError) as exc_info:
            parse_config_text("game.kind = ev\njust words\n")
        assert exc_info.value.line == 2

    def test_invalid_range(self):
        """Reversed range bounds are rejected"""
        with pytest.raises(ConfigurationError):
            parse_config_text("game.kind = ev\ngame.ev.q = 2.0, 1.0\nschedule.kind = constant\n")

    def test_missing_file(self, tmp_path):
        """Absent file is a configuration error"""
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.cfg")


class TestAggregate:
    """Per-epoch mean and sample std"""

    def test_mean_and_std(self):
        """e_K of -1 and -3: mean -2, std √2"""
        stats = aggregate([_trace([0.0, -1.0], seed=0), _trace([0.0, -3.0], seed=1)])
        mean, std = stats.final("rr_full")
        assert mean == pytest.approx(-2.0)
        assert std == pytest.approx(np.sqrt(2.0))

    def test_identical_runs(self):
        """Identical traces have zero spread"""
        stats = aggregate([_trace([0.0, -0.5, -1.0], seed=s) for s in range(4)])
        assert np.all(stats.arm_frame("rr_full")["std_e"] == 0.0)
        assert stats.counts == {"rr_full": 4}

    def test_single_run_std_zero(self):
        """One run per arm reports std 0"""
        stats = aggregate([_trace([0.0, -1.0])])
        assert stats.final("rr_full") == (-1.0, 0.0)

    def test_arms_kept_apart(self):
        """Arms aggregate separately"""
        stats = aggregate([_trace([0.0, -1.0]), _trace([0.0, -2.0], mode="sgd")])
        assert stats.arms == ["rr_full", "sgd_full"]
        assert stats.final("sgd_full")[0] == -2.0

    def test_empty(self):
        """Nothing to aggregate"""
        with pytest.raises(AggregationError):
            aggregate([])

    def test_mismatched_horizons(self):
        """Traces of different lengths cannot be stacked"""
        with pytest.raises(AggregationError):
            aggregate([_trace([0.0, -1.0]), _trace([0.0, -1.0, -2.0], seed=1)])

    def test_unknown_arm(self):
        """Asking for an absent arm fails"""
        with pytest.raises(AggregationError):
            aggregate([_trace([0.0, -1.0])]).final("sgd_partial")

    def test_csv(self, tmp_path):
        """Long-format CSV sorted by arm then epoch"""
        stats = aggregate([_trace([0.0, -1.0], mode="sgd"), _trace([0.0, -1.5])])
        path = write_csv(stats, tmp_path / "aggregate.csv")
        frame = pd.read_csv(path)
        assert tuple(frame.columns) == AGGREGATE_COLUMNS
        assert list(frame["arm"]) == ["rr_full", "rr_full", "sgd_full", "sgd_full"]
        assert list(frame["k"]) == [0, 1, 0, 1]


class TestRunManifest:
    """Hash-chained manifest"""

    def _paired(self, manifest, x0_hash="x0"):
        for arm, x0 in (("rr_partial", "x0"), ("sgd_partial", x0_hash)):
            manifest.record(
                "run",
                arm=arm,
                seed=0,
                game_hash="g",
                network_hash="n",
                x0_hash=x0,
                schedule_hash="s",
            )

    def test_chain(self):
        """Each entry links to its predecessor"""
        manifest = RunManifest()
        first = manifest.record("game", game_hash="g")
        second = manifest.record("network", network_hash="n")
        assert first.previous_hash is None
        assert second.previous_hash == first.entry_hash
        assert manifest.verify_chain()

    def test_tampering_breaks_chain(self):
        """Editing an entry breaks verification"""
        manifest = RunManifest()
        manifest.record("game", game_hash="g")
        manifest.record("run", arm="rr_full", seed=0)
        manifest.entries[0].fields["game_hash"] = "h"
        assert not manifest.verify_chain()

    def test_fields_are_strings(self):
        """Field values are stored as strings"""
        entry = RunManifest().record("run", seed=3, passed=True)
        assert entry.fields == {"seed": "3", "passed": "True"}

    def test_search(self):
        """Search by kind and field values"""
        manifest = RunManifest()
        self._paired(manifest)
        assert len(manifest.search("run")) == 2
        assert len(manifest.search("run", arm="sgd_partial", seed=0)) == 1

    def test_pairing_ok(self):
        """Paired arms share their hashes"""
        manifest = RunManifest()
        self._paired(manifest)
        manifest.check_pairing()

    def test_pairing_violation(self):
        """Different start points break pairing"""
        manifest = RunManifest()
        self._paired(manifest, x0_hash="other")
        with pytest.raises(PairingError):
            manifest.check_pairing()

    def test_write_and_read(self, tmp_path):
        """Written manifest reads back with the same hashes"""
        manifest = RunManifest()
        manifest.record("experiment", K=10)
        self._paired(manifest)
        path = tmp_path / "manifest.txt"
        manifest.write(path, generated_at=FIXED_TIME)
        text = path.read_text()
        assert text.startswith("generated_at = 2024-01-01T00:00:00+00:00\nentries = 3\n")
        loaded = RunManifest.read(path)
        assert loaded.verify_chain()
        assert [entry.entry_hash for entry in loaded.entries] == [entry.entry_hash for entry in manifest.entries]


class TestRunExecutor:
    """Job execution"""

    async def test_execute_counts(self, small_config):
        """One job runs and is counted"""
        setup = prepare(small_config)
        jobs = build_jobs(setup, [0])
        executor = RunExecutor()
        trace = await executor.execute(jobs[0])
        assert trace.K == setup.K
        assert executor.get_stats()["completed"] == 1

    def test_results_sorted_by_arm_then_seed(self, small_config):
        """Results come back ordered by arm, then seed"""
        setup = prepare(small_config)
        traces = RunExecutor().run(build_jobs(setup, [1, 0]))
        keys = [(trace.arm, trace.seed) for trace in traces]
        assert keys == sorted(keys)
        assert len(traces) == 8

    def test_invalid_worker_count(self):
        """At least one worker"""
        with pytest.raises(ValueError):
            RunExecutor(jobs=0)

    @pytest.mark.slow
    def test_process_pool_matches_inline(self, small_config):
        """Process pool gives the same traces as inline execution"""
        setup = prepare(small_config)
        jobs = build_jobs(setup, [0, 1])
        inline = RunExecutor(jobs=1).run(jobs)
        pooled = RunExecutor(jobs=2).run(jobs)
        for a, b in zip(inline, pooled):
            assert a.arm == b.arm and a.seed == b.seed
            assert np.array_equal(a.e, b.e)


class TestExperiment:
    """Experiment orchestration and artifacts"""

    def test_artifacts(self, small_config, tmp_path):
        """Artifact directory, aggregate and a verified, paired manifest"""
        out = run_experiment(small_config, tmp_path / "out", generated_at=FIXED_TIME)
        for name in ("config.txt", "ne.txt", "conditions.txt", "bounds.txt", "aggregate.csv", "manifest.txt"):
            assert (out / name).exists(), name
        assert (out / "traces" / "rr_partial_seed0.csv").exists()
        assert (out / "traces" / "sgd_full_seed1.meta").exists()

        frame = pd.read_csv(out / "aggregate.csv")
        assert set(frame["arm"]) == {"rr_full", "sgd_full", "rr_partial", "sgd_partial"}
        assert len(frame) == 4 * (small_config.schedule.K + 1)

        manifest = RunManifest.read(out / "manifest.txt")
        assert manifest.verify_chain()
        manifest.check_pairing()
        runs = manifest.search("run")
        assert len(runs) == 8
        assert all(run.fields["grad_evals_per_player_per_epoch"] == "4" for run in runs)

    def test_reproducible(self, small_config, tmp_path):
        """Same config and seeds: byte-identical aggregate and manifest"""
        first = run_experiment(small_config, tmp_path / "a", generated_at=FIXED_TIME)
        second = run_experiment(small_config, tmp_path / "b", generated_at=FIXED_TIME)
        for name in ("aggregate.csv", "manifest.txt", "bounds.txt", "traces/rr_partial_seed1.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_failing_constant_schedule(self, tmp_path):
        """Failing conditions stop before any trace is written"""
        config = parse_config_text(SMALL_CONFIG + "schedule.alpha0 = 10.0\n")
        out = tmp_path / "fail"
        with pytest.raises(ScheduleError):
            run_experiment(config, out)
        assert "FAIL" in (out / "conditions.txt").read_text()
        assert not (out / "traces").exists()

    def test_diminishing_has_no_bounds(self, tmp_path):
        """Diminishing schedules write no bounds"""
        config = parse_config_text(
            SMALL_CONFIG.replace("schedule.kind = constant", "schedule.kind = diminishing")
        )
        out = run_experiment(config, tmp_path / "dim", generated_at=FIXED_TIME)
        assert (out / "bounds.txt").read_text() == "not applicable\n"

    def test_check_reports_bounds(self, small_config):
        """check builds the setup and the bounds without running"""
        setup, bounds = check_experiment(small_config)
        assert setup.report.passed
        assert bounds is not None
        assert bounds.m == 4 and bounds.n == 3

    def test_variance_study_slope(self, tmp_path):
        """Variance study slope near 2 and its report file"""
        config = parse_config_text(
            "game.kind = ev\ngame.n = 3\ngame.m = 5\nschedule.kind = constant\n"
            "variance.alphas = 0.004, 0.002, 0.001\nvariance.num_perms = 64\n"
        )
        frame, slope = variance_study(config, tmp_path)
        assert list(frame["alpha"]) == [0.004, 0.002, 0.001]
        assert slope == pytest.approx(2.0, abs=0.05)
        assert "bound_dominates = " in (tmp_path / "variance.txt").read_text()


class TestCLI:
    """Command-line entry points"""

    def test_run(self, config_file, tmp_path):
        """run writes the artifact directory"""
        out = tmp_path / "cli_out"
        result = CliRunner().invoke(cli, ["run", str(config_file), "--output", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "manifest.txt").exists()

    def test_solve_ne(self, config_file):
        """solve-ne prints the equilibrium"""
        result = CliRunner().invoke(cli, ["solve-ne", str(config_file)])
        assert result.exit_code == 0, result.output
        assert "method = affine" in result.output
        assert "x_star.3 = " in result.output

    def test_check(self, config_file):
        """check prints conditions and bounds"""
        result = CliRunner().invoke(cli, ["check", str(config_file)])
        assert result.exit_code == 0, result.output
        assert "partial_info_rhs = " in result.output

    def test_check_failing_schedule(self, tmp_path):
        """check exits 2 on a failing schedule"""
        path = tmp_path / "bad_step.cfg"
        path.write_text(SMALL_CONFIG + "schedule.alpha0 = 10.0\n")
        result = CliRunner().invoke(cli, ["check", str(path)])
        assert result.exit_code == EXIT_FAILURE

    def test_run_failing_schedule(self, tmp_path):
        """run exits 2 on a failing schedule"""
        path = tmp_path / "bad_step.cfg"
        path.write_text(SMALL_CONFIG + "schedule.alpha0 = 10.0\n")
        result = CliRunner().invoke(cli, ["run", str(path), "--output", str(tmp_path / "out")])
        assert result.exit_code == EXIT_FAILURE

    def test_bad_config(self, tmp_path):
        """Invalid config exits 1"""
        path = tmp_path / "typo.cfg"
        path.write_text("game.kind = evv\nschedule.kind = constant\n")
        result = CliRunner().invoke(cli, ["run", str(path)])
        assert result.exit_code == EXIT_CONFIG

    def test_missing_config(self, tmp_path):
        """Absent config file maps to the configuration exit code"""
        result = CliRunner().invoke(cli, ["solve-ne", str(tmp_path / "absent.cfg")])
        assert result.exit_code == EXIT_CONFIG

    def test_random_network_without_probability(self, tmp_path):
        """An unbuildable network is a configuration error, not a traceback"""
        path = tmp_path / "no_p.cfg"
        path.write_text(SMALL_CONFIG.replace("network.kind = ring", "network.kind = random"))
        result = CliRunner().invoke(cli, ["check", str(path)])
        assert result.exit_code == EXIT_CONFIG
        assert "config error" in result.output

    def test_global_flags(self, config_file, tmp_path):
        """--seed-offset, --jobs and --debug-inner go before the command"""
        out = tmp_path / "cli_out"
        args = ["--seed-offset", "5", "--jobs", "2", "--debug-inner", "run", str(config_file), "--output", str(out)]
        result = CliRunner().invoke(cli, args)
        assert result.exit_code == 0, result.output
        assert (out / "traces" / "rr_full_seed5.csv").exists()
        assert (out / "traces" / "rr_full_seed5_inner.csv").exists()

    def test_seed_offset_is_not_a_command_option(self, config_file):
        """--seed-offset is rejected after the command"""
        result = CliRunner().invoke(cli, ["check", str(config_file), "--seed-offset", "5"])
        assert result.exit_code != 0
        assert "No such option" in result.output

    def test_check_with_seed_offset(self, config_file):
        """check accepts the global seed offset"""
        result = CliRunner().invoke(cli, ["--seed-offset", "3", "check", str(config_file)])
        assert result.exit_code == 0, result.output

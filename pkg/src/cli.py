"""
Command-line interface.

    python -m src.cli plan    --config run.toml
    python -m src.cli scan    --config run.toml --workers 8 --strict
    python -m src.cli profile --preset two-color-nu2
    python -m src.cli report  --config run.toml

Every subcommand writes only into the configured output directory, echoes the
effective configuration there and keeps `manifest.json` listing each artifact
with its SHA-256 digest.

Exit codes: 0 success, 2 configuration error, 3 numerical failure under --strict.
"""

import argparse
import hashlib
import logging
import math
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

import orjson
from pydantic import ValidationError

from . import __version__
from .channelplanner import channel_atlas, format_atlas_tsv
from .errors import ConfigError, CoverageError
from .models import PointStatus
from .orchestrator import evaluate_point, run_intensity_scan, run_spectrum_scan
from .presets import PRESETS
from .reports import angular_aperture_report, band_merge_report, format_aperture, format_band_merge
from .schemas import OmegaGrid, ProfilePoint, RunConfig, ScanSpec, SpectrumTable
from .settings import get_checkpoint_dirname, get_default_workers, get_log_level
from .templating import render
from .vortexproj import ProfileGrid, export_profile, transverse_profile

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

MANIFEST_NAME = "manifest.json"


# ============================================================================
# Configuration
# ============================================================================


def _config_error(error: ValidationError) -> ConfigError:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "config"
    return ConfigError(key, first["msg"].removeprefix("Value error, "))


def load_config_data(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise _config_error(e) from e


def parse_config(path: Path) -> RunConfig:
    """Read and fully validate a TOML run configuration."""
    if not path.is_file():
        raise ConfigError(str(path), "file not found")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(str(path), f"malformed TOML: {e}") from e
    return load_config_data(data)


def render_effective_config(config: RunConfig) -> str:
    return render("effective_config.toml.j2", config=config)


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Flags replace the matching configuration keys."""
    data = config.model_dump()
    if args.out is not None:
        data["output"]["directory"] = args.out
    if args.workers is not None:
        data["workers"] = args.workers
    if args.strict:
        data["strict"] = True
    return load_config_data(data)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("config", "--config and --preset are mutually exclusive")
    if args.preset:
        config = PRESETS[args.preset]()
    elif args.config:
        config = parse_config(Path(args.config))
    else:
        raise ConfigError("config", "either --config or --preset is required")
    return apply_overrides(config, args)


# ============================================================================
# Artifacts
# ============================================================================


def file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, written: list[Path]) -> Path:
    """
    Merge freshly written files into the manifest. Entries whose file has
    disappeared are dropped; all digests are recomputed.
    """
    path = out / MANIFEST_NAME
    known: set[str] = set()
    if path.exists():
        try:
            known = {entry["path"] for entry in orjson.loads(path.read_bytes())["files"]}
        except (orjson.JSONDecodeError, KeyError, TypeError):
            logger.warning("Rebuilding unreadable manifest")
    known.update(p.relative_to(out).as_posix() for p in written)

    files = [
        {"path": name, "sha256": file_digest(out / name), "bytes": (out / name).stat().st_size}
        for name in sorted(known)
        if (out / name).is_file()
    ]
    manifest = {"code_version": __version__, "files": files}
    path.write_bytes(orjson.dumps(manifest, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2))
    return path


def rung_directory(out: Path, a0s: tuple[float, ...]) -> Path:
    return out / ("a0_" + "_".join(f"{a0:g}" for a0 in a0s))


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    return path


# ============================================================================
# Subcommands
# ============================================================================


def command_plan(config: RunConfig, out: Path) -> tuple[int, list[Path]]:
    spec = config.to_scan_spec()
    theta = spec.theta_rad[0]
    rows = channel_atlas(spec.laser, spec.n_max, spec.electron, theta)
    metadata = {
        "code_version": __version__,
        "n_max": str(spec.n_max),
        "theta_rad": repr(theta),
        "electron_energy_ev": repr(spec.electron_energy_ev),
        "omega1_ev": repr(spec.laser.omega1_ev),
    }
    return EXIT_OK, [_write_text(out / "atlas.tsv", format_atlas_tsv(rows, metadata))]


def _point_spec(spec: ScanSpec, omega: float, theta: float) -> ScanSpec:
    return spec.model_copy(
        update={"omega_grid": OmegaGrid(min_ev=omega, max_ev=omega, count=1), "theta_rad": (theta,)}
    )


def _profile_modes(spec: ScanSpec, point: ProfilePoint, table: SpectrumTable | None) -> dict[int, complex]:
    theta = point.theta_mrad * 1e-3
    if table is not None and not point.standalone:
        on_grid = min(table.thetas, key=lambda t: abs(t - theta))
        omegas = {row.omega_ev for row in table.rows_at(on_grid)}
        omega = min(omegas, key=lambda w: abs(w - point.omega_ev))
        return table.modes_at(omega, on_grid)
    result = evaluate_point(_point_spec(spec, point.omega_ev, theta), 0, 0)
    if result.status is PointStatus.FAILED:
        logger.error(f"❌ Profile point ω'={point.omega_ev:.6g} eV failed: {result.error_message}")
        return {}
    return {
        mode.ell: math.sqrt(mode.weight) * complex(math.cos(mode.phase), math.sin(mode.phase))
        for mode in result.modes
    }


def write_profiles(config: RunConfig, out: Path, table: SpectrumTable | None = None) -> tuple[int, list[Path]]:
    spec = config.to_scan_spec()
    written: list[Path] = []
    failures = 0
    for index, point in enumerate(config.profile_points):
        modes = _profile_modes(spec, point, table)
        if not modes:
            failures += 1
            logger.warning(f"No emission to profile at ω'={point.omega_ev:.6g} eV, θ={point.theta_mrad} mrad")
            continue
        k_perp = point.omega_ev * math.sin(point.theta_mrad * 1e-3)
        profile = transverse_profile(modes, k_perp, ProfileGrid())
        written += export_profile(
            profile,
            out / "profiles",
            f"profile_{index:02d}",
            image_size=config.output.image_size,
            images=config.output.emit_images,
        )
    return failures, written


def command_scan(config: RunConfig, out: Path) -> tuple[int, list[Path]]:
    spec = config.to_scan_spec()
    workers = config.workers or get_default_workers()
    checkpoints = out / get_checkpoint_dirname()
    written: list[Path] = []

    if config.intensity_ladder:
        tables, report = run_intensity_scan(spec, config.intensity_ladder, workers, checkpoints)
        for a0s, table in zip(config.intensity_ladder, tables):
            written += table.write(rung_directory(out, a0s))
        written.append(_write_text(out / "band_merge_report.txt", format_band_merge(report)))
        written += _aperture(tables, out)
    else:
        tables = [run_spectrum_scan(spec, workers, checkpoints)]
        written += tables[0].write(out)

    failed = sum(len(table.failed_points()) for table in tables)
    if config.output.emit_profiles and config.profile_points:
        _, profiles = write_profiles(config, out, tables[0])
        written += profiles

    if failed and config.strict:
        logger.error(f"💥 {failed} point(s) failed under --strict")
        return EXIT_NUMERICAL, written
    return EXIT_OK, written


def command_profile(config: RunConfig, out: Path) -> tuple[int, list[Path]]:
    if not config.profile_points:
        logger.warning("No profile points configured")
        return EXIT_OK, []
    failures, written = write_profiles(config, out)
    return (EXIT_NUMERICAL if failures and config.strict else EXIT_OK), written


def _aperture(tables: list[SpectrumTable], out: Path) -> list[Path]:
    try:
        report = angular_aperture_report(tables)
    except CoverageError as e:
        logger.warning(f"Skipping aperture report: {e}")
        return []
    return [_write_text(out / "aperture_report.txt", format_aperture(report))]


def command_report(config: RunConfig, out: Path) -> tuple[int, list[Path]]:
    directories = [rung_directory(out, a0s) for a0s in config.intensity_ladder] or [out]
    tables = []
    for directory in directories:
        paths = sorted(directory.glob("spectrum_theta*.tsv"))
        if not paths:
            raise ConfigError(str(directory), "no spectrum tables found; run `scan` first")
        tables.append(SpectrumTable.read(paths))

    report = band_merge_report(tables, config.n_max)
    written = [_write_text(out / "band_merge_report.txt", format_band_merge(report))]
    written += _aperture(tables, out)
    return EXIT_OK, written


COMMANDS = {
    "plan": command_plan,
    "scan": command_scan,
    "profile": command_profile,
    "report": command_report,
}


# ============================================================================
# Entry point
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("configuration")
    source.add_argument("--config", metavar="PATH", help="TOML run configuration")
    source.add_argument("--preset", choices=sorted(PRESETS), help="built-in run configuration")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides output.directory)")
    common.add_argument("--workers", type=int, metavar="N", help="worker processes (overrides workers)")
    common.add_argument("--strict", action="store_true", help="exit with 3 if any point fails")
    common.add_argument(
        "--seedless",
        action="store_true",
        help="reserved; rejected because no random numbers are ever drawn",
    )

    parser = argparse.ArgumentParser(
        prog="vortex-ncs", description="Vortex-resolved nonlinear Compton scattering simulator"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subcommands = parser.add_subparsers(dest="command", required=True, metavar="{plan,scan,profile,report}")
    subcommands.add_parser("plan", parents=[common], help="channel atlas with degeneracies and OAM predictions")
    subcommands.add_parser("scan", parents=[common], help="mode-resolved spectrum or intensity scan")
    subcommands.add_parser("profile", parents=[common], help="transverse intensity and phase maps")
    subcommands.add_parser("report", parents=[common], help="band-merge and aperture summaries")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=get_log_level(), format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )

    if args.seedless:
        print(
            "error: --seedless is reserved; every run is deterministic and draws no random numbers",
            file=sys.stderr,
        )
        return EXIT_CONFIG

    try:
        config = resolve_config(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(config.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    written = [_write_text(out / "effective_config.toml", render_effective_config(config))]
    code = EXIT_CONFIG
    try:
        code, produced = COMMANDS[args.command](config, out)
        written += produced
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
    finally:
        write_manifest(out, written)
    logger.info(f"🎉 {args.command} finished with exit code {code}")
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

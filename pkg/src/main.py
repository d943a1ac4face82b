import functools
import json
import logging
import sys
from dataclasses import replace
from itertools import combinations
from pathlib import Path

import click
import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from src.camera import Intrinsics, IntrinsicsSpec
from src.config import get_config
from src.errors import AutocalError, ComputationError, Infeasible, InvalidInputError
from src.manifest import RunManifest, manifest_path
from src.metrics import CSV_COLUMNS, evaluate, read_rows, summarize, summary_columns, write_rows
from src.monodromy import (
    MonodromySettings,
    StartBundle,
    load_bundle,
    monodromy_solve,
    reanchor,
    seed_pair,
)
from src.pipeline import solve_instance
from src.polysys import build_system, certify_minimal, minimal_classes, synthetic_instance
from src.robust import MsacSettings, msac_calibrate
from src.scene import (
    DEFAULT_INTRINSICS,
    NOISE_GRID,
    Observations,
    Scene,
    SceneConfig,
    add_noise,
    generate_degenerate_scene,
    generate_scene,
    project,
)
from src.taxonomy import CSV_COLUMNS as TABLE_COLUMNS
from src.taxonomy import (
    SHIPPED,
    EquationSelection,
    Status,
    available_equations,
    brute_force_isomorphic,
    classify,
    coloring_to_selection,
    enumerate_catalog,
    feasibility,
    feasibility_table,
    mask_to_coloring,
    shipped,
    unknown_count,
)
from src.taxonomy.enumeration import all_masks as dropped_masks
from src.taxonomy.enumeration import bit_count
from src.trials import TrialConfig, run_trial

console = Console(stderr=True)
logger = logging.getLogger("src")

BRUTE_CHECK_MAX_POINTS = 5
CLASS_COUNT_LIMIT = 200_000


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
    )


def handle_errors(command):
    """Map library errors to a one-line message and the error's exit code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except AutocalError as e:
            logger.debug("Command failed", exc_info=True)
            console.print(f"[red]✗ {type(e).__name__}: {e}[/red]")
            sys.exit(e.exit_code)

    return wrapper


def _output(ctx: click.Context, output: str | None, default_name: str) -> Path:
    if output:
        return Path(output)
    return ctx.obj["out"] / default_name


def _write_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
    return path


def _read_json(path: str):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read {path}: {e}") from e


def _parse_intrinsics(raw: str | None) -> Intrinsics | None:
    if raw is None:
        return None
    if raw.endswith(".json"):
        return Intrinsics.from_dict(_read_json(raw))
    try:
        values = [float(v) for v in raw.split(",")]
    except ValueError as e:
        raise InvalidInputError(f"intrinsics must be f,g,u,v,s, got {raw!r}") from e
    if len(values) != 5:
        raise InvalidInputError(f"intrinsics must be f,g,u,v,s, got {raw!r}")
    return Intrinsics(*values)


def _resolve_system(relaxation: str | None, code: str | None, views: int, class_id: int | None):
    """A shipped relaxation by name, or a class of the catalog for (code, views)."""
    if relaxation is not None:
        rel = shipped(relaxation)
        system = build_system(rel.selection(), rel.spec, rel.n_points, rel.num_views)
        return system, {"relaxation": rel.name, "expected_solutions": rel.expected_solutions}
    if code is None or class_id is None:
        raise InvalidInputError("give a shipped relaxation or --spec with --class-id")
    spec = IntrinsicsSpec.parse(code)
    row = feasibility(spec, views)
    if row.status is Status.INFEASIBLE:
        raise Infeasible(f"{code} with {views} views is infeasible")
    catalog = enumerate_catalog(row.N_min, views, row.n_drop)
    if not 0 <= class_id < len(catalog):
        raise InvalidInputError(f"class id {class_id} outside 0..{len(catalog) - 1}")
    coloring = catalog.coloring(class_id)
    system = build_system(coloring_to_selection(coloring, views), spec, row.N_min, views)
    return system, {"spec": code, "class_id": class_id, "coloring": coloring.to_json()}


@click.group()
@click.option("--seed", type=int, default=None, help="Base random seed")
@click.option("--threads", type=int, default=None, help="Worker threads for path tracking")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
)
@click.pass_context
def cli(ctx: click.Context, seed, threads, out, log_level):
    """Minimal relaxations of camera autocalibration"""
    config = get_config()
    logging.basicConfig(
        level=(log_level or config.log_level).upper(),
        format="%(asctime)s [%(levelname)s] %(message)s",
        stream=sys.stderr,
        force=True,
    )
    out_dir = Path(out) if out else config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx.obj = {
        "config": config,
        "seed": config.seed if seed is None else seed,
        "threads": config.threads if threads is None else max(threads, 1),
        "out": out_dir,
    }


@cli.command()
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.option("--with-classes", is_flag=True, help="Count classes where enumeration is cheap")
@click.pass_context
@handle_errors
def table(ctx: click.Context, output, with_classes: bool):
    """Feasibility of every intrinsics mask with 2 and 3 views."""
    rows = feasibility_table()
    if with_classes:
        counted = []
        for row in rows:
            if row.n_drop is not None and row.raw_colorings <= CLASS_COUNT_LIMIT:
                row = replace(row, classes=len(enumerate_catalog(row.N_min, row.M, row.n_drop)))
            counted.append(row)
        rows = counted
    records = [row.csv_row() for row in rows]

    if output is None:
        click.echo(",".join(TABLE_COLUMNS))
        for r in records:
            click.echo(",".join(str(r[c]) for c in TABLE_COLUMNS))
        return

    path = write_rows(Path(output), records, TABLE_COLUMNS)
    RunManifest("table", settings={"with_classes": with_classes}).finish(path)
    view = Table(title="Feasibility")
    for column in TABLE_COLUMNS:
        view.add_column(column)
    for r in records:
        view.add_row(*(str(r[c]) for c in TABLE_COLUMNS))
    console.print(view)
    console.print(f"[green]✓[/green] Wrote {len(records)} rows to {path}")


def _brute_check(catalog, num_views: int) -> None:
    if catalog.n_points > BRUTE_CHECK_MAX_POINTS:
        raise InvalidInputError(f"--brute-check supports N <= {BRUTE_CHECK_MAX_POINTS}")
    masks = dropped_masks(bit_count(catalog.n_points, num_views), catalog.n_drop)
    colorings = [mask_to_coloring(int(m), catalog.n_points, num_views) for m in masks]
    partition = classify(colorings)
    if len(partition) != len(catalog):
        raise ComputationError(
            f"line-graph classes ({len(partition)}) disagree with orbits ({len(catalog)})"
        )
    representatives = catalog.colorings()
    for a, b in combinations(range(len(representatives)), 2):
        if brute_force_isomorphic(representatives[a], representatives[b]):
            raise ComputationError(f"classes {a} and {b} are isomorphic under the oracle")
    console.print(f"[green]✓[/green] Brute-force check passed for {len(catalog)} classes")


@cli.command(name="enumerate")
@click.argument("code")
@click.option("--views", "-m", type=click.IntRange(2, 3), default=3, show_default=True)
@click.option("--points", "-n", type=int, default=None, help="Points (default: minimal N)")
@click.option("--certify/--no-certify", default=False, help="Keep rank-certified classes only")
@click.option("--brute-check", is_flag=True, help="Cross-check against the factorial oracle")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@handle_errors
def enumerate_cmd(ctx: click.Context, code, views, points, certify, brute_check, output):
    """Isomorphism classes of the relaxations of CODE (e.g. fguvs)."""
    spec = IntrinsicsSpec.parse(code)
    row = feasibility(spec, views)
    if row.status is Status.INFEASIBLE:
        raise Infeasible(f"{spec.code} with {views} views is infeasible")
    n_points = points or row.N_min
    n_drop = available_equations(views, n_points) - unknown_count(spec.L, views, n_points)

    with console.status(f"Enumerating N={n_points}, drop={n_drop}..."):
        catalog = enumerate_catalog(n_points, views, n_drop)
    if brute_check:
        _brute_check(catalog, views)

    kept = list(range(len(catalog)))
    if certify:
        with console.status(f"Certifying {len(catalog)} classes..."):
            kept = minimal_classes(spec, views, catalog.colorings(), ctx.obj["seed"])

    path = _output(ctx, output, f"catalog_{spec.code}_m{views}_n{n_points}.jsonl")
    path.parent.mkdir(parents=True, exist_ok=True)
    records = list(catalog.records())
    with open(path, "w") as f:
        header = {
            "header": True,
            "spec": spec.code,
            "count": len(kept),
            "certified": certify,
            "manifest": manifest_path(path).name,
        }
        f.write(json.dumps(header) + "\n")
        for class_id in kept:
            f.write(json.dumps(records[class_id]) + "\n")
    RunManifest(
        "enumerate",
        settings={"spec": spec.code, "views": views, "points": n_points, "certify": certify},
        seeds=[ctx.obj["seed"]],
    ).finish(path)
    console.print(f"[green]✓[/green] {len(kept)} classes written to {path}")
    click.echo(len(kept))


@cli.command()
@click.argument("relaxations", nargs=-1)
@click.option("--overconstrained", is_flag=True, help="Also test the undropped calibrated system")
@click.pass_context
@handle_errors
def certify(ctx: click.Context, relaxations, overconstrained: bool):
    """Rank certificates of shipped relaxations at a synthetic point."""
    names = relaxations or tuple(SHIPPED)
    view = Table(title="Minimality certificates")
    for column in ("system", "n", "rank_x", "rank_full", "sigma_min", "passed"):
        view.add_column(column)

    systems = []
    for name in names:
        rel = shipped(name)
        systems.append((name, build_system(rel.selection(), rel.spec, rel.n_points, rel.num_views)))
    if overconstrained:
        rel = shipped("calibrated")
        everything = EquationSelection.all_equations(rel.n_points, rel.num_views)
        systems.append(
            ("calibrated-all", build_system(everything, rel.spec, rel.n_points, 3, strict=False))
        )

    reports = {}
    for name, system in systems:
        instance = synthetic_instance(system, ctx.obj["seed"])
        report = certify_minimal(system, instance.parameters, instance.solution)
        reports[name] = report.to_dict()
        view.add_row(
            name,
            str(report.n),
            str(report.rank_x),
            str(report.rank_full),
            f"{report.min_singular_x:.2e}",
            "[green]yes[/green]" if report.passed else "[red]no[/red]",
        )
    console.print(view)
    click.echo(json.dumps(reports))


@cli.command(name="solve-offline")
@click.argument("relaxation", required=False)
@click.option("--spec", "code", default=None, help="Intrinsics code instead of a shipped name")
@click.option("--views", "-m", type=click.IntRange(2, 3), default=3)
@click.option("--class-id", type=int, default=None)
@click.option("--target", type=int, default=None, help="Stop once this many solutions are known")
@click.option("--stall-loops", type=int, default=5, show_default=True)
@click.option("--max-loops", type=int, default=500, show_default=True)
@click.option("--no-reanchor", is_flag=True, help="Keep the synthetic anchor")
@click.option("--degenerate", is_flag=True, help="Seed from a degenerate-sphere scene")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@handle_errors
def solve_offline(
    ctx: click.Context,
    relaxation,
    code,
    views,
    class_id,
    target,
    stall_loops,
    max_loops,
    no_reanchor,
    degenerate,
    output,
):
    """Find every solution of one instance by monodromy and write a start bundle."""
    system, meta = _resolve_system(relaxation, code, views, class_id)
    seed = ctx.obj["seed"]
    settings = MonodromySettings(
        stall_loops=stall_loops,
        max_loops=max_loops,
        target=target,
        reanchor=not no_reanchor,
        seed=seed,
    )
    manifest = RunManifest("solve-offline", settings=settings.to_dict() | meta, seeds=[seed])

    pair = seed_pair(system, seed, degenerate=degenerate)
    report = certify_minimal(system, *pair)
    if not report.passed:
        console.print("[yellow]Selection fails the rank certificate at the seed point[/yellow]")

    with _progress() as progress:
        task = progress.add_task("Monodromy loops", total=target or max_loops)

        def on_loop(loop: int, known: int, added: int):
            progress.update(
                task,
                completed=known if target else loop,
                description=f"Monodromy: {known} solutions",
            )

        solutions = monodromy_solve(system, pair, settings, ctx.obj["threads"], on_loop)
    if settings.reanchor:
        solutions = reanchor(system, solutions, settings, ctx.obj["threads"])

    name = meta.get("relaxation") or f"{code}_class{class_id}"
    path = _output(ctx, output, f"bundle_{name}.json")
    bundle = StartBundle.from_solution_set(
        system,
        solutions,
        settings=settings.to_dict(),
        certificate=report.to_dict(),
        meta=meta | {"manifest": manifest_path(path).name},
    )
    bundle.save(path)
    manifest.finish(path)

    expected = meta.get("expected_solutions")
    summary = f"{len(bundle)} solutions" + (f" (expected {expected})" if expected else "")
    console.print(
        Panel(
            f"{summary}\ncertificate passed: {report.passed}\nbundle: {path}",
            title=f"Offline stage: {system.spec.code}",
        )
    )
    click.echo(len(bundle))


@cli.command()
@click.option("--spec", "code", default="fguvs", show_default=True, help="Camera prior")
@click.option("--views", "-m", type=click.IntRange(2, 3), default=3, show_default=True)
@click.option("--points", "-n", type=int, default=100, show_default=True)
@click.option("--count", type=int, default=1, show_default=True, help="Scenes to generate")
@click.option("--sigma", type=float, default=0.0, show_default=True, help="Pixel noise")
@click.option("--degenerate", is_flag=True, help="Centers on a sphere, axes through its center")
@click.option("--default-camera", is_flag=True, help="Ignore the prior of --spec")
@click.option("--output-dir", type=click.Path(file_okay=False), default=None)
@click.pass_context
@handle_errors
def simulate(ctx, code, views, points, count, sigma, degenerate, default_camera, output_dir):
    """Generate synthetic scenes with their tracks and ground truth."""
    config = ctx.obj["config"]
    camera = DEFAULT_INTRINSICS
    if not default_camera:
        camera = IntrinsicsSpec.parse(code).prior_intrinsics(camera)
    scene_config = SceneConfig(
        num_points=points,
        num_views=views,
        intrinsics=camera,
        image_size=(config.image_width, config.image_height),
    )
    directory = Path(output_dir) if output_dir else ctx.obj["out"] / "scenes"
    directory.mkdir(parents=True, exist_ok=True)
    generate = generate_degenerate_scene if degenerate else generate_scene
    seeds = [ctx.obj["seed"] + k for k in range(count)]

    for seed in seeds:
        scene = generate(scene_config, seed)
        obs = add_noise(project(scene), sigma, seed)
        tracks = _write_json(directory / f"tracks_{seed}.json", obs.pixels.tolist())
        _write_json(
            directory / f"scene_{seed}.json",
            scene.to_dict() | {"sigma": sigma, "manifest": manifest_path(tracks).name},
        )
        RunManifest(
            "simulate",
            settings={"scene": scene_config.to_dict(), "sigma": sigma, "degenerate": degenerate},
            seeds=[seed],
            outputs=[str(directory / f"scene_{seed}.json")],
        ).finish(tracks)
    console.print(f"[green]✓[/green] Wrote {len(seeds)} scenes to {directory}")


@cli.command()
@click.option("--bundle", "bundle_path", type=click.Path(exists=True), required=True)
@click.option("--tracks", type=click.Path(exists=True), required=True)
@click.option("--iters", type=int, default=200, show_default=True, help="MSAC iterations")
@click.option("--huber-delta", type=float, default=2.0, show_default=True)
@click.option("--inlier-threshold", type=float, default=4.0, show_default=True)
@click.option("--known", default=None, help="Known intrinsics f,g,u,v,s or a JSON file")
@click.option("--scene", "scene_path", type=click.Path(exists=True), default=None)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@handle_errors
def calibrate(
    ctx, bundle_path, tracks, iters, huber_delta, inlier_threshold, known, scene_path, output
):
    """Calibrate from tracked points with a start bundle, under MSAC when over-determined."""
    config = ctx.obj["config"]
    bundle = load_bundle(Path(bundle_path))
    obs = Observations.from_tracks(
        _read_json(tracks), image_size=(config.image_width, config.image_height)
    )
    known_intrinsics = _parse_intrinsics(known)
    seed = ctx.obj["seed"]
    settings = MsacSettings(iters, huber_delta, inlier_threshold, seed)
    manifest = RunManifest(
        "calibrate", settings=settings.to_dict(), seeds=[seed], inputs=[bundle_path, tracks]
    )

    extra = {}
    if obs.num_points == bundle.n_points:
        candidates = solve_instance(bundle, obs, known_intrinsics, threads=ctx.obj["threads"])
        best = candidates[0]
        extra["candidates"] = len(candidates)
    else:
        with _progress() as progress:
            task = progress.add_task("MSAC", total=iters)
            result = msac_calibrate(
                obs,
                bundle,
                settings,
                known_intrinsics,
                threads=ctx.obj["threads"],
                on_iteration=lambda i, score: progress.update(task, completed=i + 1),
            )
        best = result.best
        extra.update(
            {"inliers": result.inlier_count, "hypotheses": result.hypotheses, "score": result.score}
        )

    payload = {"result": best.to_dict()} | extra
    if scene_path:
        scene = Scene.from_dict(_read_json(scene_path))
        payload["metrics"] = evaluate(best, obs, scene).to_dict()

    k = best.intrinsics
    console.print(
        Panel(
            f"f={k.f:.3f} g={k.g:.3f} u={k.u:.3f} v={k.v:.3f} s={k.s:.3f}\n"
            f"score={best.score:.4g}"
            + "".join(f"\n{key}={value}" for key, value in payload.get("metrics", {}).items()),
            title="Calibration",
        )
    )
    if output:
        path = _write_json(Path(output), payload | {"manifest": manifest_path(Path(output)).name})
        manifest.finish(path)
    click.echo(json.dumps(payload))


@cli.command(name="eval")
@click.option(
    "--bundle", "bundle_paths", type=click.Path(exists=True), multiple=True, required=True
)
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--sigma", "sigmas", type=float, multiple=True, help="Noise levels (default grid)")
@click.option("--points", "-n", type=int, default=None, help="Tracks per scene (MSAC if > N)")
@click.option("--msac-iters", type=int, default=200, show_default=True)
@click.option("--degenerate", is_flag=True)
@click.option("--default-camera", is_flag=True, help="Scenes use the default camera")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.pass_context
@handle_errors
def eval_cmd(
    ctx, bundle_paths, trials, sigmas, points, msac_iters, degenerate, default_camera, output
):
    """Run seeded synthetic trials for each bundle and write one metric row per trial."""
    sigmas = sigmas or NOISE_GRID
    seeds = [ctx.obj["seed"] + t for t in range(trials)]
    config = ctx.obj["config"]
    rows = []
    with _progress() as progress:
        for bundle_path in bundle_paths:
            bundle = load_bundle(Path(bundle_path))
            solver = bundle.meta.get("relaxation") or bundle.system.spec.code
            trial = TrialConfig(
                solver=solver,
                num_points=points,
                prior_matched=not default_camera,
                degenerate=degenerate,
                image_size=(config.image_width, config.image_height),
                msac_iterations=msac_iters,
            )
            task = progress.add_task(f"{solver}", total=len(sigmas) * len(seeds))
            for sigma in sigmas:
                for seed in seeds:
                    rows.append(run_trial(bundle, trial, seed, sigma, threads=ctx.obj["threads"]))
                    progress.advance(task)

    path = write_rows(_output(ctx, output, "eval.csv"), rows, CSV_COLUMNS)
    RunManifest(
        "eval",
        settings={
            "sigmas": list(sigmas),
            "points": points,
            "msac_iters": msac_iters,
            "degenerate": degenerate,
            "prior_matched": not default_camera,
        },
        seeds=seeds,
        inputs=list(bundle_paths),
    ).finish(path)
    failures = sum(r["status"] != "ok" for r in rows)
    console.print(f"[green]✓[/green] {len(rows)} trials ({failures} failed) written to {path}")


@cli.command(name="summarize")
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@handle_errors
def summarize_cmd(csv_path, output):
    """Mean, median and quartiles per solver and noise level."""
    summary = summarize(read_rows(Path(csv_path)))
    columns = summary_columns()
    if output:
        path = write_rows(Path(output), summary, columns)
        RunManifest("summarize", inputs=[csv_path]).finish(path)
        console.print(f"[green]✓[/green] Wrote {len(summary)} groups to {path}")
        return
    click.echo(",".join(columns))
    for row in summary:
        click.echo(",".join(_fmt(row[c]) for c in columns))


def _fmt(value) -> str:
    if isinstance(value, float):
        return "nan" if np.isnan(value) else f"{value:.6g}"
    return str(value)


def main():
    try:
        cli()
    except AutocalError as e:
        console.print(f"[red]✗ {e}[/red]")
        sys.exit(e.exit_code)


if __name__ == "__main__":
    main()

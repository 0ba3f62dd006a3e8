"""Command-line interface.

Configuration precedence is file < environment < flag: a JSON file passed
via --config seeds per-command defaults, HYBRIDFLOW_<COMMAND>_<OPTION>
environment variables override those, and explicit flags win. Exit codes:
0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from .datagen import (GeneratorConfig, build_dataset, load_manifest,
                      load_triplet)
from .errors import HybridFlowError
from .evalharness import (ExperimentConfig, ModelPredictor,
                          domain_shift_experiment, evaluate_flow,
                          evaluate_prediction, ratio_sweep)
from .flowio import (SampleTriplet, Source, colorize_flow, read_flo_file,
                     read_frame_png, write_flo_file, write_frame_png)
from .network import NetworkConfig, TaskMode
from .training import (ManifestSource, TrainSchedule, TrainSources,
                       calibrate_weights, train)

MODE_NAMES = {
    "flow+nextframe": TaskMode.FLOW_NEXTFRAME,
    "nextflow+nextframe": TaskMode.NEXTFLOW_NEXTFRAME,
    "flow": TaskMode.FLOW_ONLY,
    "nextframe": TaskMode.NEXTFRAME_ONLY,
}

CONTEXT_SETTINGS = {
    "auto_envvar_prefix": "HYBRIDFLOW",
    "help_option_names": ["-h", "--help"],
}


def _parse_cycles(value: str) -> tuple[int, int]:
    try:
        n1_str, n2_str = value.split(":")
        n1, n2 = int(n1_str), int(n2_str)
    except ValueError:
        raise click.BadParameter(
            f"expected N1:N2 with integer counts, got {value!r}")
    if n1 < 0 or n2 < 0 or n1 + n2 < 1:
        raise click.BadParameter(f"cycle counts must be >= 0 and sum >= 1, "
                                 f"got {value!r}")
    return n1, n2


def _parse_ratio_list(value: str) -> tuple[tuple[int, int], ...]:
    return tuple(_parse_cycles(part.strip())
                 for part in value.split(",") if part.strip())


def _parse_seed_list(value: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, "
                                 f"got {value!r}")
    if not seeds:
        raise click.BadParameter("need at least one seed")
    return seeds


def _apply_config_file(ctx: click.Context, param, value):
    if value is None:
        return None
    try:
        data = json.loads(Path(value).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read config file {value}: {exc}")
    if not isinstance(data, dict):
        raise click.UsageError("config file must hold a JSON object")
    group = ctx.command
    for cmd_name, section in data.items():
        cmd = group.get_command(ctx, cmd_name)
        if cmd is None:
            raise click.UsageError(
                f"config file names unknown command {cmd_name!r}")
        if not isinstance(section, dict):
            raise click.UsageError(
                f"config section {cmd_name!r} must be a JSON object")
        known = {p.name for p in cmd.params}
        unknown = sorted(set(section) - known)
        if unknown:
            raise click.UsageError(
                f"config section {cmd_name!r} has unknown keys: "
                f"{', '.join(unknown)}")
    ctx.default_map = data
    return value


def _fail(exc: Exception) -> None:
    raise click.ClickException(str(exc))


@click.group(context_settings=CONTEXT_SETTINGS)
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              callback=_apply_config_file, expose_value=False,
              is_eager=True,
              help="JSON file with per-command option defaults "
                   "(keys: command name, then option names).")
@click.version_option(package_name="hybridflow")
def main():
    """Joint optical-flow and next-frame training toolkit."""


@main.command("gen-data")
@click.option("--kind", type=click.Choice(["synthetic", "real"]),
              default="synthetic", show_default=True,
              help="Synthetic sets keep flow ground truth; real-like sets "
                   "withhold it.")
@click.option("--count", type=click.IntRange(min=1), required=True,
              help="Number of triplets to generate.")
@click.option("--out", type=click.Path(), required=True,
              help="Dataset output directory.")
@click.option("--width", type=click.IntRange(min=4), default=64,
              show_default=True)
@click.option("--height", type=click.IntRange(min=4), default=64,
              show_default=True)
@click.option("--master-seed", type=int, default=0, show_default=True)
@click.option("--min-objects", type=click.IntRange(min=0), default=1,
              show_default=True)
@click.option("--max-objects", type=click.IntRange(min=0), default=3,
              show_default=True)
@click.option("--max-speed", type=float, default=3.0, show_default=True,
              help="Upper bound on object speed in pixels per frame.")
@click.option("--max-rotation", type=float, default=3.0, show_default=True,
              help="Upper bound on object spin in degrees per frame.")
@click.option("--max-background-speed", type=float, default=1.5,
              show_default=True)
@click.option("--noise-amplitude", type=float, default=0.0, show_default=True)
@click.option("--brightness-drift", type=float, default=0.0,
              show_default=True)
def cmd_gen_data(kind, count, out, width, height, master_seed, min_objects,
                 max_objects, max_speed, max_rotation, max_background_speed,
                 noise_amplitude, brightness_drift):
    """Generate a procedural dataset of frame triplets."""
    source = Source.SYNTHETIC if kind == "synthetic" else Source.REAL
    try:
        config = GeneratorConfig(
            width=width, height=height, master_seed=master_seed,
            source=source, min_objects=min_objects, max_objects=max_objects,
            max_speed=max_speed, max_rotation=max_rotation,
            max_background_speed=max_background_speed,
            noise_amplitude=noise_amplitude,
            brightness_drift=brightness_drift)
        manifest = build_dataset(config, count, out)
    except (HybridFlowError, OSError) as exc:
        _fail(exc)
    click.echo(f"wrote {manifest.sample_count} {kind} triplets to "
               f"{manifest.root}")
    click.echo(f"config hash: {manifest.config_hash}")


@main.command("train")
@click.option("--mode", type=click.Choice(sorted(MODE_NAMES)),
              default="flow+nextframe", show_default=True,
              help="Which decoder branches train and which flow the model "
                   "regresses.")
@click.option("--cycles", default="1:5", show_default=True,
              help="Real:synthetic iteration counts per period, e.g. 1:5; "
                   "0:1 is the pure-supervised baseline.")
@click.option("--synth-data", type=click.Path(exists=True),
              help="Synthetic training dataset (flow ground truth).")
@click.option("--real-data", type=click.Path(exists=True),
              help="Real-like training dataset (frames only).")
@click.option("--out", type=click.Path(), required=True,
              help="Directory for checkpoints and the step log.")
@click.option("--iterations", type=click.IntRange(min=1), default=2000,
              show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), default=4,
              show_default=True)
@click.option("--depth", type=click.IntRange(min=2, max=6), default=4,
              show_default=True, help="Encoder pyramid levels.")
@click.option("--alpha", type=float, default=0.125, show_default=True,
              help="Channel width multiplier.")
@click.option("--input-frames", type=click.Choice(["2", "4"]), default="2",
              show_default=True)
@click.option("--w1", type=float, default=1.0, show_default=True,
              help="Flow-loss weight.")
@click.option("--w2", type=float, default=5.0, show_default=True,
              help="Frame-loss weight.")
@click.option("--base-lr", type=float, default=1e-4, show_default=True)
@click.option("--lr-drop-start", type=int, default=None,
              help="Iteration of the first learning-rate drop "
                   "[default: scaled to the run length].")
@click.option("--lr-drop-every", type=int, default=None,
              help="Iterations between drops "
                   "[default: scaled to the run length].")
@click.option("--lr-drop-factor", type=float, default=0.5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--checkpoint-every", type=click.IntRange(min=0), default=0,
              show_default=True, help="0 keeps only the final checkpoint.")
@click.option("--resume", type=click.Path(exists=True), default=None,
              help="Checkpoint to continue from.")
def cmd_train(mode, cycles, synth_data, real_data, out, iterations,
              batch_size, depth, alpha, input_frames, w1, w2, base_lr,
              lr_drop_start, lr_drop_every, lr_drop_factor, seed,
              checkpoint_every, resume):
    """Train a model on the hybrid two-source schedule."""
    n1, n2 = _parse_cycles(cycles)
    try:
        network = NetworkConfig(depth=depth, alpha=alpha,
                                input_frames=int(input_frames),
                                task_mode=MODE_NAMES[mode])
        overrides = {
            "n1": n1, "n2": n2, "w1": w1, "w2": w2, "base_lr": base_lr,
            "lr_drop_factor": lr_drop_factor, "batch_size": batch_size,
            "seed": seed,
        }
        if lr_drop_start is not None:
            overrides["lr_drop_start"] = lr_drop_start
        if lr_drop_every is not None:
            overrides["lr_drop_every"] = lr_drop_every
        schedule = TrainSchedule.desk_scale(total_iterations=iterations,
                                            **overrides)
        sources = TrainSources(
            real=(ManifestSource(load_manifest(real_data), cache=True)
                  if real_data else None),
            synthetic=(ManifestSource(load_manifest(synth_data), cache=True)
                       if synth_data else None),
        )
        final, records = train(network, schedule, sources,
                               checkpoint_every=checkpoint_every, out=out,
                               resume_from=resume)
    except (HybridFlowError, OSError) as exc:
        _fail(exc)
    click.echo(f"trained {len(records)} iterations; final checkpoint "
               f"{final}")
    if records:
        click.echo(f"final loss_total: {records[-1].loss_total:.6f}")


def _experiment_config(synth_train, real_train, eval_real, eval_synth, out,
                       depth, alpha, mode, iterations, batch_size, seeds,
                       ratios) -> ExperimentConfig:
    network = NetworkConfig(depth=depth, alpha=alpha,
                            task_mode=MODE_NAMES[mode])
    schedule = TrainSchedule.desk_scale(total_iterations=iterations,
                                        batch_size=batch_size)
    kwargs = {}
    if ratios is not None:
        kwargs["ratios"] = _parse_ratio_list(ratios)
    return ExperimentConfig(
        network=network, schedule=schedule, synth_train=synth_train,
        real_train=real_train, eval_real=eval_real, eval_synth=eval_synth,
        out_dir=out, seeds=_parse_seed_list(seeds), **kwargs)


@main.command("eval")
@click.option("--task",
              type=click.Choice(["flow", "nextframe", "ratio-sweep",
                                 "domain-shift"]),
              default="flow", show_default=True)
@click.option("--checkpoint", type=click.Path(exists=True),
              help="Trained model (flow/nextframe tasks).")
@click.option("--data", type=click.Path(exists=True),
              help="Evaluation dataset (flow/nextframe tasks).")
@click.option("--out", type=click.Path(), required=True,
              help="Report output directory.")
@click.option("--moving-threshold", type=float, default=0.5,
              show_default=True,
              help="Flow magnitude that counts a pixel as moving.")
@click.option("--synth-train", type=click.Path(exists=True),
              help="Synthetic training set (experiment tasks).")
@click.option("--real-train", type=click.Path(exists=True),
              help="Real-like training set (experiment tasks).")
@click.option("--eval-real", type=click.Path(exists=True),
              help="Held-out real-like set (experiment tasks).")
@click.option("--eval-synth", type=click.Path(exists=True), default=None,
              help="Optional held-out synthetic set (domain-shift).")
@click.option("--ratios", default=None,
              help="Comma-separated cycle ratios for ratio-sweep, "
                   "e.g. 0:1,1:9,1:5,1:1,4:1.")
@click.option("--seeds", default="0,1,2", show_default=True,
              help="Comma-separated training seeds (experiment tasks).")
@click.option("--iterations", type=click.IntRange(min=1), default=2000,
              show_default=True, help="Per-run iterations (experiments).")
@click.option("--batch-size", type=click.IntRange(min=1), default=4,
              show_default=True)
@click.option("--depth", type=click.IntRange(min=2, max=6), default=4,
              show_default=True)
@click.option("--alpha", type=float, default=0.125, show_default=True)
@click.option("--mode", type=click.Choice(sorted(MODE_NAMES)),
              default="flow+nextframe", show_default=True)
def cmd_eval(task, checkpoint, data, out, moving_threshold, synth_train,
             real_train, eval_real, eval_synth, ratios, seeds, iterations,
             batch_size, depth, alpha, mode):
    """Evaluate a checkpoint or run a desk-scale experiment."""
    out_dir = Path(out)
    if task in ("flow", "nextframe"):
        if not checkpoint or not data:
            raise click.UsageError(
                f"task {task!r} needs --checkpoint and --data")
        try:
            predictor = ModelPredictor(checkpoint)
            if task == "flow":
                target = predictor.model.config.task_mode.flow_target
                report = evaluate_flow(predictor, data, flow_target=target)
                click.echo(f"mean EPE over {report.sample_count} samples: "
                           f"{report.mean_epe:.4f}")
            else:
                report = evaluate_prediction(
                    predictor, data, moving_threshold=moving_threshold)
                click.echo(f"PSNR whole/moving: {report.psnr_whole:.2f}/"
                           + (f"{report.psnr_moving:.2f}"
                              if report.psnr_moving is not None else "n/a"))
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / f"eval_{task}.json"
            path.write_text(json.dumps(report.to_dict(), indent=1,
                                       sort_keys=True))
        except (HybridFlowError, OSError) as exc:
            _fail(exc)
        click.echo(f"report written to {path}")
        return

    if not (synth_train and real_train and eval_real):
        raise click.UsageError(f"task {task!r} needs --synth-train, "
                               "--real-train, and --eval-real")
    try:
        config = _experiment_config(synth_train, real_train, eval_real,
                                    eval_synth, out_dir, depth, alpha, mode,
                                    iterations, batch_size, seeds, ratios)
        if task == "ratio-sweep":
            table = ratio_sweep(config)
            for row in table["rows"]:
                click.echo(f"{row['label']:>24}  median EPE "
                           f"{row['median_epe']:.4f}")
            click.echo(f"table and plot written to {out_dir}")
        else:
            report = domain_shift_experiment(config)
            for row in report["rows"]:
                click.echo(f"{row['label']:>18} on {row['dataset']:>9}: "
                           f"median EPE {row['median_epe']:.4f}")
            click.echo(f"report written to {out_dir}")
    except (HybridFlowError, OSError) as exc:
        _fail(exc)


@main.command("predict")
@click.option("--i1", type=click.Path(exists=True), required=True,
              help="First frame PNG.")
@click.option("--i2", type=click.Path(exists=True), required=True,
              help="Second frame PNG.")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--out-flow", type=click.Path(), default=None,
              help="Write the predicted flow here (.flo).")
@click.option("--out-frame", type=click.Path(), default=None,
              help="Write the predicted next frame here (.png).")
def cmd_predict(i1, i2, checkpoint, out_flow, out_frame):
    """Predict flow and/or the next frame for one frame pair.

    Inputs of any size are accepted; the model pads internally and crops
    the outputs back.
    """
    if out_flow is None and out_frame is None:
        raise click.UsageError("need --out-flow and/or --out-frame")
    try:
        predictor = ModelPredictor(checkpoint)
        first, second = read_frame_png(i1), read_frame_png(i2)
        sample = SampleTriplet(i1=first, i2=second, i3=second,
                               source=Source.REAL)
        output = predictor(sample)
        if out_flow is not None:
            if output.flow is None:
                raise click.ClickException(
                    "checkpoint has no flow branch; cannot honor --out-flow")
            write_flo_file(output.flow, out_flow)
            click.echo(f"flow written to {out_flow}")
        if out_frame is not None:
            if output.frame is None:
                raise click.ClickException(
                    "checkpoint has no frame branch; cannot honor "
                    "--out-frame")
            write_frame_png(output.frame, out_frame)
            click.echo(f"frame written to {out_frame}")
    except (HybridFlowError, OSError) as exc:
        _fail(exc)


@main.command("visualize")
@click.argument("flow_path", type=click.Path(exists=True))
@click.argument("image_path", type=click.Path())
@click.option("--max-magnitude", type=float, default=None,
              help="Flow magnitude mapped to full color saturation "
                   "[default: 99th percentile].")
def cmd_visualize(flow_path, image_path, max_magnitude):
    """Render a .flo flow field as a color PNG (zero flow is white)."""
    try:
        flow = read_flo_file(flow_path)
        image = colorize_flow(flow, max_magnitude=max_magnitude)
        write_frame_png(image, image_path)
    except (HybridFlowError, OSError, ValueError) as exc:
        _fail(exc)
    click.echo(f"visualization written to {image_path}")


@main.command("calibrate-weights")
@click.option("--data", type=click.Path(exists=True), required=True,
              help="Dataset with flow ground truth.")
@click.option("--min-samples", type=click.IntRange(min=1), default=500,
              show_default=True)
@click.option("--allow-fewer", is_flag=True, default=False,
              help="Permit calibration on fewer samples (desk scale).")
@click.option("--flow-target", type=click.Choice(["f12", "f23"]),
              default="f12", show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Optional JSON file for the calibrated weights.")
def cmd_calibrate_weights(data, min_samples, allow_fewer, flow_target, out):
    """Derive loss weights from pooled target statistics."""
    try:
        # Calibration reads the dataset as training data: withheld truth
        # stays withheld, so real-like sets are rejected downstream.
        manifest = load_manifest(data)
        samples = [load_triplet(manifest, i)
                   for i in range(manifest.sample_count)]
        w1, w2 = calibrate_weights(samples, min_samples=min_samples,
                                   allow_fewer=allow_fewer,
                                   flow_target=flow_target)
    except (HybridFlowError, OSError) as exc:
        _fail(exc)
    click.echo(f"w1 = {w1:.6g}")
    click.echo(f"w2 = {w2:.6g}")
    if out is not None:
        Path(out).write_text(json.dumps({"w1": w1, "w2": w2}, indent=1))
        click.echo(f"weights written to {out}")


if __name__ == "__main__":
    main()

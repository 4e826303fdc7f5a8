"""Command-line front end: problem specs in, reports and CSV out.

A problem spec is a JSON file naming the block structure, the state (explicit
blocks or spectra), optional gauge elements and task parameters. Complex
entries are two-element [re, im] arrays. Floats in CSV output are printed
with 17 significant digits so files round-trip and are byte-stable for a
fixed seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, FaithfulState, random_unitary
from .bipartite import BipartiteModel, oracle_suite
from .channels import (
    ExtremizeOptions,
    apply_channel,
    entropy_gap,
    extremize_entropy,
    gauge_measured_state,
    random_commutant_channel,
)
from .errors import NotFaithfulError
from .gns import GnsRep, build_gns, restrict_to_algebra
from .linalg import subspace_distance
from .modular import (
    ModularData,
    algebra_image_basis,
    build_modular,
    gauge_commutant_distance,
    modular_flow_residual,
)

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 256
FLOAT_FMT = "{:.17g}"

TASK_NAMES = ("report", "orbit", "extremize", "verify")


class SpecError(ValueError):
    """Problem-spec validation failure; the message names the bad field."""


@dataclass
class ProblemSpec:
    shape: AlgebraShape
    state: FaithfulState
    gauges: list[AlgebraElement] = field(default_factory=list)
    sample_count: int | None = None
    sample_seed: int | None = None
    tasks: dict[str, dict] = field(default_factory=dict)


def _as_complex(entry, where: str) -> complex:
    if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
        raise SpecError(f"{where}: complex entries are [re, im] pairs, got {entry!r}")
    re, im = entry
    if not all(isinstance(x, (int, float)) for x in (re, im)):
        raise SpecError(f"{where}: complex entries must be numeric, got {entry!r}")
    return complex(re, im)


def _parse_blocks(raw, shape: AlgebraShape, where: str) -> list[np.ndarray]:
    if not isinstance(raw, list) or len(raw) != shape.num_blocks:
        raise SpecError(f"{where}: expected {shape.num_blocks} blocks")
    blocks = []
    for r, (n, rows) in enumerate(zip(shape.blocks, raw)):
        if not isinstance(rows, list) or len(rows) != n:
            raise SpecError(f"{where}[{r}]: expected a {n}x{n} matrix")
        mat = np.empty((n, n), dtype=complex)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise SpecError(f"{where}[{r}][{i}]: expected {n} entries")
            for j, entry in enumerate(row):
                mat[i, j] = _as_complex(entry, f"{where}[{r}][{i}][{j}]")
        blocks.append(mat)
    return blocks


def _parse_state(raw, shape: AlgebraShape) -> FaithfulState:
    if not isinstance(raw, dict):
        raise SpecError("state: expected an object with 'blocks' or 'spectra'")
    if ("blocks" in raw) == ("spectra" in raw):
        raise SpecError("state: give exactly one of 'blocks' or 'spectra'")
    if "blocks" in raw:
        blocks = _parse_blocks(raw["blocks"], shape, "state.blocks")
        density = AlgebraElement(shape, blocks)
        if not density.is_hermitian():
            raise SpecError("state: density is not Hermitian")
        tr = density.trace().real
        if abs(tr - 1.0) > 1e-9:
            raise SpecError(f"state: trace of R is {tr:.10g}, expected 1 within 1e-09")
        density = density * (1.0 / tr)
        try:
            return FaithfulState(density)
        except (NotFaithfulError, ValueError) as exc:
            raise SpecError(f"state: {exc}") from exc
    spectra = raw["spectra"]
    if not isinstance(spectra, list) or len(spectra) != shape.num_blocks:
        raise SpecError("state.spectra: one spectrum per block required")
    eigenbasis = None
    if "eigenbasis" in raw:
        eigenbasis = _parse_blocks(raw["eigenbasis"], shape, "state.eigenbasis")
    flat = [x for s in spectra for x in s]
    if any(not isinstance(x, (int, float)) or x <= 0 for x in flat):
        raise SpecError("state.spectra: entries must be positive numbers")
    total = float(sum(flat))
    if abs(total - 1.0) > 1e-9:
        raise SpecError(f"state.spectra: sum is {total:.10g}, expected 1 within 1e-09")
    spectra = [[x / total for x in s] for s in spectra]
    try:
        return FaithfulState.from_spectra(shape, spectra, eigenbasis)
    except (NotFaithfulError, ValueError) as exc:
        raise SpecError(f"state.spectra: {exc}") from exc


def parse_spec(path) -> ProblemSpec:
    """Load and validate a problem spec; defaults: seed 0, 256 samples."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise SpecError(f"spec file {path} does not exist")
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise SpecError("spec: top level must be an object")

    if "shape" not in raw:
        raise SpecError("shape: missing")
    try:
        shape = AlgebraShape(raw["shape"])
    except (TypeError, ValueError) as exc:
        raise SpecError(f"shape: {exc}") from exc

    if "state" not in raw:
        raise SpecError("state: missing")
    state = _parse_state(raw["state"], shape)

    gauges: list[AlgebraElement] = []
    sample_count = sample_seed = None
    if "gauge" in raw:
        gauge = raw["gauge"]
        if not isinstance(gauge, dict):
            raise SpecError("gauge: expected an object")
        for idx, ublocks in enumerate(gauge.get("unitaries", [])):
            g = AlgebraElement(shape, _parse_blocks(ublocks, shape, f"gauge.unitaries[{idx}]"))
            if g.unitarity_defect() > 1e-9:
                raise SpecError(f"gauge.unitaries[{idx}]: not unitary within 1e-09")
            gauges.append(g)
        if "samples" in gauge:
            samples = gauge["samples"]
            if not isinstance(samples, dict) or "count" not in samples:
                raise SpecError("gauge.samples: expected an object with 'count'")
            sample_count = int(samples["count"])
            sample_seed = int(samples.get("seed", DEFAULT_SEED))

    tasks: dict[str, dict] = {}
    for entry in raw.get("tasks", []):
        if isinstance(entry, str):
            name, params = entry, {}
        elif isinstance(entry, dict) and "name" in entry:
            name = entry["name"]
            params = {k: v for k, v in entry.items() if k != "name"}
        else:
            raise SpecError(f"tasks: entries are names or objects with 'name', got {entry!r}")
        if name not in TASK_NAMES:
            raise SpecError(f"tasks: unknown task {name!r}")
        tasks[name] = params

    return ProblemSpec(
        shape=shape,
        state=state,
        gauges=gauges,
        sample_count=sample_count,
        sample_seed=sample_seed,
        tasks=tasks,
    )


def sampled_gauges(spec: ProblemSpec, samples: int, seed: int) -> list[tuple[int, AlgebraElement]]:
    """Explicit gauges (seed label -1) followed by deterministic Haar samples."""
    out = [(-1, g) for g in spec.gauges]
    for i in range(samples):
        out.append((seed, random_unitary(spec.shape, np.random.default_rng((seed, i)))))
    return out


def _resolve(spec: ProblemSpec, task: str, key: str, override, fallback):
    if override is not None:
        return override
    if key in spec.tasks.get(task, {}):
        return spec.tasks[task][key]
    return fallback


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


def run_report(spec: ProblemSpec, out=sys.stdout) -> int:
    rep = build_gns(spec.state)
    md = build_modular(rep)
    _, report = gauge_measured_state(rep, md, AlgebraElement.identity(spec.shape))
    delta_spec = np.sort(md.delta_eigenvalues)
    print(f"shape: {list(spec.shape.blocks)}", file=out)
    print(f"gns_dim: {rep.dim}", file=out)
    print("delta_spectrum: " + ", ".join(_fmt(x) for x in delta_spec), file=out)
    print(f"commutant_dim: {md.commutant_basis.shape[0]}", file=out)
    print(f"entropy_baseline: {_fmt(report.entropy)}", file=out)
    return 0


def run_orbit(spec: ProblemSpec, outdir: Path, samples: int, seed: int) -> int:
    rep = build_gns(spec.state)
    md = build_modular(rep)
    rows = []
    for index, (seed_label, g) in enumerate(sampled_gauges(spec, samples, seed)):
        _, report = gauge_measured_state(rep, md, g)
        lambdas = ";".join(_fmt(x) for x in report.flat_lambdas())
        rows.append((index, seed_label, lambdas, report.entropy, report.gap))
    outdir.mkdir(parents=True, exist_ok=True)
    target = outdir / "orbit.csv"
    with open(target, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index", "seed", "lambdas", "entropy", "gap"])
        for index, seed_label, lambdas, entropy, gap in rows:
            writer.writerow([index, seed_label, lambdas, _fmt(entropy), _fmt(gap)])
    print(f"wrote {target} ({len(rows)} rows)")
    return 0


def run_extremize(spec: ProblemSpec, outdir: Path, seed: int, max_iter, starts) -> int:
    rep = build_gns(spec.state)
    md = build_modular(rep)
    opts = ExtremizeOptions(seed=seed)
    if max_iter is not None:
        opts.max_iter = int(max_iter)
    if starts is not None:
        opts.starts = int(starts)
    result = extremize_entropy(rep, md, opts)
    outdir.mkdir(parents=True, exist_ok=True)
    trace_path = outdir / "extremize_trace.csv"
    with open(trace_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["start", "iteration", "entropy", "grad_norm", "step"])
        for p in result.trace:
            writer.writerow([p.start, p.iteration, _fmt(p.entropy), _fmt(p.grad_norm), _fmt(p.step)])
    gauge_path = outdir / "gauge_star.json"
    dump = {
        "entropy": result.entropy,
        "baseline": result.baseline,
        "converged": result.converged,
        "blocks": [
            [[[float(x.real), float(x.imag)] for x in row] for row in block]
            for block in result.gauge.blocks
        ],
    }
    gauge_path.write_text(json.dumps(dump, indent=2) + "\n")
    print(f"best entropy: {_fmt(result.entropy)} (baseline {_fmt(result.baseline)})")
    print(f"converged: {result.converged}")
    print(f"wrote {trace_path} and {gauge_path}")
    return 0


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance


def verification_checks(
    rep: GnsRep, md: ModularData, gauges: list[AlgebraElement], samples: int, seed: int
) -> list[CheckResult]:
    """Named residuals for every verifiable identity on one problem instance."""
    rng = np.random.default_rng((seed, 0xC0FFEE))
    d = rep.dim
    eye = np.eye(d)
    omega = rep.omega
    out: list[CheckResult] = []

    # modular axioms
    j, s = md.j, md.s
    sqrt_delta = md.delta_power(0.5)
    axioms = max(
        float(np.abs(j.compose(j) - eye).max()),
        float(np.abs(j.mat - j.adjoint().mat).max()),
        float(np.abs(s.mat - j.after_linear(sqrt_delta).mat).max()),
        float(np.abs(j.apply(omega) - omega).max()),
        float(np.abs(md.delta @ omega - omega).max()),
    )
    out.append(CheckResult("modular_axioms", axioms, 1e-9))

    basis_rows = md.commutant_basis.reshape(md.commutant_basis.shape[0], -1)
    mirrored = np.stack(
        [md.j.sandwich(r).reshape(-1) for r in _unit_images(rep)]
    )
    out.append(
        CheckResult(
            "commutant_duality", subspace_distance(mirrored, basis_rows), 1e-9
        )
    )
    out.append(
        CheckResult(
            "modular_flow",
            modular_flow_residual(md, rep, (0.5, 1.0, math.pi)),
            1e-8,
        )
    )
    out.append(
        CheckResult(
            "gauge_commutant",
            gauge_commutant_distance(rep, md, sample_count=min(samples, 8), seed=seed),
            1e-8,
        )
    )

    gs = [g for g in gauges] or [
        random_unitary(rep.shape, np.random.default_rng((seed, i))) for i in range(min(samples, 16))
    ]
    worst_gap = 0.0
    worst_restrict = 0.0
    worst_consistency = 0.0
    worst_spectrum = 0.0
    for g in gs:
        rho, report = gauge_measured_state(rep, md, g)
        worst_gap = max(worst_gap, -report.gap)
        diff = restrict_to_algebra(rep, rho) - rep.state.density
        worst_restrict = max(worst_restrict, diff.norm())
        gap = entropy_gap(rep, md, g)
        worst_consistency = max(worst_consistency, abs(gap.difference - gap.relative))
        eig = np.sort(np.linalg.eigvalsh(rho))[::-1]
        expected = np.zeros(d)
        lam = np.sort(report.flat_lambdas())[::-1]
        expected[: lam.size] = lam
        worst_spectrum = max(worst_spectrum, float(np.abs(eig - expected).max()))
    out.append(CheckResult("entropy_monotonicity", worst_gap, 1e-9))
    out.append(CheckResult("subsystem_invariance", worst_restrict, 1e-9))
    out.append(CheckResult("entropy_gap_consistency", worst_consistency, 1e-8))
    out.append(CheckResult("measured_spectrum", worst_spectrum, 1e-10))

    from .channels import commutant_trace, restrict_to_commutant, state_mirror

    worst_lemma = 0.0
    mirror = state_mirror(rep, md)
    for g in gs[: min(len(gs), 4)]:
        rho, _ = gauge_measured_state(rep, md, g)
        sigma = restrict_to_commutant(rep, md, g)
        for _ in range(4):
            coeff = rng.standard_normal(md.commutant_basis.shape[0]) + 1j * rng.standard_normal(
                md.commutant_basis.shape[0]
            )
            b = np.tensordot(coeff, md.commutant_basis, axes=(0, 0))
            b /= np.linalg.norm(b)
            lhs = complex(np.trace(rho @ b))
            rhs = commutant_trace(rep, md, sigma @ b)
            worst_lemma = max(worst_lemma, abs(lhs - rhs))
    out.append(CheckResult("commutant_restriction_identity", worst_lemma, 1e-9))

    worst_channel = 0.0
    for _ in range(4):
        channel = random_commutant_channel(md, rng)
        moved = apply_channel(channel, np.outer(omega, omega.conj()))
        diff = restrict_to_algebra(rep, moved) - rep.state.density
        worst_channel = max(worst_channel, diff.norm())
    out.append(CheckResult("channel_extension", worst_channel, 1e-9))

    if rep.shape.num_blocks == 1:
        model = BipartiteModel.from_rep(rep)
        residuals = oracle_suite(model, rep, md, gauges=gs[:3], check=False)
        out.append(CheckResult("bipartite_oracle", max(residuals.values()), 1e-9))
    return out


def _unit_images(rep: GnsRep):
    from .gns import represent as _rep

    return [_rep(rep, u) for _, u in rep.units.iter_units()]


def run_verify(spec: ProblemSpec, samples: int, seed: int, out=sys.stdout) -> int:
    rep = build_gns(spec.state)
    md = build_modular(rep)
    checks = verification_checks(rep, md, spec.gauges, samples, seed)
    failed = 0
    width = max(len(c.name) for c in checks)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        if not c.passed:
            failed += 1
        print(f"{c.name:<{width}}  residual {c.residual:.3e}  tol {c.tolerance:.0e}  {status}", file=out)
    print(("all checks passed" if failed == 0 else f"{failed} check(s) failed"), file=out)
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gns",
        description="GNS, modular and gauge-entropy computations on a problem spec",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in TASK_NAMES:
        p = sub.add_parser(name)
        p.add_argument("--spec", required=True, help="path to the JSON problem spec")
        p.add_argument("--out", default=".", help="output directory for generated files")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        if name == "extremize":
            p.add_argument("--max-iter", type=int, default=None)
            p.add_argument("--starts", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        spec = parse_spec(args.spec)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    seed = _resolve(spec, args.command, "seed", args.seed,
                    spec.sample_seed if spec.sample_seed is not None else DEFAULT_SEED)
    samples = _resolve(spec, args.command, "samples", args.samples,
                       spec.sample_count if spec.sample_count is not None else DEFAULT_SAMPLES)
    outdir = Path(args.out)

    if args.command == "report":
        return run_report(spec)
    if args.command == "orbit":
        return run_orbit(spec, outdir, int(samples), int(seed))
    if args.command == "extremize":
        return run_extremize(spec, outdir, int(seed), args.max_iter, args.starts)
    return run_verify(spec, int(samples), int(seed))


if __name__ == "__main__":
    raise SystemExit(main())

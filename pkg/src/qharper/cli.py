"""Command-line driver.

Subcommands wrap the diagnostic pipelines: classical-sos (surface of section),
quantum-floquet (propagator eigenstate table), husimi-gallery (one phase-space
image per eigenstate), vjk-analysis (averaged-drive matrix and dispersion
profile), spectrum-stats (quasi-energy spacing statistics), width-compare
(classical vs quantum chaotic-width estimates) and sweep-n (dimension scan).
Every run writes a manifest.json listing each output with its sha256.
QHARPER_THREADS caps the worker count of the parallel stages.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import classical, floquet, husimi, magnus, spacing
from .config import ConfigError, RunConfig, build_config, parse_config_text
from .matio import FLAG_HERMITIAN, FLAG_UNITARY, Manifest, write_csv, write_heatmap_png, write_matrix
from .qspace import QuantumSpace, build_h0

TWO_PI = 2.0 * math.pi


def thread_cap() -> int:
    raw = os.environ.get("QHARPER_THREADS", "")
    try:
        n = int(raw)
        return max(1, n)
    except ValueError:
        return os.cpu_count() or 1


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key=value config file")
    p.add_argument("--a", type=float, dest="a")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--mu-prime", type=float, dest="mu_prime")
    p.add_argument("--n-dim", type=int, dest="n_dim")
    p.add_argument("--trotter-steps", type=int, dest="trotter_steps")
    p.add_argument("--tau-s", type=float, dest="tau_s")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="output_dir")
    p.add_argument("--emit", type=lambda s: tuple(x.strip() for x in s.split(",")))
    p.add_argument("--threshold", type=float)
    p.add_argument("--brody-beta", type=float, dest="brody_beta")
    p.add_argument("--n-orbits", type=int, dest="n_orbits")
    p.add_argument("--n-points", type=int, dest="n_points")
    p.add_argument("--n-periods", type=int, dest="n_periods")
    p.add_argument("--steps-per-period", type=int, dest="steps_per_period")
    p.add_argument("--n-list", type=lambda s: tuple(int(x) for x in s.replace(",", " ").split()),
                   dest="n_list")


_CONFIG_KEYS = ("a", "epsilon", "mu", "mu_prime", "n_dim", "trotter_steps", "tau_s",
                "seed", "output_dir", "emit", "threshold", "brody_beta", "n_orbits",
                "n_points", "n_periods", "steps_per_period", "n_list")


def _config_from_args(args) -> RunConfig:
    file_values = {}
    if args.config is not None:
        file_values = parse_config_text(Path(args.config).read_text())
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    return build_config(file_values, overrides)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".writable"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from exc
    return out


def _manifest(cfg: RunConfig, command: str, root: Path) -> Manifest:
    man = Manifest(command=command, config=cfg.asdict(), seed=cfg.seed, root=root)
    if cfg.n_dim % 4 == 0:
        man.warnings.append(
            "n_dim is a multiple of 4: the unperturbed spectrum may carry exact degeneracies"
        )
    return man


def _floquet_pipeline(cfg: RunConfig):
    space = QuantumSpace(cfg.n_dim)
    h0 = build_h0(cfg.model, space)
    u = floquet.floquet_propagator(cfg.model, space, h0,
                                   n_tau=cfg.effective_trotter_steps(),
                                   tau_s=cfg.tau_s)
    records = floquet.floquet_eigensystem(u, h0)
    return space, h0, u, records


def _write_floquet_csv(path, records) -> None:
    write_csv(path, ["j", "quasi_energy", "mu_h0", "sigma_h0"],
              ((r.index, r.quasi_energy, r.mu_h0, r.sigma_h0) for r in records))


def cmd_classical_sos(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    man = _manifest(cfg, "classical-sos", out)
    orbits = classical.poincare_section(cfg.model, cfg.n_orbits, cfg.n_points,
                                        cfg.seed, cfg.tau_s, cfg.steps_per_period)
    if "csv" in cfg.emit:
        def rows():
            for i, orb in enumerate(orbits):
                for k in range(len(orb.energies)):
                    yield (i, k, orb.phi[k], orb.p[k], orb.energies[k])
        write_csv(out / "sections.csv", ["orbit_id", "period_index", "phi", "p", "H0"], rows())
        man.add(out / "sections.csv")
        write_csv(out / "orbit_stats.csv", ["orbit_id", "mean_H0", "sigma_H0"],
                  ((i, o.mean_h0, o.sigma_h0) for i, o in enumerate(orbits)))
        man.add(out / "orbit_stats.csv")
    man.write(out / "manifest.json")
    return 0


def cmd_quantum_floquet(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    man = _manifest(cfg, "quantum-floquet", out)
    space, h0, u, records = _floquet_pipeline(cfg)
    if "csv" in cfg.emit:
        _write_floquet_csv(out / "floquet.csv", records)
        man.add(out / "floquet.csv")
    if "bin" in cfg.emit:
        write_matrix(out / "propagator.qhrp", u, flags=FLAG_UNITARY)
        man.add(out / "propagator.qhrp")
        vectors = np.column_stack([r.state for r in records])
        write_matrix(out / "eigenvectors.qhrp", vectors, flags=FLAG_UNITARY)
        man.add(out / "eigenvectors.qhrp")
    man.write(out / "manifest.json")
    return 0


def cmd_husimi_gallery(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    man = _manifest(cfg, "husimi-gallery", out)
    space, h0, u, records = _floquet_pipeline(cfg)
    if "csv" in cfg.emit:
        _write_floquet_csv(out / "floquet.csv", records)
        man.add(out / "floquet.csv")

    def render(rec):
        grid = husimi.husimi_grid(space, rec.state)
        if "png" in cfg.emit:
            husimi.write_png(grid, out / f"husimi_{rec.index:04d}.png")
        if "bin" in cfg.emit:
            write_matrix(out / f"husimi_{rec.index:04d}.qhrp",
                         grid.values.astype(complex), flags=FLAG_HERMITIAN)
        return rec.index

    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        list(pool.map(render, records))
    for rec in records:  # manifest in deterministic order
        if "png" in cfg.emit:
            man.add(out / f"husimi_{rec.index:04d}.png")
        if "bin" in cfg.emit:
            man.add(out / f"husimi_{rec.index:04d}.qhrp")
    man.write(out / "manifest.json")
    return 0


def cmd_vjk_analysis(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    man = _manifest(cfg, "vjk-analysis", out)
    space = QuantumSpace(cfg.n_dim)
    h0 = build_h0(cfg.model, space)
    basis = magnus.eigenbasis(h0)
    if basis.possibly_degenerate:
        man.warnings.append(
            f"unperturbed spectrum has a gap of {basis.min_gap:.3e}; "
            "dispersion estimates near degenerate pairs are unreliable"
        )
    v = magnus.v_matrix(basis, space)
    mu_eff = magnus.effective_drive_strength(cfg.model)
    sigma = magnus.dispersion_estimate(v, 1.0)  # per unit drive strength
    if "csv" in cfg.emit:
        write_csv(out / "sigma_profile.csv", ["j", "j_over_n", "E_j", "sigma_over_mu"],
                  ((j, j / cfg.n_dim, basis.energies[j], sigma[j])
                   for j in range(cfg.n_dim)))
        man.add(out / "sigma_profile.csv")
    if "bin" in cfg.emit:
        write_matrix(out / "vjk.qhrp", v)
        man.add(out / "vjk.qhrp")
    if "png" in cfg.emit:
        write_heatmap_png(out / "vjk_abs.png", np.abs(v))
        man.add(out / "vjk_abs.png")
    # propagator matrix elements in the h0 eigenbasis at quarter periods
    if mu_eff != 0.0 and ("png" in cfg.emit or "bin" in cfg.emit):
        n_tau = cfg.effective_trotter_steps()
        for label, tau_end in (("quarter", TWO_PI / 4), ("half", TWO_PI / 2),
                               ("threequarter", 3 * TWO_PI / 4), ("full", TWO_PI)):
            u_tau = floquet.partial_propagator(cfg.model, space, tau_end, n_tau)
            elems = np.abs(basis.vectors.conj().T @ u_tau @ basis.vectors)
            if "bin" in cfg.emit:
                write_matrix(out / f"u_{label}.qhrp", elems.astype(complex))
                man.add(out / f"u_{label}.qhrp")
            if "png" in cfg.emit:
                write_heatmap_png(out / f"u_{label}.png", elems, vmax=1.0)
                man.add(out / f"u_{label}.png")
    man.write(out / "manifest.json")
    return 0


def cmd_spectrum_stats(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    man = _manifest(cfg, "spectrum-stats", out)
    space, h0, u, records = _floquet_pipeline(cfg)
    regular, ergodic = floquet.subspace_split(records, cfg.threshold)
    samples = [spacing.quasi_energy_spacings(records, "full spectrum")]
    if len(regular) >= 3:
        samples.append(spacing.quasi_energy_spacings(regular, "regular subspace"))
    if len(ergodic) >= 3:
        samples.append(spacing.quasi_energy_spacings(ergodic, "ergodic subspace"))
    brody_ref = spacing.brody_reference(cfg.brody_beta)
    br_ref = spacing.berry_robnik_reference([0.1, 0.45, 0.45],
                                            ["poisson", "goe", "goe"])
    if "csv" in cfg.emit:
        edges = np.linspace(0.0, 4.0, 31)
        centers = (edges[:-1] + edges[1:]) / 2.0
        for sample in samples:
            tag = sample.source.replace(" ", "_")
            hist, _ = np.histogram(sample.spacings, bins=edges, density=True)
            write_csv(out / f"histogram_{tag}.csv",
                      ["s_bin_center", "empirical_density", "poisson",
                       "wigner_dyson", "brody_beta", "berry_robnik"],
                      ((c, h, spacing.poisson_pdf(c), spacing.wigner_dyson_pdf(c),
                        brody_ref.pdf(c), br_ref.pdf(c))
                       for c, h in zip(centers, hist)))
            man.add(out / f"histogram_{tag}.csv")
        write_csv(out / "ks.csv", ["source", "n_spacings", "ks_poisson", "ks_goe"],
                  ((s.source, len(s.spacings),
                    spacing.ks_statistic(s, spacing.POISSON),
                    spacing.ks_statistic(s, spacing.GOE)) for s in samples))
        man.add(out / "ks.csv")
    if "png" in cfg.emit:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        grid = np.linspace(0.0, 4.0, 400)
        for sample in samples:
            ax.hist(sample.spacings, bins=np.linspace(0, 4, 31), density=True,
                    histtype="step", label=sample.source)
        ax.plot(grid, spacing.poisson_pdf(grid), "m:", label="poisson")
        ax.plot(grid, spacing.wigner_dyson_pdf(grid), "k--", label="wigner-dyson")
        ax.set_xlabel("s")
        ax.set_ylabel("p(s)")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out / "spacings.png", dpi=150)
        plt.close(fig)
        man.add(out / "spacings.png")
    man.write(out / "manifest.json")
    return 0


def cmd_width_compare(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    man = _manifest(cfg, "width-compare", out)
    model = cfg.model
    model.require_positive()
    e_low, e_high = classical.separatrix_energies(model)
    e_s = e_low  # primary resonance separatrix
    mu_eff = magnus.effective_drive_strength(model)
    classical_est = classical.chaotic_halfwidth_harper(mu_eff / 2.0, model.omega0) \
        if math.isclose(model.a, model.epsilon) else float("nan")
    half, sig = classical.measured_chaotic_widths(model, e_s, cfg.seed,
                                                  n_orbits=min(cfg.n_orbits, 64),
                                                  n_periods=cfg.n_periods,
                                                  steps_per_period=cfg.steps_per_period)
    space = QuantumSpace(cfg.n_dim)
    h0 = build_h0(model, space)
    basis = magnus.eigenbasis(h0)
    quantum_est = magnus.ergodic_width_estimate(basis, model, space, e_s)
    _, _, u, records = _floquet_pipeline(cfg)
    quantum_meas = max(r.sigma_h0 for r in records)
    rows = [
        ("separatrix_energy", e_s),
        ("classical_estimate", classical_est),
        ("classical_measured", half),
        ("classical_measured_sigma", sig),
        ("quantum_estimate", quantum_est),
        ("quantum_measured", quantum_meas),
    ]
    if "csv" in cfg.emit:
        write_csv(out / "widths.csv", ["key", "value"], rows)
        man.add(out / "widths.csv")
    man.write(out / "manifest.json")
    return 0


def cmd_sweep_n(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    man = _manifest(cfg, "sweep-n", out)
    e_s = classical.separatrix_energies(cfg.model)[0] \
        if cfg.a > 0 and cfg.epsilon > 0 else cfg.epsilon

    def run_cell(n: int):
        sub = out / f"n{n:04d}"
        sub.mkdir(exist_ok=True)
        cell = RunConfig(**{**cfg.asdict(), "n_dim": n, "trotter_steps": 0,
                            "output_dir": str(sub),
                            "emit": tuple(cfg.emit), "n_list": tuple(cfg.n_list)})
        space, h0, u, records = _floquet_pipeline(cell)
        sep = min(records, key=lambda r: abs(r.mu_h0 - e_s))
        grid = husimi.husimi_grid(space, sep.state)
        if "png" in cfg.emit:
            husimi.write_png(grid, sub / f"husimi_separatrix_n{n:04d}.png")
        if "csv" in cfg.emit:
            _write_floquet_csv(sub / "floquet.csv", records)
        return n, sep.index, sep.mu_h0, sep.sigma_h0, grid.participation_number()

    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        results = list(pool.map(run_cell, cfg.n_list))
    results.sort(key=lambda t: t[0])
    if "csv" in cfg.emit:
        write_csv(out / "sweep.csv",
                  ["n_dim", "separatrix_state", "mu_h0", "sigma_h0", "participation"],
                  results)
        man.add(out / "sweep.csv")
    for n, *_ in results:
        sub = out / f"n{n:04d}"
        if "png" in cfg.emit:
            man.add(sub / f"husimi_separatrix_n{n:04d}.png")
        if "csv" in cfg.emit:
            man.add(sub / "floquet.csv")
    man.write(out / "manifest.json")
    return 0


_COMMANDS = {
    "classical-sos": cmd_classical_sos,
    "quantum-floquet": cmd_quantum_floquet,
    "husimi-gallery": cmd_husimi_gallery,
    "vjk-analysis": cmd_vjk_analysis,
    "spectrum-stats": cmd_spectrum_stats,
    "width-compare": cmd_width_compare,
    "sweep-n": cmd_sweep_n,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qharper",
        description="Periodically perturbed Harper model: classical and quantum diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"qharper: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

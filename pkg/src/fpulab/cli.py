"""Command-line front end.

Subcommands mirror the library: simulate writes a run directory
(manifest.json + series.bin), the analysis commands read runs or parameters
and write deterministic CSV/JSON. Exit codes: 0 success, 1 runtime/I-O
failure, 2 usage (argparse), 3 numerical blow-up.
"""

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .chain import ChainState, ModelParams, random_thermal_init, total_energy
from .integrators import YOSHIDA6, BlowUpError, integrate_raw
from .breathers import detect_breathers, frequency_filter, pi_mode_experiment
from .linewidth import (correlation_time, default_time_grid,
                        predict_correlation, predict_spectrum, spectral_width)
from .lyapunov import lyapunov_fpu, lyapunov_map
from .resonance import exact_quartets, verify_no_3to1, verify_no_4to0
from .runio import (RunLock, RunManifest, SERIES_NAME, load_run,
                    save_manifest, write_series)
from .spectral import (linear_dispersion, measure_eta,
                       measure_eta_fixed_point, spatiotemporal_spectrum,
                       wave_series)
from .thermo import thermo_solution

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_BLOWUP = 3


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row])


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _params_from_args(args):
    return ModelParams(n=args.n, beta=args.beta, energy=args.energy)


def cmd_simulate(args):
    params = _params_from_args(args)
    os.makedirs(args.out, exist_ok=True)
    with RunLock(args.out):
        state = random_thermal_init(params, args.seed)
        q, p = state.q.copy(), state.p.copy()
        if args.warmup_steps:
            import fpulab._kernels as _k
            _k.composition_steps(q, p, params.beta, args.dt,
                                 args.warmup_steps, YOSHIDA6.c, YOSHIDA6.d)
            if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
                raise BlowUpError(args.warmup_steps, args.warmup_steps * args.dt)
        e0 = total_energy(ChainState(q.copy(), p.copy()), params)
        first_q, first_p = q.copy(), p.copy()
        qs, ps = integrate_raw(q, p, args.dt, args.steps, args.sample_every,
                               params.beta)
        qs = np.vstack([first_q, qs])
        ps = np.vstack([first_p, ps])
        samples = qs.shape[0]
        horizon = (samples - 1) * args.sample_every * args.dt
        man = RunManifest(
            params=params, dt=args.dt, seed=args.seed,
            warmup_steps=args.warmup_steps, sample_every=args.sample_every,
            samples=samples, horizon=horizon,
            created_utc=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            producer="fpulab %s" % __version__)
        write_series(os.path.join(args.out, SERIES_NAME), qs, ps)
        save_manifest(args.out, man)
        e1 = total_energy(ChainState(qs[-1].copy(), ps[-1].copy()), params)
        drift = abs(e1 - e0) / params.energy
    print("run: %s  samples=%d  horizon=%g  energy-drift=%.3e"
          % (args.out, samples, horizon, drift))
    return EXIT_OK


def cmd_thermo(args):
    sol = thermo_solution(args.beta, args.edensity)
    doc = {k: getattr(sol, k) for k in
           ("beta", "edensity", "theta", "y2", "y4", "eta", "eta_sc",
            "a_coef", "b_coef", "ae", "ae_tilde")}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "thermo.json"), doc)
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


def cmd_eta(args):
    man, qs, ps = load_run(args.run)
    out = args.out or args.run
    os.makedirs(out, exist_ok=True)
    sol = thermo_solution(man.params.beta, man.params.edensity)
    sample_dt = man.sample_every * man.dt
    if args.eta_source == "gibbs":
        eta0 = sol.eta
    else:
        eta0, _ = measure_eta_fixed_point(qs, ps, sample_dt,
                                          window=args.window,
                                          segments=args.segments)
    ak = wave_series(qs, ps, eta0)
    dens = spatiotemporal_spectrum(ak, sample_dt, window=args.window,
                                   segments=args.segments)
    om = linear_dispersion(man.params.n)
    eta_k, eta_bar = measure_eta(dens, om)
    rows = [(int(k), float(om[k]), float(eta_k[i] * om[k]), float(eta_k[i]))
            for i, k in enumerate(dens.k_list)]
    _write_csv(os.path.join(out, "eta_by_k.csv"),
               ["k", "omega_k", "omega_c", "eta_k"], rows)
    _write_json(os.path.join(out, "eta_summary.json"), {
        "eta_bar": eta_bar, "eta_gibbs": sol.eta, "eta_sc": sol.eta_sc,
        "eta_source": args.eta_source, "theta": sol.theta,
        "n": man.params.n, "beta": man.params.beta,
        "edensity": man.params.edensity, "segments": args.segments,
        "window": args.window})
    print("eta_bar=%.6f  eta_gibbs=%.6f" % (eta_bar, sol.eta))
    return EXIT_OK


def cmd_spectrum(args):
    man, qs, ps = load_run(args.run)
    out = args.out or args.run
    os.makedirs(out, exist_ok=True)
    sol = thermo_solution(man.params.beta, man.params.edensity)
    sample_dt = man.sample_every * man.dt
    k_list = args.k if args.k else None
    ak = wave_series(qs, ps, sol.eta)
    dens = spatiotemporal_spectrum(ak, sample_dt, window=args.window,
                                   segments=args.segments, k_list=k_list)
    rows = []
    for i, k in enumerate(dens.k_list):
        for j, om in enumerate(dens.omega):
            rows.append((int(k), float(om), float(dens.power[i, j])))
    _write_csv(os.path.join(out, "spectrum.csv"), ["k", "omega", "power"], rows)
    _write_json(os.path.join(out, "spectrum_meta.json"), {
        "n": man.params.n, "beta": man.params.beta,
        "edensity": man.params.edensity, "eta": sol.eta,
        "sample_dt": sample_dt, "segments": args.segments,
        "window": args.window, "modes": [int(k) for k in dens.k_list],
        "omega_bins": int(dens.omega.size)})
    print("spectrum: %d modes x %d bins" % (len(dens.k_list), dens.omega.size))
    return EXIT_OK


def cmd_resonances(args):
    os.makedirs(args.out, exist_ok=True)
    quartets = exact_quartets(args.n, tol=args.tol)
    rows = [(q.k, q.l, q.m, q.s, q.kind, repr(q.residual)) for q in quartets]
    _write_csv(os.path.join(args.out, "quartets.csv"),
               ["k", "l", "m", "s", "kind", "residual"], rows)
    r31 = verify_no_3to1(args.n)
    r40 = verify_no_4to0(args.n)
    _write_json(os.path.join(args.out, "resonance_report.json"), {
        "n": args.n, "tol": args.tol, "exact_2to2": len(quartets),
        "scan_3to1": {"min_residual": r31.min_residual,
                      "argmin": list(r31.argmin), "exact": r31.exact_count,
                      "continuum_min_gap": r31.continuum_min_gap},
        "scan_4to0": {"min_residual": r40.min_residual,
                      "argmin": list(r40.argmin), "exact": r40.exact_count}})
    print("exact 2->2 quartets: %d  (3->1 min residual %.3e)"
          % (len(quartets), r31.min_residual))
    return EXIT_OK


def _measured_width(man, qs, ps, sol, k, segments, window):
    sample_dt = man.sample_every * man.dt
    ak = wave_series(qs, ps, sol.eta)
    dens = spatiotemporal_spectrum(ak, sample_dt, window=window,
                                   segments=segments, k_list=[k])
    wt = sol.eta * 2.0 * np.sin(np.pi * k / man.params.n)
    band = (dens.omega >= 0.25 * wt) & (dens.omega <= 2.5 * wt)
    return spectral_width(dens.power[0, band], dens.omega[band])


def cmd_linewidth(args):
    os.makedirs(args.out, exist_ok=True)
    sol = thermo_solution(args.beta, args.energy / args.n)
    run = None
    if args.run:
        run = load_run(args.run)
        if run[0].params.n != args.n:
            raise ValueError("--run has n=%d, expected %d"
                             % (run[0].params.n, args.n))
    width_rows = []
    summary = {"n": args.n, "beta": args.beta, "edensity": args.energy / args.n,
               "eta": sol.eta, "theta": sol.theta, "umklapp": args.umklapp,
               "kernel": args.kernel, "modes": {}}
    grid = default_time_grid(args.n, sol.eta, periods=args.periods,
                             per_period=args.per_period)
    for k in args.k:
        pred = predict_correlation(k, grid, args.n, sol, umklapp=args.umklapp,
                                   kernel=args.kernel)
        tau, ratio = correlation_time(pred)
        spec = predict_spectrum(pred)
        w_pred = spectral_width(spec.power, spec.omega)
        rows = [(float(t), float(c.real), float(c.imag), float(abs(c)))
                for t, c in zip(pred.t_grid, pred.c_over_c0)]
        _write_csv(os.path.join(args.out, "correlation_k%d.csv" % k),
                   ["t", "re", "im", "abs"], rows)
        w_meas = float("nan")
        if run is not None:
            w_meas = _measured_width(run[0], run[1], run[2], sol, k,
                                     args.segments, args.window)
        width_rows.append((k, float(w_pred), float(w_meas)))
        other = predict_correlation(
            k, grid, args.n, sol, umklapp=args.umklapp,
            kernel="bare" if args.kernel == "renormalized" else "renormalized")
        tau_other, _ = correlation_time(other)
        summary["modes"][str(k)] = {
            "tau": tau, "tau_over_period": ratio, "w_pred": float(w_pred),
            "w_meas": None if np.isnan(w_meas) else float(w_meas),
            "terms": pred.terms, "excluded": pred.excluded,
            "tau_%s" % pred.kernel: tau, "tau_%s" % other.kernel: tau_other}
    _write_csv(os.path.join(args.out, "width.csv"),
               ["k", "W_pred", "W_meas"], width_rows)
    _write_json(os.path.join(args.out, "linewidth_summary.json"), summary)
    print("linewidth: %d modes -> %s" % (len(args.k), args.out))
    return EXIT_OK


def cmd_breathers(args):
    os.makedirs(args.out, exist_ok=True)
    if args.pi_mode:
        if args.n is None or args.beta is None or args.amplitude is None:
            raise ValueError("--pi-mode requires --n, --beta and --amplitude")
        from .chain import pi_mode_energy
        params = ModelParams(n=args.n, beta=args.beta,
                             energy=pi_mode_energy(args.n, args.beta,
                                                   args.amplitude))
        res = pi_mode_experiment(params, args.amplitude, seed=args.seed,
                                 horizon=args.horizon,
                                 threshold_factor=args.threshold_factor)
        _write_csv(os.path.join(args.out, "localization.csv"), ["t", "L"],
                   [(float(t), float(l)) for t, l in
                    zip(res.times, res.localization)])
        tracks = res.tracks
        summary = {"mode": "pi-mode", "n": args.n, "beta": args.beta,
                   "amplitude": args.amplitude, "ebar": res.ebar,
                   "db_window": list(res.db_window),
                   "tracks": len(tracks),
                   "max_lifetime": max((t.lifetime for t in tracks),
                                       default=0.0)}
    else:
        if args.run is None:
            raise ValueError("breathers needs either --pi-mode or --run")
        man, qs, ps = load_run(args.run)
        sample_dt = man.sample_every * man.dt
        if args.omega_cut is None:
            sol = thermo_solution(man.params.beta, man.params.edensity)
            omega_cut = 1.1 * 2.0 * sol.eta
        else:
            omega_cut = args.omega_cut
        field = frequency_filter(qs.T, omega_cut, sample_dt)
        tracks = detect_breathers(field, threshold_factor=args.threshold_factor)
        summary = {"mode": "filtered-run", "n": man.params.n,
                   "beta": man.params.beta, "omega_cut": omega_cut,
                   "tracks": len(tracks),
                   "max_lifetime": max((t.lifetime for t in tracks),
                                       default=0.0)}
    rows = []
    for tid, tr in enumerate(tracks):
        for t, (start, span), peak in tr.frames:
            rows.append((tid, float(t), int(start), int(span), float(peak)))
    _write_csv(os.path.join(args.out, "tracks.csv"),
               ["track", "t", "start", "span", "peak"], rows)
    _write_json(os.path.join(args.out, "breathers_summary.json"), summary)
    print("breathers: %d tracks" % len(tracks))
    return EXIT_OK


def cmd_lyapunov(args):
    os.makedirs(args.out, exist_ok=True)
    params = _params_from_args(args)
    est = lyapunov_fpu(params, args.seed, renorm_interval=args.interval,
                       resets=args.resets, d0=args.d0, dt=args.dt)
    _write_csv(os.path.join(args.out, "lyapunov_running.csv"),
               ["reset", "h_s", "h_partial"],
               [(i + 1, float(est.h_s[i]), float(est.h_partial[i]))
                for i in range(est.resets)])
    _write_json(os.path.join(args.out, "lyapunov.json"), {
        "n": args.n, "beta": args.beta, "energy": args.energy,
        "seed": args.seed, "h": est.h, "se": est.se,
        "resets": est.resets, "renorm_interval": est.renorm_interval,
        "d0": args.d0})
    print("h = %.6g +- %.2g" % (est.h, est.se))
    return EXIT_OK


def cmd_logistic(args):
    h = lyapunov_map(args.lam, x0=args.x0, iterations=args.iterations,
                     burn_in=args.burn_in)
    doc = {"lambda": args.lam, "x0": args.x0, "iterations": args.iterations,
           "burn_in": args.burn_in, "h": h}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "logistic.json"), doc)
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


def build_parser():
    top = argparse.ArgumentParser(
        prog="fpulab",
        description="Simulation and wave analysis of beta-FPU chains.")
    sub = top.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a chain and store the run")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--beta", type=float, required=True)
    sim.add_argument("--energy", type=float, required=True)
    sim.add_argument("--dt", type=float, default=0.01)
    sim.add_argument("--steps", type=int, required=True)
    sim.add_argument("--sample-every", type=int, default=10)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--warmup-steps", type=int, default=100000)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    th = sub.add_parser("thermo", help="equilibrium scalars at (beta, edensity)")
    th.add_argument("--beta", type=float, required=True)
    th.add_argument("--edensity", type=float, required=True)
    th.add_argument("--out")
    th.set_defaults(func=cmd_thermo)

    eta = sub.add_parser("eta", help="measure the dispersion factor from a run")
    eta.add_argument("--run", required=True)
    eta.add_argument("--segments", type=int, default=8)
    eta.add_argument("--window", choices=["hann", "rect"], default="hann")
    eta.add_argument("--eta-source", choices=["gibbs", "fixed-point"],
                     default="gibbs")
    eta.add_argument("--out")
    eta.set_defaults(func=cmd_eta)

    spec = sub.add_parser("spectrum", help="per-mode Welch spectra of a run")
    spec.add_argument("--run", required=True)
    spec.add_argument("--segments", type=int, default=8)
    spec.add_argument("--window", choices=["hann", "rect"], default="hann")
    spec.add_argument("--k", type=int, action="append")
    spec.add_argument("--out")
    spec.set_defaults(func=cmd_spectrum)

    res = sub.add_parser("resonances", help="exact quartets and no-go scans")
    res.add_argument("--n", type=int, required=True)
    res.add_argument("--tol", type=float, default=1e-9)
    res.add_argument("--out", required=True)
    res.set_defaults(func=cmd_resonances)

    lw = sub.add_parser("linewidth", help="kinetic correlation/width prediction")
    lw.add_argument("--n", type=int, required=True)
    lw.add_argument("--beta", type=float, required=True)
    lw.add_argument("--energy", type=float, required=True)
    lw.add_argument("--k", type=int, action="append", required=True)
    lw.add_argument("--umklapp", dest="umklapp", action="store_true",
                    default=True)
    lw.add_argument("--no-umklapp", dest="umklapp", action="store_false")
    lw.add_argument("--kernel", choices=["renormalized", "bare"],
                    default="renormalized")
    lw.add_argument("--periods", type=int, default=512)
    lw.add_argument("--per-period", type=int, default=64)
    lw.add_argument("--run")
    lw.add_argument("--segments", type=int, default=8)
    lw.add_argument("--window", choices=["hann", "rect"], default="hann")
    lw.add_argument("--out", required=True)
    lw.set_defaults(func=cmd_linewidth)

    br = sub.add_parser("breathers", help="breather detection experiments")
    br.add_argument("--pi-mode", action="store_true")
    br.add_argument("--n", type=int)
    br.add_argument("--beta", type=float)
    br.add_argument("--amplitude", type=float)
    br.add_argument("--horizon", type=float, default=20000.0)
    br.add_argument("--seed", type=int, default=0)
    br.add_argument("--run")
    br.add_argument("--omega-cut", type=float)
    br.add_argument("--threshold-factor", type=float, default=5.0)
    br.add_argument("--out", required=True)
    br.set_defaults(func=cmd_breathers)

    ly = sub.add_parser("lyapunov", help="largest Lyapunov exponent of a chain")
    ly.add_argument("--n", type=int, required=True)
    ly.add_argument("--beta", type=float, required=True)
    ly.add_argument("--energy", type=float, required=True)
    ly.add_argument("--seed", type=int, default=0)
    ly.add_argument("--resets", type=int, default=1000)
    ly.add_argument("--interval", type=float, default=1.0)
    ly.add_argument("--d0", type=float, default=1e-10)
    ly.add_argument("--dt", type=float, default=0.02)
    ly.add_argument("--out", required=True)
    ly.set_defaults(func=cmd_lyapunov)

    lg = sub.add_parser("logistic", help="logistic-map Lyapunov exponent")
    lg.add_argument("--lam", type=float, required=True)
    lg.add_argument("--x0", type=float, default=0.6180339887498949)
    lg.add_argument("--iterations", type=int, default=1000000)
    lg.add_argument("--burn-in", type=int, default=1000)
    lg.add_argument("--out")
    lg.set_defaults(func=cmd_logistic)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BlowUpError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_BLOWUP
    except (OSError, RuntimeError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

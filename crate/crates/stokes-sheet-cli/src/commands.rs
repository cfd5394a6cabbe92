use serde_json::json;
use std::fs;
use std::path::Path;
use stokes_sheet::bie::{far_field_constants, solve_density};
use stokes_sheet::equilibria::{continue_branch_with, equilibrium_stability, flat_spectrum, ContinuationOptions};
use stokes_sheet::evolution::{simulate_from, EvolutionState, DIAGNOSTIC_MODES};
use stokes_sheet::kernels::KernelPoint;
use stokes_sheet::layer::{FieldEvaluator, Side};
use stokes_sheet::{Error, InterfaceProfile};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{columns, num, sidecar, sidecar_path, write_csv, write_json, write_snapshot, Snapshot};

/// Parameter errors surfacing from the library are configuration errors.
fn classify(e: Error) -> CliError {
    match e {
        Error::InvalidParameter(m) => CliError::Config(m),
        e @ Error::InvalidGridSize(_) => CliError::Config(e.to_string()),
        other => CliError::Numerics(other),
    }
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(anyhow::anyhow!("creating {}: {e}", dir.display())))
}

fn series_row(s: &EvolutionState, k: usize) -> Vec<String> {
    let d = &s.diagnostics;
    let mut row = vec![num(s.t), num(d.mean), num(d.max_amplitude), num(d.max_slope), num(d.c1), num(d.c3)];
    row.extend((0..k).map(|i| num(d.amplitudes.get(i).copied().unwrap_or(0.0))));
    row
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let params = cfg.params();
    let init = cfg.initial()?;
    let mut stepper = cfg.stepper.clone();
    if stepper.dt.is_none() {
        stepper.dt = init.dt;
    }
    stepper.resolve_dt(&init.profile, &params).map_err(classify)?;
    let traj = simulate_from(&init.profile, init.previous.as_ref(), init.t0, &stepper, &params).map_err(classify)?;

    make_dir(&out.join("snapshots"))?;
    let n = init.profile.n();
    let k = DIAGNOSTIC_MODES.min(n / 2);
    let mut header = columns(&["t", "mean", "amp_max", "slope_max", "c1", "c3"]);
    header.extend((1..=k).map(|i| format!("a{i}")));
    let series = out.join("timeseries.csv");
    write_csv(&series, &header, traj.states.iter().map(|s| series_row(s, k)))?;
    let breakdown = traj.breakdown.as_ref().map(|b| {
        json!({ "t": b.t, "reason": b.reason.to_string(), "message": b.message, "last_good_t": b.last_good.t })
    });
    let extra = json!({
        "scheme": stepper.scheme.to_string(),
        "dt": traj.dt,
        "t0": init.t0,
        "t_end": stepper.t_end,
        "stride": stepper.stride,
        "dealias": stepper.dealias,
        "records": traj.states.len(),
        "breakdown": breakdown,
    });
    write_json(&sidecar_path(&series), &sidecar("simulate", &params, n, &header, extra))?;

    let last = traj.states.len() - 1;
    let previous_of = |i: usize| -> Option<InterfaceProfile> {
        if i == last {
            traj.previous.clone()
        } else if i == 0 {
            init.previous.clone()
        } else if stepper.stride == 1 {
            Some(traj.states[i - 1].profile.clone())
        } else {
            None
        }
    };
    let every = cfg.output.snapshot_every;
    for (i, s) in traj.states.iter().enumerate() {
        let wanted = i == 0 || i == last || (every > 0 && i % every == 0);
        if !wanted {
            continue;
        }
        let snap = Snapshot {
            profile: s.profile.clone(),
            t: s.t,
            dt: traj.dt,
            previous: previous_of(i),
        };
        let extra = json!({ "record": i, "scheme": stepper.scheme.to_string() });
        write_snapshot(&out.join("snapshots").join(format!("snapshot_{i:06}.csv")), &snap, &params, extra.clone())?;
        if i == last {
            write_snapshot(&out.join("snapshots").join("final.csv"), &snap, &params, extra)?;
        }
    }
    match &traj.breakdown {
        Some(b) => Err(CliError::Breakdown(format!(
            "t = {}: {} (last good state at t = {})",
            b.t, b.message, b.last_good.t
        ))),
        None => Ok(()),
    }
}

pub fn spectrum(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let params = cfg.params();
    let n = cfg.n();
    let top = n / 2 - 1;
    let kmax = cfg.spectrum.kmax.unwrap_or(32.min(top));
    if kmax == 0 || kmax > top {
        return Err(CliError::Config(format!("[spectrum] kmax must lie in 1..={top}")));
    }
    let rep = flat_spectrum(&params, kmax, n).map_err(classify)?;
    make_dir(out)?;
    let header = columns(&["k", "lambda_analytic", "lambda_numeric_re", "lambda_numeric_im"]);
    let matched = rep.matched();
    let err = matched.iter().map(|(_, a, z)| (z - a).norm() / a.abs()).fold(0.0, f64::max);
    let path = out.join("spectrum.csv");
    write_csv(&path, &header, matched.iter().map(|(k, a, z)| vec![k.to_string(), num(*a), num(z.re), num(z.im)]))?;
    let extra = json!({
        "theta0": rep.theta0,
        "classification": rep.classification,
        "kmax": kmax,
        "max_relative_error": err,
        "leading_numeric": [rep.numeric[0].re, rep.numeric[0].im],
    });
    write_json(&sidecar_path(&path), &sidecar("spectrum", &params, n, &header, extra))?;
    Ok(())
}

pub fn branch(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let b = &cfg.branch;
    let fluid = cfg.params();
    let n = cfg.n();
    let opts = ContinuationOptions {
        n,
        ds: b.ds,
        ds_max: b.ds_max,
        s_max: b.s_max,
        slope_cap: b.slope_cap,
        max_points: b.max_points,
        ..ContinuationOptions::default()
    };
    let mut points = continue_branch_with(b.ell, &opts).map_err(classify)?;
    if b.stability_every > 0 {
        for (i, p) in points.iter_mut().enumerate() {
            if i % b.stability_every != 0 {
                continue;
            }
            let params = p.params(fluid.mu_plus, fluid.mu_minus, fluid.sigma)?;
            let ev = equilibrium_stability(p, &params, b.subspace.into())?;
            p.stability = ev.first().map(|z| z.re);
        }
    }
    make_dir(out)?;
    let header = columns(&["ell", "s", "lambda", "amplitude", "slope_max", "eig_lead_re"]);
    let path = out.join("branch.csv");
    write_csv(
        &path,
        &header,
        points.iter().map(|p| {
            vec![
                p.ell.to_string(),
                num(p.s),
                num(p.lambda),
                num(p.amplitude()),
                num(p.max_slope()),
                p.stability.map(num).unwrap_or_default(),
            ]
        }),
    )?;
    let last = points.last().expect("branch holds the bifurcation point");
    let extra = json!({
        "continuation": opts,
        "stability_every": b.stability_every,
        "subspace": format!("{:?}", b.subspace),
        "points": points.len(),
        "max_residual": points.iter().map(|p| p.residual).fold(0.0, f64::max),
        "final": { "s": last.s, "lambda": last.lambda, "amplitude": last.amplitude(), "slope_max": last.max_slope() },
        "note": "lambda = -theta / sigma; the fluid theta is not used",
    });
    write_json(&sidecar_path(&path), &sidecar("branch", &fluid, n, &header, extra))?;
    Ok(())
}

fn axis(range: [f64; 2], m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![range[0]];
    }
    (0..m).map(|i| range[0] + (range[1] - range[0]) * i as f64 / (m - 1) as f64).collect()
}

pub fn fields(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let params = cfg.params();
    let init = cfg.initial()?;
    let f = &init.profile;
    let beta = solve_density(f, &params).map_err(classify)?;
    let far = far_field_constants(f, &beta, &params);
    let fc = &cfg.fields;
    let ev = FieldEvaluator::new(f, &beta.components(), &params, fc.refinement).map_err(classify)?;
    let mut rows = Vec::with_capacity(fc.nx1 * fc.nx2);
    let mut masked = 0usize;
    for x2 in axis(fc.x2, fc.nx2) {
        for x1 in axis(fc.x1, fc.nx1) {
            let p = KernelPoint::new(x1, x2);
            let (v, q, side) = match ev.eval(p) {
                Ok(b) => (b.velocity, b.pressure, b.side),
                Err(Error::InsideCollar { .. }) => {
                    masked += 1;
                    ([f64::NAN; 2], f64::NAN, ev.quadrature().side(p))
                }
                Err(e) => return Err(CliError::Numerics(e)),
            };
            let side = match side {
                Side::Upper => "upper",
                Side::Lower => "lower",
            };
            rows.push(vec![num(x1), num(x2), num(v[0]), num(v[1]), num(q), side.to_string()]);
        }
    }
    make_dir(out)?;
    let header = columns(&["x1", "x2", "v1", "v2", "q", "side"]);
    let path = out.join("fields.csv");
    write_csv(&path, &header, rows)?;
    let extra = json!({
        "x1": fc.x1,
        "x2": fc.x2,
        "nx1": fc.nx1,
        "nx2": fc.nx2,
        "refinement": fc.refinement,
        "collar": ev.quadrature().collar(),
        "masked_points": masked,
        "far_field": { "c1": far.c1, "c2": far.c2, "c3": far.c3 },
        "profile": f.samples(),
    });
    write_json(&sidecar_path(&path), &sidecar("fields", &params, f.n(), &header, extra))?;
    Ok(())
}

use std::fmt::Display;

use cfsgauge_core::cfs::{spin_space, CorrelationOperator, SpinSpaceData};
use cfsgauge_core::dirac_box::{self, spinor_gram, SpacetimePoint};
use cfsgauge_core::gauge_fix::{build_gauge, build_gauge_par, charts_coincide_check};
use cfsgauge_core::linalg::{self, fro, identity, CMat};
use cfsgauge_core::manifold::{gaussian_check, manifold_dim, ChartFrame};
use cfsgauge_core::perturbation::{
    apply_local_phase, basis_waves, braket_kernel, gauged_basis, mixed_kernel, perturbed_correlation,
    perturbed_symmetric_gauge, symmetric_gauge_value, GaugeFunction,
};
use cfsgauge_core::spectral::{self, VectorKernel};
use cfsgauge_core::{random, DiracBox, Tolerances};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Entry, Observation};

/// Everything a task reads, plus the run's single random generator.
pub struct Context {
    pub dbox: DiracBox,
    pub points: Vec<SpacetimePoint>,
    pub tol: Tolerances,
    pub rng: ChaCha8Rng,
    pub parallel: bool,
}

#[derive(Default)]
pub struct TaskOutput {
    pub entries: Vec<Entry>,
    pub observations: Vec<Observation>,
}

type TaskResult = Result<TaskOutput, String>;

fn fail(e: impl Display) -> String {
    e.to_string()
}

/// Bases used by the point-wise tasks; keeps large grids affordable.
const MAX_BASES: usize = 8;
/// Offset of the neighbouring points used around each base point.
const NEIGHBOUR_STEP: f64 = 0.05;

fn neighbours(x: &SpacetimePoint, l: f64) -> Vec<SpacetimePoint> {
    let mut out = Vec::with_capacity(8);
    for s in [-NEIGHBOUR_STEP, NEIGHBOUR_STEP] {
        out.push(SpacetimePoint::new(x.t + s, x.x, l));
        for axis in 0..3 {
            let mut y = x.x;
            y[axis] += s;
            out.push(SpacetimePoint::new(x.t, y, l));
        }
    }
    out
}

impl Context {
    fn bases(&self) -> &[SpacetimePoint] {
        &self.points[..self.points.len().min(MAX_BASES)]
    }

    fn spin_at(&self, x: &SpacetimePoint) -> Result<SpinSpaceData, String> {
        let op = CorrelationOperator::new(self.dbox.correlation_matrix(x), 2, &self.tol).map_err(fail)?;
        spin_space(&op, &self.tol).map_err(fail)
    }

    fn random_point_near(&mut self, x: &SpacetimePoint, radius: f64) -> SpacetimePoint {
        let t = x.t + self.rng.random_range(-radius..=radius);
        let s: [f64; 3] = std::array::from_fn(|i| x.x[i] + self.rng.random_range(-radius..=radius));
        SpacetimePoint::new(t, s, self.dbox.cfg.l)
    }
}

pub fn dim_count(ctx: &mut Context) -> TaskResult {
    let f = ctx.dbox.f();
    let mut out = TaskOutput::default();
    out.entries.push(Entry::at_least("dim_count.mode_count", "regularity needs at least four modes", f as f64, 4.0));
    let dim = manifold_dim(2, 2, f).map_err(fail)?;
    out.entries.push(Entry::equal("dim_count.manifold_dimension", "dimension of the regular operator manifold", dim as f64, (8 * f - 16) as f64));
    let x = random::fixed_signature(&mut ctx.rng, 8, 2, 2, 1.0, 2.0);
    let rank = ChartFrame::new(&x, 2, 2, ctx.tol).map_err(fail)?.jacobian_rank_at_origin().map_err(fail)?;
    out.entries.push(Entry::equal("dim_count.jacobian_rank_f8", "dimension of the regular operator manifold", rank as f64, 48.0));
    let regular = ctx
        .points
        .iter()
        .filter(|x| linalg::signature(&ctx.dbox.correlation_matrix(x), ctx.tol.tol_rank_rel) == (2, 2))
        .count();
    out.entries.push(Entry::equal(
        "dim_count.regular_point_fraction",
        "box system is regular with at least four modes",
        regular as f64 / ctx.points.len() as f64,
        1.0,
    ));
    out.observations.push(Observation::new(
        "dim_count.asymptotic_ratio",
        "mode count asymptotics of the box",
        f as f64 / ctx.dbox.cfg.asymptotic_dimension(),
    ));
    Ok(out)
}

pub fn charts(ctx: &mut Context) -> TaskResult {
    let mut out = TaskOutput::default();
    let (mut trip, mut c2_err, mut lo, mut hi, mut coincide): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, f64::INFINITY, f64::NEG_INFINITY, 0.0);
    let mut failures = 0;
    for x in ctx.bases().to_vec() {
        let sx = ctx.spin_at(&x)?;
        let frame = ChartFrame::from_spin_space(&sx);
        // coordinate scale relative to the smallest nonzero eigenvalue of x
        let scale = linalg::image_split(sx.point(), ctx.tol.tol_rank_rel)
            .values
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs()));
        for _ in 0..10 {
            let c = frame.random_coordinates(&mut ctx.rng, 0.3 * scale);
            let back = frame.chart_inverse(&frame.chart_forward(&c).map_err(fail)?).map_err(fail)?;
            let err = (fro(&(&back.a - &c.a)).powi(2) + fro(&(&back.b - &c.b)).powi(2)).sqrt() / scale;
            trip = trip.max(err);
        }
        for _ in 0..3 {
            let c1 = frame.random_coordinates(&mut ctx.rng, scale);
            let c2 = frame.random_coordinates(&mut ctx.rng, scale);
            let rep = gaussian_check(&frame, &c1, &c2, &[0.1, 0.05]).map_err(fail)?;
            c2_err = c2_err.max(rep.c2_rel_error);
            for r in rep.ratios.into_iter().flatten() {
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        let samples: Vec<SpinSpaceData> = (0..4)
            .map(|_| {
                let y = ctx.random_point_near(&x, NEIGHBOUR_STEP);
                ctx.spin_at(&y)
            })
            .collect::<Result<_, _>>()?;
        let rep = charts_coincide_check(&sx, &samples);
        coincide = coincide.max(rep.max_deviation);
        failures += rep.domain_failures();
    }
    let gauss = "Gaussian property of the chart at its base point";
    out.entries.push(Entry::at_most("charts.round_trip_rel", "chart inverse reads off the coordinates", trip, 1e-8));
    out.entries.push(Entry::at_most("charts.gaussian_c2_rel_error", gauss, c2_err, 1e-8));
    out.entries.push(Entry::at_least("charts.gaussian_ratio_min", gauss, lo, 12.0));
    out.entries.push(Entry::at_most("charts.gaussian_ratio_max", gauss, hi, 20.0));
    out.entries.push(Entry::at_most("charts.coincidence", "symmetric wave chart equals the Gaussian wave chart", coincide, 1e-8));
    out.entries.push(Entry::equal("charts.coincidence_domain_failures", "symmetric wave chart equals the Gaussian wave chart", failures as f64, 0.0));
    Ok(out)
}

pub fn gauge(ctx: &mut Context) -> TaskResult {
    let mut out = TaskOutput::default();
    let l = ctx.dbox.cfg.l;
    let (mut base, mut isometry): (f64, f64) = (0.0, 0.0);
    for x in ctx.bases().to_vec() {
        let sx = ctx.spin_at(&x)?;
        let omega: Vec<SpinSpaceData> = std::iter::once(Ok(sx.clone()))
            .chain(neighbours(&x, l).iter().map(|y| ctx.spin_at(y)))
            .collect::<Result<_, _>>()?;
        let u_x = identity(sx.basis.ncols());
        let map = if ctx.parallel {
            build_gauge_par(&sx, &omega, &u_x, &sx.krein)
        } else {
            build_gauge(&sx, &omega, &u_x, &sx.krein)
        }
        .map_err(fail)?;
        base = base.max(fro(&(&map.values[0] - sx.wave_evaluation())));
        isometry = isometry.max(map.max_residual());
    }
    out.entries.push(Entry::at_most("gauge.base_point", "symmetric wave gauge is the identity at the base point", base, 1e-9));
    out.entries.push(Entry::at_most("gauge.realizes_points", "gauge condition y = −Ψ*Ψ", isometry, 1e-9));
    Ok(out)
}

fn random_vector(rng: &mut ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| rng.random_range(-1.0..=1.0))
}

/// Largest distance between `expected` and `numeric` after pairing each
/// expected value with the nearest unused numeric one.
fn spectrum_mismatch(numeric: &[Complex64], expected: &[Complex64]) -> f64 {
    let mut free: Vec<Complex64> = numeric.to_vec();
    let mut worst: f64 = 0.0;
    for e in expected {
        let (k, d) = free
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("same length");
        worst = worst.max(d);
        free.swap_remove(k);
    }
    worst
}

pub fn spectral(ctx: &mut Context) -> TaskResult {
    let mut out = TaskOutput::default();
    let g = spinor_gram();
    let rel = ctx.tol.degeneracy_rel;
    // dominant timelike u keeps the chain spectrum off the branch cut
    let random_kernels: Vec<VectorKernel> = (0..20)
        .map(|_| {
            let mut u = random_vector(&mut ctx.rng);
            u[0] += 2.0;
            VectorKernel { u, zeta: random_vector(&mut ctx.rng) }
        })
        .collect();
    let mut box_kernels = Vec::new();
    let mut form: f64 = 0.0;
    for x in ctx.bases().to_vec() {
        let y = ctx.random_point_near(&x, 0.5);
        let p = ctx.dbox.kernel_mode_sum(&x, &y);
        let (u, zeta, residual) = dirac_box::vector_decomposition(&p);
        form = form.max(residual / fro(&p));
        if ctx.dbox.cfg.m == 0.0 {
            box_kernels.push(VectorKernel { u, zeta });
        }
    }
    let (mut eig, mut proj, mut unit, mut dev): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for vk in random_kernels.iter().chain(&box_kernels) {
        let a = vk.kernel() * (&g * vk.kernel().adjoint() * &g);
        let scale = linalg::fro(&a).max(f64::MIN_POSITIVE);
        let (lp, lm) = spectral::chain_eigenvalues(vk);
        eig = eig.max(spectrum_mismatch(&linalg::eigenvalues(&a), &[lp, lp, lm, lm]) / scale);
        let (ep, em) = spectral::spectral_projectors(vk, rel).map_err(fail)?;
        proj = proj
            .max(fro(&(&ep * &ep - &ep)))
            .max(fro(&(&ep * &em)))
            .max(fro(&(&ep + &em - identity(4))))
            .max(fro(&(&ep * lp + &em * lm - &a)) / scale);
    }
    for vk in &random_kernels {
        let rep = spectral::dual_route(vk, rel).map_err(fail)?;
        unit = unit.max(rep.spectral_unitarity);
        dev = dev.max(rep.deviation);
    }
    let mut branch_cut = 0;
    for vk in &box_kernels {
        match spectral::dual_route(vk, rel) {
            Ok(rep) => unit = unit.max(rep.spectral_unitarity),
            Err(_) => branch_cut += 1,
        }
    }
    let (mut coeff, mut lo, mut hi): (f64, f64, f64) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..5 {
        let u1 = random_vector(&mut ctx.rng);
        let z1 = random_vector(&mut ctx.rng);
        let rep = spectral::unitary_expansion(1.0, &u1, &z1, &[0.02, 0.01], rel).map_err(fail)?;
        coeff = coeff.max(rep.coefficient_error);
        for r in rep.ratios {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let spectra = "eigenvalues of the closed chain";
    let expansion = "first-order expansion of the unitary kernel";
    out.entries.push(Entry::at_most("spectral.eigenvalues_rel", spectra, eig, 1e-9));
    out.entries.push(Entry::at_most("spectral.projector_algebra", spectra, proj, 1e-9));
    out.entries.push(Entry::at_most("spectral.unitarity", "A^{-1/2}P is unitary on spin space", unit, 1e-9));
    out.entries.push(Entry::at_most("spectral.expansion_coefficient", expansion, coeff, 1e-6));
    out.entries.push(Entry::at_least("spectral.expansion_ratio_min", expansion, lo, 3.0));
    out.entries.push(Entry::at_most("spectral.expansion_ratio_max", expansion, hi, 5.0));
    out.observations.push(Observation::new("spectral.typeset_closed_form_deviation", "closed form of A^{-1/2}P as printed", dev));
    out.observations.push(Observation::new("spectral.box_kernels_without_square_root", "branch cut of the closed-chain square root", branch_cut as f64));
    out.observations.push(Observation::new("spectral.box_vector_form_rel_residual", "kernel of the box as u̸ + iζ̸", form));
    Ok(out)
}

pub fn perturb(ctx: &mut Context) -> TaskResult {
    let mut out = TaskOutput::default();
    let l = ctx.dbox.cfg.l;
    let tol = ctx.tol;
    let u_x = identity(4);
    let (mut cancel, mut corr, mut mixed, mut ledger_p, mut ledger_a, mut basis, mut gauged): (f64, f64, f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for x in ctx.bases().to_vec() {
        let wx = ctx.dbox.wave_values(&x);
        let near = neighbours(&x, l);
        let bw = basis_waves(&ctx.dbox, &x, &near, &tol).map_err(fail)?;
        basis = basis.max(bw.max_residual);
        for _ in 0..5 {
            let lambda = GaugeFunction::random(&mut ctx.rng, l, 4, 1.0);
            let lx = lambda.value(&x);
            let wtx = apply_local_phase(&wx, lx);
            corr = corr.max(fro(&(perturbed_correlation(&wtx) - ctx.dbox.correlation_matrix(&x))));
            let plain = perturbed_symmetric_gauge(&wx, &wx, &u_x, &tol).map_err(fail)?;
            let pert = perturbed_symmetric_gauge(&wx, &wtx, &u_x, &tol).map_err(fail)?;
            cancel = cancel.max(fro(&(&pert - &plain)));
            let gb = gauged_basis(&wx, &wtx, &bw.chi, &u_x, &tol).map_err(fail)?;
            gauged = gauged.max(fro(&(gb - &pert * &bw.vectors)));
            for y in &near {
                let wy = ctx.dbox.wave_values(y);
                let ly = lambda.value(y);
                let wty = apply_local_phase(&wy, ly);
                let a = symmetric_gauge_value(&wx, &wy, &u_x, &tol).map_err(fail)?;
                let b = symmetric_gauge_value(&wx, &wty, &u_x, &tol).map_err(fail)?;
                cancel = cancel.max(fro(&(a - b)));
                let p = braket_kernel(&wx, &wy);
                let pt = braket_kernel(&wtx, &wty);
                ledger_p = ledger_p.max(fro(&(&pt - &p * Complex64::from_polar(1.0, lx - ly))));
                let chain = |w1: &CMat, w2: &CMat| braket_kernel(w1, w2) * braket_kernel(w2, w1);
                ledger_a = ledger_a.max(fro(&(chain(&wtx, &wty) - chain(&wx, &wy))));
            }
            for i in 0..5 {
                for j in 0..5 {
                    for k in 0..5 {
                        let grid = |n: usize| -l + 2.0 * l * n as f64 / 5.0;
                        let z = SpacetimePoint::new(x.t, [grid(i), grid(j), grid(k)], l);
                        let wz = ctx.dbox.wave_values(&z);
                        let lz = lambda.value(&z);
                        let pzz = braket_kernel(&wz, &wz);
                        mixed = mixed.max(fro(&(mixed_kernel(&wz, &apply_local_phase(&wz, lz)) - pzz * Complex64::from_polar(1.0, -lz))));
                    }
                }
            }
        }
    }
    let ledger = "transformation law under a local phase";
    out.entries.push(Entry::at_most("perturb.gauge_phase_cancellation", "symmetric wave gauge is fixed up to a global unitary", cancel, 1e-9));
    out.entries.push(Entry::at_most("perturb.correlation_unchanged", "F̃(x) = −Ψ̃(x)*Ψ̃(x)", corr, 1e-12));
    out.entries.push(Entry::at_most("perturb.mixed_kernel_phase_grid", "P(x, F̃(x)) = e^{−iΛ(x)} P(x,x)", mixed, 1e-10));
    out.entries.push(Entry::at_most("perturb.kernel_phase_law", ledger, ledger_p, 1e-9));
    out.entries.push(Entry::at_most("perturb.closed_chain_invariant", ledger, ledger_a, 1e-9));
    out.entries.push(Entry::at_most("perturb.basis_wave_reconstruction", "u_a(y) = P(y,x) χ_a", basis, 1e-9));
    out.entries.push(Entry::at_most("perturb.gauged_basis_routes", "gauge applied to the basis waves", gauged, 1e-9));
    Ok(out)
}

/// `P(x, 0)` for every sample point, as CSV rows `t,x1,x2,x3,row,col,re,im`.
pub fn kernel_rows(ctx: &Context) -> Vec<(SpacetimePoint, CMat)> {
    let origin = SpacetimePoint::origin();
    let eval = |x: &SpacetimePoint| (*x, ctx.dbox.kernel_mode_sum(x, &origin));
    if ctx.parallel {
        ctx.points.par_iter().map(eval).collect()
    } else {
        ctx.points.iter().map(eval).collect()
    }
}

//! Time evolution of density matrices with a Dormand–Prince 5(4) integrator
//! and its continuous extension, sampled on a uniform grid. States are
//! carried in real Hermitian coordinates so every sample is exactly Hermitian.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::liouvillian::{from_hermitian_coordinates, hermitian_coordinates, vec_index, Liouvillian, SparseOperator};
use crate::state::DensityMatrix;
use crate::CMatrix;
#[cfg(not(any(feature = "std", test)))]
#[allow(unused_imports)]
use num_traits::Float;

/// Upper bound on the default horizon, ps (20 ns).
pub const MAX_DEFAULT_HORIZON: f64 = 20_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Adaptive Dormand–Prince 5(4) with dense output.
    #[default]
    DormandPrince,
    /// One product with exp(L·max_step) per sample.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub integrator: Integrator,
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of the dense-output sample grid, ps.
    pub max_step: f64,
    /// Integration end, ps. `None` picks min(50/κ_max, 20 ns).
    pub horizon: Option<f64>,
    /// Stop once the excited population falls below this.
    pub excited_cutoff: f64,
    /// Validate every n-th sample as a density matrix (0 disables).
    pub check_every: usize,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            integrator: Integrator::DormandPrince,
            rtol: 1e-9,
            atol: 1e-12,
            max_step: 0.005,
            horizon: None,
            excited_cutoff: 1e-9,
            check_every: 1,
            max_steps: 50_000_000,
        }
    }
}

impl SolverOptions {
    pub fn resolved_horizon(&self, max_trap_rate: f64) -> f64 {
        match self.horizon {
            Some(h) => h,
            None if max_trap_rate > 0.0 => (50.0 / max_trap_rate).min(MAX_DEFAULT_HORIZON),
            None => MAX_DEFAULT_HORIZON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Last sample time reached, ps.
    pub final_time: f64,
    /// Excited population at the last sample; bounds the truncated yield.
    pub final_excited_population: f64,
    /// Stopped early because the excited population fell below the cutoff.
    pub early_terminated: bool,
    /// Excited population never increased between samples (by more than 1e-10).
    pub monotonic_decay: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Sample spacing, ps.
    pub max_step: f64,
    pub stats: SolverStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

// Dormand–Prince 5(4) tableau; the nodes are not needed for an autonomous system.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// Integrates ẏ = L y from `y0`, calling `observer(t_k, y(t_k))` on the grid
/// t_k = k·dt up to `horizon`. The observer may stop the run early.
pub fn integrate_linear<F>(
    op: &SparseOperator<f64>,
    y0: &[f64],
    horizon: f64,
    dt: f64,
    opts: &SolverOptions,
    mut observer: F,
) -> Result<SolverStats>
where
    F: FnMut(f64, &[f64]) -> Result<ControlFlow<()>>,
{
    let dim = op.dim();
    if y0.len() != dim {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: dim,
            found: y0.len(),
        });
    }
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(Error::Domain(format!("horizon and sample spacing must be > 0 (got {horizon}, {dt})")));
    }
    let mut stats = SolverStats {
        rtol: opts.rtol,
        atol: opts.atol,
        ..Default::default()
    };
    let n_samples = (horizon / dt - 1e-9).ceil() as usize;
    let t_end = n_samples as f64 * dt;

    let zero = 0.0f64;
    let mut y = y0.to_vec();
    let mut k1 = vec![zero; dim];
    let mut k2 = vec![zero; dim];
    let mut k3 = vec![zero; dim];
    let mut k4 = vec![zero; dim];
    let mut k5 = vec![zero; dim];
    let mut k6 = vec![zero; dim];
    let mut k7 = vec![zero; dim];
    let mut stage = vec![zero; dim];
    let mut y_new = vec![zero; dim];
    let mut sample = vec![zero; dim];
    let mut dense = [vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]];

    op.apply(&y, &mut k1);
    stats.rhs_evaluations += 1;

    if let ControlFlow::Break(()) = observer(0.0, &y)? {
        stats.final_time = 0.0;
        return Ok(stats);
    }
    let mut next_sample = 1usize;

    let mut t = 0.0f64;
    let mut h = initial_step(&y, &k1, opts).min(dt).min(t_end);
    let mut steps = 0usize;

    while next_sample <= n_samples {
        if steps >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        steps += 1;
        if t + h > t_end {
            h = t_end - t;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        for i in 0..dim {
            stage[i] = y[i] + k1[i] * (h * A21);
        }
        op.apply(&stage, &mut k2);
        for i in 0..dim {
            stage[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        op.apply(&stage, &mut k3);
        for i in 0..dim {
            stage[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        op.apply(&stage, &mut k4);
        for i in 0..dim {
            stage[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        op.apply(&stage, &mut k5);
        for i in 0..dim {
            stage[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        op.apply(&stage, &mut k6);
        for i in 0..dim {
            y_new[i] = y[i] + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
        }
        op.apply(&y_new, &mut k7);
        stats.rhs_evaluations += 6;

        let mut err_max = 0.0;
        for i in 0..dim {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let r = e.abs() / scale;
            err_max = f64::max(err_max, r);
        }
        let err = err_max;

        if !err.is_finite() {
            stats.rejected_steps += 1;
            h *= MIN_FACTOR;
            continue;
        }
        if err > 1.0 {
            stats.rejected_steps += 1;
            h *= (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            continue;
        }

        stats.accepted_steps += 1;
        let t_new = t + h;
        for i in 0..dim {
            let diff = y_new[i] - y[i];
            let bspl = k1[i] * h - diff;
            dense[0][i] = y[i];
            dense[1][i] = diff;
            dense[2][i] = bspl;
            dense[3][i] = diff - k7[i] * h - bspl;
            dense[4][i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
        }

        let mut stop = false;
        while next_sample <= n_samples {
            let ts = next_sample as f64 * dt;
            if ts > t_new + 1e-9 * dt {
                break;
            }
            let theta = ((ts - t) / h).clamp(0.0, 1.0);
            let theta1 = 1.0 - theta;
            for i in 0..dim {
                sample[i] = dense[0][i]
                    + (dense[1][i] + (dense[2][i] + (dense[3][i] + dense[4][i] * theta1) * theta) * theta1) * theta;
            }
            stats.final_time = ts;
            next_sample += 1;
            if let ControlFlow::Break(()) = observer(ts, &sample)? {
                stop = true;
                break;
            }
        }
        if stop {
            break;
        }

        t = t_new;
        core::mem::swap(&mut y, &mut y_new);
        core::mem::swap(&mut k1, &mut k7);

        let factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        h *= factor;
    }
    Ok(stats)
}

/// Steps y(t_k) = exp(L·dt)^k y0 across the sample grid.
pub fn integrate_exponential<F>(
    generator: &nalgebra::DMatrix<f64>,
    y0: &[f64],
    horizon: f64,
    dt: f64,
    mut observer: F,
) -> Result<SolverStats>
where
    F: FnMut(f64, &[f64]) -> Result<ControlFlow<()>>,
{
    let dim = generator.nrows();
    if y0.len() != dim {
        return Err(Error::DimensionMismatch {
            what: "initial state",
            expected: dim,
            found: y0.len(),
        });
    }
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(Error::Domain(format!("horizon and sample spacing must be > 0 (got {horizon}, {dt})")));
    }
    let step = crate::expm::expm(&(generator * dt));
    if step.iter().any(|v| !v.is_finite()) {
        return Err(Error::StepSizeUnderflow { t: 0.0, h: dt });
    }
    let n_samples = (horizon / dt - 1e-9).ceil() as usize;
    let mut stats = SolverStats::default();
    let mut y = nalgebra::DVector::from_column_slice(y0);
    let mut next = nalgebra::DVector::zeros(dim);
    if let ControlFlow::Break(()) = observer(0.0, y.as_slice())? {
        return Ok(stats);
    }
    for k in 1..=n_samples {
        next.gemv(1.0, &step, &y, 0.0);
        core::mem::swap(&mut y, &mut next);
        stats.accepted_steps += 1;
        stats.rhs_evaluations += 1;
        let t = k as f64 * dt;
        stats.final_time = t;
        if let ControlFlow::Break(()) = observer(t, y.as_slice())? {
            break;
        }
    }
    Ok(stats)
}

fn initial_step(y: &[f64], f: &[f64], opts: &SolverOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f) {
        let sc = opts.atol + opts.rtol * yi.abs();
        d0 += (yi.abs() / sc).powi(2);
        d1 += (fi.abs() / sc).powi(2);
    }
    let n = y.len() as f64;
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

/// Streams density-matrix samples of ρ(t) = e^{Lt} ρ0 to `observer`.
///
/// Stops early when the excited population drops below
/// `opts.excited_cutoff`; validates samples every `opts.check_every`.
pub fn propagate<F>(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    opts: &SolverOptions,
    horizon: f64,
    mut observer: F,
) -> Result<SolverStats>
where
    F: FnMut(f64, &DensityMatrix) -> ControlFlow<()>,
{
    let d = l.hilbert_dim();
    if rho0.matrix().nrows() != d {
        return Err(Error::DimensionMismatch {
            what: "initial density matrix",
            expected: d,
            found: rho0.matrix().nrows(),
        });
    }
    rho0.check().map_err(|detail| Error::InvalidState { t: 0.0, detail })?;
    let y0 = hermitian_coordinates(rho0.matrix());
    let mut count = 0usize;
    let mut last_excited = f64::INFINITY;
    let mut monotonic = true;
    let mut final_excited = rho0.excited_population();
    let mut early = false;
    let sample = |t: f64, y: &[f64]| {
        let rho = DensityMatrix::new_unchecked(from_hermitian_coordinates(y, d));
        if opts.check_every > 0 && count % opts.check_every == 0 {
            rho.check().map_err(|detail| Error::InvalidState { t, detail })?;
        }
        count += 1;
        let excited: f64 = (1..d).map(|m| y[vec_index(m, m, d)]).sum();
        if excited > last_excited + 1e-10 {
            monotonic = false;
        }
        last_excited = excited;
        final_excited = excited;
        if let ControlFlow::Break(()) = observer(t, &rho) {
            return Ok(ControlFlow::Break(()));
        }
        if excited < opts.excited_cutoff {
            early = true;
            return Ok(ControlFlow::Break(()));
        }
        Ok(ControlFlow::Continue(()))
    };
    let mut stats = match opts.integrator {
        Integrator::DormandPrince => integrate_linear(l.real_sparse(), &y0, horizon, opts.max_step, opts, sample)?,
        Integrator::Exponential => integrate_exponential(l.real_matrix(), &y0, horizon, opts.max_step, sample)?,
    };
    stats.rtol = opts.rtol;
    stats.atol = opts.atol;
    stats.final_excited_population = final_excited;
    stats.early_terminated = early;
    stats.monotonic_decay = monotonic;
    Ok(stats)
}

/// Collects the full trajectory in memory.
pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, horizon: f64, opts: &SolverOptions) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    let stats = propagate(rho0, l, opts, horizon, |t, rho| {
        times.push(t);
        states.push(rho.clone());
        ControlFlow::Continue(())
    })?;
    Ok(Trajectory {
        times,
        states,
        max_step: opts.max_step,
        stats,
    })
}

/// ρ̄ = ∫₀^∞ ρ(t) dt on the excited block, from L_exc vec(ρ̄) = −vec(ρ0,exc).
///
/// Returned as an (N+1)×(N+1) matrix whose ground row and column are zero.
pub fn integrated_state(l: &Liouvillian, rho0: &DensityMatrix) -> Result<CMatrix> {
    let d = l.hilbert_dim();
    let n = d - 1;
    let lossless = l.manifest().iter().all(|c| {
        !matches!(
            c.tag,
            crate::generators::ChannelTag::Dissipation { .. } | crate::generators::ChannelTag::Trapping { .. }
        ) || c.rate == 0.0
    });
    if lossless {
        return Err(Error::NoDecayPath);
    }
    let block = l.excited_block();
    let lu = block.clone().lu();
    let u = lu.u();
    let pivot_max = (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(0.0, f64::max);
    let pivot_min = (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if !(pivot_min > 1e-13 * pivot_max) {
        return Err(Error::NoDecayPath);
    }
    let rhs = nalgebra::DVector::from_iterator(
        n * n,
        l.excited_indices().iter().map(|&i| -rho0.matrix().as_slice()[i]),
    );
    let x = lu.solve(&rhs).ok_or(Error::NoDecayPath)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoDecayPath);
    }
    let mut out = CMatrix::zeros(d, d);
    for col in 0..n {
        for row in 0..n {
            out[(row + 1, col + 1)] = x[row + col * n];
        }
    }
    Ok(out)
}

use super::events::{detect_boundary_event, ArcStep, BoundaryHit};
use super::integrator::{dp_step, error_norm, next_step, pack, unpack};
use super::{EventKind, PathSample, RayError, RayEvent, RayPath, RayState, RayTolerances, Regime, Termination};
use crate::geometry::{BoundaryChart, BoundaryRegion, Domain, MetricField};
use crate::symbols::{
    boundary_dn_r, classify, hyperbolic_lift, inward_sign, principal_symbol, tangential_lift, BoundaryCovector,
    Classification, CovectorClass, GlancingKind, PhasePoint, SymbolError,
};

/// Which characteristic lift of a hyperbolic boundary covector starts the ray.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lift {
    /// The lift whose ray enters the domain.
    Inward,
    /// The lift whose ray leaves the domain; it is reflected at `t = 0`.
    Outward,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    Interior(PhasePoint),
    /// Boundary covector; the lift is ignored at glancing covectors.
    Boundary {
        covector: BoundaryCovector,
        lift: Lift,
    },
}

/// Shared read-only inputs of a batch of traces.
#[derive(Clone, Debug)]
pub struct RayContext<'a> {
    pub domain: &'a Domain,
    pub metric: &'a MetricField,
    pub tol: RayTolerances,
    /// Upper bound on ray speed, `sqrt(lambda_max)` over the domain.
    pub speed_bound: f64,
}

impl<'a> RayContext<'a> {
    pub fn new(domain: &'a Domain, metric: &'a MetricField, tol: RayTolerances) -> Self {
        let (_, hi) = metric.ellipticity_bounds(&domain.bounding_box());
        RayContext {
            domain,
            metric,
            tol,
            speed_bound: hi.sqrt(),
        }
    }
}

/// Rescales `xi` onto the characteristic set and normalizes `|(tau, xi)| = 1`.
/// Returns the projected point and the size of the correction to `xi`.
fn project(p: &PhasePoint, metric: &MetricField) -> Result<(PhasePoint, f64), RayError> {
    let q = metric.quad(p.x, p.xi);
    if q <= 0.0 {
        return Err(RayError::NotCharacteristic {
            p: principal_symbol(p, metric),
        });
    }
    let xi = p.xi * (p.tau.abs() / q.sqrt());
    let shift = (xi - p.xi).norm() / p.covector_norm();
    let n = (p.tau * p.tau + xi.norm_squared()).sqrt();
    let out = PhasePoint::new(p.t, p.x, p.tau / n, xi / n);
    if out.tau.abs() < 1e-6 {
        return Err(RayError::TauDegenerate { tau: out.tau });
    }
    Ok((out, shift))
}

/// Advances an interior state along the flow to `t_end`, ignoring the
/// boundary. Returns the final state, the accepted samples and the largest
/// projection shift.
pub fn integrate_interior(
    state: &RayState,
    metric: &MetricField,
    t_end: f64,
    tol: &RayTolerances,
) -> Result<(RayState, Vec<PathSample>, f64), RayError> {
    let (mut p, mut max_shift) = project(&state.phase, metric)?;
    let mut samples = vec![PathSample::from_phase(&p, false)];
    let mut h_try = tol.dt_max;
    while p.t < t_end {
        let h = h_try.min(t_end - p.t);
        let y = pack(&p);
        let (y_new, err) = dp_step(metric, p.tau, &y, h);
        let e = error_norm(&y, &y_new, &err, tol.ode);
        if e > 1.0 {
            h_try = next_step(h, e);
            if h_try < tol.dt_min {
                return Err(RayError::StiffFailure {
                    t: p.t,
                    dt_min: tol.dt_min,
                });
            }
            continue;
        }
        let t_new = if h == t_end - p.t { t_end } else { p.t + h };
        let (q, shift) = project(&unpack(&y_new, t_new, p.tau), metric)?;
        max_shift = max_shift.max(shift);
        p = q;
        samples.push(PathSample::from_phase(&p, false));
        h_try = next_step(h, e).min(tol.dt_max);
    }
    Ok((
        RayState {
            phase: p,
            regime: Regime::Interior,
        },
        samples,
        max_shift,
    ))
}

/// Specular reflection at a hyperbolic boundary covector: the collar
/// component `xi_n` of the incoming covector changes sign, `tau` and `xi_s`
/// are kept.
pub fn reflect_hyperbolic(
    b: &BoundaryCovector,
    xi_n: f64,
    domain: &Domain,
    metric: &MetricField,
    tol: f64,
) -> Result<PhasePoint, RayError> {
    let c = classify(b, domain, metric, tol)?;
    if !c.is_hyperbolic() {
        return Err(SymbolError::NotHyperbolic { r0: c.r0 }.into());
    }
    let ch = BoundaryChart::new(domain, metric, b.curve, b.s);
    Ok(PhasePoint::new(b.t, ch.x, b.tau, ch.compose(b.xi_s, -xi_n)))
}

/// Gliding velocity `ds/dt` on a boundary geodesic with `r0 = 0`.
fn gliding_speed(domain: &Domain, metric: &MetricField, curve: usize, s: f64, dir: f64) -> f64 {
    let ch = BoundaryChart::new(domain, metric, curve, s);
    dir * ch.h0.sqrt()
}

fn gliding_rk4(domain: &Domain, metric: &MetricField, curve: usize, s: f64, dir: f64, dt: f64) -> f64 {
    let f = |s: f64| gliding_speed(domain, metric, curve, s, dir);
    let k1 = f(s);
    let k2 = f(s + 0.5 * dt * k1);
    let k3 = f(s + 0.5 * dt * k2);
    let k4 = f(s + dt * k3);
    s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Boundary covector on the glancing set: `xi_s` rescaled so that `r0 = 0`.
fn glancing_covector(
    domain: &Domain,
    metric: &MetricField,
    curve: usize,
    s: f64,
    t: f64,
    tau: f64,
    sign: f64,
) -> BoundaryCovector {
    let ch = BoundaryChart::new(domain, metric, curve, s);
    let xi_s = sign * tau.abs() / ch.h0.sqrt();
    let n = tau.hypot(xi_s);
    BoundaryCovector::new(curve, ch.s, t, tau / n, xi_s / n)
}

/// Outcome of one gliding step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlidingOutcome {
    pub covector: BoundaryCovector,
    /// Set when the collar derivative reached zero inside the step; the
    /// covector is then the launch point.
    pub exited: bool,
}

/// Advances a gliding covector by at most `dt` along the boundary geodesic,
/// stopping where the collar derivative of the boundary symbol stops being
/// negative.
pub fn gliding_step(
    domain: &Domain,
    metric: &MetricField,
    b: &BoundaryCovector,
    dt: f64,
) -> Result<GlidingOutcome, RayError> {
    let ch = BoundaryChart::new(domain, metric, b.curve, b.s);
    let denom = 2.0 * ch.e_n.dot(&(metric.a(ch.x) * ch.e_n));
    if denom.abs() < 1e-9 {
        return Err(RayError::DenominatorDegenerate { value: denom });
    }
    // dx/dt = -A xi / tau, so the boundary speed is -h0 xi_s / tau.
    let dir = -(b.xi_s * b.tau).signum();
    let sign = b.xi_s.signum();
    let at = |dt: f64| -> BoundaryCovector {
        let s = gliding_rk4(domain, metric, b.curve, b.s, dir, dt);
        glancing_covector(domain, metric, b.curve, s, b.t + dt, b.tau, sign)
    };
    let dn = |c: &BoundaryCovector| -> Result<f64, RayError> {
        boundary_dn_r(c, domain, metric).ok_or_else(|| {
            crate::geometry::GeometryError::NonSmooth {
                curve: domain.curve(c.curve).name.clone(),
                s: c.s,
            }
            .into()
        })
    };
    let next = at(dt);
    if dn(&next)? < 0.0 {
        return Ok(GlidingOutcome {
            covector: next,
            exited: false,
        });
    }
    let (mut lo, mut hi) = (0.0, dt);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dn(&at(mid))? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(GlidingOutcome {
        covector: at(hi),
        exited: true,
    })
}

/// Traces a generalized bicharacteristic up to `t_max`.
pub fn trace(ctx: &RayContext, init: &InitialCondition, t_max: f64, watch: &[BoundaryRegion]) -> RayPath {
    trace_until(ctx, init, t_max, watch, |_| false)
}

/// Like [`trace`], stopping right after the first event for which `stop`
/// returns true.
pub fn trace_until<F: Fn(&RayEvent) -> bool>(
    ctx: &RayContext,
    init: &InitialCondition,
    t_max: f64,
    watch: &[BoundaryRegion],
    stop: F,
) -> RayPath {
    let placeholder = RayState {
        phase: PhasePoint::new(0.0, Default::default(), 0.0, Default::default()),
        regime: Regime::Interior,
    };
    let mut tracer = Tracer {
        ctx,
        watch,
        stop,
        t_max,
        last_event: f64::NEG_INFINITY,
        path: RayPath {
            initial: placeholder,
            samples: Vec::new(),
            events: Vec::new(),
            termination: Termination::TimeExpired,
            max_abs_symbol: 0.0,
            max_projection_shift: 0.0,
        },
    };
    if let Err(e) = tracer.run(init) {
        tracer.path.termination = Termination::Failed(e.to_string());
    }
    tracer.path
}

struct Halt;

enum Flow {
    Continue(RayState),
    Halt,
}

struct Tracer<'a, F> {
    ctx: &'a RayContext<'a>,
    watch: &'a [BoundaryRegion],
    stop: F,
    t_max: f64,
    last_event: f64,
    path: RayPath,
}

impl<F: Fn(&RayEvent) -> bool> Tracer<'_, F> {
    fn run(&mut self, init: &InitialCondition) -> Result<(), RayError> {
        let mut state = match self.start(init)? {
            Flow::Continue(s) => s,
            Flow::Halt => return Ok(()),
        };
        loop {
            let flow = match state.regime {
                Regime::Interior => self.interior(state)?,
                Regime::Gliding(b) => self.gliding(b)?,
            };
            match flow {
                Flow::Continue(s) => state = s,
                Flow::Halt => return Ok(()),
            }
        }
    }

    fn tol(&self) -> &RayTolerances {
        &self.ctx.tol
    }

    fn push(&mut self, ev: RayEvent) -> Result<(), Halt> {
        let halt = (self.stop)(&ev);
        self.path.events.push(ev);
        if halt {
            self.path.termination = Termination::Stopped;
            Err(Halt)
        } else {
            Ok(())
        }
    }

    /// Pushes an interaction event followed by the region hits at its point.
    fn boundary_events(
        &mut self,
        kind: EventKind,
        phase: &PhasePoint,
        b: &BoundaryCovector,
        class: Classification,
        flagged: bool,
        gliding: bool,
    ) -> Result<(), Halt> {
        self.last_event = phase.t;
        let ev = RayEvent {
            kind,
            time: phase.t,
            position: phase.x,
            boundary: Some(*b),
            classification: Some(class),
            flagged,
        };
        self.push(ev)?;
        self.region_hits(phase, b, class, flagged, gliding)
    }

    fn region_hits(
        &mut self,
        phase: &PhasePoint,
        b: &BoundaryCovector,
        class: Classification,
        flagged: bool,
        gliding: bool,
    ) -> Result<(), Halt> {
        let labels: Vec<_> = self
            .watch
            .iter()
            .filter(|r| r.curve == b.curve && r.contains(b.s, 1e-9))
            .map(|r| r.label)
            .collect();
        for label in labels {
            self.push(RayEvent {
                kind: EventKind::RegionHit { label, gliding },
                time: phase.t,
                position: phase.x,
                boundary: Some(*b),
                classification: Some(class),
                flagged,
            })?;
        }
        Ok(())
    }

    fn record(&mut self, p: &PhasePoint, gliding: bool) {
        let sym = principal_symbol(p, self.ctx.metric).abs();
        self.path.max_abs_symbol = self.path.max_abs_symbol.max(sym);
        self.path.samples.push(PathSample::from_phase(p, gliding));
    }

    fn start(&mut self, init: &InitialCondition) -> Result<Flow, RayError> {
        let (domain, metric) = (self.ctx.domain, self.ctx.metric);
        let tol = self.tol().clone();
        match *init {
            InitialCondition::Interior(p) => {
                let n = p.normalized();
                let sym = principal_symbol(&n, metric);
                if sym.abs() > 1e-8 {
                    return Err(RayError::NotCharacteristic { p: sym });
                }
                let (q, shift) = project(&n, metric)?;
                self.path.max_projection_shift = shift;
                let state = RayState {
                    phase: q,
                    regime: Regime::Interior,
                };
                self.path.initial = state;
                self.record(&q, false);
                let d = domain.signed_distance(q.x);
                if d < -tol.tangency_band {
                    return Err(RayError::Escaped { t: q.t, distance: d });
                }
                Ok(Flow::Continue(state))
            }
            InitialCondition::Boundary { covector, lift } => {
                let b = covector.normalized()?;
                let class = classify(&b, domain, metric, tol.glancing)?;
                match class.class {
                    CovectorClass::Elliptic => Err(RayError::EllipticStart { r0: class.r0 }),
                    CovectorClass::Hyperbolic => {
                        let inward = inward_sign(b.tau);
                        let flagged = class.r0 <= tol.near_glancing_factor * tol.glancing;
                        let inward_phase = hyperbolic_lift(&b, inward, domain, metric, tol.glancing)?;
                        let first = match lift {
                            Lift::Inward => inward_phase,
                            Lift::Outward => hyperbolic_lift(&b, -inward, domain, metric, tol.glancing)?,
                        };
                        let state = RayState {
                            phase: first,
                            regime: Regime::Interior,
                        };
                        self.path.initial = state;
                        self.record(&first, false);
                        let kind = match lift {
                            Lift::Outward => Some(EventKind::HyperbolicReflection),
                            Lift::Inward => None,
                        };
                        let res = match kind {
                            Some(k) => self.boundary_events(k, &first, &b, class, flagged, false),
                            None => {
                                self.last_event = 0.0;
                                self.region_hits(&first, &b, class, flagged, false)
                            }
                        };
                        if res.is_err() {
                            return Ok(Flow::Halt);
                        }
                        let (q, _) = project(&inward_phase, metric)?;
                        Ok(Flow::Continue(RayState {
                            phase: q,
                            regime: Regime::Interior,
                        }))
                    }
                    CovectorClass::Glancing(kind) => {
                        let lift_phase = tangential_lift(&b, domain, metric);
                        match kind {
                            GlancingKind::Degenerate => Err(RayError::DegenerateContact {
                                t: b.t,
                                curve: b.curve,
                                s: b.s,
                            }),
                            GlancingKind::Diffractive => {
                                let state = RayState {
                                    phase: lift_phase,
                                    regime: Regime::Interior,
                                };
                                self.path.initial = state;
                                self.record(&lift_phase, false);
                                if self
                                    .boundary_events(EventKind::DiffractiveTouch, &lift_phase, &b, class, false, false)
                                    .is_err()
                                {
                                    return Ok(Flow::Halt);
                                }
                                let (q, _) = project(&lift_phase, metric)?;
                                Ok(Flow::Continue(RayState {
                                    phase: q,
                                    regime: Regime::Interior,
                                }))
                            }
                            GlancingKind::StrictlyGliding => {
                                let g = glancing_covector(domain, metric, b.curve, b.s, b.t, b.tau, b.xi_s.signum());
                                let state = RayState {
                                    phase: lift_phase,
                                    regime: Regime::Gliding(g),
                                };
                                self.path.initial = state;
                                self.record(&lift_phase, true);
                                if self
                                    .boundary_events(EventKind::GlidingEntry, &lift_phase, &g, class, false, true)
                                    .is_err()
                                {
                                    return Ok(Flow::Halt);
                                }
                                Ok(Flow::Continue(state))
                            }
                        }
                    }
                }
            }
        }
    }

    fn expire(&mut self, p: &PhasePoint) -> Flow {
        let ev = RayEvent {
            kind: EventKind::TimeExpired,
            time: p.t,
            position: p.x,
            boundary: None,
            classification: None,
            flagged: false,
        };
        self.path.events.push(ev);
        self.path.termination = Termination::TimeExpired;
        Flow::Halt
    }

    fn interior(&mut self, state: RayState) -> Result<Flow, RayError> {
        let ctx = self.ctx;
        let tol = ctx.tol.clone();
        let mut p = state.phase;
        let mut h_try = tol.dt_max;
        loop {
            if p.t >= self.t_max {
                return Ok(self.expire(&p));
            }
            let h = h_try.min(self.t_max - p.t);
            let y = pack(&p);
            let (y_new, err) = dp_step(ctx.metric, p.tau, &y, h);
            let e = error_norm(&y, &y_new, &err, tol.ode);
            if e > 1.0 {
                h_try = next_step(h, e);
                if h_try < tol.dt_min {
                    return Err(RayError::StiffFailure {
                        t: p.t,
                        dt_min: tol.dt_min,
                    });
                }
                continue;
            }
            let step = ArcStep {
                metric: ctx.metric,
                start: p,
                h,
            };
            let mut t_from = p.t.max(self.last_event + tol.min_dwell);
            while let Some(hit) = detect_boundary_event(ctx.domain, &step, t_from, ctx.speed_bound, &tol)? {
                match self.handle_hit(&hit)? {
                    HitOutcome::Miss => t_from = hit.t + tol.min_dwell,
                    HitOutcome::Flow(f) => return Ok(f),
                }
            }
            let t_new = if p.t + h >= self.t_max { self.t_max } else { p.t + h };
            let (q, shift) = project(&unpack(&y_new, t_new, p.tau), ctx.metric)?;
            self.path.max_projection_shift = self.path.max_projection_shift.max(shift);
            p = q;
            self.record(&p, false);
            h_try = next_step(h, e).min(tol.dt_max);
        }
    }

    fn handle_hit(&mut self, hit: &BoundaryHit) -> Result<HitOutcome, RayError> {
        let (domain, metric) = (self.ctx.domain, self.ctx.metric);
        let tol = self.tol().clone();
        let class = classify(&hit.boundary, domain, metric, tol.glancing)?;
        if hit.tangency {
            let CovectorClass::Glancing(kind) = class.class else {
                return Ok(HitOutcome::Miss);
            };
            return self.glancing_contact(hit, class, kind, false);
        }
        match class.class {
            CovectorClass::Hyperbolic => {
                let outward = hit.xi_n / hit.phase.tau > 0.0;
                if !outward {
                    return Err(RayError::Escaped {
                        t: hit.t,
                        distance: hit.distance,
                    });
                }
                let flagged = class.r0 <= tol.near_glancing_factor * tol.glancing;
                let reflected = reflect_hyperbolic(&hit.boundary, hit.xi_n, domain, metric, tol.glancing)?;
                let reflected = PhasePoint {
                    x: hit.phase.x,
                    ..reflected
                };
                let (q, _) = project(&reflected, metric)?;
                self.record(&hit.phase, false);
                if self
                    .boundary_events(
                        EventKind::HyperbolicReflection,
                        &hit.phase,
                        &hit.boundary,
                        class,
                        flagged,
                        false,
                    )
                    .is_err()
                {
                    return Ok(HitOutcome::Flow(Flow::Halt));
                }
                Ok(HitOutcome::Flow(Flow::Continue(RayState {
                    phase: q,
                    regime: Regime::Interior,
                })))
            }
            CovectorClass::Glancing(kind) => self.glancing_contact(hit, class, kind, true),
            CovectorClass::Elliptic => Err(RayError::NotCharacteristic { p: class.r0 }),
        }
    }

    /// Touch or crossing at a glancing covector. `crossing` marks transversal
    /// crossings with a normal component inside the glancing band; they are
    /// flagged.
    fn glancing_contact(
        &mut self,
        hit: &BoundaryHit,
        class: Classification,
        kind: GlancingKind,
        crossing: bool,
    ) -> Result<HitOutcome, RayError> {
        let (domain, metric) = (self.ctx.domain, self.ctx.metric);
        let b = hit.boundary;
        match kind {
            GlancingKind::Degenerate => Err(RayError::DegenerateContact {
                t: hit.t,
                curve: b.curve,
                s: b.s,
            }),
            GlancingKind::Diffractive => {
                // The covector passes through unchanged; a crossing drops its
                // tiny normal component so the ray stays in the closure.
                let phase = if crossing {
                    let ch = BoundaryChart::new(domain, metric, b.curve, b.s);
                    PhasePoint::new(hit.t, hit.phase.x, hit.phase.tau, ch.compose(b.xi_s, 0.0))
                } else {
                    hit.phase
                };
                let (q, _) = project(&phase, metric)?;
                self.record(&q, false);
                if self
                    .boundary_events(EventKind::DiffractiveTouch, &q, &b, class, crossing, false)
                    .is_err()
                {
                    return Ok(HitOutcome::Flow(Flow::Halt));
                }
                Ok(HitOutcome::Flow(Flow::Continue(RayState {
                    phase: q,
                    regime: Regime::Interior,
                })))
            }
            GlancingKind::StrictlyGliding => {
                let g = glancing_covector(domain, metric, b.curve, b.s, hit.t, b.tau, b.xi_s.signum());
                let on = tangential_lift(&g, domain, metric);
                self.record(&on, true);
                if self
                    .boundary_events(EventKind::GlidingEntry, &on, &g, class, crossing, true)
                    .is_err()
                {
                    return Ok(HitOutcome::Flow(Flow::Halt));
                }
                Ok(HitOutcome::Flow(Flow::Continue(RayState {
                    phase: on,
                    regime: Regime::Gliding(g),
                })))
            }
        }
    }

    fn gliding(&mut self, mut b: BoundaryCovector) -> Result<Flow, RayError> {
        let (domain, metric) = (self.ctx.domain, self.ctx.metric);
        let dt_g = self.tol().gliding_dt;
        loop {
            if b.t >= self.t_max {
                let p = tangential_lift(&b, domain, metric);
                return Ok(self.expire(&p));
            }
            let dt = dt_g.min(self.t_max - b.t);
            let out = gliding_step(domain, metric, &b, dt)?;
            let next = out.covector;
            // Region entries along the way, located by bisection in time.
            let entered: Vec<usize> = self
                .watch
                .iter()
                .enumerate()
                .filter(|(_, r)| r.curve == b.curve && !r.contains(b.s, 0.0) && r.contains(next.s, 0.0))
                .map(|(i, _)| i)
                .collect();
            for i in entered {
                let region = &self.watch[i];
                let (mut lo, mut hi) = (0.0, next.t - b.t);
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    let s = gliding_step(domain, metric, &b, mid)?.covector.s;
                    if region.contains(s, 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let c = gliding_step(domain, metric, &b, hi)?.covector;
                let p = tangential_lift(&c, domain, metric);
                let class = classify(&c, domain, metric, self.tol().glancing)?;
                let label = region.label;
                let ev = RayEvent {
                    kind: EventKind::RegionHit { label, gliding: true },
                    time: c.t,
                    position: p.x,
                    boundary: Some(c),
                    classification: Some(class),
                    flagged: false,
                };
                if self.push(ev).is_err() {
                    return Ok(Flow::Halt);
                }
            }
            let p = tangential_lift(&next, domain, metric);
            self.record(&p, true);
            b = next;
            if out.exited {
                let class = classify(&b, domain, metric, self.tol().glancing)?;
                self.last_event = b.t;
                let ev = RayEvent {
                    kind: EventKind::GlidingExit,
                    time: b.t,
                    position: p.x,
                    boundary: Some(b),
                    classification: Some(class),
                    flagged: false,
                };
                if self.push(ev).is_err() {
                    return Ok(Flow::Halt);
                }
                let (q, _) = project(&p, metric)?;
                return Ok(Flow::Continue(RayState {
                    phase: q,
                    regime: Regime::Interior,
                }));
            }
        }
    }
}

enum HitOutcome {
    Miss,
    Flow(Flow),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainPreset, RegionLabel, Vec2};
    use std::f64::consts::PI;

    fn annulus() -> Domain {
        DomainPreset::Annulus { inner: 1.0, outer: 2.0 }.build().unwrap()
    }

    #[test]
    fn straight_line_at_unit_speed() {
        let id = MetricField::Identity;
        let tau = 1.0 / 2f64.sqrt();
        let state = RayState {
            phase: PhasePoint::new(0.0, Vec2::zeros(), tau, Vec2::new(-tau, 0.0)),
            regime: Regime::Interior,
        };
        let (end, samples, shift) = integrate_interior(&state, &id, 1.0, &RayTolerances::default()).unwrap();
        assert!((end.phase.x - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        assert!(samples.iter().all(|s| (s.xi - Vec2::new(-tau, 0.0)).norm() < 1e-12));
        assert!(shift < 1e-12);
    }

    #[test]
    fn symbol_is_conserved_on_curved_metric() {
        let m = MetricField::DiagonalAffine {
            base: [1.0, 1.0],
            slope: [[0.5, 0.0], [0.0, 0.0]],
            power: 2,
        };
        let x = Vec2::new(0.1, 0.2);
        let dir = Vec2::new(0.6, 0.8);
        let q = m.quad(x, dir);
        let p = PhasePoint::new(0.0, x, q.sqrt(), dir).normalized();
        let state = RayState {
            phase: p,
            regime: Regime::Interior,
        };
        let (_, samples, shift) = integrate_interior(&state, &m, 1.0, &RayTolerances::default()).unwrap();
        assert!(shift <= 1e-9, "projection shift {shift}");
        for s in samples {
            let p = PhasePoint::new(s.t, s.x, s.tau, s.xi);
            assert!(principal_symbol(&p, &m).abs() < 1e-12);
        }
    }

    #[test]
    fn tangent_start_on_inner_circle_reaches_outer_at_sqrt3() {
        let d = annulus();
        let id = MetricField::Identity;
        let ctx = RayContext::new(&d, &id, RayTolerances::default());
        let outer = BoundaryRegion::full(RegionLabel::Measurement, &d, 1).unwrap();
        let init = InitialCondition::Boundary {
            covector: BoundaryCovector::new(0, 0.0, 0.0, 1.0, 1.0),
            lift: Lift::Inward,
        };
        let path = trace_until(&ctx, &init, 5.0, &[outer], |e| {
            matches!(e.kind, EventKind::RegionHit { .. })
        });
        assert_eq!(path.events[0].kind, EventKind::DiffractiveTouch);
        let hit = path.region_hits().next().unwrap();
        assert!((hit.time - 3f64.sqrt()).abs() < 1e-9);
        assert!(hit.classification.unwrap().is_hyperbolic());
    }

    #[test]
    fn gliding_quarter_of_outer_circle_takes_pi() {
        let d = annulus();
        let id = MetricField::Identity;
        let ctx = RayContext::new(&d, &id, RayTolerances::default());
        let init = InitialCondition::Boundary {
            covector: BoundaryCovector::new(1, 0.0, 0.0, 1.0, -1.0),
            lift: Lift::Inward,
        };
        let path = trace(&ctx, &init, PI, &[]);
        assert_eq!(path.events[0].kind, EventKind::GlidingEntry);
        let last = path.samples.last().unwrap();
        assert!((last.t - PI).abs() < 1e-12);
        assert!((last.x - Vec2::new(0.0, 2.0)).norm() < 1e-6, "{:?}", last.x);
        assert!(path.samples.iter().all(|s| (s.tau - path.samples[0].tau).abs() < 1e-10));
    }

    #[test]
    fn disc_billiard_reflection_count() {
        let d = DomainPreset::Disc { radius: 1.0 }.build().unwrap();
        let id = MetricField::Identity;
        let ctx = RayContext::new(&d, &id, RayTolerances::default());
        // Incidence angle 0.4 rad from the normal: chord length 2 cos(0.4).
        let theta: f64 = 0.4;
        let b = BoundaryCovector::new(0, 0.0, 0.0, 1.0, theta.sin());
        let path = trace(
            &ctx,
            &InitialCondition::Boundary {
                covector: b,
                lift: Lift::Inward,
            },
            10.0,
            &[],
        );
        let chord = 2.0 * theta.cos();
        assert_eq!(
            path.count(EventKind::HyperbolicReflection),
            (10.0 / chord).floor() as usize
        );
        assert_eq!(path.termination, Termination::TimeExpired);
        assert!(path.max_abs_symbol < 1e-8);
    }

    #[test]
    fn peanut_glider_exits_before_the_waist() {
        let d = DomainPreset::Peanut { lobe: 0.3 }.build().unwrap();
        let id = MetricField::Identity;
        let ctx = RayContext::new(&d, &id, RayTolerances::default());
        // Start on the convex lobe at theta = 0 moving counterclockwise.
        let init = InitialCondition::Boundary {
            covector: BoundaryCovector::new(0, 0.0, 0.0, 1.0, -1.0),
            lift: Lift::Inward,
        };
        let path = trace(&ctx, &init, 3.0, &[]);
        let exit = path
            .events
            .iter()
            .find(|e| e.kind == EventKind::GlidingExit)
            .expect("glider must launch at the inflection");
        let c = exit.boundary.unwrap();
        let dn = boundary_dn_r(&c, &d, &id).unwrap();
        assert!(dn.abs() < 1e-6);
        assert!(exit.position.x > 0.0 && exit.position.y > 0.0);
    }
}

use std::any::Any;
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Barrier, Mutex, PoisonError, RwLock};
use std::thread;
use std::time::{Duration, Instant};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::table::{ScheduleTable, Slot};
use crate::dynamics::{rhs_unchecked, TrackExcitation, VehicleParams, VehicleState};
use crate::error::{Error, Result};
use crate::integrator::{Group, IntegrationSettings, RateGroups, Trajectory};
use crate::schedule::SchedulingProblem;

/// Task bodies: the model and the integration group each task advances.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub vehicle: VehicleParams,
    pub track: TrackExcitation,
    /// Step, horizon and output stride. The divisors must match the ones
    /// implied by the table.
    pub settings: IntegrationSettings,
    pub initial: VehicleState,
    pub seed: u64,
    /// Task id → group. Tasks without a binding only consume time.
    pub bindings: BTreeMap<String, Group>,
}

impl Workload {
    /// Takes the bindings from the tasks' `group` fields.
    pub fn from_problem(
        problem: &SchedulingProblem,
        vehicle: VehicleParams,
        track: TrackExcitation,
        settings: IntegrationSettings,
    ) -> Self {
        Self {
            vehicle,
            track,
            settings,
            initial: VehicleState::zero(),
            seed: 0,
            bindings: problem
                .tasks
                .iter()
                .filter_map(|t| t.group.map(|g| (t.id.clone(), g)))
                .collect(),
        }
    }
}

/// Rate divisors implied by a table: each bound task's effective period
/// over the base frame (gcd of the bound effective periods).
pub fn implied_divisors(table: &ScheduleTable, bindings: &BTreeMap<String, Group>) -> Result<RateGroups> {
    Ok(Binding::resolve(table, bindings)?.divisors)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DurationStats {
    pub count: u64,
    pub max_ns: f64,
    pub mean_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub id: String,
    pub core: usize,
    /// Jobs started.
    pub activations: u64,
    pub deadline_misses: u64,
    pub max_lateness_ns: f64,
    /// Spread of slot start offsets from their planned start.
    pub jitter_ns: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_durations: Option<DurationStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub executor: String,
    /// Integration frames executed.
    pub frames: u64,
    /// Frame length in table time units.
    pub frame_length: u64,
    pub tasks: Vec<TaskReport>,
    pub warnings: Vec<String>,
}

impl ExecutionReport {
    pub fn total_misses(&self) -> u64 {
        self.tasks.iter().map(|t| t.deadline_misses).sum()
    }

    pub fn total_activations(&self) -> u64 {
        self.tasks.iter().map(|t| t.activations).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionOutcome {
    pub trajectory: Trajectory,
    pub report: ExecutionReport,
}

/// Group bound to each task, with the frame structure it implies.
struct Binding {
    group_of: Vec<Option<Group>>,
    divisors: RateGroups,
    /// Integration frame, table units.
    frame: u64,
    /// Barrier spacing: divides the frame and every RT-cycle length.
    quantum: u64,
}

impl Binding {
    fn resolve(table: &ScheduleTable, bindings: &BTreeMap<String, Group>) -> Result<Self> {
        let mut group_of = vec![None; table.task_ids.len()];
        let mut task_of: [Option<usize>; 3] = [None; 3];
        for (id, &g) in bindings {
            let i = table
                .task_index(id)
                .ok_or_else(|| Error::Config(format!("workload task `{id}` is not in the schedule table")))?;
            if let Some(other) = task_of[g.index()] {
                return Err(Error::Config(format!(
                    "group {g} is bound to both `{}` and `{id}`",
                    table.task_ids[other]
                )));
            }
            task_of[g.index()] = Some(i);
            group_of[i] = Some(g);
        }
        let bound: Vec<usize> = Group::ALL
            .iter()
            .map(|g| task_of[g.index()].ok_or_else(|| Error::Config(format!("no task is bound to group {g}"))))
            .collect::<Result<_>>()?;
        let frame = bound.iter().fold(0, |acc, &i| acc.gcd(&table.effective_periods[i]));
        let divisors = RateGroups::new(std::array::from_fn(|g| {
            (table.effective_periods[bound[g]] / frame) as u32
        }))?;
        let quantum = table
            .used_cores()
            .into_iter()
            .fold(frame, |acc, j| acc.gcd(&table.cycle_lengths[j]));
        Ok(Self {
            group_of,
            divisors,
            frame,
            quantum,
        })
    }
}

/// Frame-indexed view of a table, checked against a workload.
struct Plan<'a> {
    table: &'a ScheduleTable,
    binding: Binding,
    quanta_per_frame: u64,
    quanta_per_hyperperiod: u64,
    /// Slot indices (global order) per quantum of the hyperperiod.
    by_quantum: Vec<Vec<usize>>,
}

impl<'a> Plan<'a> {
    fn new(table: &'a ScheduleTable, workload: &Workload) -> Result<Self> {
        workload.vehicle.validate()?;
        workload.track.validate()?;
        if workload.settings.duration == 0.0 {
            return Err(Error::Config("run duration must be > 0".into()));
        }
        workload.settings.validate()?;
        let binding = Binding::resolve(table, &workload.bindings)?;
        if binding.divisors != workload.settings.divisors {
            return Err(Error::Config(format!(
                "schedule implies divisors {:?} but the integration settings use {:?}",
                binding.divisors.divisors(),
                workload.settings.divisors.divisors()
            )));
        }
        let q = binding.quantum;
        if table.hyperperiod / q > 10_000_000 {
            return Err(Error::Capacity(format!(
                "hyperperiod {} holds more than 1e7 barrier quanta of {q}",
                table.hyperperiod
            )));
        }
        let mut by_quantum = vec![Vec::new(); (table.hyperperiod / q) as usize];
        for (k, s) in table.slots.iter().enumerate() {
            let idx = (s.start / q as f64).floor() as u64;
            if s.end() > ((idx + 1) * q) as f64 + 1e-9 * q as f64 {
                return Err(Error::Config(format!(
                    "slot of `{}` at {} crosses the barrier at {}",
                    s.task_id,
                    s.start,
                    (idx + 1) * q
                )));
            }
            if s.block == 0 && binding.group_of[s.task].is_some() && s.start >= (s.release + binding.frame) as f64 {
                return Err(Error::Config(format!(
                    "first block of `{}` starts at {} after its integration frame [{}, {})",
                    s.task_id,
                    s.start,
                    s.release,
                    s.release + binding.frame
                )));
            }
            by_quantum[idx as usize].push(k);
        }
        Ok(Self {
            table,
            quanta_per_frame: binding.frame / q,
            quanta_per_hyperperiod: table.hyperperiod / q,
            binding,
            by_quantum,
        })
    }

    fn slots_in(&self, quantum: u64) -> impl Iterator<Item = &Slot> + '_ {
        self.by_quantum[(quantum % self.quanta_per_hyperperiod) as usize]
            .iter()
            .map(|&k| &self.table.slots[k])
    }

    fn step_of(&self, g: Group, h: f64) -> f64 {
        f64::from(self.binding.divisors.divisor(g)) * h
    }

    fn is_last_block(&self, s: &Slot) -> bool {
        s.block + 1 == self.table.block_counts[s.task]
    }
}

#[derive(Debug, Clone, Default)]
struct TaskAccum {
    activations: u64,
    misses: u64,
    max_lateness_ns: f64,
    /// (min, max) start offset from the planned start.
    offsets_ns: Option<(f64, f64)>,
    durations: DurationStats,
}

impl TaskAccum {
    fn merge(&mut self, o: &TaskAccum) {
        self.activations += o.activations;
        self.misses += o.misses;
        self.max_lateness_ns = self.max_lateness_ns.max(o.max_lateness_ns);
        if let Some((lo, hi)) = o.offsets_ns {
            self.record_offset(lo);
            self.record_offset(hi);
        }
        let n = self.durations.count + o.durations.count;
        if n > 0 {
            self.durations.mean_ns = (self.durations.mean_ns * self.durations.count as f64
                + o.durations.mean_ns * o.durations.count as f64)
                / n as f64;
        }
        self.durations.count = n;
        self.durations.max_ns = self.durations.max_ns.max(o.durations.max_ns);
    }

    fn record_offset(&mut self, ns: f64) {
        self.offsets_ns = Some(self.offsets_ns.map_or((ns, ns), |(lo, hi)| (lo.min(ns), hi.max(ns))));
    }

    fn record_duration(&mut self, ns: f64) {
        let d = &mut self.durations;
        d.mean_ns += (ns - d.mean_ns) / (d.count + 1) as f64;
        d.count += 1;
        d.max_ns = d.max_ns.max(ns);
    }
}

fn report(
    executor: &str,
    plan: &Plan,
    frames: u64,
    accum: &[TaskAccum],
    wall: bool,
    warnings: Vec<String>,
) -> ExecutionReport {
    let table = plan.table;
    ExecutionReport {
        executor: executor.into(),
        frames,
        frame_length: plan.binding.frame,
        tasks: accum
            .iter()
            .enumerate()
            .map(|(i, a)| TaskReport {
                id: table.task_ids[i].clone(),
                core: table.task_cores[i],
                activations: a.activations,
                deadline_misses: a.misses,
                max_lateness_ns: a.max_lateness_ns,
                jitter_ns: a.offsets_ns.map_or(0.0, |(lo, hi)| hi - lo),
                slot_durations: wall.then(|| a.durations.clone()),
            })
            .collect(),
        warnings,
    }
}

/// Executes the table in logical time on the calling thread. Each frame,
/// every due group reads the frame-start state; slots run in planned order.
pub fn run_logical(table: &ScheduleTable, workload: &Workload) -> Result<ExecutionOutcome> {
    let plan = Plan::new(table, workload)?;
    let steps = workload.settings.steps();
    execute_logical(&plan, workload, steps)
}

fn execute_logical(plan: &Plan, workload: &Workload, steps: u64) -> Result<ExecutionOutcome> {
    let p = &workload.vehicle;
    let h = workload.settings.h;
    let stride = u64::from(workload.settings.output_stride);
    let geom = p.geometry();
    let mut accum = vec![TaskAccum::default(); plan.table.task_ids.len()];
    let mut traj = Trajectory::new(&workload.settings, workload.track, workload.seed);
    let mut state = workload.initial;
    for n in 0..steps {
        if n % stride == 0 {
            traj.push(n as f64 * h, state);
        }
        let snapshot = state;
        let exc = workload.track.sample_unchecked(n as f64 * h, geom);
        for q in n * plan.quanta_per_frame..(n + 1) * plan.quanta_per_frame {
            for s in plan.slots_in(q) {
                if s.block != 0 {
                    continue;
                }
                accum[s.task].activations += 1;
                if let Some(g) = plan.binding.group_of[s.task] {
                    let deriv = rhs_unchecked(&snapshot, &exc, p);
                    state.euler_update(g.coords(), plan.step_of(g, h), &deriv);
                }
            }
        }
        if !state.is_finite() {
            return Err(Error::Divergence {
                time: (n + 1) as f64 * h,
            });
        }
    }
    if steps.is_multiple_of(stride) {
        traj.push(steps as f64 * h, state);
    }
    Ok(ExecutionOutcome {
        trajectory: traj,
        report: report("logical", plan, steps, &accum, false, Vec::new()),
    })
}

/// Shortest table period accepted for wall-clock execution.
pub const MIN_WALL_PERIOD: Duration = Duration::from_millis(1);

/// Executes the table against the wall clock for `duration`, one worker
/// thread per used core. The number of frames comes from `duration`; the
/// horizon in the workload settings is not used. Results are published at
/// barriers, so the trajectory equals the logical run over as many frames.
pub fn run_realtime(table: &ScheduleTable, workload: &Workload, duration: Duration) -> Result<ExecutionOutcome> {
    run_realtime_with(table, workload, duration, &|_| {})
}

pub(crate) fn run_realtime_with(
    table: &ScheduleTable,
    workload: &Workload,
    duration: Duration,
    hook: &(dyn Fn(&Slot) + Sync),
) -> Result<ExecutionOutcome> {
    if duration.is_zero() {
        return Err(Error::Config("run duration must be > 0".into()));
    }
    let plan = Plan::new(table, workload)?;
    let unit = table.time_unit.nanos();
    if let Some((i, &eff)) = table
        .effective_periods
        .iter()
        .enumerate()
        .find(|(_, &eff)| u128::from(eff) * u128::from(unit) < MIN_WALL_PERIOD.as_nanos())
    {
        return Err(Error::Config(format!(
            "task `{}` has effective period {eff} x {unit} ns, below the 1 ms wall-clock minimum",
            table.task_ids[i]
        )));
    }
    let frame_ns = plan.binding.frame * unit;
    let frames = (duration.as_nanos() / u128::from(frame_ns)) as u64;
    if frames == 0 {
        return Err(Error::Config(format!(
            "duration {duration:?} is shorter than one frame ({frame_ns} ns)"
        )));
    }
    let mut settings = workload.settings;
    settings.duration = frames as f64 * settings.h;
    let workload = Workload {
        settings,
        ..workload.clone()
    };
    execute_realtime(&plan, &workload, frames, hook)
}

struct Shared {
    front: RwLock<VehicleState>,
    back: Mutex<VehicleState>,
    trajectory: Mutex<Trajectory>,
    barrier: Barrier,
    abort: AtomicBool,
    /// Written by the barrier leader only, read after the next barrier.
    stop: AtomicBool,
    failure: Mutex<Option<Error>>,
}

impl Shared {
    fn fail(&self, err: Error) {
        let mut slot = self.failure.lock().unwrap_or_else(PoisonError::into_inner);
        slot.get_or_insert(err);
        self.abort.store(true, Ordering::SeqCst);
    }
}

fn panic_message(payload: &(dyn Any + Send)) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "non-string panic payload".into())
}

fn sleep_until(target: Instant) {
    loop {
        let now = Instant::now();
        if now >= target {
            return;
        }
        let left = target - now;
        if left > Duration::from_micros(300) {
            thread::sleep(left - Duration::from_micros(200));
        } else {
            thread::yield_now();
        }
    }
}

fn execute_realtime(
    plan: &Plan,
    workload: &Workload,
    frames: u64,
    hook: &(dyn Fn(&Slot) + Sync),
) -> Result<ExecutionOutcome> {
    let cores = plan.table.used_cores();
    let p = &workload.vehicle;
    let h = workload.settings.h;
    let stride = u64::from(workload.settings.output_stride);
    let geom = p.geometry();
    let unit_ns = plan.table.time_unit.nanos() as f64;
    let hyper = plan.table.hyperperiod as f64;
    let qph = plan.quanta_per_hyperperiod;
    let qpf = plan.quanta_per_frame;

    let mut traj = Trajectory::new(&workload.settings, workload.track, workload.seed);
    traj.push(0.0, workload.initial);
    let shared = Shared {
        front: RwLock::new(workload.initial),
        back: Mutex::new(workload.initial),
        trajectory: Mutex::new(traj),
        barrier: Barrier::new(cores.len()),
        abort: AtomicBool::new(false),
        stop: AtomicBool::new(false),
        failure: Mutex::new(None),
    };
    let (cpus, mut warnings) = affinity::plan(cores.len());
    let origin = Instant::now() + Duration::from_millis(20);
    let wall = |units: f64| origin + Duration::from_nanos((units * unit_ns).round() as u64);

    let results: Vec<(Vec<TaskAccum>, Option<String>)> = thread::scope(|scope| {
        let handles: Vec<_> = cores
            .iter()
            .enumerate()
            .map(|(w, &core)| {
                let shared = &shared;
                let cpu = cpus.as_ref().map(|c| c[w]);
                scope.spawn(move || {
                    let warning = cpu.and_then(|c| affinity::pin(c).err().map(|e| format!("core {core}: {e}")));
                    let mut accum = vec![TaskAccum::default(); plan.table.task_ids.len()];
                    let mut snapshot = workload.initial;
                    let mut exc = workload.track.sample_unchecked(0.0, geom);
                    for k in 0..frames * qpf {
                        let n = k / qpf;
                        if k % qpf == 0 {
                            snapshot = *shared.front.read().unwrap_or_else(PoisonError::into_inner);
                            exc = workload.track.sample_unchecked(n as f64 * h, geom);
                        }
                        let base = (k / qph) as f64 * hyper;
                        for s in plan.slots_in(k).filter(|s| s.core == core) {
                            if shared.abort.load(Ordering::SeqCst) {
                                break;
                            }
                            let planned = wall(base + s.start);
                            sleep_until(planned);
                            let started = Instant::now();
                            let body = catch_unwind(AssertUnwindSafe(|| {
                                hook(s);
                                if s.block != 0 {
                                    return;
                                }
                                if let Some(g) = plan.binding.group_of[s.task] {
                                    let deriv = rhs_unchecked(&snapshot, &exc, p);
                                    let mut back = shared.back.lock().unwrap_or_else(PoisonError::into_inner);
                                    back.euler_update(g.coords(), plan.step_of(g, h), &deriv);
                                }
                            }));
                            let finished = Instant::now();
                            if let Err(payload) = body {
                                shared.fail(Error::Worker(format!(
                                    "task `{}` on core {core} panicked: {}",
                                    s.task_id,
                                    panic_message(payload.as_ref())
                                )));
                                break;
                            }
                            let a = &mut accum[s.task];
                            if s.block == 0 {
                                a.activations += 1;
                            }
                            let offset = started.saturating_duration_since(planned).as_nanos() as f64
                                - planned.saturating_duration_since(started).as_nanos() as f64;
                            a.record_offset(offset);
                            a.record_duration((finished - started).as_nanos() as f64);
                            if plan.is_last_block(s) {
                                let deadline = wall(base + s.deadline as f64);
                                let late = finished.saturating_duration_since(deadline).as_nanos() as f64;
                                if late > 0.0 {
                                    a.misses += 1;
                                    a.max_lateness_ns = a.max_lateness_ns.max(late);
                                }
                            }
                        }
                        if shared.barrier.wait().is_leader() {
                            let mut stop = shared.abort.load(Ordering::SeqCst);
                            if !stop && (k + 1) % qpf == 0 {
                                let next = *shared.back.lock().unwrap_or_else(PoisonError::into_inner);
                                if next.is_finite() {
                                    *shared.front.write().unwrap_or_else(PoisonError::into_inner) = next;
                                    if (n + 1).is_multiple_of(stride) {
                                        shared
                                            .trajectory
                                            .lock()
                                            .unwrap_or_else(PoisonError::into_inner)
                                            .push((n + 1) as f64 * h, next);
                                    }
                                } else {
                                    shared.fail(Error::Divergence {
                                        time: (n + 1) as f64 * h,
                                    });
                                    stop = true;
                                }
                            }
                            shared.stop.store(stop, Ordering::SeqCst);
                        }
                        shared.barrier.wait();
                        if shared.stop.load(Ordering::SeqCst) {
                            break;
                        }
                    }
                    (accum, warning)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|hd| hd.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    });

    if let Some(err) = shared.failure.into_inner().unwrap_or_else(PoisonError::into_inner) {
        return Err(err);
    }
    let mut total = vec![TaskAccum::default(); plan.table.task_ids.len()];
    for (accum, warning) in &results {
        for (t, a) in total.iter_mut().zip(accum) {
            t.merge(a);
        }
        warnings.extend(warning.clone());
    }
    Ok(ExecutionOutcome {
        trajectory: shared.trajectory.into_inner().unwrap_or_else(PoisonError::into_inner),
        report: report("realtime", plan, frames, &total, true, warnings),
    })
}

mod affinity {
    /// Distinct CPUs for `workers` threads from the process affinity mask,
    /// or a warning when that is not possible.
    #[cfg(target_os = "linux")]
    pub fn plan(workers: usize) -> (Option<Vec<usize>>, Vec<String>) {
        // SAFETY: cpu_set_t is plain data; sched_getaffinity fills it.
        let mut set: libc::cpu_set_t = unsafe { std::mem::zeroed() };
        let rc = unsafe { libc::sched_getaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &mut set) };
        if rc != 0 {
            return (
                None,
                vec![format!("pinning unavailable: {}", std::io::Error::last_os_error())],
            );
        }
        let cpus: Vec<usize> = (0..libc::CPU_SETSIZE as usize)
            .filter(|&c| unsafe { libc::CPU_ISSET(c, &set) })
            .collect();
        if cpus.len() < workers {
            return (
                None,
                vec![format!(
                    "pinning skipped: {} CPU(s) available for {workers} workers",
                    cpus.len()
                )],
            );
        }
        (Some(cpus[..workers].to_vec()), Vec::new())
    }

    #[cfg(target_os = "linux")]
    pub fn pin(cpu: usize) -> std::io::Result<()> {
        // SAFETY: as above; pid 0 targets the calling thread.
        let mut set: libc::cpu_set_t = unsafe { std::mem::zeroed() };
        unsafe { libc::CPU_SET(cpu, &mut set) };
        let rc = unsafe { libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) };
        if rc == 0 {
            Ok(())
        } else {
            Err(std::io::Error::last_os_error())
        }
    }

    #[cfg(not(target_os = "linux"))]
    pub fn plan(_workers: usize) -> (Option<Vec<usize>>, Vec<String>) {
        (None, vec!["pinning unavailable on this platform".into()])
    }

    #[cfg(not(target_os = "linux"))]
    pub fn pin(_cpu: usize) -> std::io::Result<()> {
        Ok(())
    }
}

/// A way of executing a schedule table.
pub trait Executor {
    fn name(&self) -> &'static str;

    fn run(&self, table: &ScheduleTable, workload: &Workload) -> Result<ExecutionOutcome>;
}

pub struct LogicalExecutor;

impl Executor for LogicalExecutor {
    fn name(&self) -> &'static str {
        "logical"
    }

    fn run(&self, table: &ScheduleTable, workload: &Workload) -> Result<ExecutionOutcome> {
        run_logical(table, workload)
    }
}

pub struct RealtimeExecutor {
    pub duration: Duration,
}

impl Executor for RealtimeExecutor {
    fn name(&self) -> &'static str {
        "realtime"
    }

    fn run(&self, table: &ScheduleTable, workload: &Workload) -> Result<ExecutionOutcome> {
        run_realtime(table, workload, self.duration)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExecutorOptions {
    /// Wall-clock length of realtime runs.
    pub wall_duration: Duration,
}

impl Default for ExecutorOptions {
    fn default() -> Self {
        Self {
            wall_duration: Duration::from_secs(10),
        }
    }
}

pub type ExecutorFactory = fn(&ExecutorOptions) -> Box<dyn Executor>;

/// Name → constructor table for executors.
pub struct ExecutorRegistry {
    factories: BTreeMap<&'static str, ExecutorFactory>,
}

impl ExecutorRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: ExecutorFactory) -> &mut Self {
        self.factories.insert(name, factory);
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, name: &str, options: &ExecutorOptions) -> Result<Box<dyn Executor>> {
        self.factories
            .get(name)
            .map(|f| f(options))
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "executor",
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })
    }
}

impl Default for ExecutorRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("logical", |_| Box::new(LogicalExecutor));
        r.register("realtime", |o| {
            Box::new(RealtimeExecutor {
                duration: o.wall_duration,
            })
        });
        r
    }
}

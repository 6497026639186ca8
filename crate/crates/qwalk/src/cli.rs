//! `qwalk` subcommands. Exit codes: 0 success, 1 domain refusal, 2 bad input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::chain::{pst_chain, uniform_chain, unmodulated_no_pst_scan};
use crate::corona::{example_graph, fidelity_vs_m, CoronaError, SCAN_T_MAX};
use crate::graph::{balance, BitLabel, Graph, MarkingScheme, MatrixKind, Sign};
use crate::io::{read_text, resolve_graph, Cell, Report};
use crate::qudit::{parse_family, QuditState};
use crate::routing::{HopKind, RoutingError, RoutingNetwork, SwitchLag};
use crate::spectral::{
    basis_state, check_pst_conditions, max_fidelity_scan, Spectrum, C64, PST_TOL,
};
use crate::transmon::{
    coupling_report, find_cutoff, parse_config, pst_time, sweep, three_body_oracle,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Refused(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Refused(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn refused(e: impl std::fmt::Display) -> CliError {
    CliError::Refused(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Quantum walk transfer toolkit")]
pub struct Cli {
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph summary and spectrum.
    Graph(GraphArgs),
    /// Perfect state transfer between two vertices.
    Pst(PstArgs),
    /// Two-hop route through a hypercube-block network.
    Route(RouteArgs),
    /// End-to-end transfer on a weighted or uniform chain.
    Chain(ChainArgs),
    /// Best fidelity on iterated signed corona products.
    Corona(CoronaArgs),
    /// Single-boson transfer on a commuting coupling family.
    Qudit(QuditArgs),
    /// Tunable-coupler effective coupling.
    Transmon(TransmonArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MatrixArg {
    Adj,
    Lap,
    Signless,
}

impl From<MatrixArg> for MatrixKind {
    fn from(m: MatrixArg) -> Self {
        match m {
            MatrixArg::Adj => MatrixKind::Adjacency,
            MatrixArg::Lap => MatrixKind::Laplacian,
            MatrixArg::Signless => MatrixKind::SignlessLaplacian,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MarkingArg {
    Canonical,
    Plurality,
    Explicit,
}

impl From<MarkingArg> for MarkingScheme {
    fn from(m: MarkingArg) -> Self {
        match m {
            MarkingArg::Canonical => MarkingScheme::Canonical,
            MarkingArg::Plurality => MarkingScheme::Plurality,
            MarkingArg::Explicit => MarkingScheme::Explicit,
        }
    }
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// k<n>, p<n>, c<n>, q<k> or a graph file.
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_enum, default_value = "adj")]
    pub matrix: MatrixArg,
}

#[derive(Debug, Args)]
pub struct PstArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub from: usize,
    #[arg(long)]
    pub to: usize,
    #[arg(long, value_enum, default_value = "adj")]
    pub matrix: MatrixArg,
    /// Report the amplitude at this time instead of the transfer time.
    #[arg(long)]
    pub time: Option<f64>,
    /// Sample the amplitude on [0, tmax].
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    #[arg(long)]
    pub n: usize,
    /// Source label as a bit string.
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    /// instant, idle:<dt> or full:<dt>.
    #[arg(long, default_value = "instant")]
    pub lag: String,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long)]
    pub n: usize,
    /// Uniform couplings instead of the engineered ones.
    #[arg(long)]
    pub unmodulated: bool,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct CoronaArgs {
    /// Bundled example name or any graph accepted by --graph.
    #[arg(long)]
    pub seed: String,
    /// Seed vertex pairs, e.g. 1-3,0-2.
    #[arg(long)]
    pub pairs: String,
    /// Highest corona order; rows cover 0..=m.
    #[arg(long)]
    pub m: u32,
    #[arg(long, value_enum, default_value = "adj")]
    pub matrix: MatrixArg,
    #[arg(long, value_enum, default_value = "canonical")]
    pub marking: MarkingArg,
    #[arg(long, default_value_t = SCAN_T_MAX)]
    pub tmax: f64,
}

#[derive(Debug, Args)]
pub struct QuditArgs {
    /// Coupling family file.
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub target: usize,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub tmax: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Level amplitudes on the source, e.g. 0.6,0.8 (real).
    #[arg(long)]
    pub state: Option<String>,
    /// Time for --state; defaults to the best sampled time.
    #[arg(long)]
    pub time: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TransmonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Coupler sweep wc:<lo>:<hi>:<step> in GHz.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub hops: u32,
}

/// Parses `args` (program name first), writes the report to `out` and
/// diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            let text = if cli.json {
                report.to_json()
            } else {
                report.to_csv()
            };
            match out.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Graph(a) => graph_cmd(a),
        Command::Pst(a) => pst_cmd(a),
        Command::Route(a) => route_cmd(a),
        Command::Chain(a) => chain_cmd(a),
        Command::Corona(a) => corona_cmd(a),
        Command::Qudit(a) => qudit_cmd(a),
        Command::Transmon(a) => transmon_cmd(a),
    }
}

fn time_grid(tmax: f64, dt: f64) -> Result<Vec<f64>, CliError> {
    if !(tmax.is_finite() && tmax >= 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(input(format!("bad time grid tmax={tmax} dt={dt}")));
    }
    let steps = (tmax / dt + 1e-9).floor() as usize;
    if steps > 1_000_000 {
        return Err(input(format!("{steps} samples requested, limit 1000000")));
    }
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

fn amplitude_row(t: f64, amp: C64) -> Vec<Cell> {
    vec![t.into(), amp.norm().into(), amp.arg().into()]
}

fn graph_cmd(a: &GraphArgs) -> Result<Report, CliError> {
    let g = resolve_graph(&a.graph).map_err(input)?;
    let kind: MatrixKind = a.matrix.into();
    let s = Spectrum::of_graph(&g, kind);
    let negative = g.edges().iter().filter(|e| e.sign == Sign::Minus).count();
    let mut r = Report::new(&["index", "eigenvalue"]);
    r.meta("vertices", g.vertex_count())
        .meta("edges", g.edge_count())
        .meta("negative_edges", negative)
        .meta("balanced", balance(&g).balanced)
        .meta("connected", g.is_connected())
        .meta("bipartite", g.bipartition().is_some())
        .meta("net_regularity", g.net_regularity().map(|d| d.to_string()))
        .meta("matrix", kind.to_string());
    for (i, &v) in s.values().iter().enumerate() {
        r.row(vec![i.into(), v.into()]);
    }
    Ok(r)
}

fn pst_cmd(a: &PstArgs) -> Result<Report, CliError> {
    let g = resolve_graph(&a.graph).map_err(input)?;
    let kind: MatrixKind = a.matrix.into();
    let s = Spectrum::of_graph(&g, kind);
    let cond = check_pst_conditions(&s, a.from, a.to).map_err(input)?;
    let mut r = Report::new(&["t", "magnitude", "phase"]);
    r.meta("from", a.from)
        .meta("to", a.to)
        .meta("matrix", kind.to_string())
        .meta("vector_condition", cond.vector_condition)
        .meta("rationality", cond.rationality)
        .meta("pst", cond.eigenvalue_condition)
        .meta(
            "t0",
            cond.candidate_time.filter(|_| cond.eigenvalue_condition),
        );
    let amp = |t: f64| s.amplitude(a.from, a.to, t).map_err(input);
    if let Some(tmax) = a.tmax {
        for t in time_grid(tmax, a.dt)? {
            r.row(amplitude_row(t, amp(t)?));
        }
    } else if let Some(t) = a.time {
        r.row(amplitude_row(t, amp(t)?));
    } else {
        match cond.candidate_time {
            Some(t0) if cond.eigenvalue_condition => {
                r.row(amplitude_row(t0, amp(t0)?));
            }
            _ => {
                return Err(refused(format!(
                    "no perfect state transfer from {} to {}",
                    a.from, a.to
                )))
            }
        }
    }
    Ok(r)
}

fn parse_lag(text: &str) -> Result<SwitchLag, CliError> {
    let bad = || {
        input(format!(
            "bad lag {text:?}: expect instant, idle:<dt> or full:<dt>"
        ))
    };
    if text == "instant" {
        return Ok(SwitchLag::Instant);
    }
    let (mode, dt) = text.split_once(':').ok_or_else(bad)?;
    let dt: f64 = dt.parse().map_err(|_| bad())?;
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(bad());
    }
    match mode {
        "idle" => Ok(SwitchLag::Idle(dt)),
        "full" => Ok(SwitchLag::FullNetwork(dt)),
        _ => Err(bad()),
    }
}

fn route_cmd(a: &RouteArgs) -> Result<Report, CliError> {
    let net = RoutingNetwork::build(a.n).map_err(input)?;
    let lag = parse_lag(&a.lag)?;
    let vertex = |s: &str| -> Result<usize, CliError> {
        let label: BitLabel = s.parse().map_err(input)?;
        if label.width() != net.width() {
            return Err(input(format!(
                "label {s} has width {}, network labels have width {}",
                label.width(),
                net.width()
            )));
        }
        net.vertex(&label).map_err(input)
    };
    let (u, w) = (vertex(&a.from)?, vertex(&a.to)?);
    let plan = net.plan_route(u, w).map_err(input)?;
    let outcome = net
        .execute_route(&plan, &basis_state(a.n, u), lag)
        .map_err(|e| match e {
            RoutingError::TooLarge(_) => refused(e),
            _ => input(e),
        })?;
    let label = |v: usize| net.label(v).map(|l| l.to_string()).map_err(input);
    let mut r = Report::new(&[
        "hop",
        "from",
        "to",
        "kind",
        "sub_dimension",
        "active",
        "off_edges",
        "duration",
    ]);
    r.meta("vertices", a.n)
        .meta("width", net.width() as usize)
        .meta("hops", plan.hops.len())
        .meta("swap_baseline", net.swap_baseline(u, w).map_err(input)?)
        .meta("elapsed", outcome.report.time)
        .meta("magnitude", outcome.report.magnitude)
        .meta("phase", outcome.report.phase)
        .meta("untouched_max", outcome.untouched_max)
        .meta("pass", outcome.report.pass);
    for (i, hop) in plan.hops.iter().enumerate() {
        let kind = match hop.kind {
            HopKind::Bridge => "bridge",
            HopKind::Cube => "cube",
        };
        r.row(vec![
            (i + 1).into(),
            label(hop.from)?.into(),
            label(hop.to)?.into(),
            kind.into(),
            hop.switch.sub_dimension.into(),
            hop.active.len().into(),
            hop.network_off_edges.into(),
            hop.duration.into(),
        ]);
    }
    Ok(r)
}

fn chain_cmd(a: &ChainArgs) -> Result<Report, CliError> {
    let grid = time_grid(a.tmax, a.dt)?;
    let spec = if a.unmodulated {
        uniform_chain(a.n)
    } else {
        pst_chain(a.n)
    }
    .map_err(input)?;
    let s = Spectrum::new(&spec.matrix()).map_err(input)?;
    let last = a.n - 1;
    let best = if a.unmodulated {
        unmodulated_no_pst_scan(a.n, a.tmax).map_err(input)?
    } else {
        max_fidelity_scan(&s, 0, last, a.tmax, a.dt.min(0.01)).map_err(input)?
    };
    let mut r = Report::new(&["t", "magnitude", "phase"]);
    r.meta("sites", a.n)
        .meta("modulated", !a.unmodulated)
        .meta("best_time", best.time)
        .meta("best_fidelity", best.fidelity)
        .meta("pst", best.fidelity.sqrt() >= 1.0 - PST_TOL);
    for t in grid {
        r.row(amplitude_row(t, s.amplitude(0, last, t).map_err(input)?));
    }
    Ok(r)
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    text.split(',')
        .map(|p| {
            let (u, v) = p
                .split_once('-')
                .ok_or_else(|| input(format!("bad pair {p:?}: expect u-v")))?;
            let idx = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| input(format!("bad vertex {s:?} in pair {p:?}")))
            };
            Ok((idx(u)?, idx(v)?))
        })
        .collect()
}

fn corona_seed(spec: &str) -> Result<(Graph, bool), CliError> {
    if let Some(ex) = example_graph(spec).map_err(input)? {
        return Ok((ex.graph, ex.approx));
    }
    Ok((resolve_graph(spec).map_err(input)?, false))
}

fn corona_cmd(a: &CoronaArgs) -> Result<Report, CliError> {
    let (seed, approx) = corona_seed(&a.seed)?;
    let pairs = parse_pairs(&a.pairs)?;
    let kind: MatrixKind = a.matrix.into();
    if !(a.tmax.is_finite() && a.tmax > 0.0) {
        return Err(input(format!("bad tmax {}", a.tmax)));
    }
    let table =
        fidelity_vs_m(&seed, &pairs, a.m, kind, a.marking.into(), a.tmax).map_err(|e| match e {
            CoronaError::PairOutOfRange { .. } | CoronaError::Graph(_) | CoronaError::Parse(_) => {
                input(e)
            }
            _ => refused(e),
        })?;
    let mut r = Report::new(&["m", "from", "to", "time", "fidelity", "provenance"]);
    r.meta("seed", a.seed.as_str())
        .meta("approx", approx)
        .meta("seed_vertices", seed.vertex_count())
        .meta("matrix", table.kind.as_str());
    for row in &table.rows {
        r.row(vec![
            row.m.into(),
            row.from.into(),
            row.to.into(),
            row.time.into(),
            row.fidelity.into(),
            row.provenance.to_string().into(),
        ]);
    }
    Ok(r)
}

fn qudit_cmd(a: &QuditArgs) -> Result<Report, CliError> {
    let family = parse_family(&read_text(&a.family).map_err(input)?).map_err(input)?;
    let grid = time_grid(a.tmax, a.dt)?;
    let mut r = Report::new(&["t", "magnitude", "phase"]);
    let mut best = (0.0, -1.0);
    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        let f = family
            .transfer_amplitude(a.source, a.target, t)
            .map_err(input)?;
        if f.norm() > best.1 + 1e-12 {
            best = (t, f.norm());
        }
        rows.push(amplitude_row(t, f));
    }
    let audit = family.unitarity_audit(a.source, &grid).map_err(input)?;
    r.meta("sites", family.sites())
        .meta("source", a.source)
        .meta("target", a.target)
        .meta("unitarity_defect", audit.corrected)
        .meta("uncorrected_defect", audit.uncorrected)
        .meta("best_time", best.0)
        .meta("best_magnitude", best.1);
    if let Some(text) = &a.state {
        let amplitudes = text
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map(|v| C64::new(v, 0.0))
                    .map_err(|_| input(format!("bad amplitude {x:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let state = QuditState::new(a.source, amplitudes).map_err(input)?;
        let t = a.time.unwrap_or(best.0);
        let out = family.qudit_transfer(&state, a.target, t).map_err(input)?;
        let phases: Vec<String> = out
            .level_phases
            .iter()
            .map(|p| crate::io::format_number(*p))
            .collect();
        r.meta("state_time", t)
            .meta("state_fidelity", out.fidelity)
            .meta("condition_met", out.condition_met)
            .meta("level_phases", phases.join(";"));
    }
    for row in rows {
        r.row(row);
    }
    Ok(r)
}

fn parse_sweep(text: &str) -> Result<(f64, f64, f64), CliError> {
    let bad = || input(format!("bad sweep {text:?}: expect wc:<lo>:<hi>:<step>"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 || parts[0] != "wc" {
        return Err(bad());
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    Ok((num(parts[1])?, num(parts[2])?, num(parts[3])?))
}

fn transmon_cmd(a: &TransmonArgs) -> Result<Report, CliError> {
    let cfg = parse_config(&read_text(&a.config).map_err(input)?).map_err(input)?;
    if a.hops == 0 {
        return Err(input("hops must be at least 1"));
    }
    let mut r = Report::new(&["w_c", "delta", "g_rwa", "g_brwa", "t_pst"]);
    r.meta("units", "angular GHz (rad/ns) and ns")
        .meta(
            "ordinary_time",
            "t_pst/(2pi) if couplings are read as ordinary GHz",
        )
        .meta("hops", a.hops);
    let point = coupling_report(&cfg).map_err(refused)?;
    let check = three_body_oracle(&cfg).map_err(refused)?;
    let time = pst_time(point.g_brwa, a.hops).ok();
    r.meta("w_c", point.w_c)
        .meta("g_i", point.g_i)
        .meta("g_j", point.g_j)
        .meta("g_ij", point.g_ij)
        .meta("eta", point.eta)
        .meta("delta_i", point.delta_i)
        .meta("delta_j", point.delta_j)
        .meta("delta_ij", point.delta_ij)
        .meta("g_rwa", point.g_rwa)
        .meta("g_brwa", point.g_brwa)
        .meta("w_i_shifted", point.w_i_shifted)
        .meta("w_j_shifted", point.w_j_shifted)
        .meta("dispersive", point.dispersive)
        .meta("t_pst_angular", time.map(|t| t.angular_ns))
        .meta("t_pst_ordinary", time.map(|t| t.ordinary_ns))
        .meta("three_body_exchange", check.numeric)
        .meta("three_body_relative_error", check.relative_error);
    let Some(text) = &a.sweep else {
        r.row(vec![
            point.w_c.into(),
            point.delta_i.into(),
            point.g_rwa.into(),
            point.g_brwa.into(),
            time.map(|t| t.angular_ns).into(),
        ]);
        return Ok(r);
    };
    let (lo, hi, step) = parse_sweep(text)?;
    let rows = sweep(&cfg, lo, hi, step, a.hops).map_err(input)?;
    let cutoff = find_cutoff(&cfg, lo, hi).ok();
    r.meta("cutoff_w_c", cutoff.map(|c| c.w_c))
        .meta("cutoff_delta_i", cutoff.map(|c| c.delta_i));
    for row in rows {
        r.row(vec![
            row.w_c.into(),
            row.delta_i.into(),
            row.g_rwa.into(),
            row.g_brwa.into(),
            row.t_pst.into(),
        ]);
    }
    Ok(r)
}

//! Command line front end: classify systems, evaluate the rank condition,
//! simulate schedules, describe and rasterize control sets, run the grid
//! reachability oracle, plan steering schedules, and emit phase portraits.

mod config;
mod svg;

use clap::{Parser, Subcommand};
use config::{from_core, parse_config, CliError, RunConfig};
use hlcs_core::control_sets::{
    closure_text, control_sets, pullback_region, raster_csv, rasterize, ControlSetDescription,
    Topology,
};
use hlcs_core::flows::{simulate, ControlSchedule, State, Trajectory};
use hlcs_core::planner::{steer_band, steer_complement, steer_flat, steer_strip, SteeringResult};
use hlcs_core::reach::{approx_control_sets, build_reach_graph, compare, components_csv};
use hlcs_core::system::{classify_case, larc, larc_value, normal_form, CaseTag, PolyMap2, SystemParams};
use hlcs_core::fmt_f64;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "hlcs", about = "Singular one-input linear control systems on the plane: classification, flows, control sets, reachability, steering", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the case tag, normal-form parameters and conjugating map
    Classify(CommonArgs),
    /// Evaluate the rank condition and its defining expression
    Larc(CommonArgs),
    /// Run a control schedule from a start state and write the trajectory CSV
    Simulate(SimArgs),
    /// Describe the control set(s) and write a membership raster CSV
    ControlSet(GridArgs),
    /// Build the grid reachability graph, extract components, score agreement
    Reach(GridArgs),
    /// Construct a steering schedule between two states
    Plan(PlanArgs),
    /// Emit an SVG phase portrait with region shading and overlays
    Plot(PlotArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON configuration
    #[arg(long)]
    config: PathBuf,
}

#[derive(clap::Args)]
struct SimArgs {
    #[arg(long)]
    config: PathBuf,
    /// Schedule CSV with `duration,omega` rows
    #[arg(long)]
    schedule: PathBuf,
    /// Start state as `s,t`
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    from: String,
    /// Output directory
    #[arg(long, default_value = "hlcs-out")]
    out: PathBuf,
    /// Sampling step for the trajectory
    #[arg(long)]
    sample_step: Option<f64>,
}

#[derive(clap::Args)]
struct GridArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "hlcs-out")]
    out: PathBuf,
    /// Cell size override
    #[arg(long)]
    grid_h: Option<f64>,
    /// Window override as `smin,smax,tmin,tmax`
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Time quantum override (reach only)
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(clap::Args)]
struct PlanArgs {
    #[arg(long)]
    config: PathBuf,
    /// Start state as `s,t`
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    /// Target state as `s,t`
    #[arg(long, allow_hyphen_values = true)]
    to: String,
    #[arg(long, default_value = "hlcs-out")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct PlotArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "hlcs-out")]
    out: PathBuf,
    #[arg(long)]
    grid_h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Optional schedule to overlay as a trajectory
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Start state for the overlayed trajectory
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    from: String,
}

fn main() {
    let cli = Cli::parse();
    let threads = std::env::var("HLCS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let run = || -> Result<(), CliError> {
        match cli.command {
            Command::Classify(ref args) => cmd_classify(args),
            Command::Larc(ref args) => cmd_larc(args),
            Command::Simulate(ref args) => cmd_simulate(args),
            Command::ControlSet(ref args) => cmd_control_set(args),
            Command::Reach(ref args) => cmd_reach(args),
            Command::Plan(ref args) => cmd_plan(args),
            Command::Plot(ref args) => cmd_plot(args),
        }
    };
    let outcome = match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::new("Internal", e.to_string()))
            .and_then(|pool| pool.install(run)),
        _ => run(),
    };
    if let Err(e) = outcome {
        eprintln!("error[{}] {}", e.code, e.message);
        std::process::exit(1);
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new("IoError", format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_state(text: &str) -> Result<State, CliError> {
    let mut it = text.split(',');
    let bad = || CliError::new("ParseError", format!("expected `s,t`, got `{text}`"));
    let s = it.next().and_then(|x| x.trim().parse().ok()).ok_or_else(bad)?;
    let t = it.next().and_then(|x| x.trim().parse().ok()).ok_or_else(bad)?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok(State::new(s, t))
}

fn apply_grid_overrides(
    cfg: &mut RunConfig,
    grid_h: Option<f64>,
    window: Option<&String>,
) -> Result<(), CliError> {
    if let Some(h) = grid_h {
        cfg.grid_h = h;
    }
    let (mut smin, mut smax, mut tmin, mut tmax) = (
        cfg.window.s_min,
        cfg.window.s_max,
        cfg.window.t_min,
        cfg.window.t_max,
    );
    if let Some(text) = window {
        let parts: Vec<f64> = text
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::new("ParseError", format!("bad window `{text}`")))?;
        if parts.len() != 4 {
            return Err(CliError::new("ParseError", "window needs four numbers"));
        }
        (smin, smax, tmin, tmax) = (parts[0], parts[1], parts[2], parts[3]);
    }
    cfg.window = hlcs_core::grid::GridWindow::new(smin, smax, tmin, tmax, cfg.grid_h)
        .map_err(from_core)?;
    Ok(())
}

fn normalized(cfg: &RunConfig) -> Result<(SystemParams, PolyMap2, CaseTag), CliError> {
    normal_form(&cfg.params, &cfg.range).map_err(from_core)
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::new("IoError", format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| CliError::new("IoError", format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn case_name(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::Flat => "Flat",
        CaseTag::Contracting => "Contracting",
        CaseTag::Band => "Band",
        CaseTag::Quadratic => "Quadratic",
        CaseTag::Reducible => "Reducible",
        CaseTag::NonSingular => "NonSingular",
    }
}

fn cmd_classify(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(&args.config)?;
    let tag = classify_case(&cfg.params);
    println!("case: {}", case_name(tag));
    println!("larc: {}", larc(&cfg.params));
    println!("larc_value: {}", fmt_f64(larc_value(&cfg.params)));
    match normal_form(&cfg.params, &cfg.range) {
        Ok((np, map, ntag)) => {
            println!("normal_case: {}", case_name(ntag));
            println!(
                "normal_params: a={} b={} c={} alpha={} beta={} gamma={} lambda={}",
                fmt_f64(np.a),
                fmt_f64(np.b),
                fmt_f64(np.c),
                fmt_f64(np.alpha),
                fmt_f64(np.beta),
                fmt_f64(np.gamma),
                fmt_f64(np.lambda)
            );
            println!("map: s' = p*s, t' = q*s + k*s^2 + r*t");
            println!(
                "map_coeffs: p={} q={} k={} r={}",
                fmt_f64(map.p),
                fmt_f64(map.q),
                fmt_f64(map.k),
                fmt_f64(map.r)
            );
        }
        Err(e) => {
            println!("normal_case: none ({})", from_core(e).code);
        }
    }
    Ok(())
}

fn cmd_larc(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(&args.config)?;
    println!("larc: {}", larc(&cfg.params));
    println!("value: {}", fmt_f64(larc_value(&cfg.params)));
    Ok(())
}

fn cmd_simulate(args: &SimArgs) -> Result<(), CliError> {
    let cfg = load(&args.config)?;
    let (np, map, tag) = normalized(&cfg)?;
    let sched_text = std::fs::read_to_string(&args.schedule)
        .map_err(|e| CliError::new("IoError", format!("{}: {e}", args.schedule.display())))?;
    let schedule = ControlSchedule::from_csv(&sched_text).map_err(from_core)?;
    let v0 = parse_state(&args.from)?;
    let (ns, nt) = map.forward(v0.s, v0.t);
    let step = args.sample_step.unwrap_or(cfg.sample_step);
    let tr = simulate(tag, &np, State::new(ns, nt), &schedule, step).map_err(from_core)?;
    // samples back in the original coordinates
    let inv = map.inverse();
    let back = Trajectory {
        samples: tr
            .samples
            .iter()
            .map(|(time, v)| {
                let (s, t) = inv.forward(v.s, v.t);
                (*time, State::new(s, t))
            })
            .collect(),
    };
    let path = write_out(&args.out, "trajectory.csv", &back.to_csv())?;
    eprintln!("wrote {}", path.display());
    println!("samples: {}", back.samples.len());
    let end = back.final_state();
    println!("final: s={} t={}", fmt_f64(end.s), fmt_f64(end.t));
    Ok(())
}

fn topology_name(t: Topology) -> &'static str {
    match t {
        Topology::Closed => "closed",
        Topology::Open => "open",
        Topology::Unknown => "unknown",
    }
}

fn kind_name(d: &ControlSetDescription) -> &'static str {
    use hlcs_core::control_sets::RegionKind::*;
    match d.kind {
        WholePlane => "WholePlane",
        HorizontalStripClosure => "HorizontalStripClosure",
        ComplementOfCpCm => "ComplementOfCpCm",
        OmegaBand => "OmegaBand",
        SingletonFamily => "SingletonFamily",
    }
}

fn describe_sets(cfg: &RunConfig) -> Result<(CaseTag, Vec<ControlSetDescription>), CliError> {
    let (np, map, tag) = normalized(cfg)?;
    let descs = control_sets(tag, &np, &cfg.range).map_err(from_core)?;
    Ok((tag, descs.iter().map(|d| pullback_region(d, &map)).collect()))
}

fn cmd_control_set(args: &GridArgs) -> Result<(), CliError> {
    let mut cfg = load(&args.config)?;
    apply_grid_overrides(&mut cfg, args.grid_h, args.window.as_ref())?;
    let tag = classify_case(&cfg.params);
    let (ntag, descs) = describe_sets(&cfg)?;
    let mut json = String::new();
    json.push_str(&format!(
        "{{\n  \"case\": \"{}\",\n  \"normal_case\": \"{}\",\n  \"sets\": [\n",
        case_name(tag),
        case_name(ntag)
    ));
    for (i, d) in descs.iter().enumerate() {
        json.push_str(&format!(
            "    {{\n      \"kind\": \"{}\",\n      \"topology\": \"{}\",\n      \"closure\": \"{}\",\n      \"range\": [{}, {}],\n      \"chart\": {{\"p\": {}, \"q\": {}, \"k\": {}, \"r\": {}}}\n    }}{}\n",
            kind_name(d),
            topology_name(d.topology),
            closure_text(d),
            fmt_f64(d.range.omega_minus),
            fmt_f64(d.range.omega_plus),
            fmt_f64(d.chart.p),
            fmt_f64(d.chart.q),
            fmt_f64(d.chart.k),
            fmt_f64(d.chart.r),
            if i + 1 < descs.len() { "," } else { "" }
        ));
    }
    json.push_str("  ]\n}");
    println!("{json}");
    for (i, d) in descs.iter().enumerate() {
        let raster = rasterize(d, &cfg.window, cfg.grid_h);
        let name = if descs.len() == 1 {
            "control_set_raster.csv".to_string()
        } else {
            format!("control_set_raster_{i}.csv")
        };
        let path = write_out(&args.out, &name, &raster_csv(&raster))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_reach(args: &GridArgs) -> Result<(), CliError> {
    let mut cfg = load(&args.config)?;
    apply_grid_overrides(&mut cfg, args.grid_h, args.window.as_ref())?;
    if let Some(dt) = args.dt {
        cfg.dt = dt;
    }
    let (np, _, tag) = normalized(&cfg)?;
    // the oracle runs in the normal-form chart; the window is read there
    let g = build_reach_graph(tag, &np, &cfg.range, &cfg.window, cfg.dt, cfg.n_controls)
        .map_err(from_core)?;
    let sets = approx_control_sets(&g);
    let descs = control_sets(tag, &np, &cfg.range).map_err(from_core)?;
    let agreement = compare(&descs[0], &sets, &cfg.window);
    let p1 = write_out(&args.out, "edges.csv", &g.edges_csv())?;
    let p2 = write_out(&args.out, "components.csv", &components_csv(&sets))?;
    eprintln!("wrote {}", p1.display());
    eprintln!("wrote {}", p2.display());
    println!("cells: {}", cfg.window.cell_count());
    println!("edges: {}", g.edge_count());
    println!("components: {}", sets.len());
    println!("agreement: {}", fmt_f64(agreement));
    Ok(())
}

fn cmd_plan(args: &PlanArgs) -> Result<(), CliError> {
    let cfg = load(&args.config)?;
    let (np, map, tag) = normalized(&cfg)?;
    let v0 = parse_state(&args.from)?;
    let v1 = parse_state(&args.to)?;
    let (s0, t0) = map.forward(v0.s, v0.t);
    let (s1, t1) = map.forward(v1.s, v1.t);
    let (nv0, nv1) = (State::new(s0, t0), State::new(s1, t1));
    let result: SteeringResult = match tag {
        CaseTag::Flat => steer_flat(&np, &cfg.range, nv0, nv1),
        CaseTag::Contracting if np.a == 0.0 => steer_strip(&np, &cfg.range, nv0, nv1),
        CaseTag::Contracting => steer_complement(&np, &cfg.range, nv0, nv1),
        CaseTag::Band if np.gamma != 0.0 => steer_band(&np, &cfg.range, nv0, nv1),
        CaseTag::Band | CaseTag::Quadratic => {
            return Err(CliError::new(
                "NotInControlSet",
                "this case admits only one-point control sets; no steering exists",
            ))
        }
        other => return Err(from_core(hlcs_core::Error::UnsupportedCase(other))),
    }
    .map_err(from_core)?;
    let path = write_out(&args.out, "schedule.csv", &result.schedule.to_csv())?;
    eprintln!("wrote {}", path.display());
    println!("construction: {}", result.construction);
    println!("segments: {}", result.schedule.segments.len());
    println!("endpoint_error: {}", fmt_f64(result.endpoint_error));
    Ok(())
}

fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let mut cfg = load(&args.config)?;
    apply_grid_overrides(&mut cfg, args.grid_h, args.window.as_ref())?;
    let (np, map, tag) = normalized(&cfg)?;
    let descs = control_sets(tag, &np, &cfg.range).map_err(from_core)?;
    let pulled = pullback_region(&descs[0], &map);

    let trajectory = match &args.schedule {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::new("IoError", format!("{}: {e}", path.display())))?;
            let schedule = ControlSchedule::from_csv(&text).map_err(from_core)?;
            let v0 = parse_state(&args.from)?;
            let (ns, nt) = map.forward(v0.s, v0.t);
            let tr = simulate(tag, &np, State::new(ns, nt), &schedule, cfg.sample_step)
                .map_err(from_core)?;
            let inv = map.inverse();
            Some(Trajectory {
                samples: tr
                    .samples
                    .iter()
                    .map(|(time, v)| {
                        let (s, t) = inv.forward(v.s, v.t);
                        (*time, State::new(s, t))
                    })
                    .collect(),
            })
        }
    };
    let svg = svg::render(
        &pulled,
        tag,
        &np,
        &map,
        &cfg.range,
        &cfg.window,
        trajectory.as_ref(),
    );
    let path = write_out(&args.out, "plot.svg", &svg)?;
    eprintln!("wrote {}", path.display());
    println!("svg: {} bytes", svg.len());
    Ok(())
}

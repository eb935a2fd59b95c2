use clap::{Args, Parser, Subcommand, ValueEnum};
use floquet_chern::config::{KRect, Method, RunConfig};
use floquet_chern::dynamics::{self, DynamicOptions};
use floquet_chern::floquet::{effective_bloch_with_tol, eigenstate, floquet_operator, Band};
use floquet_chern::io::{self, fmt_num};
use floquet_chern::pulse;
use floquet_chern::su2::Spinor;
use floquet_chern::topology::{self, lattice, texture, winding, ClosedLoop, PhaseDiagramOptions};
use floquet_chern::{Error, KPoint, Vec3};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Floquet spectra, phase diagrams and Chern numbers of the periodically
/// quenched generalized Haldane model.
#[derive(Parser, Debug)]
#[command(name = "fchern", version)]
struct Cli {
    /// Run configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    #[arg(long = "T1", global = true, allow_hyphen_values = true)]
    t1: Option<String>,

    #[arg(long = "T2", global = true, allow_hyphen_values = true)]
    t2: Option<String>,

    /// k-grid size for spectra and Chern numbers.
    #[arg(long, global = true)]
    grid: Option<usize>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quasienergy bands on the k-grid and gap summary.
    Spectrum,
    /// Chern number of one band.
    Chern(ChernArgs),
    /// Chern numbers over a grid of stage durations.
    PhaseDiagram(PhaseArgs),
    /// Spin-texture maps and loop profiles.
    Texture(TextureArgs),
    /// Pulse synthesis and calibration.
    Pulse {
        #[command(subcommand)]
        action: PulseCommand,
    },
}

#[derive(Args, Debug)]
struct ChernArgs {
    /// lattice | swa | dwa
    #[arg(long)]
    method: Option<String>,
    /// lower (filled) | upper
    #[arg(long)]
    band: Option<String>,
    /// Axis choice `i;j,l`, e.g. `z;x,y`.
    #[arg(long)]
    axes: Option<String>,
    #[arg(long)]
    periods: Option<usize>,
    /// ground | random | weighted
    #[arg(long)]
    init: Option<String>,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    /// `lo:hi:n`, values at `lo + (hi - lo)(i + 1)/n`.
    #[arg(long = "T1-range")]
    t1_range: Option<String>,
    #[arg(long = "T2-range")]
    t2_range: Option<String>,
    #[arg(long)]
    grid_cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TextureMode {
    /// Eigenstate texture of the selected band.
    Static,
    /// Long-time averaged texture from the configured initial state.
    Dynamic,
    /// Angle profile along the configured square loop.
    Loop,
}

#[derive(Args, Debug)]
struct TextureArgs {
    #[arg(value_enum)]
    mode: TextureMode,
    /// For `loop`: use the averaged texture instead of the eigenstate texture.
    #[arg(long)]
    dynamic: bool,
    #[arg(long)]
    axes: Option<String>,
    #[arg(long)]
    periods: Option<usize>,
    #[arg(long)]
    band: Option<String>,
    #[arg(long)]
    init: Option<String>,
}

#[derive(Subcommand, Debug)]
enum PulseCommand {
    /// Resonant pulse preparing the +d eigenstate from |0>.
    Prep,
    /// Two-segment drive realizing one period at the configured k.
    Drive {
        /// Compare the pulse evolution with the Floquet operator.
        #[arg(long)]
        compare: bool,
        #[arg(long)]
        periods: Option<usize>,
    },
    /// Fit `omega_R = a exp(-b A) + c` to two-column calibration data.
    Calibrate {
        /// Calibration file; defaults to the `calibration` key.
        file: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for pair in &cli.set {
        cfg.set_pair(pair)?;
    }
    let mut flags: Vec<(&str, String)> = Vec::new();
    let mut push = |key, v: Option<String>| {
        if let Some(v) = v {
            flags.push((key, v));
        }
    };
    push("T1", cli.t1.clone());
    push("T2", cli.t2.clone());
    push("grid", cli.grid.map(|v| v.to_string()));
    push("seed", cli.seed.map(|v| v.to_string()));
    push("out", cli.out.as_ref().map(|p| p.display().to_string()));
    push("threads", cli.threads.map(|v| v.to_string()));
    match &cli.command {
        Command::Chern(a) => {
            push("method", a.method.clone());
            push("band", a.band.clone());
            push("axes", a.axes.clone());
            push("periods", a.periods.map(|v| v.to_string()));
            push("init", a.init.clone());
        }
        Command::PhaseDiagram(a) => {
            push("T1_range", a.t1_range.clone());
            push("T2_range", a.t2_range.clone());
            push("grid_cap", a.grid_cap.map(|v| v.to_string()));
        }
        Command::Texture(a) => {
            push("axes", a.axes.clone());
            push("periods", a.periods.map(|v| v.to_string()));
            push("band", a.band.clone());
            push("init", a.init.clone());
        }
        Command::Pulse { action } => match action {
            PulseCommand::Drive { compare, periods } => {
                push("periods", periods.map(|v| v.to_string()));
                if *compare {
                    push("compare", Some("true".into()));
                }
            }
            PulseCommand::Calibrate { file } => push("calibration", file.as_ref().map(|p| p.display().to_string())),
            PulseCommand::Prep => {}
        },
        Command::Spectrum => {}
    }
    for (k, v) in flags {
        cfg.set(k, &v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Renders to memory first so a failed run leaves no partial file.
fn write_output(
    dir: &Path,
    name: &str,
    render: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> CliResult<PathBuf> {
    let mut buf = Vec::new();
    render(&mut buf).map_err(|e| Failure::Validation(e.to_string()))?;
    std::fs::create_dir_all(dir).map_err(|e| Failure::Validation(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, buf).map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, cfg: &RunConfig, title: &str, body: &str) -> CliResult<PathBuf> {
    write_output(dir, name, |w| {
        io::write_header(w, title, cfg)?;
        std::io::Write::write_all(w, body.as_bytes())
    })
}

fn fmt_k(k: KPoint) -> String {
    format!("{},{}", fmt_num(k.k1), fmt_num(k.k2))
}

fn cmd_spectrum(cfg: &RunConfig) -> CliResult<()> {
    let qp = cfg.protocol()?;
    let grid = topology::band_spectrum(&qp, cfg.grid);
    let path = write_output(&cfg.out, "spectrum.tsv", |w| io::write_spectrum(w, cfg, &grid))?;
    let mut s = String::new();
    let _ = writeln!(s, "min_gap_0 = {}", fmt_num(grid.min_gap_0));
    let _ = writeln!(s, "argmin_0 = {}", fmt_k(grid.argmin_0));
    let _ = writeln!(s, "min_gap_pi = {}", fmt_num(grid.min_gap_pi));
    let _ = writeln!(s, "argmin_pi = {}", fmt_k(grid.argmin_pi));
    for (name, k) in [("0", grid.argmin_0), ("pi", grid.argmin_pi)] {
        let t = topology::band_touching_check(&qp, k, 1e-6);
        let parallel = t.parallel.map_or("none".to_string(), |p| p.to_string());
        let _ = writeln!(
            s,
            "touching_{name} parallel={parallel} phase_sum_mod_pi={} n={} touches={}",
            fmt_num(t.phase_sum_mod_pi),
            t.n,
            t.touches
        );
    }
    let gapped = grid.is_gapped(cfg.degeneracy_tol);
    let _ = writeln!(s, "gapped = {gapped}");
    write_text(&cfg.out, "spectrum_summary.txt", cfg, "spectrum summary", &s)?;
    print!("{s}");
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_chern(cfg: &RunConfig) -> CliResult<()> {
    let qp = cfg.protocol()?;
    let mut report = String::new();
    let _ = writeln!(report, "method = {}", cfg.method);
    let _ = writeln!(report, "band = {}", cfg.band.name());
    let chern = match cfg.method {
        Method::Lattice => {
            let mut n = cfg.grid;
            let mut refinements = 0;
            let r = loop {
                match lattice::chern_lattice_report(&qp, cfg.band, n, cfg.degeneracy_tol) {
                    Err(Error::NonQuantized { .. }) if 2 * n <= cfg.grid_cap => {
                        n *= 2;
                        refinements += 1;
                    }
                    other => break other?,
                }
            };
            let _ = writeln!(report, "grid = {}", r.grid_n);
            let _ = writeln!(report, "refinements = {refinements}");
            let _ = writeln!(report, "raw = {}", fmt_num(r.raw));
            let _ = writeln!(report, "max_plaquette = {}", fmt_num(r.max_plaquette));
            r.chern
        }
        Method::Swa => {
            let r = winding::chern_swa(&qp, cfg.band, cfg.axes, cfg.grid, cfg.grid_cap)?;
            let _ = writeln!(report, "axes = {}", cfg.axes);
            let _ = writeln!(report, "grid = {}", r.grid_n);
            let _ = writeln!(report, "refinements = {}", r.refinements);
            let mut table = Vec::new();
            let _ = io::write_singularities(&mut table, &r.singularities);
            report.push_str(&String::from_utf8_lossy(&table));
            r.chern
        }
        Method::Dwa => {
            let opts = DynamicOptions {
                axes: cfg.axes,
                weight_gap_threshold: cfg.weight_gap_threshold,
                grid_cap: cfg.grid_cap,
                degeneracy_tol: cfg.degeneracy_tol,
            };
            let r = dynamics::chern_dynamic(&qp, &cfg.initial_state_rule(), cfg.grid, cfg.periods, &opts)?;
            let _ = writeln!(report, "axes = {}", cfg.axes);
            let _ = writeln!(report, "periods = {}", cfg.periods);
            let _ = writeln!(report, "dominant_band = {}", r.band.name());
            let _ = writeln!(report, "dominant_band_chern = {}", r.chern);
            let _ = writeln!(report, "grid = {}", r.grid_n);
            let _ = writeln!(report, "refinements = {}", r.refinements);
            let mut table = Vec::new();
            let _ = io::write_singularities(&mut table, &r.singularities);
            report.push_str(&String::from_utf8_lossy(&table));
            if r.band == cfg.band {
                r.chern
            } else {
                -r.chern
            }
        }
    };
    let _ = writeln!(report, "chern = {chern}");
    write_text(&cfg.out, "chern_report.txt", cfg, "chern number report", &report)?;
    println!("chern = {chern}");
    Ok(())
}

fn cmd_phase_diagram(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate_ranges()?;
    let opts = PhaseDiagramOptions {
        grid_n: cfg.grid,
        grid_cap: cfg.grid_cap,
        band: cfg.band,
        degeneracy_tol: cfg.degeneracy_tol,
    };
    let cells = topology::phase_diagram(cfg.t1_range, cfg.t2_range, &cfg.preset, &opts)?;
    let path = write_output(&cfg.out, "phase_diagram.tsv", |w| {
        io::write_phase_diagram(w, cfg, &cells)
    })?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for c in &cells {
        let key = match c.chern.value() {
            Some(v) => format!("{v:+}"),
            None => format!("{:?}", c.chern),
        };
        *counts.entry(key).or_default() += 1;
    }
    for (k, n) in counts {
        println!("C = {k}: {n} cells");
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn loop_of(rect: &KRect, samples: usize) -> ClosedLoop {
    ClosedLoop::rectangle((rect.k1_lo, rect.k2_lo), (rect.k1_hi, rect.k2_hi), (samples / 4).max(2))
}

fn cmd_texture(cfg: &RunConfig, args: &TextureArgs) -> CliResult<()> {
    let qp = cfg.protocol()?;
    let region = cfg.region;
    let keep = move |k: KPoint| region == KRect::FULL || region.contains(k);
    match args.mode {
        TextureMode::Static => {
            let grid = texture::SpinTextureGrid::for_band(&qp, cfg.band, cfg.texture_grid, cfg.degeneracy_tol);
            let path = write_output(&cfg.out, "texture_static.tsv", |w| {
                io::write_texture(w, cfg, "static spin texture", &grid, keep)
            })?;
            eprintln!("wrote {}", path.display());
        }
        TextureMode::Dynamic => {
            let d = dynamics::dynamic_texture(
                &qp,
                &cfg.initial_state_rule(),
                cfg.texture_grid,
                cfg.periods,
                cfg.degeneracy_tol,
            );
            let path = write_output(&cfg.out, "texture_dynamic.tsv", |w| {
                io::write_dynamic_texture(w, cfg, &d, keep)
            })?;
            eprintln!("wrote {}", path.display());
        }
        TextureMode::Loop => {
            let lp = loop_of(&cfg.loop_rect, cfg.loop_samples);
            let rule = cfg.initial_state_rule();
            let periods = cfg.periods;
            let tol = cfg.degeneracy_tol;
            let band = cfg.band;
            let stat = texture::BandTexture { qp, band };
            let samples: Vec<(KPoint, Vec3)> = lp
                .points
                .iter()
                .enumerate()
                .map(|(idx, &k)| {
                    if !args.dynamic {
                        return (k, texture::Texture::spin(&stat, k));
                    }
                    let u = floquet_operator(&qp, k);
                    let d_hat = effective_bloch_with_tol(&u, tol, Some(k))
                        .ok()
                        .and_then(|d| d.unit())
                        .unwrap_or(Vec3::new(0.0, 0.0, 1.0));
                    (
                        k,
                        dynamics::time_averaged_spin(&u, rule.state(idx as u64, k, d_hat), periods),
                    )
                })
                .collect();
            let spins: Vec<Vec3> = samples.iter().map(|s| s.1).collect();
            let w = winding::winding_of_samples(&lp.points, &spins, cfg.axes);
            let rows: Vec<_> = samples
                .iter()
                .map(|&(k, s)| (k, s, texture::swa(s, cfg.axes.j, cfg.axes.l).ok()))
                .collect();
            let (name, title) = if args.dynamic {
                ("loop_dynamic.tsv", "dynamic winding angle along loop")
            } else {
                ("loop_static.tsv", "static winding angle along loop")
            };
            let path = write_output(&cfg.out, name, |f| {
                io::write_loop_profile(f, cfg, title, &rows, w.as_ref().ok().copied())
            })?;
            eprintln!("wrote {}", path.display());
            println!("winding = {}", w?);
        }
    }
    Ok(())
}

fn cmd_pulse(cfg: &RunConfig, action: &PulseCommand) -> CliResult<()> {
    match action {
        PulseCommand::Prep => {
            let d = cfg.effective_bloch();
            let rabi = cfg.rabi.unwrap_or(cfg.max_rabi);
            let seg = pulse::prep_pulse(&d, rabi)?;
            let psi = pulse::simulate_sequence(&[seg], Spinor::zero());
            let target = eigenstate(&d, Band::Upper)?;
            let fidelity = psi.inner(&target).norm_sqr();
            let path = write_output(&cfg.out, "pulse_prep.tsv", |w| {
                io::write_pulse_sequence(w, cfg, "eigenstate preparation pulse", &[seg])
            })?;
            println!("duration = {}", fmt_num(seg.duration));
            println!("fidelity = {}", fmt_num(fidelity));
            eprintln!("wrote {}", path.display());
        }
        PulseCommand::Drive { .. } => {
            let qp = cfg.protocol()?;
            let rabi = cfg
                .rabi
                .unwrap_or_else(|| pulse::default_rabi(&qp, cfg.k, cfg.detuning_cap, cfg.max_rabi));
            let (a, b) = pulse::floquet_drive_pulses(&qp, cfg.k, rabi)?;
            let path = write_output(&cfg.out, "pulse_drive.tsv", |w| {
                io::write_pulse_sequence(w, cfg, "one-period drive pulses (repeat for each period)", &[a, b])
            })?;
            eprintln!("wrote {}", path.display());
            if cfg.compare {
                let u = floquet_operator(&qp, cfg.k);
                let op_fid = pulse::sequence_operator(&[a, b]).fidelity(&u);
                let pulsed = pulse::simulate_repeated(&[a, b], Spinor::zero(), cfg.periods);
                let direct = u.pow(cfg.periods as u64).apply(Spinor::zero());
                let state_fid = pulsed.inner(&direct).norm_sqr();
                let mut s = String::new();
                let _ = writeln!(s, "rabi = {}", fmt_num(rabi));
                let _ = writeln!(s, "operator_fidelity = {}", fmt_num(op_fid));
                let _ = writeln!(s, "periods = {}", cfg.periods);
                let _ = writeln!(s, "state_fidelity = {}", fmt_num(state_fid));
                write_text(&cfg.out, "pulse_drive_compare.txt", cfg, "drive pulse comparison", &s)?;
                print!("{s}");
            }
        }
        PulseCommand::Calibrate { .. } => {
            let path = cfg
                .calibration
                .as_ref()
                .ok_or_else(|| Failure::Validation("invalid calibration: no calibration file given".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
            let data = pulse::parse_calibration(&text)?;
            let fit = pulse::rabi_fit(&data)?;
            let out = write_output(&cfg.out, "calibration_fit.tsv", |w| {
                io::write_rabi_fit(w, cfg, &fit, &data)
            })?;
            println!("a = {}", fmt_num(fit.a));
            println!("b = {}", fmt_num(fit.b));
            println!("c = {}", fmt_num(fit.c));
            println!("residual_norm = {}", fmt_num(fit.residual_norm));
            eprintln!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = resolve_config(cli)?;
    if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global()
            .map_err(|e| Failure::Validation(format!("invalid threads: {e}")))?;
    }
    match &cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Chern(_) => cmd_chern(&cfg),
        Command::PhaseDiagram(_) => cmd_phase_diagram(&cfg),
        Command::Texture(args) => cmd_texture(&cfg, args),
        Command::Pulse { action } => cmd_pulse(&cfg, action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

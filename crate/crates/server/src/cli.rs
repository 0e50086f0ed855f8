//! Command-line front end. `main.rs` only parses arguments and calls [`run`].

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ndswarm::dataset::{self, Archetype, Dataset, LoadOptions, MissingPolicy, SyntheticSpec};
use ndswarm::projection::{self, PcaReportOptions, PcaScaling, PcaScope};
use ndswarm::scene::{write_gltf, CameraConfig, GltfOptions, Lod, SceneFrame, DEFAULT_DISTANCE};
use ndswarm::session::{self, Command, DatasetStore, Session};
use ndswarm::slab::{SlabMode, DEFAULT_THRESHOLD};
use ndswarm::assignment::{AssignmentSpec, DimensionAssignment};
use ndswarm::view::RotationPlane;

use crate::api::{self, AppState, DEFAULT_PUSH_RATE};

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Parser)]
#[command(name = "ndswarm", version, about = "Explore multidimensional data as a swarm of avatars")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Print per-dimension statistics of a CSV file.
    Inspect {
        csv: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Build one frame and write its JSON.
    Project(ProjectArgs),
    /// Print principal-component loadings of the anonymous dimensions.
    PcaReport {
        csv: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        #[arg(long)]
        assign: PathBuf,
        #[arg(long, value_enum, default_value = "anonymous")]
        scope: ScopeArg,
        #[arg(long, value_enum, default_value = "standardized")]
        scaling: ScalingArg,
    },
    /// Build one frame and write it as a glTF 2.0 scene.
    ExportGltf {
        #[command(flatten)]
        project: ProjectArgs,
        #[arg(long, value_enum, default_value = "low")]
        lod: LodArg,
        /// Head size before perspective magnification.
        #[arg(long, default_value_t = 0.15)]
        glyph_scale: f64,
    },
    /// Generate a synthetic dataset as CSV.
    Synth {
        #[arg(long, value_enum)]
        archetype: ArchetypeArg,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a command log (one JSON command per line) and print every reply.
    Replay { log: PathBuf },
    /// Serve the HTTP/WebSocket API.
    Serve {
        #[arg(long, env = "ND_SWARM_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Maximum WebSocket frame pushes per second and session.
        #[arg(long, default_value_t = DEFAULT_PUSH_RATE)]
        max_push_rate: f64,
        /// CSV files registered at startup (default load options).
        #[arg(long = "preload")]
        preload: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct LoadArgs {
    #[arg(long)]
    pub label_column: Option<String>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long, value_enum, default_value = "drop-point")]
    pub missing_policy: PolicyArg,
}

impl LoadArgs {
    fn options(&self) -> Result<LoadOptions> {
        if !self.delimiter.is_ascii() {
            bail!("delimiter {:?} is not ASCII", self.delimiter);
        }
        Ok(LoadOptions {
            delimiter: self.delimiter as u8,
            label_column: self.label_column.clone(),
            missing_policy: self.missing_policy.into(),
        })
    }

    fn load(&self, path: &Path) -> Result<Dataset> {
        dataset::load_csv(path, &self.options()?).with_context(|| format!("loading {}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    pub csv: PathBuf,
    #[command(flatten)]
    pub load: LoadArgs,
    /// Assignment JSON: {"dimension name": {"category": ..., "target": ...}}.
    #[arg(long)]
    pub assign: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub slab_threshold: f64,
    #[arg(long, value_enum, default_value = "post-view")]
    pub slab_mode: ModeArg,
    /// Rotation `PLANE=DEGREES`, applied in the order given.
    #[arg(long = "rotate", value_parser = parse_rotation)]
    pub rotate: Vec<(RotationPlane, f64)>,
    /// Translation `x,y,z,t` applied after the rotations.
    #[arg(long, value_parser = parse_translation, allow_hyphen_values = true)]
    pub translate: Option<[f64; 4]>,
    #[arg(long, default_value_t = DEFAULT_DISTANCE)]
    pub camera_distance: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! value_enum {
    ($name:ident => $target:ty { $($variant:ident => $value:expr),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, clap::ValueEnum)]
        pub enum $name { $($variant),* }
        impl From<$name> for $target {
            fn from(v: $name) -> $target {
                match v { $($name::$variant => $value),* }
            }
        }
    };
}

value_enum!(PolicyArg => MissingPolicy { DropPoint => MissingPolicy::DropPoint, Strict => MissingPolicy::Strict });
value_enum!(ModeArg => SlabMode { PostView => SlabMode::PostView, PreView => SlabMode::PreView });
value_enum!(ScopeArg => PcaScope { Anonymous => PcaScope::Anonymous, AnonymousAndSpatial => PcaScope::AnonymousAndSpatial });
value_enum!(ScalingArg => PcaScaling { Standardized => PcaScaling::Standardized, Centered => PcaScaling::Centered });
value_enum!(LodArg => Lod { Low => Lod::Low, Medium => Lod::Medium, High => Lod::High });
value_enum!(ArchetypeArg => Archetype { Politicians => Archetype::Politicians, Drinks => Archetype::Drinks });

pub fn parse_rotation(s: &str) -> Result<(RotationPlane, f64), String> {
    let (plane, deg) = s.split_once('=').ok_or("expected PLANE=DEGREES")?;
    let plane: RotationPlane = plane.trim().parse().map_err(|e| format!("{e}"))?;
    let deg: f64 = deg.trim().parse().map_err(|e| format!("bad angle: {e}"))?;
    if !deg.is_finite() {
        return Err("angle must be finite".into());
    }
    Ok((plane, deg))
}

pub fn parse_translation(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad component {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| "expected four comma-separated numbers".to_string())
}

fn read_assignment(path: &Path) -> Result<AssignmentSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.write_all(b"\n")) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
    }
}

/// Runs the same command sequence a UI would send and returns the frame.
pub fn build_frame(args: &ProjectArgs) -> Result<SceneFrame> {
    let ds = Arc::new(args.load.load(&args.csv)?);
    let mut commands = vec![
        Command::SetAssignment { assignment: read_assignment(&args.assign)? },
        Command::SetSlab { threshold: args.slab_threshold, mode: Some(args.slab_mode.into()) },
        Command::SetCamera { distance: args.camera_distance },
    ];
    commands.extend(args.rotate.iter().map(|&(plane, deg)| Command::Rotate {
        plane,
        angle: deg.to_radians(),
    }));
    if let Some(delta) = args.translate {
        commands.push(Command::Translate { delta });
    }
    let store = DatasetStore::new();
    let mut session = Session::new("cli", ds);
    for cmd in &commands {
        session.dispatch(cmd, &store)?;
    }
    Ok(session.frame()?)
}

fn inspect(ds: &Dataset, json: bool) -> String {
    let summaries = dataset::summarize(ds);
    if json {
        return serde_json::to_string_pretty(&serde_json::json!({
            "source": ds.source(),
            "n": ds.dims(),
            "n_total": ds.len(),
            "labels": ds.labels().is_some(),
            "dimensions": summaries,
        }))
        .expect("summary serializes");
    }
    let width = ds.names().iter().map(String::len).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{}: {} dimensions, {} points{}\n",
        ds.source(),
        ds.dims(),
        ds.len(),
        if ds.labels().is_some() { ", labelled" } else { "" }
    );
    out += &format!(
        "{:<width$}  {:>12} {:>12} {:>12} {:>12} {:>8}\n",
        "name", "min", "max", "mean", "std", "distinct"
    );
    for s in summaries {
        out += &format!(
            "{:<width$}  {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>8}\n",
            s.name, s.min, s.max, s.mean, s.std_dev, s.distinct
        );
    }
    out.pop();
    out
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Inspect { csv, load, json } => {
            let ds = load.load(&csv)?;
            write_output(None, &inspect(&ds, json))
        }
        Cmd::Project(args) => {
            let frame = build_frame(&args)?;
            write_output(args.out.as_deref(), &frame.to_json())
        }
        Cmd::PcaReport { csv, load, assign, scope, scaling } => {
            let ds = load.load(&csv)?;
            let asgn = DimensionAssignment::from_spec(&read_assignment(&assign)?, ds.names())?;
            let options = PcaReportOptions { scope: scope.into(), scaling: scaling.into() };
            let report = projection::pca_report(&ds, &asgn, options)?;
            write_output(None, &serde_json::to_string_pretty(&report)?)
        }
        Cmd::ExportGltf { project, lod, glyph_scale } => {
            let frame = build_frame(&project)?;
            let options = GltfOptions {
                lod: lod.into(),
                glyph_scale,
                camera: CameraConfig::with_distance(project.camera_distance)?,
            };
            let out = project.out.clone().unwrap_or_else(|| PathBuf::from("frame.gltf"));
            write_gltf(&frame, &options, &out)?;
            eprintln!("wrote {} avatars to {}", frame.n_visible(), out.display());
            Ok(())
        }
        Cmd::Synth { archetype, n, seed, out } => {
            let ds = dataset::generate_synthetic(&SyntheticSpec { archetype: archetype.into(), n_points: n, seed })?;
            let mut buf = Vec::new();
            dataset::write_csv(&ds, &mut buf, "name")?;
            let text = String::from_utf8(buf).expect("CSV output is UTF-8");
            write_output(out.as_deref(), text.trim_end())
        }
        Cmd::Replay { log } => {
            let text = std::fs::read_to_string(&log).with_context(|| format!("reading {}", log.display()))?;
            let commands = session::parse_log(&text)?;
            for reply in session::replay(&commands, &DatasetStore::new())? {
                match reply {
                    Ok(json) => println!("{json}"),
                    Err(e) => println!("{}", serde_json::json!({ "error": e })),
                }
            }
            Ok(())
        }
        Cmd::Serve { port, host, max_push_rate, preload } => {
            if !(max_push_rate > 0.0 && max_push_rate.is_finite()) {
                bail!("--max-push-rate must be a positive number");
            }
            let state = AppState::new(max_push_rate);
            for path in &preload {
                let ds = dataset::load_csv(path, &LoadOptions::default())
                    .with_context(|| format!("loading {}", path.display()))?;
                let id = state.add_dataset(ds);
                eprintln!("registered {} as {id}", path.display());
            }
            serve(state, SocketAddr::new(host, port))
        }
    }
}

fn serve(state: Arc<AppState>, addr: SocketAddr) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, api::router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

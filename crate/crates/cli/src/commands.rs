use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use tidy_core::episode::{EpisodeConfig, EpisodeLog, EpisodeSetup};
use tidy_core::geometry::Cell;
use tidy_core::nav::{carrot_plan, inflate, plan_point_goal};
use tidy_core::preference::{
    ingest_corpus, is_misplaced, read_model, rmse, top_placements, train_with_history, write_model, CommonSenseKb,
    Hyperparameters, Preferences,
};
use tidy_core::semantic_map::{load_map, SemanticMap};
use tidy_core::sim::parse_scenario;
use tidy_core::vocab::{ObjectClass, ReceptacleClass, RoomId, UserId};

use crate::{CheckArgs, Cli, Command, PlanArgs, RenderArgs, RunArgs, TrainArgs};

/// Runs the chosen subcommand and returns the process exit code.
pub fn dispatch(cli: &Cli) -> Result<u8> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Train(a) => train(a, cli.seed, out),
        Command::Run(a) => run(a, cli.seed, out),
        Command::Check(a) => check(a, out),
        Command::Plan(a) => plan(a, out),
        Command::Render(a) => render(a, cli.seed, out),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn train(a: &TrainArgs, seed: Option<u64>, out: Option<&Path>) -> Result<u8> {
    let corpus = ingest_corpus(&read(&a.corpus)?).with_context(|| format!("parsing {}", a.corpus.display()))?;
    let d = Hyperparameters::default();
    let hyper = Hyperparameters {
        dim: a.dim.unwrap_or(d.dim),
        lambda: a.lambda.unwrap_or(d.lambda),
        learning_rate: a.learning_rate.unwrap_or(d.learning_rate),
        epochs: a.epochs.unwrap_or(d.epochs),
        seed: seed.unwrap_or(d.seed),
        init_scale: a.init_scale.unwrap_or(d.init_scale),
    };
    let (train_set, held) = match a.holdout {
        Some(f) if !(0.0..1.0).contains(&f) => bail!("--holdout must be in [0, 1), got {f}"),
        Some(f) => {
            let (t, h) = corpus.split_holdout(f, hyper.seed);
            (t, Some(h))
        }
        None => (corpus, None),
    };
    let report = train_with_history(&train_set, &hyper)?;
    let prefs = Preferences {
        kb: CommonSenseKb::from_corpus(&train_set),
        factors: report.model.clone(),
    };

    let mut summary = format!(
        "trained on {} ratings: loss {:.6e} -> {:.6e} after {} epochs\n",
        train_set.len(),
        report.initial_loss(),
        report.final_loss(),
        hyper.epochs
    );
    if let Some(h) = &held {
        let _ = writeln!(summary, "held-out RMSE {:.6} on {} ratings", rmse(&report.model, h)?, h.len());
    }
    let model_text = write_model(&prefs)?;
    emit(out, model_text.as_bytes())?;
    // Keep stdout clean for the model when it goes there.
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(0)
}

fn run(a: &RunArgs, seed: Option<u64>, out: Option<&Path>) -> Result<u8> {
    let cfg = EpisodeConfig {
        scenario: a.scenario.clone(),
        preferences: a.model.clone(),
        user: a.user.as_deref().map(UserId::new),
        k: a.k,
        max_ticks: a.max_ticks,
        seed,
    };
    let setup = EpisodeSetup::load(&cfg)?;
    let log = setup.run()?;
    emit(out, log.to_jsonl().as_bytes())?;
    let s = &log.summary;
    eprintln!(
        "{:?}: {} rearranged, {} ticks, {} path cells",
        s.terminal_reason, s.objects_rearranged, s.total_ticks, s.total_path_cells
    );
    Ok(s.terminal_reason.exit_code() as u8)
}

fn check(a: &CheckArgs, out: Option<&Path>) -> Result<u8> {
    let prefs = read_model(&read(&a.model)?).with_context(|| format!("parsing {}", a.model.display()))?;
    let m = &prefs.factors;
    let (user, object, room) = (UserId::new(&a.user), ObjectClass::new(&a.object), RoomId::new(&a.room));
    let receptacle: ReceptacleClass = a.receptacle.parse()?;
    let misplaced = is_misplaced(m, &user, &object, (&room, receptacle), a.k)?;

    let mut text = String::new();
    let _ = writeln!(text, "{}", if misplaced { "MISPLACED" } else { "OK" });
    for (i, r) in top_placements(m, &user, &object, a.k)?.iter().enumerate() {
        let _ = writeln!(text, "{:>3}. {}/{}  {:.4}", i + 1, r.item.room, r.item.receptacle_class, r.score);
    }
    emit(out, text.as_bytes())?;
    Ok(0)
}

fn parse_cell(s: &str, flag: &str) -> Result<Cell> {
    s.parse().map_err(|e: String| anyhow::anyhow!("{flag}: {e}"))
}

fn draw(map: &SemanticMap, path: &[Cell], out: &Path, scale: usize) -> Result<()> {
    let bytes = if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")) {
        map.render_ppm(Some(path), scale)
    } else {
        map.render(Some(path)).into_bytes()
    };
    emit(Some(out), &bytes)
}

fn plan(a: &PlanArgs, out: Option<&Path>) -> Result<u8> {
    let map = load_map(&read(&a.map)?).with_context(|| format!("parsing {}", a.map.display()))?;
    let (from, to) = (parse_cell(&a.from, "--from")?, parse_cell(&a.to, "--to")?);
    let cm = inflate(&map, a.inflate);
    let path = if a.carrot {
        carrot_plan(&cm, from, to)?
    } else {
        plan_point_goal(&cm, from, to)?
    };
    println!("cost {:.4}", path.total_cost);
    println!("cells {}", path.len());
    for c in &path.cells {
        println!("{},{}", c.x, c.y);
    }
    if let Some(o) = out {
        draw(&map, &path.cells, o, 8)?;
    }
    Ok(0)
}

fn render(a: &RenderArgs, seed: Option<u64>, out: Option<&Path>) -> Result<u8> {
    let map_path: PathBuf = match (&a.map, &a.scenario) {
        (Some(m), _) => m.clone(),
        (None, Some(s)) => {
            let sc = parse_scenario(&read(s)?).with_context(|| format!("parsing {}", s.display()))?;
            s.parent().unwrap_or(Path::new(".")).join(sc.map)
        }
        (None, None) => bail!("--log needs --map or --scenario to know which map to draw"),
    };
    let map = load_map(&read(&map_path)?).with_context(|| format!("parsing {}", map_path.display()))?;
    let trajectory = match (&a.log, &a.scenario) {
        (Some(l), _) => EpisodeLog::from_jsonl(&read(l)?)
            .map_err(|e| anyhow::anyhow!("parsing {}: {e}", l.display()))?
            .trajectory(),
        (None, Some(s)) => {
            let cfg = EpisodeConfig {
                scenario: s.clone(),
                seed,
                ..EpisodeConfig::default()
            };
            EpisodeSetup::load(&cfg)?.run()?.trajectory()
        }
        (None, None) => unreachable!("clap requires --scenario or --log"),
    };
    match out {
        Some(o) => draw(&map, &trajectory, o, a.scale)?,
        None => emit(None, map.render(Some(&trajectory)).as_bytes())?,
    }
    Ok(0)
}

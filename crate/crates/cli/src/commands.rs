use std::fs;
use std::io::BufReader;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Context};
use serde_json::json;
use tares_core::feedback::decode_code;
use tares_core::matrix::save_matrix;
use tares_core::{
    best_opener, new_game, play_game, precompute_matrix, rank_guesses, simulate_all, AnswerPrior, GameSetup,
    Policy, ScoreMode, ScoreReport, SimulationReport, SimulationError, Word,
};

use crate::load::{self, sidecar};
use crate::{CliError, CliResult, OpenersArgs, PlayArgs, PolicyArgs, PrecomputeArgs, ServeArgs, SimulateArgs};

fn required_policy(args: &PolicyArgs) -> Result<Policy, CliError> {
    let p = args
        .p
        .ok_or_else(|| CliError::usage(anyhow!("--p is required (a nonzero number, inf or -inf)")))?;
    Ok(Policy::new(p).with_fds(args.fds))
}

fn write_file(path: &std::path::Path, text: &str) -> CliResult {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::runtime)
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn policy_label(policy: &Policy) -> String {
    format!("p={}{}", policy.mode, if policy.use_fds { " fds" } else { "" })
}

pub fn precompute(args: &PrecomputeArgs) -> CliResult {
    let guesses = load::word_list(&args.words, args.length)?;
    let answers = match &args.answers {
        Some(path) => load::word_list(path, args.length)?,
        None => guesses.clone(),
    };
    let start = Instant::now();
    let matrix = precompute_matrix(&guesses, &answers).map_err(CliError::runtime)?;
    let elapsed = start.elapsed().as_secs_f64();
    save_matrix(&matrix, &args.out)
        .with_context(|| format!("writing cache {}", args.out.display()))
        .map_err(CliError::runtime)?;
    write_file(&sidecar(&args.out, "guesses"), &guesses.to_text())?;
    write_file(&sidecar(&args.out, "answers"), &answers.to_text())?;
    println!(
        "rows {} cols {} in {elapsed:.2} s -> {}",
        matrix.rows(),
        matrix.cols(),
        args.out.display()
    );
    Ok(())
}

fn table(title: &str, rows: &[(usize, ScoreReport)]) {
    println!("{title}");
    println!("{:>6}  {:<8} {:>14} {:>9}", "rank", "word", "score", "exp_gy");
    for (rank, r) in rows {
        println!(
            "{:>6}  {:<8} {:>14.6} {:>9.4}",
            rank,
            r.word.as_str().to_uppercase(),
            r.score,
            r.expected_gy
        );
    }
}

pub fn openers(args: &OpenersArgs) -> CliResult {
    let policy = required_policy(&args.policy)?;
    let setup = load::setup(&args.cache)?;
    let mode = load::mode(args.hard, &setup)?;
    let state = new_game(&setup, mode);
    let (top, worst) = if args.worst {
        let all = rank_guesses(&state, &policy, None);
        let n = all.len();
        let worst: Vec<(usize, ScoreReport)> = all
            .iter()
            .enumerate()
            .skip(n.saturating_sub(2))
            .map(|(i, r)| (i + 1, r.clone()))
            .collect();
        let top = all.into_iter().take(args.top).enumerate().map(|(i, r)| (i + 1, r)).collect();
        (top, worst)
    } else {
        let top = rank_guesses(&state, &policy, Some(args.top))
            .into_iter()
            .enumerate()
            .map(|(i, r)| (i + 1, r))
            .collect::<Vec<_>>();
        (top, Vec::new())
    };
    if args.json {
        let entry = |(rank, r): &(usize, ScoreReport)| {
            json!({"rank": rank, "word": r.word, "score": r.score, "expected_gy": r.expected_gy, "in_viable": r.in_viable})
        };
        print_json(&json!({
            "policy": {"p": policy.mode, "fds": policy.use_fds, "mode": mode},
            "top": top.iter().map(entry).collect::<Vec<_>>(),
            "worst": worst.iter().map(entry).collect::<Vec<_>>(),
        }));
        return Ok(());
    }
    table(&format!("top openers, {} ({mode})", policy_label(&policy)), &top);
    if args.worst {
        table("worst openers", &worst);
    }
    Ok(())
}

fn answer_subset(setup: &GameSetup, path: &std::path::Path) -> Result<Vec<usize>, CliError> {
    let list = load::word_list(path, setup.word_length())?;
    list.words()
        .iter()
        .map(|w| {
            setup
                .answers()
                .index_of(w.as_str())
                .ok_or_else(|| CliError::usage(anyhow!("{w} is not in the cache's answer list")))
        })
        .collect()
}

fn simulation_error(e: SimulationError) -> CliError {
    match e {
        SimulationError::UnknownAnswer(_) => CliError::usage(e),
        other => CliError::runtime(other),
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult {
    let policy = required_policy(&args.policy)?;
    let setup = load::setup(&args.cache)?;
    let mode = load::mode(args.hard, &setup)?;
    let policy = match &args.prior {
        Some(path) => {
            let file = fs::File::open(path)
                .with_context(|| format!("opening prior {}", path.display()))
                .map_err(CliError::usage)?;
            let prior = AnswerPrior::load(BufReader::new(file), setup.answers())
                .with_context(|| format!("reading prior {}", path.display()))
                .map_err(CliError::usage)?;
            policy.with_prior(Some(Arc::new(prior)))
        }
        None => policy,
    };
    let subset = args.answers.as_deref().map(|p| answer_subset(&setup, p)).transpose()?;

    let start = Instant::now();
    let opener = best_opener(&setup, &policy, mode).word;
    let summary = simulate_all(&setup, &policy, mode, subset.as_deref()).map_err(simulation_error)?;
    let secs = start.elapsed().as_secs_f64();
    let report = SimulationReport::new(&policy, mode, opener.clone(), &summary, secs);
    let text = serde_json::to_string_pretty(&report).expect("serializable report");
    write_file(&args.report, &text)?;

    if args.json {
        println!("{text}");
    } else {
        println!(
            "{:<14} {:<8} {:>8} {:>6} {:>6} {:>7} {:>9}",
            "policy", "opener", "mean", "R=6.5", "R>=7", "games", "seconds"
        );
        println!(
            "{:<14} {:<8} {:>8.4} {:>6} {:>6} {:>7} {:>9.1}",
            policy_label(&policy),
            opener.as_str().to_uppercase(),
            summary.mean_rounds,
            summary.count_at_6_5,
            summary.count_ge_7,
            summary.games(),
            secs
        );
    }
    Ok(())
}

pub fn play(args: &PlayArgs) -> CliResult {
    let policy = load::policy(&args.policy, ScoreMode::Finite(-0.5));
    let setup = load::setup(&args.cache)?;
    let mode = load::mode(args.hard, &setup)?;
    let answer = Word::parse(&args.answer, setup.word_length()).map_err(CliError::usage)?;
    let col = setup
        .answers()
        .index_of(answer.as_str())
        .ok_or_else(|| CliError::usage(anyhow!("{answer} is not in the cache's answer list")))?;
    let record = play_game(&setup, &answer, &policy, mode).map_err(simulation_error)?;
    let moves: Vec<(String, String)> = record
        .guesses
        .iter()
        .map(|g| {
            let row = setup.guesses().index_of(g.as_str()).expect("guesses come from the guess list");
            let code = setup.matrix().get(row, col);
            (g.to_string(), decode_code(code.0 as u32, setup.word_length()).unwrap().to_string())
        })
        .collect();
    if args.json {
        print_json(&json!({
            "answer": record.answer,
            "moves": moves.iter().map(|(w, c)| json!({"word": w, "code": c})).collect::<Vec<_>>(),
            "rounds": record.rounds,
            "outcome": record.outcome,
        }));
        return Ok(());
    }
    for (i, (w, c)) in moves.iter().enumerate() {
        println!("{:>2}. {} {c}", i + 1, w.to_uppercase());
    }
    println!("{} solved: {} rounds ({:?})", record.answer.as_str().to_uppercase(), record.rounds, record.outcome);
    Ok(())
}

pub fn serve(args: &ServeArgs) -> CliResult {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .try_init();
    let setup = Arc::new(load::setup(&args.cache)?);
    if let Some(dir) = &args.static_dir {
        if !dir.is_dir() {
            return Err(CliError::usage(anyhow!("--static {} is not a directory", dir.display())));
        }
    }
    let config = tares_service::Config {
        static_dir: args.static_dir.clone(),
        ..Default::default()
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(CliError::runtime)?;
    let addr = std::net::SocketAddr::new(args.host, args.port);
    runtime
        .block_on(tares_service::serve(setup, config, addr))
        .with_context(|| format!("serving on {addr}"))
        .map_err(CliError::runtime)
}

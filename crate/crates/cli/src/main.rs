//! `chromasym` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 verification failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chromasym::io::{parse_map_spec_json, partition_json};
use chromasym::{
    apply_distortion, build_partition, check_transitive, load_image, make_demo, map_table_csv,
    parse_config, save_image, transform_image, verify_symmetry, BubbleSpec, ChannelMapSpec, Dims,
    DistortConfig, Error, GroupElement, ImageBuffer, LoadOptions, Partition, PartitionSpec, Perm4,
    RgbPixel, VerifyReport,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "chromasym",
    version,
    about = "Color-symmetric image distortion under D2"
)]
struct Cli {
    /// Worker threads for pixel processing (0 = one per core). Falls back to
    /// CHROMASYM_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a color-symmetric distortion to a PNG.
    Distort {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check that an output is the configured distortion of a source.
    Verify {
        #[arg(short, long)]
        source: PathBuf,
        #[arg(short = 'd', long = "distorted")]
        distorted: PathBuf,
        #[arg(short, long)]
        config: PathBuf,
        /// Per-channel tolerance in 8-bit steps; defaults to the config's.
        #[arg(short, long)]
        tolerance: Option<u8>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Render a flat four-color rectangle with a color symmetry.
    Demo {
        #[arg(long, value_enum, default_value_t = Style::Triangular)]
        style: Style,
        #[arg(long, default_value = "rot")]
        element: GroupElement,
        /// Side length in pixels (even).
        #[arg(long, default_value_t = 512)]
        size: u32,
        /// Images of o, b, y, p under the element, e.g. `boyp` swaps orange and blue.
        #[arg(long)]
        perm: Option<String>,
        /// Seed for the bubble style.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Tabulate a channel map as CSV.
    Maps {
        #[arg(long)]
        family: String,
        /// Comma-separated parameters (modmul, harmonic, poly).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write the partition of a config as a color-coded PNG.
    PartitionDump {
        #[arg(short, long)]
        config: PathBuf,
        /// Take the size from this image.
        #[arg(short, long, conflicts_with = "size")]
        input: Option<PathBuf>,
        /// Size as WIDTHxHEIGHT.
        #[arg(long)]
        size: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Style {
    Triangular,
    Grid,
    Chessboard,
    Bubble,
}

/// What went wrong, mapped onto the exit code.
enum Failure {
    Invalid(String),
    Io(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(msg) = configure_threads(cli.threads) {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let threads = match flag {
        Some(n) => n,
        None => match std::env::var("CHROMASYM_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| format!("CHROMASYM_THREADS must be a number, got `{v}`"))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Distort {
            input,
            config,
            output,
        } => distort(&input, &config, &output),
        Command::Verify {
            source,
            distorted,
            config,
            tolerance,
            json,
        } => verify(&source, &distorted, &config, tolerance, json),
        Command::Demo {
            style,
            element,
            size,
            perm,
            seed,
            output,
        } => demo(style, element, size, perm.as_deref(), seed, &output),
        Command::Maps {
            family,
            params,
            output,
        } => maps(&family, &params, &output),
        Command::PartitionDump {
            config,
            input,
            size,
            output,
        } => partition_dump(&config, input.as_deref(), size.as_deref(), &output),
    }
}

fn read_config(path: &Path) -> Result<DistortConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn read_image(path: &Path) -> Result<ImageBuffer, Failure> {
    let loaded = load_image(path, LoadOptions::default())?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.image)
}

fn write_file(path: &Path, contents: &[u8]) -> CmdResult {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn partition_for(config: &DistortConfig, img: &ImageBuffer) -> Result<Partition, Failure> {
    Ok(build_partition(&config.partition, img.dims()?)?)
}

fn distort(input: &Path, config: &Path, output: &Path) -> CmdResult {
    let config = read_config(config)?;
    let img = read_image(input)?;
    let part = partition_for(&config, &img)?;
    let assignment = config.assignment(&part)?;
    let out = apply_distortion(&img, &part, &assignment)?;
    save_image(&out, output)?;
    println!(
        "distort: {} -> {} ({}x{}, element {}, {} subsections)",
        input.display(),
        output.display(),
        out.width(),
        out.height(),
        config.element,
        part.lambda()
    );
    Ok(())
}

fn verify(
    source: &Path,
    distorted: &Path,
    config: &Path,
    tolerance: Option<u8>,
    as_json: bool,
) -> CmdResult {
    let config = read_config(config)?;
    let src = read_image(source)?;
    let out = read_image(distorted)?;
    let part = partition_for(&config, &src)?;
    let assignment = config.assignment(&part)?;
    let tol = tolerance.unwrap_or(config.tolerance);
    let report = verify_symmetry(&src, &out, &part, &assignment, config.element, tol)?;
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        print_report(&report, tol);
    }
    if report.ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn print_report(report: &VerifyReport, tol: u8) {
    let [r, g, b] = report.max_abs_error;
    println!(
        "verify: {} (element {}, tolerance {tol})",
        if report.ok { "ok" } else { "FAILED" },
        report.element
    );
    println!("pixels checked: {}", report.pixels_checked);
    println!("max abs error: r={r} g={g} b={b}");
    println!("violations: {}", report.violations.len());
    for v in report.violations.iter().take(10) {
        println!(
            "  ({}, {}) {:?}: expected {} got {}",
            v.x, v.y, v.channel, v.expected, v.actual
        );
    }
    if report.violations.len() > 10 {
        println!("  ... {} more", report.violations.len() - 10);
    }
}

const DEMO_NAMES: [char; 4] = ['o', 'b', 'y', 'p'];
const DEMO_PALETTE: [RgbPixel; 4] = [
    RgbPixel::rgb(242, 140, 40),
    RgbPixel::rgb(31, 78, 158),
    RgbPixel::rgb(242, 212, 58),
    RgbPixel::rgb(122, 62, 157),
];

fn default_demo_perm(g: GroupElement) -> Perm4 {
    match g {
        GroupElement::E => Perm4::IDENTITY,
        // orange and blue trade places, yellow and purple stay
        GroupElement::Rot => Perm4([1, 0, 2, 3]),
        GroupElement::RefH => Perm4([0, 1, 3, 2]),
        GroupElement::RefV => Perm4([3, 1, 2, 0]),
    }
}

fn parse_demo_perm(text: &str) -> Result<Perm4, Failure> {
    let chars: Vec<char> = text.to_ascii_lowercase().chars().collect();
    let invalid = || {
        Failure::Invalid(format!(
            "--perm must list the images of o, b, y, p as four letters, got `{text}`"
        ))
    };
    if chars.len() != 4 {
        return Err(invalid());
    }
    let mut map = [0u8; 4];
    for (slot, c) in map.iter_mut().zip(&chars) {
        *slot = DEMO_NAMES.iter().position(|n| n == c).ok_or_else(invalid)? as u8;
    }
    Ok(Perm4::new(map)?)
}

fn hex(p: RgbPixel) -> String {
    format!("#{:02x}{:02x}{:02x}", p.r, p.g, p.b)
}

fn demo(
    style: Style,
    element: GroupElement,
    size: u32,
    perm: Option<&str>,
    seed: u64,
    output: &Path,
) -> CmdResult {
    if size == 0 || !size.is_multiple_of(2) {
        return Err(Failure::Invalid(format!(
            "--size must be even and positive, got {size}"
        )));
    }
    let spec = match style {
        Style::Triangular => PartitionSpec::Triangular { triangles: 2 },
        Style::Grid | Style::Chessboard => PartitionSpec::Grid { rows: 2, cols: 2 },
        Style::Bubble => PartitionSpec::Bubble(BubbleSpec::new(2, seed)),
    };
    let perm = match perm {
        Some(text) => parse_demo_perm(text)?,
        None => default_demo_perm(element),
    };
    let img = make_demo(
        &spec,
        DEMO_PALETTE,
        &[(element, perm)],
        Dims::new(size, size)?,
    )?;
    let realized = check_transitive(&img, &transform_image(&img, element)?)?;

    let name_of = |c: [u8; 3]| {
        DEMO_PALETTE
            .iter()
            .position(|p| p.channels() == c)
            .map(|i| DEMO_NAMES[i].to_string())
            .expect("demo uses only palette colors")
    };
    // two-line form in palette order
    let mut columns: Vec<(String, String)> = realized
        .witness
        .top
        .iter()
        .zip(&realized.witness.bottom)
        .map(|(&a, &b)| (name_of(a), name_of(b)))
        .collect();
    columns.sort_by_key(|(a, _)| DEMO_NAMES.iter().position(|n| n.to_string() == *a));
    let palette: serde_json::Map<String, serde_json::Value> = DEMO_NAMES
        .iter()
        .zip(DEMO_PALETTE)
        .map(|(n, p)| (n.to_string(), json!(hex(p))))
        .collect();
    let sidecar = json!({
        "element": element.name(),
        "partition": partition_json(&spec),
        "size": [size, size],
        "palette": palette,
        "permutation": {
            "top": columns.iter().map(|c| c.0.clone()).collect::<Vec<_>>(),
            "bottom": columns.iter().map(|c| c.1.clone()).collect::<Vec<_>>(),
        },
        "bijective": realized.bijective,
    });

    save_image(&img, output)?;
    let sidecar_path = output.with_extension("json");
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    write_file(&sidecar_path, text.as_bytes())?;
    println!(
        "demo: {} ({}), permutation under {}: {} -> {}",
        output.display(),
        sidecar_path.display(),
        element,
        columns.iter().map(|c| c.0.as_str()).collect::<String>(),
        columns.iter().map(|c| c.1.as_str()).collect::<String>(),
    );
    Ok(())
}

fn maps(family: &str, params: &[f64], output: &Path) -> CmdResult {
    let spec = json!({ "family": family, "params": params }).to_string();
    let map: ChannelMapSpec = parse_map_spec_json(&spec)?;
    write_file(output, map_table_csv(&map).as_bytes())?;
    println!("maps: {} -> {}", map.family(), output.display());
    Ok(())
}

fn parse_size(text: &str) -> Result<Dims, Failure> {
    let invalid = || Failure::Invalid(format!("--size must look like 512x384, got `{text}`"));
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(invalid)?;
    let w = w.trim().parse().map_err(|_| invalid())?;
    let h = h.trim().parse().map_err(|_| invalid())?;
    Ok(Dims::new(w, h)?)
}

fn partition_dump(
    config: &Path,
    input: Option<&Path>,
    size: Option<&str>,
    output: &Path,
) -> CmdResult {
    let config = read_config(config)?;
    let dims = match (input, size) {
        (Some(path), _) => read_image(path)?.dims()?,
        (None, Some(text)) => parse_size(text)?,
        (None, None) => {
            return Err(Failure::Invalid(
                "partition-dump needs --input or --size".into(),
            ))
        }
    };
    let part = build_partition(&config.partition, dims)?;
    save_image(&part.debug_image(), output)?;
    println!(
        "partition-dump: {} ({} subsections) -> {}",
        config.partition.kind(),
        part.lambda(),
        output.display()
    );
    Ok(())
}

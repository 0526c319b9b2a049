use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scatter_tex::bench::{self, BankCache, BenchConfig, FeatureCache, ScatterParams};
use scatter_tex::classifier::{evaluate_splits_multi, FeatureMatrix, SplitSpec};
use scatter_tex::filterbank::{littlewood_paley, FilterBank, FilterBankParams};
use scatter_tex::raster::{save_plane_image, ImagePlane};
use scatter_tex::scattering::{bank_for_image, dump_layers};
use scatter_tex::synth::{write_dataset, SynthSpec};
use scatter_tex::{convert, index_dataset, load_image, planefile, ColorSpace, Error, Result};

#[derive(Parser)]
#[command(name = "scatter-tex", version, about = "Wavelet scattering colour texture benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert an RGB image into a colour space and write its planes as .f32.
    Convert {
        #[arg(long)]
        to: ColorSpace,
        input: PathBuf,
        output: PathBuf,
    },
    /// Build a filter bank and report its Littlewood-Paley extrema.
    Filters {
        #[arg(long = "J", default_value_t = 4)]
        scales: usize,
        #[arg(long = "K", default_value_t = 8)]
        angles: usize,
        #[arg(long, default_value_t = 256)]
        size: usize,
        /// Write per-filter Fourier magnitude images here.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Extract scattering features for every image of a dataset.
    Extract {
        #[arg(long)]
        space: ColorSpace,
        #[arg(long = "J", default_value_t = 4)]
        scales: usize,
        #[arg(long = "K", default_value_t = 8)]
        angles: usize,
        #[arg(long, default_value_t = 1)]
        oversampling: usize,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long)]
        out: PathBuf,
        /// Feature cache directory (also settable with SCATTER_TEX_CACHE).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        dataset_root: PathBuf,
    },
    /// Score a features CSV with the random-split PCA classifier.
    Classify {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        train_per_class: usize,
        #[arg(long, default_value_t = 10)]
        splits: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full colour-space x dimension benchmark from a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a synthetic grating dataset.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        classes: usize,
        #[arg(long, default_value_t = 30)]
        per_class: usize,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plot rows of an accuracy CSV as an SVG line chart.
    Plot {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_delimiter = ',')]
        spaces: Option<Vec<ColorSpace>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump per-order scattering montages of one image channel.
    Layers {
        #[arg(long, default_value = "rgb")]
        space: ColorSpace,
        #[arg(long, default_value_t = 0)]
        channel: usize,
        #[arg(long = "J", default_value_t = 4)]
        scales: usize,
        #[arg(long = "K", default_value_t = 8)]
        angles: usize,
        #[arg(long)]
        out_dir: PathBuf,
        image: PathBuf,
    },
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(d) => std::fs::create_dir_all(d).map_err(|e| Error::Io {
            path: d.to_owned(),
            source: e,
        }),
        None => Ok(()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    create_parent(path)?;
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })
}

/// `|psi_hat|` with the zero frequency moved to the centre.
fn centred(values: &[f64], w: usize, h: usize) -> ImagePlane {
    ImagePlane::from_fn(w, h, |x, y| values[((y + h / 2) % h) * w + (x + w / 2) % w].abs())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convert { to, input, output } => {
            let img = load_image(&input)?;
            let out = convert(&img, to)?;
            create_parent(&output)?;
            planefile::save(&output, out.planes())?;
        }
        Command::Filters {
            scales,
            angles,
            size,
            dump_dir,
        } => {
            let bank = FilterBank::new(FilterBankParams::new(scales, angles, size, size))?;
            let (lo, hi) = littlewood_paley(&bank);
            let report = format!(
                "J={scales} K={angles} grid={size}x{size}\nfilters={} band-pass + 1 low-pass\nlittlewood_paley_min={lo:.6}\nlittlewood_paley_max={hi:.12}\n",
                bank.psi_count()
            );
            print!("{report}");
            if let Some(dir) = dump_dir {
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
                for j in 0..scales {
                    for k in 0..angles {
                        let img = centred(bank.psi_hat(j, k), size, size);
                        save_plane_image(&img, dir.join(format!("psi_j{j}_k{k}.png")))?;
                    }
                }
                save_plane_image(&centred(bank.phi_hat(), size, size), dir.join("phi.png"))?;
                save_plane_image(
                    &centred(&bank.littlewood_paley_map(), size, size),
                    dir.join("littlewood_paley.png"),
                )?;
                write_file(&dir.join("littlewood_paley.txt"), &report)?;
            }
        }
        Command::Extract {
            space,
            scales,
            angles,
            oversampling,
            max_order,
            out,
            cache_dir,
            dataset_root,
        } => {
            let params = ScatterParams {
                scales,
                angles,
                oversampling,
                max_order,
            };
            let index = index_dataset(&dataset_root)?;
            let cache = match (std::env::var_os(bench::CACHE_ENV), cache_dir) {
                (Some(_), c) => FeatureCache::resolve(c, Path::new(".")),
                (None, Some(c)) => FeatureCache::at(c),
                (None, None) => FeatureCache::disabled(),
            };
            let features =
                bench::extract_features(&index, space, &params, &BankCache::new(params), &cache)?;
            create_parent(&out)?;
            let mut w = csv::Writer::from_path(&out).map_err(|e| Error::Parameter(e.to_string()))?;
            let mut header = vec!["path".to_string(), "class".to_string()];
            header.extend((1..=features.dims()).map(|i| format!("v{i}")));
            w.write_record(&header).map_err(|e| Error::Parameter(e.to_string()))?;
            for (i, entry) in index.entries().iter().enumerate() {
                let mut rec = vec![index.relative_path(entry), index.classes()[entry.label].clone()];
                rec.extend(features.column(i).iter().map(|&v| format!("{}", v as f32)));
                w.write_record(&rec).map_err(|e| Error::Parameter(e.to_string()))?;
            }
            w.flush().map_err(|e| Error::Io { path: out.clone(), source: e })?;
        }
        Command::Classify {
            features,
            train_per_class,
            splits,
            dims,
            seed,
            out,
        } => {
            let fm = read_features_csv(&features)?;
            let spec = SplitSpec {
                train_per_class,
                n_splits: splits,
                seed,
            };
            let results = evaluate_splits_multi(&fm, &spec, &dims)?;
            let mut text = String::from("dim,mean_accuracy");
            for s in 1..=splits {
                text.push_str(&format!(",split{s}"));
            }
            text.push('\n');
            for r in &results {
                text.push_str(&format!("{},{:.2}", r.dim, r.mean));
                for v in &r.per_split {
                    text.push_str(&format!(",{v:.2}"));
                }
                text.push('\n');
            }
            match out {
                Some(p) => write_file(&p, &text)?,
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })?,
            }
        }
        Command::Bench { config } => {
            let cfg = BenchConfig::load(&config)?;
            let (_, outputs) = bench::run_and_write(&cfg)?;
            println!("{}", outputs.table_csv.display());
            println!("{}", outputs.splits_csv.display());
            println!("{}", outputs.plot_svg.display());
        }
        Command::Synth {
            out,
            classes,
            per_class,
            size,
            seed,
        } => {
            write_dataset(
                &out,
                &SynthSpec {
                    classes,
                    per_class,
                    size,
                    seed,
                },
            )?;
        }
        Command::Plot { table, spaces, out } => {
            let t = bench::parse_csv(&table)?;
            let rows = spaces.unwrap_or_else(|| {
                let hl: Vec<_> = ColorSpace::PLOT_DEFAULT
                    .into_iter()
                    .filter(|s| t.spaces.contains(s))
                    .collect();
                if hl.is_empty() { t.spaces.clone() } else { hl }
            });
            create_parent(&out)?;
            bench::emit_plot(&t, &rows, &out)?;
        }
        Command::Layers {
            space,
            channel,
            scales,
            angles,
            out_dir,
            image,
        } => {
            let img = convert(&load_image(&image)?, space)?;
            let plane = img.planes().get(channel).ok_or_else(|| {
                Error::Parameter(format!("{space} has no channel {channel}"))
            })?;
            let bank = bank_for_image(plane.width(), plane.height(), scales, angles)?;
            dump_layers(plane, &bank, &out_dir)?;
        }
    }
    Ok(())
}

/// Reads `path,class,v1,...,vN` rows; classes are indexed in sorted order.
fn read_features_csv(path: &Path) -> Result<FeatureMatrix> {
    let err = |e: &dyn std::fmt::Display| Error::Parameter(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| err(&e))?;
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(&e))?;
        names.push(rec.get(1).ok_or_else(|| err(&"missing class column"))?.to_owned());
        let values = rec
            .iter()
            .skip(2)
            .map(|v| v.parse::<f32>().map(f64::from))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| err(&e))?;
        columns.push(values);
    }
    let mut classes = names.clone();
    classes.sort();
    classes.dedup();
    let labels = names
        .iter()
        .map(|n| classes.binary_search(n).unwrap())
        .collect();
    FeatureMatrix::new(columns, labels, classes)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::FAILURE
        }
    }
}

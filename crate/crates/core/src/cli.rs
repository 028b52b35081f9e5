//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::berlab::{analytic_ber_ook_coherent, ber_sweep, OokParams};
use crate::config::ToolConfig;
use crate::devicemodels::{
    divider_power, lna_operating_point, mixer_drive_power, mixer_noise_figure, size_for_zin, switch_resistance,
    DividerArch, LnaDesign, LnaMode, MixerDesign,
};
use crate::error::{Error, Result};
use crate::explorer::{
    energy_per_bit_curve, evaluate_design, optimize_min_power, pareto_front, power_breakdown_report, sweep,
    DesignMetrics, DesignPoint, Optimum, Preset, SweepRow, Targets,
};
use crate::linkbudget::{fspl, required_sensitivity, required_snr_ook, sensitivity, snr_from_ebn0, Detector, LinkParams};
use crate::npathsim::{
    locate_corner, measure_conversion, simulate_npath, simulated_noise_figure_with, spectrum, Input, NfSettings,
    NpathRunResult,
};
use crate::output::{Cell, Format, Provenance, Table};

#[derive(Debug, Parser)]
#[command(name = "medrx", version, about = "Low-power MedRadio OOK receiver front-end models")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config file (falls back to $MEDRX_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Path loss, required sensitivity and receiver sensitivity.
    LinkBudget(LinkArgs),
    /// LNA operating points and sizing sweeps.
    Lna(LnaArgs),
    /// Mixer noise figure, drive power and divider power tables.
    Mixer(MixerArgs),
    /// Waveform-level N-path mixer simulation.
    NpathSim(NpathArgs),
    /// Monte Carlo BER sweep.
    Ber(BerArgs),
    /// Design-space sweeps, Pareto fronts, optimization and power breakdown.
    Explore(ExploreArgs),
    /// Comparison row for a preset operating point.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct LinkArgs {
    /// Carrier frequency, Hz.
    #[arg(long, allow_negative_numbers = true)]
    freq: Option<f64>,
    /// Distance, m.
    #[arg(long, allow_negative_numbers = true)]
    dist: Option<f64>,
    /// EIRP, dBm.
    #[arg(long, allow_negative_numbers = true)]
    eirp: Option<f64>,
    /// Data bandwidth, Hz.
    #[arg(long, allow_negative_numbers = true)]
    bw: Option<f64>,
    /// Data rate, bit/s.
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    ber: Option<f64>,
    #[arg(long)]
    detector: Option<Detector>,
    /// Receiver noise figure, dB; enables the sensitivity columns.
    #[arg(long, allow_negative_numbers = true)]
    nf: Option<f64>,
    /// Extra loss budget beyond free space, dB.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    extra_loss: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LnaPreset {
    Fig3,
    Fig4,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Rf,
    Baseband,
}

#[derive(Debug, Args)]
struct LnaArgs {
    #[arg(long, value_enum)]
    preset: Option<LnaPreset>,
    #[arg(long, allow_negative_numbers = true)]
    bias: Option<f64>,
    /// Input impedance target, ohm.
    #[arg(long, allow_negative_numbers = true)]
    zin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    width_p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    width_n: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, allow_negative_numbers = true)]
    load_cap: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MixerPreset {
    Eq4,
    Fig7,
    Fig8,
}

#[derive(Debug, Args)]
struct MixerArgs {
    #[arg(long, value_enum, default_value = "eq4")]
    preset: MixerPreset,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NpathMode {
    Tone,
    Nf,
    Corner,
}

#[derive(Debug, Args)]
struct NpathArgs {
    #[arg(long, value_enum, default_value = "tone")]
    mode: NpathMode,
    /// RF offset from the LO, Hz.
    #[arg(long, default_value_t = 100e3, allow_negative_numbers = true)]
    offset: f64,
    /// Tone amplitude, V.
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    amplitude: f64,
    /// Simulated time, s; chosen automatically when absent.
    #[arg(long, allow_negative_numbers = true)]
    duration: Option<f64>,
    /// Sample rate in multiples of the LO frequency.
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    samples_per_lo: f64,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    duty: Option<f64>,
    /// Switch resistance, ohm (sets the unit resistance for the configured width).
    #[arg(long, allow_negative_numbers = true)]
    rsw: Option<f64>,
    /// Source resistance, ohm.
    #[arg(long, allow_negative_numbers = true)]
    rs: Option<f64>,
    /// Baseband capacitor, F.
    #[arg(long, allow_negative_numbers = true)]
    cap: Option<f64>,
    /// Also dump the waveform CSV here (tone mode).
    #[arg(long)]
    waveform: Option<PathBuf>,
    /// Noise samples to average (nf mode).
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Debug, Args)]
struct BerArgs {
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    snr_start: f64,
    #[arg(long, default_value_t = 14.0, allow_negative_numbers = true)]
    snr_stop: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    snr_step: f64,
    #[arg(long, default_value_t = 100_000)]
    bits: usize,
    #[arg(long)]
    detector: Option<Detector>,
    #[arg(long)]
    samples_per_bit: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExplorePreset {
    Fig11,
    Fig12,
    Fig13,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExploreMode {
    Sweep,
    Pareto,
    Optimize,
    Curve,
    Breakdown,
}

#[derive(Debug, Args)]
struct ExploreArgs {
    #[arg(long, value_enum)]
    preset: Option<ExplorePreset>,
    #[arg(long, value_enum, default_value = "optimize")]
    mode: ExploreMode,
    /// Sensitivity target, dBm.
    #[arg(long, default_value_t = -83.0, allow_negative_numbers = true)]
    target: f64,
    /// Data rate, bit/s.
    #[arg(long, default_value_t = 300e3, allow_negative_numbers = true)]
    rate: f64,
    /// Comma-separated rates for the energy curve.
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportPreset {
    MedradioCompliant,
    HighRate,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long, value_enum, default_value = "medradio-compliant")]
    preset: ReportPreset,
}

struct Ctx {
    cfg: ToolConfig,
    seed: u64,
    hash: String,
    format: Format,
}

impl Ctx {
    fn prov(&self, schema: &str) -> Provenance {
        Provenance::new(&self.hash, self.seed, schema)
    }

    fn render(&self, table: &Table, prov: &Provenance) -> Result<String> {
        table.render(self.format, prov, &self.cfg)
    }
}

/// Parse `argv` (including the program name), run, and return the exit code:
/// 0 success, 1 domain or validation error, 2 usage error.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = ToolConfig::resolve(cli.common.config.as_deref())?;
    let seed = cli.common.seed.unwrap_or(cfg.seed);
    let ctx = Ctx { hash: cfg.hash(), cfg, seed, format: cli.common.format };
    let text = match cli.command {
        Command::LinkBudget(a) => link_budget(&ctx, a)?,
        Command::Lna(a) => lna(&ctx, a)?,
        Command::Mixer(a) => mixer(&ctx, a)?,
        Command::NpathSim(a) => npath(&ctx, a)?,
        Command::Ber(a) => ber(&ctx, a)?,
        Command::Explore(a) => explore(&ctx, a)?,
        Command::Report(a) => report(&ctx, a)?,
    };
    emit(cli.common.out.as_deref(), &text)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn link_budget(ctx: &Ctx, a: LinkArgs) -> Result<String> {
    let d = ctx.cfg.defaults.link;
    let link = LinkParams {
        carrier_freq: a.freq.unwrap_or(d.carrier_freq),
        distance: a.dist.unwrap_or(d.distance),
        eirp: a.eirp.unwrap_or(d.eirp),
        channel_bw: a.bw.unwrap_or(d.channel_bw),
        data_rate: a.rate.unwrap_or(d.data_rate),
        ber_target: a.ber.unwrap_or(d.ber_target),
        detector: a.detector.unwrap_or(d.detector),
    };
    link.validate()?;
    let loss = fspl(link.carrier_freq, link.distance)?;
    let required = required_sensitivity(&link, a.extra_loss)?;
    let ebn0 = required_snr_ook(link.ber_target, link.detector)?;
    let snr_o = snr_from_ebn0(ebn0, link.data_rate, link.channel_bw)?;
    let (sens, margin) = match a.nf {
        Some(nf) => {
            let r = sensitivity(link.channel_bw, snr_o, nf)?.with_link(&link, a.extra_loss)?;
            (Some(r.sensitivity), r.margin_vs_link)
        }
        None => (None, None),
    };
    let mut t = Table::new(&[
        "carrier_freq", "distance", "eirp_dbm", "fspl_db", "extra_loss_db", "required_sensitivity_dbm",
        "ber_target", "detector", "required_ebn0_db", "data_rate", "bandwidth", "snr_out_db", "nf_db",
        "sensitivity_dbm", "margin_db",
    ]);
    t.push(vec![
        link.carrier_freq.into(), link.distance.into(), link.eirp.into(), loss.into(), a.extra_loss.into(),
        required.into(), link.ber_target.into(), link.detector.as_str().into(), ebn0.into(), link.data_rate.into(),
        link.channel_bw.into(), snr_o.into(), a.nf.into(), sens.into(), margin.into(),
    ]);
    ctx.render(&t, &ctx.prov("link-budget/1"))
}

const LNA_COLUMNS: [&str; 13] = [
    "gate_bias", "zin_target", "width_p", "width_n", "mode", "rf", "zin", "power", "bandwidth", "gain_db", "nf_db",
    "warnings", "error",
];

fn lna_row(t: &mut Table, design: std::result::Result<LnaDesign, (f64, Option<f64>, Error)>, ctx: &Ctx) {
    let cal = &ctx.cfg.calibration;
    let mode = |m: LnaMode| match m {
        LnaMode::Rf => "rf",
        LnaMode::BasebandDifferential => "baseband",
    };
    match design.map(|d| (d, lna_operating_point(&d, cal))) {
        Ok((d, Ok(r))) => t.push(vec![
            d.gate_bias.into(), d.zin_target.into(), d.width_p.into(), d.width_n.into(), mode(d.mode).into(),
            r.rf_used.into(), r.zin.into(), r.power.into(), r.bandwidth.into(), r.flat_band_gain.into(), r.nf.into(),
            r.warnings.join("; ").into(), Cell::Empty,
        ]),
        Ok((d, Err(e))) => t.push(vec![
            d.gate_bias.into(), d.zin_target.into(), d.width_p.into(), d.width_n.into(), mode(d.mode).into(),
            Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty,
            e.to_string().into(),
        ]),
        Err((bias, zin, e)) => {
            let mut row = vec![bias.into(), zin.into()];
            row.extend((0..10).map(|_| Cell::Empty));
            row.push(e.to_string().into());
            t.push(row)
        }
    }
}

fn lna(ctx: &Ctx, a: LnaArgs) -> Result<String> {
    let cal = &ctx.cfg.calibration;
    let mut t = Table::new(&LNA_COLUMNS);
    let base = ctx.cfg.defaults.lna;
    let schema;
    match a.preset {
        Some(LnaPreset::Fig3) => {
            schema = "lna-fig3/1";
            let template = LnaDesign { mode: LnaMode::Rf, load_cap: 200e-15, ..base };
            for bias in cal.transistor.biases() {
                for zin in [50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0] {
                    let d = size_for_zin(zin, bias, &template, cal).map_err(|e| (bias, Some(zin), e));
                    lna_row(&mut t, d, ctx);
                }
            }
        }
        Some(LnaPreset::Fig4) => {
            schema = "lna-fig4/1";
            let widths = [1e-6, 2e-6, 4e-6, 8e-6, 16e-6, 32e-6, 64e-6];
            for bias in cal.transistor.biases() {
                for w in widths {
                    let d = LnaDesign { gate_bias: bias, mode: LnaMode::BasebandDifferential, ..base.with_total_width(w) };
                    lna_row(&mut t, Ok(d), ctx);
                }
            }
        }
        None => {
            schema = "lna/1";
            let mut d = base;
            if let Some(b) = a.bias {
                d.gate_bias = b;
            }
            if let Some(w) = a.width_p {
                d.width_p = w;
            }
            if let Some(w) = a.width_n {
                d.width_n = w;
            }
            if let Some(c) = a.load_cap {
                d.load_cap = c;
            }
            if let Some(m) = a.mode {
                d.mode = match m {
                    ModeArg::Rf => LnaMode::Rf,
                    ModeArg::Baseband => LnaMode::BasebandDifferential,
                };
            }
            if a.zin.is_some() {
                d.zin_target = a.zin;
            }
            // a single point is an explicit request, so surface its error
            lna_operating_point(&d, cal)?;
            lna_row(&mut t, Ok(d), ctx);
        }
    }
    ctx.render(&t, &ctx.prov(schema))
}

fn mixer(ctx: &Ctx, a: MixerArgs) -> Result<String> {
    let cal = &ctx.cfg.calibration;
    let base = ctx.cfg.defaults.mixer;
    let (t, schema) = match a.preset {
        MixerPreset::Eq4 => {
            let mut t = Table::new(&["rsw", "rs", "nf_db"]);
            for rs in [50.0, 100.0, 200.0, 500.0, 1000.0] {
                for rsw in [0.0, 1.0, 2.0, 5.0, 10.0, 20.0] {
                    t.push(vec![rsw.into(), rs.into(), mixer_noise_figure(rsw, rs)?.into()]);
                }
            }
            (t, "mixer-eq4/1")
        }
        MixerPreset::Fig7 => {
            let mut t = Table::new(&["freq", "arch", "divider_power"]);
            for arch in [DividerArch::FlipFlop, DividerArch::Circular] {
                let model = cal.divider.model(arch, base.supply);
                for i in 1..=10 {
                    let f = i as f64 * 100e6;
                    t.push(vec![f.into(), arch.as_str().into(), divider_power(&model, f)?.into()]);
                }
            }
            (t, "mixer-fig7/1")
        }
        MixerPreset::Fig8 => {
            let mut t = Table::new(&["rs", "switch_width", "rsw", "drive_power", "nf_db"]);
            for rs in [50.0, 500.0] {
                for w in [1e-6, 2e-6, 5e-6, 10e-6, 20e-6, 50e-6, 100e-6, 200e-6] {
                    let m = MixerDesign { switch_width: w, source_impedance: rs, ..base };
                    let rsw = switch_resistance(w, m.rsw_unit)?;
                    let nf = mixer_noise_figure(rsw, rs).ok();
                    t.push(vec![
                        rs.into(), w.into(), rsw.into(), mixer_drive_power(&m, cal, m.lo_freq)?.into(), nf.into(),
                    ]);
                }
            }
            (t, "mixer-fig8/1")
        }
    };
    ctx.render(&t, &ctx.prov(schema))
}

fn npath_mixer(ctx: &Ctx, a: &NpathArgs) -> Result<MixerDesign> {
    let mut m = ctx.cfg.defaults.mixer;
    if let Some(n) = a.paths {
        m.n_paths = n;
    }
    if let Some(d) = a.duty {
        m.duty = d;
    }
    if let Some(rs) = a.rs {
        m.source_impedance = rs;
    }
    if let Some(rsw) = a.rsw {
        m.rsw_unit = rsw * m.switch_width;
    }
    if let Some(c) = a.cap {
        m.baseband_cap = c;
    }
    m.validate()?;
    Ok(m)
}

pub fn waveform_table(r: &NpathRunResult) -> Table {
    let n = r.per_path_cap_voltages.len();
    let mut cols = vec!["t".to_string()];
    cols.extend((0..n).map(|i| format!("phase{i}")));
    cols.extend((0..n).map(|i| format!("cap{i}")));
    cols.push("bb".to_string());
    let mut t = Table::new(&cols);
    for k in 0..r.time_axis.len() {
        let mut row: Vec<Cell> = vec![r.time_axis[k].into()];
        row.extend(r.phases.iter().map(|p| Cell::Int(p[k] as u64)));
        row.extend(r.per_path_cap_voltages.iter().map(|c| Cell::Num(c[k])));
        row.push(r.combined_baseband[k].into());
        t.push(row);
    }
    t
}

fn npath(ctx: &Ctx, a: NpathArgs) -> Result<String> {
    let m = npath_mixer(ctx, &a)?;
    let limit = ctx.cfg.limits.max_sim_samples;
    let rsw = m.switch_resistance()?;
    match a.mode {
        NpathMode::Tone => {
            let fs = a.samples_per_lo * m.lo_freq;
            let f_rf = m.lo_freq + a.offset;
            let settle = crate::npathsim::settle_samples(&m, fs)? as f64 / fs;
            let duration = a.duration.unwrap_or(settle + 16.0 / a.offset.abs().max(1.0)).max(64.0 / m.lo_freq);
            let samples = (duration * fs).round();
            if samples > limit as f64 {
                return Err(Error::domain("duration", format!("{samples} samples exceeds limits.max_sim_samples {limit}")));
            }
            let r = simulate_npath(&m, &Input::tone(f_rf, a.amplitude), duration, fs, ctx.seed)?;
            let c = measure_conversion(&r, f_rf, m.lo_freq)?;
            if let Some(path) = &a.waveform {
                let prov = ctx.prov("npath-waveform/1");
                emit(Some(path), &waveform_table(&r).to_csv(&prov)?)?;
            }
            let mut t = Table::new(&[
                "n_paths", "duty", "rs", "rsw", "baseband_cap", "lo_freq", "rf_freq", "sample_rate", "samples",
                "if_freq", "gain_db", "image_rejection_db",
            ]);
            t.push(vec![
                m.n_paths.into(), m.duty.into(), m.source_impedance.into(), rsw.into(), m.baseband_cap.into(),
                m.lo_freq.into(), f_rf.into(), fs.into(), r.time_axis.len().into(), c.if_freq.into(), c.gain.into(),
                c.image_rejection.into(),
            ]);
            ctx.render(&t, &ctx.prov("npath-tone/1").note("window", spectrum::WINDOW_NAME))
        }
        NpathMode::Nf => {
            let settings = NfSettings {
                budget_samples: a.budget.unwrap_or(ctx.cfg.npathsim.budget_samples),
                samples_per_lo: a.samples_per_lo.max(ctx.cfg.npathsim.samples_per_lo),
                ..ctx.cfg.npathsim
            };
            if settings.budget_samples > limit {
                return Err(Error::domain("budget", format!("exceeds limits.max_sim_samples {limit}")));
            }
            let r = simulated_noise_figure_with(&m, &settings, ctx.seed)?;
            let mut t = Table::new(&[
                "n_paths", "duty", "rs", "rsw", "baseband_cap", "corner_estimate", "segments", "gain_db",
                "output_psd", "nf_sim_db", "nf_eq4_db",
            ]);
            t.push(vec![
                m.n_paths.into(), m.duty.into(), m.source_impedance.into(), rsw.into(), m.baseband_cap.into(),
                r.corner_estimate.into(), r.segments.into(), r.gain.into(), r.output_psd.into(), r.nf.into(),
                mixer_noise_figure(rsw, m.source_impedance)?.into(),
            ]);
            ctx.render(&t, &ctx.prov("npath-nf/1").note("psd", "welch-hann"))
        }
        NpathMode::Corner => {
            let fs = a.samples_per_lo * m.lo_freq;
            let fc = locate_corner(&m, fs)?;
            let mut t = Table::new(&["n_paths", "duty", "rs", "rsw", "baseband_cap", "corner_sim", "corner_estimate"]);
            t.push(vec![
                m.n_paths.into(), m.duty.into(), m.source_impedance.into(), rsw.into(), m.baseband_cap.into(),
                fc.into(), m.corner_freq()?.into(),
            ]);
            ctx.render(&t, &ctx.prov("npath-corner/1").note("window", spectrum::WINDOW_NAME))
        }
    }
}

fn ber(ctx: &Ctx, a: BerArgs) -> Result<String> {
    if !(a.snr_step > 0.0) || !(a.snr_stop >= a.snr_start) {
        return Err(Error::domain("snr_step", "need snr_step > 0 and snr_stop >= snr_start"));
    }
    let count = ((a.snr_stop - a.snr_start) / a.snr_step + 1e-9).floor() as usize + 1;
    let snrs: Vec<f64> = (0..count).map(|i| a.snr_start + i as f64 * a.snr_step).collect();
    let mut params: OokParams = ctx.cfg.defaults.ook;
    if let Some(d) = a.detector {
        params.detector = d;
    }
    if let Some(s) = a.samples_per_bit {
        params.samples_per_bit = s;
    }
    let results = ber_sweep(&snrs, a.bits, &params, ctx.seed)?;
    let mut t = Table::new(&["snr_db", "bits", "errors", "ber", "ci_low", "ci_high", "detector", "seed"]);
    for r in &results {
        t.push(vec![
            r.snr.into(), r.bits_sent.into(), r.bit_errors.into(), r.ber_point.into(), r.ci_low.into(),
            r.ci_high.into(), r.detector.as_str().into(), r.seed.into(),
        ]);
    }
    let prov = ctx
        .prov("ber-sweep/1")
        .note("analytic_coherent_at_start", analytic_ber_ook_coherent(a.snr_start));
    ctx.render(&t, &prov)
}

const METRIC_COLUMNS: [&str; 11] = [
    "total_power", "lna_power", "divider_power", "mixer_drive_power", "system_nf", "sensitivity", "energy_per_bit",
    "lna_bandwidth", "source_resistance", "feasible", "error",
];

fn metric_cells(m: &Result<DesignMetrics>) -> Vec<Cell> {
    match m {
        Ok(m) => vec![
            m.total_power.into(), m.breakdown.lna.into(), m.breakdown.divider_nlo.into(),
            m.breakdown.mixer_drive.into(), m.system_nf.into(), m.sensitivity.into(), m.energy_per_bit.into(),
            m.lna_bandwidth.into(), m.source_resistance.into(), m.feasible.into(), m.reason.clone().into(),
        ],
        Err(e) => {
            let mut v: Vec<Cell> = (0..9).map(|_| Cell::Empty).collect();
            v.push(false.into());
            v.push(e.to_string().into());
            v
        }
    }
}

fn sweep_table(rows: &[SweepRow], axes: &[String]) -> Table {
    let mut cols: Vec<String> = axes.to_vec();
    cols.extend(METRIC_COLUMNS.iter().map(|s| s.to_string()));
    let mut t = Table::new(&cols);
    for r in rows {
        let mut row: Vec<Cell> = r.coordinates.iter().map(|&v| Cell::Num(v)).collect();
        row.extend(metric_cells(&r.metrics));
        t.push(row);
    }
    t
}

fn point_cells(p: &DesignPoint) -> Vec<Cell> {
    vec![
        p.data_rate.into(), p.lna.gate_bias.into(), p.lna.total_width().into(), p.mixer.switch_width.into(),
    ]
}

const POINT_COLUMNS: [&str; 4] = ["data_rate", "gate_bias", "lna_width_total", "switch_width"];

fn optimum_table(opt: &Optimum, target: f64) -> Table {
    let mut cols = vec!["status", "target_sensitivity"];
    cols.extend(POINT_COLUMNS);
    cols.extend(METRIC_COLUMNS);
    let mut t = Table::new(&cols);
    let (status, pm) = match opt {
        Optimum::Feasible { point, metrics } => ("feasible", Some((point, metrics))),
        Optimum::Infeasible { closest, .. } => ("infeasible", closest.as_ref().map(|(p, m)| (p, m))),
    };
    let mut row: Vec<Cell> = vec![status.into(), target.into()];
    match pm {
        Some((p, m)) => {
            row.extend(point_cells(p));
            row.extend(metric_cells(&Ok(m.clone())));
        }
        None => row.extend((0..POINT_COLUMNS.len() + METRIC_COLUMNS.len()).map(|_| Cell::Empty)),
    }
    t.push(row);
    t
}

const FIG12_RATES: [f64; 7] = [10e3, 30e3, 100e3, 300e3, 1e6, 3e6, 10e6];

fn explore(ctx: &Ctx, a: ExploreArgs) -> Result<String> {
    let settings = ctx.cfg.explorer_settings();
    let mut space = ctx.cfg.space();
    space.fixed.data_rate = a.rate;
    let mode = match a.preset {
        Some(ExplorePreset::Fig11) => {
            // LNA-only grid; each design is scored at the widest rate its bandwidth carries
            let grid = crate::explorer::SweepSpec {
                axes: space.axes.iter().filter(|x| x.path.starts_with("lna.")).cloned().collect(),
                ..space.clone()
            };
            let rows = sweep(&grid, &settings)?;
            let mut cols: Vec<String> = grid.axes.iter().map(|x| x.path.clone()).collect();
            cols.extend(["data_rate", "lna_bandwidth", "sensitivity", "total_power", "lna_power", "system_nf", "error"].map(String::from));
            let mut t = Table::new(&cols);
            for r in rows {
                let mut row: Vec<Cell> = r.coordinates.iter().map(|&v| Cell::Num(v)).collect();
                let scored = r.metrics.and_then(|m| {
                    let p = DesignPoint { data_rate: m.lna_bandwidth, ..r.point };
                    evaluate_design(&p, &settings).map(|m2| (p.data_rate, m2))
                });
                match scored {
                    Ok((rate, m)) => row.extend([
                        rate.into(), m.lna_bandwidth.into(), m.sensitivity.into(), m.total_power.into(),
                        m.breakdown.lna.into(), m.system_nf.into(), Cell::Empty,
                    ]),
                    Err(e) => {
                        row.extend((0..6).map(|_| Cell::Empty));
                        row.push(e.to_string().into());
                    }
                }
                t.push(row);
            }
            return ctx.render(&t, &ctx.prov("explore-fig11/1"));
        }
        Some(ExplorePreset::Fig12) => ExploreMode::Curve,
        Some(ExplorePreset::Fig13) => ExploreMode::Breakdown,
        None => a.mode,
    };
    match mode {
        ExploreMode::Sweep => {
            let rows = sweep(&space, &settings)?;
            let axes: Vec<String> = space.axes.iter().map(|x| x.path.clone()).collect();
            ctx.render(&sweep_table(&rows, &axes), &ctx.prov("explore-sweep/1"))
        }
        ExploreMode::Pareto => {
            let rows = sweep(&space, &settings)?;
            let ok: Vec<SweepRow> = rows.into_iter().filter(|r| matches!(&r.metrics, Ok(m) if m.feasible)).collect();
            if ok.is_empty() {
                return Err(Error::domain("axes", "no feasible point to rank"));
            }
            let metrics: Vec<DesignMetrics> = ok.iter().map(|r| r.metrics.clone().unwrap()).collect();
            let front = pareto_front(&metrics, &space.objectives)?;
            let picked: Vec<SweepRow> = front.into_iter().map(|i| ok[i].clone()).collect();
            let axes: Vec<String> = space.axes.iter().map(|x| x.path.clone()).collect();
            ctx.render(&sweep_table(&picked, &axes), &ctx.prov("explore-pareto/1"))
        }
        ExploreMode::Optimize => {
            let opt = optimize_min_power(Targets { sensitivity: a.target, data_rate: a.rate }, &space, &settings)?;
            ctx.render(&optimum_table(&opt, a.target), &ctx.prov("explore-optimize/1"))
        }
        ExploreMode::Curve => {
            let rates = a.rates.unwrap_or_else(|| FIG12_RATES.to_vec());
            let curve = energy_per_bit_curve(&rates, &space, &settings)?;
            let mut cols = vec!["rate", "status", "target_sensitivity"];
            cols.extend(POINT_COLUMNS);
            cols.extend(METRIC_COLUMNS);
            let mut t = Table::new(&cols);
            for c in &curve {
                let one = optimum_table(&c.optimum, c.target);
                let mut row = vec![Cell::Num(c.rate)];
                row.extend(one.rows.into_iter().next().unwrap());
                t.push(row);
            }
            ctx.render(&t, &ctx.prov("explore-curve/1").note("nf_budget_db", settings.nf_budget))
        }
        ExploreMode::Breakdown => {
            let targets = if a.preset.is_some() { Preset::MedradioCompliant.targets() } else { Targets { sensitivity: a.target, data_rate: a.rate } };
            let opt = optimize_min_power(targets, &space, &settings)?;
            let Some((point, _)) = opt.feasible() else {
                return Err(Error::domain("target", "no design meets the target; nothing to break down"));
            };
            let r = power_breakdown_report(point, &settings)?;
            let mut t = Table::new(&["block", "power", "fraction"]);
            for ((name, p), (_, f)) in r.power.entries().into_iter().zip(r.fractions.entries()) {
                t.push(vec![name.into(), p.into(), f.into()]);
            }
            t.push(vec!["total".into(), r.total.into(), 1.0.into()]);
            ctx.render(&t, &ctx.prov("explore-breakdown/1"))
        }
    }
}

fn report(ctx: &Ctx, a: ReportArgs) -> Result<String> {
    let preset = match a.preset {
        ReportPreset::MedradioCompliant => Preset::MedradioCompliant,
        ReportPreset::HighRate => Preset::HighRate,
    };
    let settings = ctx.cfg.explorer_settings();
    let targets = preset.targets();
    let opt = optimize_min_power(targets, &ctx.cfg.space(), &settings)?;
    let mut t = Table::new(&[
        "preset", "status", "carrier_freq", "data_rate", "target_sensitivity", "sensitivity", "system_nf",
        "total_power", "energy_per_bit", "lna_power", "divider_power", "mixer_drive_power",
    ]);
    let link = ctx.cfg.defaults.link;
    let row = match &opt {
        Optimum::Feasible { metrics: m, .. } => vec![
            preset.as_str().into(), "feasible".into(), link.carrier_freq.into(), targets.data_rate.into(),
            targets.sensitivity.into(), m.sensitivity.into(), m.system_nf.into(), m.total_power.into(),
            m.energy_per_bit.into(), m.breakdown.lna.into(), m.breakdown.divider_nlo.into(),
            m.breakdown.mixer_drive.into(),
        ],
        Optimum::Infeasible { .. } => {
            let mut v: Vec<Cell> = vec![
                preset.as_str().into(), "infeasible".into(), link.carrier_freq.into(), targets.data_rate.into(),
                targets.sensitivity.into(),
            ];
            v.extend((0..7).map(|_| Cell::Empty));
            v
        }
    };
    t.push(row);
    ctx.render(&t, &ctx.prov("report/1"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_command(["medrx", "frobnicate"]), 2);
        assert_eq!(run_command(["medrx"]), 2);
        assert_eq!(run_command(["medrx", "--help"]), 0);
    }

    #[test]
    fn domain_errors_exit_1() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        let o = out.to_str().unwrap();
        assert_eq!(run_command(["medrx", "link-budget", "--dist", "-3", "--out", o]), 1);
        assert_eq!(run_command(["medrx", "link-budget", "--dist", "3", "--out", o]), 0);
    }
}

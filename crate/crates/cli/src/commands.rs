use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use greenkern::interp::{fit_with_jitter, Model};
use greenkern::kernels::Family;
use greenkern::spectral::default_grid;
use greenkern::validate::{run_check, CheckName};
use greenkern::{
    check_admissible, symbol_norm, synthesize_green, DataSet, GridSpec, Interpolant,
    Kernel, KernelSpec, Verdict, VectorOperator,
};

use crate::exit::{code, CliError, CliResult, Context};
use crate::inputs::{json_arg, json_value, require_file};
use crate::table;

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::new(code::IO, format!("{}: {e}", path.display())))
}

fn load_kernel(spec: Option<&str>, file: Option<&Path>) -> CliResult<(Kernel, KernelSpec)> {
    let spec: KernelSpec = match (spec, file) {
        (Some(s), _) => json_arg(s, "kernel spec")?,
        (None, Some(f)) => KernelSpec {
            family: Family::Grid,
            sigma: None,
            n: None,
            dim: None,
            file: Some(f.to_path_buf()),
        },
        (None, None) => return Err(CliError::usage("give --kernel or --kernel-file")),
    };
    if let Some(f) = &spec.file {
        require_file(f)?;
    }
    let kernel = spec.build().context("kernel spec")?;
    Ok((kernel, spec))
}

pub fn green(
    operator: &str,
    extent: Option<f64>,
    points: Option<usize>,
    out: Option<&Path>,
) -> CliResult<i32> {
    let vp: VectorOperator = json_arg(operator, "operator")?;
    let sn = symbol_norm(&vp);
    let report = check_admissible(&sn);
    println!("dim: {}", sn.dim());
    println!("symbol degree: {}", sn.degree());
    println!("verdict: {report}");
    if let Verdict::Inadmissible(reason) = &report.verdict {
        return Err(CliError::new(code::INADMISSIBLE, format!("inadmissible operator: {reason}")));
    }

    let mut grid = default_grid(&sn).context("default grid")?;
    if let Some(r) = extent {
        grid.extent = r;
    }
    if let Some(m) = points {
        grid.points = m;
    }
    let grid = GridSpec::new(grid.dim, grid.extent, grid.points)
        .map_err(|e| CliError::new(code::GRID_FAILURE, e.to_string()))?;
    let gk = synthesize_green(&sn, &grid).context("synthesis")?;
    println!("grid: R={} M={} h={:e}", grid.extent, grid.points, grid.spacing());
    println!("G(0): {:.12e}", gk.value_at_origin());
    println!("imaginary residue: {:e}", gk.imag_residue());
    if gk.coarse_warning() {
        eprintln!(
            "warning: Ĝ at the Nyquist frequency exceeds 1e-6·Ĝ(0); aliasing is modelled but a finer grid (--points) is safer"
        );
    }
    if let Some(path) = out {
        gk.save(path).context("writing kernel")?;
        println!("wrote {}", path.display());
    }
    Ok(code::OK)
}

fn parse_point(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("--at {text}: {e}")))
        })
        .collect()
}

pub fn kernel_show(spec: Option<&str>, file: Option<&Path>, at: &[String]) -> CliResult<i32> {
    let (kernel, spec) = load_kernel(spec, file)?;
    println!("kernel: {kernel}");
    println!(
        "spec: {}",
        serde_json::to_string(&spec).expect("kernel spec serializes")
    );
    println!("G(0): {:.12e}", kernel.value_at_origin());
    if let Kernel::Grid { kernel: gk, .. } = &kernel {
        let g = gk.grid();
        println!("grid: R={} M={} d={}", g.extent, g.points, g.dim);
    }
    for text in at {
        let x = parse_point(text)?;
        let g = kernel.eval_checked(&x).context("--at")?;
        match kernel.spectral_density(&x) {
            Some(d) => println!("x={x:?} G={g:.12e} Ĝ(x)={d:.12e}"),
            None => println!("x={x:?} G={g:.12e}"),
        }
    }
    Ok(code::OK)
}

pub fn fit(
    data: &Path,
    spec: Option<&str>,
    file: Option<&Path>,
    out: &Path,
    jitter: Option<f64>,
) -> CliResult<i32> {
    let (kernel, _) = load_kernel(spec, file)?;
    let (points, values) = table::read_samples(data)?;
    if points[0].len() != kernel.dim() {
        return Err(CliError::malformed(format!(
            "{}: {} coordinate columns but the kernel is {}-dimensional",
            data.display(),
            points[0].len(),
            kernel.dim()
        )));
    }
    let data = DataSet::new(points, values).context("data")?;
    let s = fit_with_jitter(&kernel, &data, jitter.unwrap_or(0.0)).context("fit")?;
    let model = s.to_model();
    let text = serde_json::to_string_pretty(&model).expect("model serializes");
    write_file(out, &text)?;
    println!("kernel: {kernel}");
    println!("centers: {}", data.len());
    println!("residual_inf: {:e}", s.residual_inf());
    println!("seminorm_sq: {:.12e}", s.seminorm_sq());
    println!("condition estimate: {:e}", s.condition_estimate());
    if s.jitter() > 0.0 {
        println!("jitter: {:e} (interpolation holds only to the residual above)", s.jitter());
    }
    println!("wrote {}", out.display());
    Ok(code::OK)
}

pub fn eval(model: &Path, query: &Path, out: Option<&Path>) -> CliResult<i32> {
    require_file(model)?;
    let text = fs::read_to_string(model)
        .map_err(|e| CliError::new(code::IO, format!("{}: {e}", model.display())))?;
    let model: Model = serde_json::from_str(&text)
        .map_err(|e| CliError::bad_spec(format!("{}: {e}", model.display())))?;
    if let Some(f) = &model.kernel.file {
        require_file(f)?;
    }
    let s = Interpolant::from_model(&model).context("model")?;
    let dim = s.dim();
    let rows = table::read(query)?;
    let width = rows[0].len();
    if width != dim && width != dim + 1 {
        return Err(CliError::malformed(format!(
            "{}: {width} columns but the model is {dim}-dimensional",
            query.display()
        )));
    }
    let points: Vec<Vec<f64>> = rows.into_iter().map(|mut r| {
        r.truncate(dim);
        r
    }).collect();
    let values = s.evaluate_batch(&points).context("evaluation")?;
    match out {
        Some(path) => {
            let f = File::create(path)
                .map_err(|e| CliError::new(code::IO, format!("{}: {e}", path.display())))?;
            table::write_predictions(BufWriter::new(f), &points, &values)?;
            println!("wrote {} predictions to {}", values.len(), path.display());
        }
        None => table::write_predictions(io::stdout().lock(), &points, &values)?,
    }
    Ok(code::OK)
}

pub fn validate(
    check: &str,
    config: Option<&str>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> CliResult<i32> {
    let name: CheckName = check.parse().context("--check")?;
    let config = config.map(|c| json_value(c, "check config")).transpose()?;
    let report = run_check(name, config.as_ref(), seed).map_err(|e| match e {
        // A config the suite cannot use is a spec problem, not a data problem.
        greenkern::Error::Malformed(m) => CliError::bad_spec(format!("{name}: {m}")),
        e => CliError::from_lib(name.as_str(), e),
    })?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    match out {
        Some(path) => write_file(path, &text)?,
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::new(code::IO, format!("stdout: {e}")))?,
    }
    if report.pass {
        eprintln!("{name}: pass (discrepancy {:e})", report.discrepancy);
        Ok(code::OK)
    } else {
        eprintln!("{name}: FAILED (discrepancy {:e})", report.discrepancy);
        Ok(code::CHECK_FAILED)
    }
}

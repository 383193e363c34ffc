use serde::Serialize;
use serde_json::Value;

use sftnorm::alphabet::{Alphabet, Sym};
use sftnorm::compressor::{
    check_block_entropy_bound, compress_nonnormal, entropy_gap_certificate, write_bits, BlockMap, EmpiricalChain,
    Recoder,
};
use sftnorm::measure::{markov_entropy, parry};
use sftnorm::normality::{Definition, Tester};
use sftnorm::occurrences::OccurrenceTable;
use sftnorm::sampling::{sample_parry, sample_skewed};
use sftnorm::spectral::{perron, DEFAULT_TOL};
use sftnorm::transducer::{check_injective_blocks, check_kraft_bound, Runner, Transducer};
use sftnorm::Error;

use crate::io::{emit, load_matrix, load_measure, load_sequence, load_shift, load_transducer, render_sequence, write_file};
use crate::report::*;
use crate::{
    BlocksArgs, CertificateArgs, Cli, Command, CompressArgs, DefArg, EntropyArgs, Failure, GenMode, GenerateArgs,
    InjectivityArgs, KraftArgs, NormalityArgs, OccArgs, ParryArgs, RecoderArgs, RunArgs, ValidateArgs,
};

type Out<T> = Result<T, Failure>;

fn lib<T>(stage: &'static str, r: sftnorm::Result<T>) -> Out<T> {
    r.map_err(|e| Failure::from_lib(stage, e))
}

fn config<A: Serialize>(cli: &Cli, args: &A) -> Out<Value> {
    let mut v = serde_json::to_value(args).map_err(|e| Failure::internal("config", e.to_string()))?;
    if let Value::Object(m) = &mut v {
        m.insert("format".into(), serde_json::to_value(cli.format).expect("format serializes"));
    }
    Ok(v)
}

fn finish<A: Serialize, R: Serialize>(cli: &Cli, kind: &str, args: &A, result: R) -> Out<()> {
    let text = Envelope::new(kind, config(cli, args)?, result).to_json()?;
    emit(cli.output.as_deref(), text.as_bytes())
}

fn require(cond: bool, stage: &'static str, message: &str) -> Out<()> {
    if cond {
        Ok(())
    } else {
        Err(Failure::validation(stage, message))
    }
}

pub fn dispatch(cli: &Cli) -> Out<()> {
    match &cli.command {
        Command::Entropy(a) => entropy(cli, a),
        Command::Parry(a) => parry_cmd(cli, a),
        Command::Blocks(a) => blocks(cli, a),
        Command::Generate(a) => generate(cli, a),
        Command::Occ(a) => occ(cli, a),
        Command::Normality(a) => normality(cli, a),
        Command::Run(a) => run_cmd(cli, a),
        Command::Injectivity(a) => injectivity(cli, a),
        Command::KraftAudit(a) => kraft_audit(cli, a),
        Command::Recoder(a) => recoder(cli, a),
        Command::Compress(a) => compress(cli, a),
        Command::Certificate(a) => certificate(cli, a),
        Command::ValidateReport(a) => validate_report(cli, a),
    }
}

fn entropy(cli: &Cli, a: &EntropyArgs) -> Out<()> {
    let spec = load_shift(&a.shift)?;
    let p = lib("perron", perron(&spec, DEFAULT_TOL))?;
    let period = lib("period", spec.period())?;
    let result = EntropyResult {
        symbols: spec.size(),
        lambda: p.lambda,
        entropy: p.lambda.log2(),
        irreducible: true,
        period,
        aperiodic: period == 1,
        iterations: p.iterations,
        residual: p.residual,
    };
    finish(cli, "entropy", a, result)
}

fn parry_cmd(cli: &Cli, a: &ParryArgs) -> Out<()> {
    require(a.audit_length >= 1, "parry", "--audit-length must be at least 1")?;
    let spec = load_shift(&a.shift)?;
    let pm = lib("parry", parry(&spec))?;
    let k = spec.size();
    let row_sum_error = pm.p.iter().map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    let stationarity_error = (0..k)
        .map(|j| ((0..k).map(|i| pm.pi[i] * pm.p[i][j]).sum::<f64>() - pm.pi[j]).abs())
        .fold(0.0, f64::max);
    let mu = pm.measure();
    let block_mass_error: Vec<f64> = (1..=a.audit_length)
        .map(|l| {
            let mut s = 0.0;
            mu.for_each_positive(l, |_, p| s += p);
            (s - 1.0).abs()
        })
        .collect();
    let entropy_error = (markov_entropy(&pm.pi, &pm.p) - pm.lambda.log2()).abs();
    let passed = row_sum_error <= 1e-10
        && stationarity_error <= 1e-10
        && block_mass_error.iter().all(|&e| e <= 1e-9)
        && entropy_error <= 1e-9;
    let result = ParryResult {
        lambda: pm.lambda,
        entropy: pm.lambda.log2(),
        pi: pm.pi.clone(),
        p: pm.p.clone(),
        left: pm.perron.left.clone(),
        right: pm.perron.right.clone(),
        audit: ParryAudit {
            max_length: a.audit_length,
            row_sum_error,
            stationarity_error,
            block_mass_error,
            entropy_error,
            passed,
        },
    };
    finish(cli, "parry", a, result)
}

fn blocks(cli: &Cli, a: &BlocksArgs) -> Out<()> {
    let spec = load_shift(&a.shift)?;
    let count = lib("blocks", spec.block_count(a.n))?;
    let listed = if a.list {
        let set = lib("blocks", spec.blocks_capped(a.n, a.cap as u128))?;
        Some(set.words.iter().map(|w| spec.alphabet().render(w)).collect())
    } else {
        None
    };
    finish(cli, "blocks", a, BlocksResult { length: a.n, count: count.to_string(), blocks: listed })
}

fn generate(cli: &Cli, a: &GenerateArgs) -> Out<()> {
    require(a.n >= 1, "generate", "--n must be at least 1")?;
    let spec = load_shift(&a.shift)?;
    let x = match a.mode {
        GenMode::Parry => lib("sampling", sample_parry(&spec, a.n, a.seed))?,
        GenMode::Skewed => {
            let path = a.matrix.as_ref().ok_or_else(|| Failure::validation("generate", "--mode skewed needs --matrix"))?;
            let q = load_matrix(path)?;
            lib("sampling", sample_skewed(&spec, &q, a.n, a.seed))?
        }
        GenMode::Periodic => {
            let word = a.word.as_ref().ok_or_else(|| Failure::validation("generate", "--mode periodic needs --word"))?;
            let w = lib("generate", spec.alphabet().parse_word(word))?;
            require(!w.is_empty(), "generate", "--word must not be empty")?;
            let x: Vec<Sym> = w.iter().copied().cycle().take(a.n).collect();
            if let Some(i) = spec.first_violation(&x) {
                return Err(Failure::validation("generate", format!("periodic sequence leaves the shift at position {i}")));
            }
            x
        }
    };
    emit(cli.output.as_deref(), render_sequence(&x, spec.alphabet()).as_bytes())?;
    if let Some(path) = &a.report {
        let mut symbol_counts = vec![0u64; spec.size()];
        for &s in &x {
            symbol_counts[s as usize] += 1;
        }
        let mode = serde_json::to_value(a.mode).expect("mode serializes").as_str().unwrap_or_default().to_string();
        let result = GenerateResult { mode, length: x.len(), seed: a.seed, symbol_counts };
        let text = Envelope::new("generate", config(cli, a)?, result).to_json()?;
        write_file("report", path, text.as_bytes())?;
    }
    Ok(())
}

fn occ(cli: &Cli, a: &OccArgs) -> Out<()> {
    require(a.l >= 1, "occ", "--l must be at least 1")?;
    let alphabet = match (&a.shift, &a.alphabet) {
        (Some(p), None) => load_shift(p)?.alphabet().clone(),
        (None, Some(g)) => lib("alphabet", Alphabet::new(g.chars().collect()))?,
        _ => return Err(Failure::validation("occ", "give exactly one of --shift or --alphabet")),
    };
    let x = load_sequence(&a.seq, &alphabet, a.max_symbols)?;
    let table = lib("occ", OccurrenceTable::build(&x, a.l, alphabet.len()))?;
    finish(cli, "occ", a, table.to_report(&alphabet))
}

fn normality(cli: &Cli, a: &NormalityArgs) -> Out<()> {
    if let Some(t) = a.tol {
        require(t > 0.0 && t < 1.0, "normality", "--tol must lie in (0, 1)")?;
    }
    let spec = load_shift(&a.shift)?;
    let mu = match &a.measure {
        Some(p) => load_measure(p)?,
        None => lib("parry", parry(&spec))?.measure(),
    };
    let x = load_sequence(&a.seq, spec.alphabet(), a.max_symbols)?;
    let defs: Vec<Definition> = match a.def {
        DefArg::Aligned => vec![Definition::Aligned],
        DefArg::Strong => vec![Definition::Strong],
        DefArg::Nonaligned => vec![Definition::Nonaligned],
        DefArg::All => Definition::ALL.to_vec(),
    };
    let report = lib(
        "normality",
        Tester::new(&mu).shift(&spec).l_max(a.lmax).k_max(a.kmax).tol(a.tol).min_mass(a.min_mass).run(&x, &defs),
    )?;
    finish(cli, "normality", a, NormalityResult { agree: report.agree(), report })
}

fn run_cmd(cli: &Cli, a: &RunArgs) -> Out<()> {
    require(a.width_cap >= 1, "run", "--width-cap must be at least 1")?;
    let t = load_transducer(&a.transducer)?;
    let x = match (&a.input, &a.seq) {
        (Some(w), None) => lib("input", t.input_alphabet().parse_sequence(w))?,
        (None, Some(p)) => load_sequence(p, t.input_alphabet(), a.max_symbols)?,
        _ => return Err(Failure::validation("run", "give exactly one of --input or --seq")),
    };
    let mut r = Runner::with_width_cap(&t, a.width_cap);
    lib("run", r.feed(&x))?;
    let res = lib("run", if a.complete { r.complete_result() } else { r.result() })?;
    let end = *res.visited.last().expect("a run visits at least one state");
    let report = RunReport {
        input_length: x.len(),
        output: t.output_alphabet().render(&res.output),
        output_length: res.output.len(),
        end_state: t.state_name(end).to_string(),
        final_hits: res.final_hits.len(),
        visited: a.trace.then(|| res.visited.iter().map(|&q| t.state_name(q).to_string()).collect()),
    };
    finish(cli, "run", a, report)
}

fn injectivity(cli: &Cli, a: &InjectivityArgs) -> Out<()> {
    let t = load_transducer(&a.transducer)?;
    let r = lib("injectivity", check_injective_blocks(&t, a.depth))?;
    let witness = r.witness.as_ref().map(|(w1, w2, out)| Witness {
        first: t.input_alphabet().render(w1),
        second: t.input_alphabet().render(w2),
        output: t.output_alphabet().render(out),
    });
    let result = InjectivityResult { depth: r.depth, words: r.words, complete: r.complete, injective: r.injective, witness };
    finish(cli, "injectivity", a, result)
}

fn kraft_audit(cli: &Cli, a: &KraftArgs) -> Out<()> {
    require(a.k >= 1, "kraft-audit", "--k must be at least 1")?;
    let t = load_transducer(&a.transducer)?;
    let audit = lib("kraft-audit", check_kraft_bound(&t, a.l, a.k))?;
    finish(cli, "kraft-audit", a, audit)
}

fn summarize(t: &Transducer) -> MachineSummary {
    MachineSummary {
        states: t.num_states(),
        transitions: t.transitions().len(),
        max_output_length: t.max_output_length(),
        deterministic: t.is_deterministic(),
    }
}

fn transducer_json(t: &Transducer) -> Out<String> {
    let mut s = serde_json::to_string_pretty(&t.to_file()).map_err(|e| Failure::internal("transducer", e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn recoder(cli: &Cli, a: &RecoderArgs) -> Out<()> {
    require(a.epsilon > 0.0 && a.epsilon.is_finite(), "recoder", "--epsilon must be positive")?;
    let source = load_shift(&a.source)?;
    let target = load_shift(&a.target)?;
    let rec = lib("recoder", Recoder::build(&source, &target, a.epsilon))?;
    let params = rec.params().clone();

    let machine = if params.source_blocks <= a.cap as u128 {
        Some(lib("recoder", rec.to_transducer(a.cap as u128))?)
    } else {
        log::warn!("{} source blocks exceed --cap {}; not building the transducer", params.source_blocks, a.cap);
        None
    };
    if let Some(path) = &a.transducer_out {
        let t = machine.as_ref().ok_or_else(|| {
            Failure::from_lib("recoder", Error::CapExceeded { requested: params.source_blocks, cap: a.cap as u128 })
        })?;
        write_file("transducer", path, transducer_json(t)?.as_bytes())?;
    }

    let measurement = match &a.seq {
        Some(p) => {
            let x = load_sequence(p, source.alphabet(), a.max_symbols)?;
            require(!x.is_empty(), "sequence", "sequence is empty")?;
            let enc = lib("recoder", rec.encode(&x))?;
            let decoded = lib("decode", rec.decode(&enc.output))?;
            if let Some(path) = &a.encoded_out {
                write_file("encoded", path, render_sequence(&enc.output, target.alphabet()).as_bytes())?;
            }
            Some(RecoderMeasurement {
                input_length: x.len(),
                output_length: enc.output.len(),
                blocks: enc.blocks,
                dropped: enc.dropped,
                ratio: enc.output.len() as f64 / x.len() as f64,
                valid_in_target: target.first_violation(&enc.output).is_none(),
                roundtrip: decoded == x[..x.len() - enc.dropped],
            })
        }
        None => None,
    };
    let bound = params.h_source / params.h_target + params.epsilon;
    let result = RecoderResult { params, bound, transducer: machine.as_ref().map(summarize), measurement };
    finish(cli, "recoder", a, result)
}

fn compress(cli: &Cli, a: &CompressArgs) -> Out<()> {
    require(a.l >= 1 && a.k >= 1, "compress", "--l and --k must be at least 1")?;
    require(a.samples >= 1, "compress", "--samples must be at least 1")?;
    let spec = load_shift(&a.shift)?;
    let x = load_sequence(&a.seq, spec.alphabet(), a.max_symbols)?;
    let c = lib("compress", compress_nonnormal(&spec, &x, a.l, a.k, a.samples))?;
    let bits = lib("encode", c.encode(&x))?;
    let whole = x.len() - x.len() % c.block_length();
    let roundtrip = lib("decode", c.decode(&bits))? == x[..whole];
    let ran = c.report.samples.last().map(|s| s.output_length);
    if ran != Some(bits.len() as u64) {
        return Err(Failure::internal("compress", "transducer output differs from direct encoding"));
    }

    let block = c.block_length();
    let kraft_audit = match check_kraft_bound(&c.transducer, block, 1) {
        Ok(audit) => Some(audit),
        Err(Error::CapExceeded { requested, cap }) => {
            log::warn!("skipping Kraft audit: {requested} words exceed cap {cap}");
            None
        }
        Err(e) => return Err(Failure::from_lib("kraft-audit", e)),
    };
    let block_entropy_bound = if kraft_audit.is_some() && whole > 0 {
        Some(lib("block-entropy-bound", check_block_entropy_bound(&c.transducer, &x[..whole], block, 1))?)
    } else {
        None
    };

    if let Some(path) = &a.transducer_out {
        write_file("transducer", path, transducer_json(&c.transducer)?.as_bytes())?;
    }
    if let Some(path) = &a.bits_out {
        write_file("bits", path, &lib("bits", write_bits(&bits))?)?;
    }
    let result = CompressResult {
        block_length: a.l,
        code_length: a.k,
        compression: c.report.clone(),
        code: c.code.summary(),
        chain: ChainSummary::new(&c.chain),
        transducer: summarize(&c.transducer),
        encoded_bits: bits.len(),
        roundtrip,
        kraft_audit,
        block_entropy_bound,
    };
    finish(cli, "compress", a, result)
}

fn certificate(cli: &Cli, a: &CertificateArgs) -> Out<()> {
    require(a.l >= 1, "certificate", "--l must be at least 1")?;
    let spec = load_shift(&a.shift)?;
    let x = load_sequence(&a.seq, spec.alphabet(), a.max_symbols)?;
    if let Some(i) = spec.first_violation(&x) {
        return Err(Failure::validation("certificate", format!("sequence leaves the shift at position {i}")));
    }
    let f = lib("block-map", BlockMap::new(&spec, a.l))?;
    let (y, dropped) = lib("block-map", f.encode(&x))?;
    let chain: EmpiricalChain = lib("chain", EmpiricalChain::from_sequence(&y, f.size()))?;
    let y_entropy = a.l as f64 * lib("entropy", spec.topological_entropy())?;
    let result = CertificateResult {
        block_length: a.l,
        dropped,
        chain_entropy: chain.entropy(),
        y_entropy,
        gap: entropy_gap_certificate(&chain, y_entropy),
        chain: ChainSummary::new(&chain),
    };
    finish(cli, "certificate", a, result)
}

fn validate_report(cli: &Cli, a: &ValidateArgs) -> Out<()> {
    let text = std::fs::read_to_string(&a.file)
        .map_err(|e| Failure::validation("validate-report", format!("{}: {e}", a.file.display())))?;
    let kind = validate(&text).map_err(|e| Failure::validation("validate-report", e))?;
    let result = ValidateResult { file: a.file.display().to_string(), report: kind, valid: true };
    finish(cli, "validate-report", a, result)
}

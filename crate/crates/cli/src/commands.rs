use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use langadapt::collection::{self, invert_generative, Phase, SamplingPlan, TemplateRegistry};
use langadapt::corpus::{corpus_stats, ingest_all, ingest_task_records, CorpusDocument};
use langadapt::metrics::{self, ChrfParams, LabeledPair, MetricReport, Smoothing};
use langadapt::par;
use langadapt::tokenizer::{self, relative_improvement, train_bpe, TokenizerModel, DEFAULT_SPECIALS};
use langadapt::vocab_adapt::{adapt_embeddings, EmbeddingMatrix};

use crate::config::{
    self, required, resolve, AdaptConfig, CollectionConfig, CorpusSpec, FertilityConfig, MetricName,
    ScoreConfig, TrainConfig,
};
use crate::output::{Inputs, Manifest, Staged};
use crate::Common;

struct Run {
    seed: u64,
    threads: usize,
    out: PathBuf,
}

/// Applies the common flags over the config values, writing the effective
/// values back so the manifest echoes what was actually used.
fn settings(
    common: &Common,
    base: &Path,
    seed: &mut Option<u64>,
    threads: &mut Option<usize>,
    out: &mut Option<PathBuf>,
) -> Result<Run> {
    if common.seed.is_some() {
        *seed = common.seed;
    }
    if common.threads.is_some() {
        *threads = common.threads;
    }
    match &common.out {
        Some(o) => *out = Some(o.clone()),
        None => *out = out.as_deref().map(|o| resolve(base, o)),
    }
    Ok(Run {
        seed: seed.unwrap_or(0),
        threads: threads.unwrap_or(0),
        out: required(out.clone(), "out")?,
    })
}

fn override_path(flag: Option<PathBuf>, value: &mut Option<PathBuf>, base: &Path) {
    match flag {
        Some(p) => *value = Some(p),
        None => *value = value.as_deref().map(|p| resolve(base, p)),
    }
}

fn finish<C: Serialize, E: Serialize>(
    mut out: Staged,
    command: &'static str,
    run: &Run,
    config: &C,
    inputs: Inputs,
    extra: E,
) -> Result<()> {
    let manifest = Manifest {
        command,
        toolkit_version: langadapt::VERSION,
        seed: run.seed,
        threads: par::current_threads(),
        config,
        inputs: inputs.into_map(),
        outputs: out.checksums().clone(),
        extra,
    };
    out.write_json("manifest.json", &manifest)?;
    out.commit()
}

fn load_model(path: &Path, inputs: &mut Inputs) -> Result<TokenizerModel> {
    inputs.add(path)?;
    TokenizerModel::load(path).with_context(|| format!("loading tokenizer {}", path.display()))
}

fn load_corpora(specs: &[CorpusSpec], inputs: &mut Inputs) -> Result<Vec<CorpusDocument>> {
    if specs.is_empty() {
        bail!("`corpus` must list at least one file");
    }
    let mut docs = Vec::new();
    for spec in specs {
        inputs.add(&spec.path)?;
        let source = match &spec.source {
            Some(s) => s.clone(),
            None => spec.path.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
        };
        let part = ingest_all(&spec.path, spec.format, &spec.language, &source)
            .with_context(|| format!("reading corpus {}", spec.path.display()))?;
        docs.extend(part);
    }
    Ok(docs)
}

pub fn tokenizer_train(common: &Common, vocab_size: Option<usize>) -> Result<()> {
    let (mut cfg, base) = config::load::<TrainConfig>(common.config.as_deref())?;
    let run = settings(common, &base, &mut cfg.seed, &mut cfg.threads, &mut cfg.out)?;
    if vocab_size.is_some() {
        cfg.vocab_size = vocab_size;
    }
    for c in &mut cfg.corpus {
        c.path = resolve(&base, &c.path);
    }
    let vocab_size = required(cfg.vocab_size, "vocab_size")?;
    let specials = cfg
        .special_tokens
        .get_or_insert_with(|| DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect())
        .clone();

    par::with_threads(run.threads, || {
        let mut inputs = Inputs::default();
        let docs = load_corpora(&cfg.corpus, &mut inputs)?;
        let model = train_bpe(&docs, vocab_size, &specials, run.seed)?;
        let mut out = Staged::new(&run.out)?;
        out.write("tokenizer.json", model.to_json().as_bytes())?;
        let extra = json!({
            "vocab_hash": model.vocab_hash(),
            "vocab_size": model.vocab_size(),
            "merges": model.merges().len(),
            "corpus_stats": corpus_stats(&docs),
        });
        println!("trained {} pieces ({} merges), vocab_hash {}", model.vocab_size(), model.merges().len(), model.vocab_hash());
        finish(out, "tokenizer-train", &run, &cfg, inputs, extra)
    })
}

#[derive(Serialize)]
struct Improvement {
    tokens_per_doc_pct: f64,
    tokens_per_word_pct: f64,
}

pub fn fertility(common: &Common, adapted: Option<PathBuf>, baseline: Option<PathBuf>) -> Result<()> {
    let (mut cfg, base) = config::load::<FertilityConfig>(common.config.as_deref())?;
    let run = settings(common, &base, &mut cfg.seed, &mut cfg.threads, &mut cfg.out)?;
    override_path(adapted, &mut cfg.adapted_model, &base);
    override_path(baseline, &mut cfg.baseline_model, &base);
    for c in &mut cfg.corpus {
        c.path = resolve(&base, &c.path);
    }
    let adapted_path = required(cfg.adapted_model.clone(), "adapted_model")?;
    let baseline_path = required(cfg.baseline_model.clone(), "baseline_model")?;

    par::with_threads(run.threads, || {
        let mut inputs = Inputs::default();
        let adapted = load_model(&adapted_path, &mut inputs)?;
        let baseline = load_model(&baseline_path, &mut inputs)?;
        let docs = load_corpora(&cfg.corpus, &mut inputs)?;
        let a = tokenizer::fertility(&adapted, &docs)?;
        let b = tokenizer::fertility(&baseline, &docs)?;
        let mut improvement = BTreeMap::new();
        for (ra, rb) in a.iter().zip(&b) {
            let imp = Improvement {
                tokens_per_doc_pct: tokenizer::compare_fertility(ra, rb)?,
                tokens_per_word_pct: relative_improvement(ra.tokens_per_word, rb.tokens_per_word)?,
            };
            println!(
                "{}: tokens/doc {:.2} vs {:.2} ({:.2}%), tokens/word {:.4} vs {:.4} ({:.2}%)",
                ra.language, ra.tokens_per_doc, rb.tokens_per_doc, imp.tokens_per_doc_pct,
                ra.tokens_per_word, rb.tokens_per_word, imp.tokens_per_word_pct
            );
            improvement.insert(ra.language.clone(), imp);
        }
        let mut out = Staged::new(&run.out)?;
        out.write_json("fertility.json", &json!({ "adapted": a, "baseline": b, "improvement": improvement }))?;
        let extra = json!({
            "adapted_vocab_hash": adapted.vocab_hash(),
            "baseline_vocab_hash": baseline.vocab_hash(),
        });
        finish(out, "fertility", &run, &cfg, inputs, extra)
    })
}

pub fn adapt(
    common: &Common,
    old_tokenizer: Option<PathBuf>,
    old_embeddings: Option<PathBuf>,
    new_tokenizer: Option<PathBuf>,
) -> Result<()> {
    let (mut cfg, base) = config::load::<AdaptConfig>(common.config.as_deref())?;
    let run = settings(common, &base, &mut cfg.seed, &mut cfg.threads, &mut cfg.out)?;
    override_path(old_tokenizer, &mut cfg.old_tokenizer, &base);
    override_path(old_embeddings, &mut cfg.old_embeddings, &base);
    override_path(new_tokenizer, &mut cfg.new_tokenizer, &base);
    let old_tok_path = required(cfg.old_tokenizer.clone(), "old_tokenizer")?;
    let old_emb_path = required(cfg.old_embeddings.clone(), "old_embeddings")?;
    let new_tok_path = required(cfg.new_tokenizer.clone(), "new_tokenizer")?;

    par::with_threads(run.threads, || {
        let mut inputs = Inputs::default();
        let old_tok = load_model(&old_tok_path, &mut inputs)?;
        let new_tok = load_model(&new_tok_path, &mut inputs)?;
        inputs.add(&old_emb_path)?;
        let old_emb = EmbeddingMatrix::load(&old_emb_path)
            .with_context(|| format!("loading embeddings {}", old_emb_path.display()))?;
        let (emb, report) = adapt_embeddings(&old_tok, &old_emb, &new_tok)?;
        let mut out = Staged::new(&run.out)?;
        out.write("embeddings.emb", &emb.to_bytes())?;
        out.write_json("adaptation_report.json", &report)?;
        println!(
            "{} rows x {} dims: {} copied, {} averaged, {} fallback",
            emb.rows(), emb.dims(), report.copied, report.averaged, report.fallback
        );
        let extra = json!({
            "old_vocab_hash": old_tok.vocab_hash(),
            "new_vocab_hash": new_tok.vocab_hash(),
            "copied": report.copied,
            "averaged": report.averaged,
            "fallback": report.fallback,
        });
        finish(out, "adapt", &run, &cfg, inputs, extra)
    })
}

pub fn build_collection(common: &Common, templates: Option<PathBuf>, plan: Option<PathBuf>) -> Result<()> {
    let (mut cfg, base) = config::load::<CollectionConfig>(common.config.as_deref())?;
    let explicit_seed = common.seed.or(cfg.seed);
    let mut run = settings(common, &base, &mut cfg.seed, &mut cfg.threads, &mut cfg.out)?;
    override_path(templates, &mut cfg.templates, &base);
    override_path(plan, &mut cfg.plan, &base);
    for r in &mut cfg.records {
        r.path = resolve(&base, &r.path);
    }
    let templates_path = required(cfg.templates.clone(), "templates")?;
    let plan_path = required(cfg.plan.clone(), "plan")?;
    if cfg.records.is_empty() {
        bail!("`records` must list at least one file");
    }

    let threads = run.threads;
    par::with_threads(threads, || {
        let mut inputs = Inputs::default();
        inputs.add(&templates_path)?;
        let registry = TemplateRegistry::load(&templates_path)
            .with_context(|| format!("loading templates {}", templates_path.display()))?;
        inputs.add(&plan_path)?;
        let mut plan = SamplingPlan::load(&plan_path)
            .with_context(|| format!("loading sampling plan {}", plan_path.display()))?;
        if let Some(seed) = explicit_seed {
            plan.seed = seed;
        }
        run.seed = plan.seed;
        cfg.seed = Some(plan.seed);

        let mut records = Vec::new();
        for spec in &cfg.records {
            inputs.add(&spec.path)?;
            let recs = ingest_task_records(&spec.path, &spec.language, &spec.source, spec.task_type)
                .with_context(|| format!("reading records {}", spec.path.display()))?;
            for r in recs {
                records.push(if spec.invert { invert_generative(&r)? } else { r });
            }
        }
        let built = collection::build_collection(&registry, &records, &plan)?;
        let (p1, p2): (Vec<_>, Vec<_>) = built.instances.into_iter().partition(|i| i.phase == Phase::Phase1);
        let mut out = Staged::new(&run.out)?;
        out.write("phase1.jsonl", collection::jsonl(&p1).as_bytes())?;
        out.write("phase2.jsonl", collection::jsonl(&p2).as_bytes())?;
        println!("phase1: {} instances, phase2: {} instances", p1.len(), p2.len());
        finish(out, "build-collection", &run, &cfg, inputs, json!({ "collection": built.manifest }))
    })
}

fn reject_params(cfg: &ScoreConfig, allowed: &[&str]) -> Result<()> {
    let p = &cfg.params;
    let given = [
        ("max_order", p.max_order.is_some()),
        ("smoothing", p.smoothing.is_some()),
        ("char_order", p.char_order.is_some()),
        ("word_order", p.word_order.is_some()),
        ("beta", p.beta.is_some()),
    ];
    for (name, set) in given {
        if set && !allowed.contains(&name) {
            bail!("parameter `{name}` does not apply to this metric");
        }
    }
    Ok(())
}

pub fn score(common: &Common, metric: Option<MetricName>, predictions: Option<PathBuf>) -> Result<()> {
    let (mut cfg, base) = config::load::<ScoreConfig>(common.config.as_deref())?;
    let run = settings(common, &base, &mut cfg.seed, &mut cfg.threads, &mut cfg.out)?;
    if metric.is_some() {
        cfg.metric = metric;
    }
    override_path(predictions, &mut cfg.predictions, &base);
    let metric = required(cfg.metric, "metric")?;
    let path = required(cfg.predictions.clone(), "predictions")?;
    if cfg.verbalizers.is_some() && metric != MetricName::WeightedF1 {
        bail!("`verbalizers` only applies to weighted_f1");
    }

    par::with_threads(run.threads, || {
        let mut inputs = Inputs::default();
        inputs.add(&path)?;
        let ctx = || format!("scoring {}", path.display());
        let report: MetricReport = match metric {
            MetricName::WeightedF1 => {
                reject_params(&cfg, &[])?;
                let pairs = match &cfg.verbalizers {
                    Some(v) => metrics::read_generations(&path)
                        .with_context(ctx)?
                        .into_iter()
                        .map(|g| LabeledPair {
                            predicted_label: metrics::match_verbalizer(&g.generation, v).unwrap_or("").to_owned(),
                            id: g.id,
                            gold_label: g.gold_label,
                        })
                        .collect(),
                    None => metrics::read_labeled(&path).with_context(ctx)?,
                };
                metrics::weighted_f1(&pairs)?
            }
            MetricName::ChrfPp => {
                reject_params(&cfg, &["char_order", "word_order", "beta"])?;
                let d = ChrfParams::default();
                let params = ChrfParams {
                    char_order: cfg.params.char_order.unwrap_or(d.char_order),
                    word_order: cfg.params.word_order.unwrap_or(d.word_order),
                    beta: cfg.params.beta.unwrap_or(d.beta),
                };
                metrics::chrf_pp(&metrics::read_predictions(&path).with_context(ctx)?, params)?
            }
            MetricName::CorpusBleu => {
                reject_params(&cfg, &["max_order", "smoothing"])?;
                let pairs = metrics::read_predictions(&path).with_context(ctx)?;
                let smoothing = cfg.params.smoothing.unwrap_or(Smoothing::AddEpsExp);
                metrics::corpus_bleu(&pairs, cfg.params.max_order.unwrap_or(4), smoothing)?
            }
            MetricName::RougeL => {
                reject_params(&cfg, &["beta"])?;
                let pairs = metrics::read_predictions(&path).with_context(ctx)?;
                metrics::rouge_l(&pairs, cfg.params.beta.unwrap_or(1.2))?
            }
            MetricName::Mc1Accuracy => {
                reject_params(&cfg, &[])?;
                metrics::mc1_accuracy(&metrics::read_choices(&path).with_context(ctx)?)?
            }
            MetricName::SafetyPreference => {
                reject_params(&cfg, &[])?;
                metrics::safety_preference(&metrics::read_likelihoods(&path).with_context(ctx)?)?
            }
        };
        println!("{}: {:.4} (n = {})", report.metric_name, report.aggregate, report.n);
        let mut out = Staged::new(&run.out)?;
        out.write_json("report.json", &report)?;
        let extra = json!({ "metric": report.metric_name, "aggregate": report.aggregate, "n": report.n });
        finish(out, "score", &run, &cfg, inputs, extra)
    })
}

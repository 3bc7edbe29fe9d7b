#include "chaosgan/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>

#include "chaosgan/csv.hpp"
#include "chaosgan/error.hpp"
#include "chaosgan/plot.hpp"
#include "chaosgan/rng.hpp"
#include "chaosgan/stats.hpp"

namespace chaosgan {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSevenSources{"rand",     "chaos_time_si10",  "chaos_time_si50",
                                             "randn0.1", "randn0.2",         "chaos_space_si10",
                                             "chaos_space_si50"};

const std::set<std::string> kKnownKeys{
    "run.seed", "run.trials", "run.paper_scale", "run.write_training_logs", "run.save_models",
    "run.epoch_metrics", "gan.height", "gan.width", "gan.channels", "gan.generator_hidden",
    "gan.discriminator_hidden", "gan.leaky_slope", "gan.learning_rate", "gan.beta1", "gan.beta2",
    "gan.epsilon", "gan.batch_size", "gan.iterations_per_epoch", "gan.epochs", "dataset.count",
    "dataset.directory", "chaos.manifest", "chaos.length", "chaos.measurements", "chaos.delay_lag",
    "chaos.feedback_strength", "chaos.damping", "chaos.output_scale", "proximity.references",
    "proximity.neighbors", "proximity.fixed_prefix", "diversity.image_count",
    "diversity.pair_count", "diversity.trials", "train_eval.sources", "characterize.sources",
    "characterize.rows", "characterize.maxlag", "characterize.bins", "si_sweep.strides",
    "si_sweep.domain", "retrieval.train_sources", "retrieval.retrieve_sources",
    "retrieval.distance_rows", "retrieval.distance_bits"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out;
}

std::string join(const std::vector<std::size_t>& items) {
  std::vector<std::string> s;
  for (auto v : items) s.push_back(std::to_string(v));
  return join(s);
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

std::size_t stride_of(const SourceSpec& spec) {
  return static_cast<std::size_t>(std::max(1, spec.si_ps / 10));
}

std::size_t max_stride(const std::vector<std::string>& labels) {
  std::size_t s = 1;
  for (const auto& l : labels) {
    const SourceSpec spec = parse_source_label(l);
    if (spec.chaos_backed()) s = std::max(s, stride_of(spec));
  }
  return s;
}

bool any_chaos(const std::vector<std::string>& labels) {
  return std::any_of(labels.begin(), labels.end(),
                     [](const auto& l) { return parse_source_label(l).chaos_backed(); });
}

void write_config_echo(const ExperimentConfig& cfg, const fs::path& out, CommandReport& report) {
  fs::create_directories(out);
  const fs::path p = out / "config.ini";
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(p.string() + ": cannot open for writing");
  f << "# chaosgan " << kVersion << " effective configuration\n" << cfg.to_config_file().to_string();
  report.outputs.push_back(p);
}

void save_csv(const CsvWriter& w, const fs::path& p, CommandReport& report) {
  w.write(p);
  report.outputs.push_back(p);
}

// Writes a stats CSV behind the provenance line.
template <typename Fn>
void save_stats_csv(const fs::path& p, std::uint64_t hash, Fn&& body, CommandReport& report) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(p.string() + ": cannot open for writing");
  f << provenance_line(hash) << '\n';
  body(f);
  report.outputs.push_back(p);
}

void save_plot(const fs::path& csv, const std::string& title, PlotKind kind,
               CommandReport& report, const std::string& x = {},
               const std::vector<std::string>& y = {}) {
  PlotOptions o;
  o.kind = kind;
  o.title = title;
  o.x_column = x;
  o.y_columns = y;
  fs::path stem = csv;
  stem.replace_extension();
  plot_csv(csv, stem, o);
  report.outputs.push_back(fs::path(stem) += ".svg");
}

ProximityConfig proximity_config(const ExperimentConfig& cfg) {
  ProximityConfig p = cfg.proximity;
  p.seed = derive_seed(cfg.seed, hash_label("proximity"));
  return p;
}

DiversityConfig diversity_config(const ExperimentConfig& cfg, std::size_t trial) {
  DiversityConfig d = cfg.diversity;
  d.seed = derive_seed(cfg.seed, hash_label("diversity"));
  d.first_trial = trial;
  return d;
}

std::string failure_status(const std::exception& e) {
  std::string msg = e.what();
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return "failed: " + msg;
}

void require_ssim_size(const ExperimentConfig& cfg) {
  const MsSsimConfig m;
  if (std::min(cfg.gan.image_height, cfg.gan.image_width) < m.window) {
    throw ConfigError("diversity needs images of at least " + std::to_string(m.window) + "x" +
                      std::to_string(m.window) + " pixels");
  }
}

/// Trains one trial; optional per-epoch proximity rows go to `epoch_rows`.
GanModel run_training(const ExperimentConfig& cfg, const LatentSource& source,
                      const ImageDataset& data, std::size_t trial, const fs::path& out,
                      const std::string& tag, CsvWriter* epoch_rows) {
  const GanConfig g = cfg.trial_gan_config(trial);
  LatentStream stream = source.stream(static_cast<int>(trial));
  GanModel model = initialize_model(g);
  std::vector<TrainingRecord> log;
  if (!cfg.epoch_metrics) {
    TrainingResult r = train(std::move(model), stream, data);
    model = std::move(r.model);
    log = std::move(r.log);
  } else {
    const ProximityConfig prox = proximity_config(cfg);
    for (std::size_t e = 1; e <= g.epochs; ++e) {
      model.config.epochs = 1;
      TrainingResult r = train(std::move(model), stream, data);
      model = std::move(r.model);
      for (auto rec : r.log) {
        rec.iteration += (e - 1) * g.iterations_per_epoch;
        log.push_back(rec);
      }
      model.config.epochs = g.epochs;
      if (epoch_rows != nullptr) {
        epoch_rows->add({tag, fmt(trial), fmt(e), fmt(proximity_similarity(model, prox).value)});
      }
    }
  }
  if (cfg.write_training_logs) {
    fs::create_directories(out / "logs");
    std::ofstream f(out / "logs" / (tag + "_trial" + std::to_string(trial) + ".csv"),
                    std::ios::binary);
    write_training_log_csv(log, f);
  }
  if (cfg.save_models) {
    fs::create_directories(out / "models");
    save_model(model, out / "models" / (tag + "_trial" + std::to_string(trial) + ".ganm"));
  }
  return model;
}

std::unique_ptr<CsvWriter> epoch_writer(const ExperimentConfig& cfg) {
  if (!cfg.epoch_metrics) return nullptr;
  return std::make_unique<CsvWriter>(std::vector<std::string>{"source", "trial", "epoch", "proximity"},
                                     cfg.hash());
}

void progress(const std::string& cmd, const std::string& what) {
  std::clog << cmd << ": " << what << std::endl;
}

std::string cell(const MeanStd& m, bool want_std) { return fmt(want_std ? m.std : m.mean); }

}  // namespace

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd m;
  m.n = values.size();
  if (values.empty()) {
    m.mean = std::numeric_limits<double>::quiet_NaN();
    m.std = m.mean;
    return m;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n < 2) {
    m.std = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(m.n - 1));
  return m;
}

ExperimentConfig ExperimentConfig::defaults(bool paper_scale) {
  ExperimentConfig c;
  c.paper_scale = paper_scale;
  if (paper_scale) {
    c.gan = GanConfig::paper_scale();
    c.dataset_count = 20000;
    c.diversity.image_count = 10000;
  } else {
    c.gan.generator_hidden = {128, 256};
    c.gan.discriminator_hidden = {256, 128};
    c.diversity.image_count = 2000;
  }
  c.diversity.pair_count = 1000;
  c.diversity.trials = 1;
  c.chaos.length = 0;
  c.sources = kSevenSources;
  c.characterize_sources = kSevenSources;
  c.characterize_sources.push_back("surrogate_time_si10");
  c.sweep_strides = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.retrieval_train_sources = {"rand", "chaos_time_si50", "randn0.2", "chaos_space_si10"};
  c.retrieval_sources = {"rand", "chaos_time_si50", "randn0.2"};
  return c;
}

void ExperimentConfig::apply(const ConfigFile& f) {
  for (const auto& k : f.keys()) {
    if (kKnownKeys.count(k) == 0) throw ConfigError("config: unknown key '" + k + "'");
  }
  seed = f.get_u64("run.seed", seed);
  trials = f.get_size("run.trials", trials);
  paper_scale = f.get_bool("run.paper_scale", paper_scale);
  write_training_logs = f.get_bool("run.write_training_logs", write_training_logs);
  save_models = f.get_bool("run.save_models", save_models);
  epoch_metrics = f.get_bool("run.epoch_metrics", epoch_metrics);

  gan.image_height = f.get_size("gan.height", gan.image_height);
  gan.image_width = f.get_size("gan.width", gan.image_width);
  gan.channels = f.get_size("gan.channels", gan.channels);
  gan.generator_hidden = f.get_sizes("gan.generator_hidden", gan.generator_hidden);
  gan.discriminator_hidden = f.get_sizes("gan.discriminator_hidden", gan.discriminator_hidden);
  gan.leaky_slope = f.get_double("gan.leaky_slope", gan.leaky_slope);
  gan.learning_rate = f.get_double("gan.learning_rate", gan.learning_rate);
  gan.adam_beta1 = f.get_double("gan.beta1", gan.adam_beta1);
  gan.adam_beta2 = f.get_double("gan.beta2", gan.adam_beta2);
  gan.adam_epsilon = f.get_double("gan.epsilon", gan.adam_epsilon);
  gan.batch_size = f.get_size("gan.batch_size", gan.batch_size);
  gan.iterations_per_epoch = f.get_size("gan.iterations_per_epoch", gan.iterations_per_epoch);
  gan.epochs = f.get_size("gan.epochs", gan.epochs);

  dataset_count = f.get_size("dataset.count", dataset_count);
  dataset_directory = f.get_string("dataset.directory", dataset_directory.string());

  trace_manifest = f.get_string("chaos.manifest", trace_manifest.string());
  chaos.length = f.get_size("chaos.length", chaos.length);
  measurements = static_cast<int>(f.get_int("chaos.measurements", measurements));
  chaos.delay_lag = f.get_size("chaos.delay_lag", chaos.delay_lag);
  chaos.feedback_strength = f.get_double("chaos.feedback_strength", chaos.feedback_strength);
  chaos.damping = f.get_double("chaos.damping", chaos.damping);
  chaos.output_scale = f.get_double("chaos.output_scale", chaos.output_scale);

  proximity.references = f.get_size("proximity.references", proximity.references);
  proximity.neighbors = f.get_size("proximity.neighbors", proximity.neighbors);
  proximity.fixed_prefix = f.get_size("proximity.fixed_prefix", proximity.fixed_prefix);

  diversity.image_count = f.get_size("diversity.image_count", diversity.image_count);
  diversity.pair_count = f.get_size("diversity.pair_count", diversity.pair_count);
  diversity.trials = f.get_size("diversity.trials", diversity.trials);

  sources = f.get_list("train_eval.sources", sources);
  characterize_sources = f.get_list("characterize.sources", characterize_sources);
  characterize_rows = f.get_size("characterize.rows", characterize_rows);
  autocorr_maxlag = f.get_size("characterize.maxlag", autocorr_maxlag);
  histogram_bins = f.get_size("characterize.bins", histogram_bins);
  sweep_strides = f.get_sizes("si_sweep.strides", sweep_strides);
  sweep_domain = f.get_string("si_sweep.domain", sweep_domain);
  retrieval_train_sources = f.get_list("retrieval.train_sources", retrieval_train_sources);
  retrieval_sources = f.get_list("retrieval.retrieve_sources", retrieval_sources);
  distance_rows = f.get_size("retrieval.distance_rows", distance_rows);
  distance_bits = static_cast<int>(f.get_int("retrieval.distance_bits", distance_bits));
}

ConfigFile ExperimentConfig::to_config_file() const {
  ConfigFile f;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  f.set("run.seed", std::to_string(seed));
  f.set("run.trials", std::to_string(trials));
  f.set("run.paper_scale", b(paper_scale));
  f.set("run.write_training_logs", b(write_training_logs));
  f.set("run.save_models", b(save_models));
  f.set("run.epoch_metrics", b(epoch_metrics));
  f.set("gan.height", std::to_string(gan.image_height));
  f.set("gan.width", std::to_string(gan.image_width));
  f.set("gan.channels", std::to_string(gan.channels));
  f.set("gan.generator_hidden", join(gan.generator_hidden));
  f.set("gan.discriminator_hidden", join(gan.discriminator_hidden));
  f.set("gan.leaky_slope", fmt(gan.leaky_slope));
  f.set("gan.learning_rate", fmt(gan.learning_rate));
  f.set("gan.beta1", fmt(gan.adam_beta1));
  f.set("gan.beta2", fmt(gan.adam_beta2));
  f.set("gan.epsilon", fmt(gan.adam_epsilon));
  f.set("gan.batch_size", std::to_string(gan.batch_size));
  f.set("gan.iterations_per_epoch", std::to_string(gan.iterations_per_epoch));
  f.set("gan.epochs", std::to_string(gan.epochs));
  f.set("dataset.count", std::to_string(dataset_count));
  f.set("dataset.directory", dataset_directory.string());
  f.set("chaos.manifest", trace_manifest.string());
  f.set("chaos.length", std::to_string(chaos.length));
  f.set("chaos.measurements", std::to_string(measurements));
  f.set("chaos.delay_lag", std::to_string(chaos.delay_lag));
  f.set("chaos.feedback_strength", fmt(chaos.feedback_strength));
  f.set("chaos.damping", fmt(chaos.damping));
  f.set("chaos.output_scale", fmt(chaos.output_scale));
  f.set("proximity.references", std::to_string(proximity.references));
  f.set("proximity.neighbors", std::to_string(proximity.neighbors));
  f.set("proximity.fixed_prefix", std::to_string(proximity.fixed_prefix));
  f.set("diversity.image_count", std::to_string(diversity.image_count));
  f.set("diversity.pair_count", std::to_string(diversity.pair_count));
  f.set("diversity.trials", std::to_string(diversity.trials));
  f.set("train_eval.sources", join(sources));
  f.set("characterize.sources", join(characterize_sources));
  f.set("characterize.rows", std::to_string(characterize_rows));
  f.set("characterize.maxlag", std::to_string(autocorr_maxlag));
  f.set("characterize.bins", std::to_string(histogram_bins));
  f.set("si_sweep.strides", join(sweep_strides));
  f.set("si_sweep.domain", sweep_domain);
  f.set("retrieval.train_sources", join(retrieval_train_sources));
  f.set("retrieval.retrieve_sources", join(retrieval_sources));
  f.set("retrieval.distance_rows", std::to_string(distance_rows));
  f.set("retrieval.distance_bits", std::to_string(distance_bits));
  return f;
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw ConfigError("run.trials must be >= 1");
  gan.validate();
  proximity.validate();
  diversity.validate();
  if (dataset_count == 0 && dataset_directory.empty()) {
    throw ConfigError("dataset.count must be >= 1");
  }
  if (measurements < 100) throw ConfigError("chaos.measurements must be >= 100");
  if (trace_manifest.empty()) {
    SyntheticChaosConfig probe = chaos;
    if (probe.length == 0) probe.length = 1000;
    probe.validate();
  }
  for (const auto* list : {&sources, &characterize_sources, &retrieval_train_sources,
                           &retrieval_sources}) {
    for (const auto& l : *list) parse_source_label(l).validate();
  }
  if (sweep_strides.empty()) throw ConfigError("si_sweep.strides must not be empty");
  for (auto s : sweep_strides) {
    if (s == 0) throw ConfigError("si_sweep.strides entries must be >= 1");
  }
  if (sweep_domain != "time" && sweep_domain != "space") {
    throw ConfigError("si_sweep.domain must be 'time' or 'space'");
  }
  if (autocorr_maxlag == 0 || autocorr_maxlag > 99) {
    throw ConfigError("characterize.maxlag must be in 1..99");
  }
  if (characterize_rows < autocorr_maxlag + 2) {
    throw ConfigError("characterize.rows must be >= maxlag + 2");
  }
  if (histogram_bins == 0) throw ConfigError("characterize.bins must be >= 1");
  if (distance_rows < 2) throw ConfigError("retrieval.distance_rows must be >= 2");
  if (distance_bits < 1 || distance_bits > 8) {
    throw ConfigError("retrieval.distance_bits must be in 1..8");
  }
}

DatasetSpec ExperimentConfig::dataset_spec() const {
  DatasetSpec d;
  d.kind = dataset_directory.empty() ? DatasetSpec::Kind::SyntheticBlobs
                                     : DatasetSpec::Kind::ImageDirectory;
  d.seed = derive_seed(seed, hash_label("dataset"));
  d.count = dataset_count;
  d.height = gan.image_height;
  d.width = gan.image_width;
  d.channels = gan.channels;
  d.directory = dataset_directory;
  return d;
}

SourceSpec ExperimentConfig::source_spec(const std::string& label, const std::string& role) const {
  SourceSpec s = parse_source_label(label);
  if (!s.chaos_backed()) s.seed = derive_seed(seed, hash_label(role + ":" + label));
  if (s.surrogate()) s.shuffle_seed = derive_seed(seed, hash_label("shuffle:" + label));
  return s;
}

GanConfig ExperimentConfig::trial_gan_config(std::size_t trial) const {
  GanConfig g = gan;
  g.seed = derive_seed(derive_seed(seed, hash_label("model")), trial);
  return g;
}

std::size_t training_rows(const GanConfig& gan) {
  return 2 * gan.batch_size * gan.iterations_per_epoch * gan.epochs;
}

std::size_t rows_needed(const ExperimentConfig& cfg, std::size_t per_trial_rows) {
  return kTrialRowOffset * (cfg.trials - 1) + per_trial_rows;
}

std::shared_ptr<const TraceSet> experiment_traces(const ExperimentConfig& cfg, std::size_t rows,
                                                  std::size_t stride) {
  if (!cfg.trace_manifest.empty()) {
    return std::make_shared<const TraceSet>(load_trace_set(read_manifest(cfg.trace_manifest)));
  }
  SyntheticChaosConfig c = cfg.chaos;
  c.seed = derive_seed(cfg.seed, hash_label("chaos"));
  if (c.length == 0) {
    const std::size_t per_sequence = (rows + kLatentDim - 1) / kLatentDim * kLatentDim;
    c.length = stride * per_sequence;
  }
  return std::make_shared<const TraceSet>(synthesize_trace_set(c, cfg.measurements, 4, 10));
}

CommandReport cmd_characterize(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  CommandReport report;
  write_config_echo(cfg, out, report);
  const std::uint64_t hash = cfg.hash();
  std::shared_ptr<const TraceSet> traces;
  if (any_chaos(cfg.characterize_sources)) {
    traces = experiment_traces(cfg, cfg.characterize_rows, max_stride(cfg.characterize_sources));
  }

  CsvWriter summary({"source", "rows", "time_min_lag", "time_min_value", "time_max_abs",
                     "time_band", "space_min_lag", "space_min_value", "space_max_abs",
                     "space_band", "status"},
                    hash);
  for (const auto& label : cfg.characterize_sources) {
    progress("characterize", label);
    try {
      const SourceSpec spec = cfg.source_spec(label, "characterize");
      LatentMatrix m;
      if (spec.chaos_backed()) {
        const LatentSource src(spec, traces);
        const auto full = src.matrix();
        m = full->slice(0, std::min(cfg.characterize_rows, full->rows()));
      } else {
        m = build_matrix(spec, nullptr, cfg.characterize_rows);
      }
      const fs::path dir = out / label;
      fs::create_directories(dir);

      CsvWriter time_snap({"t", "value"}, hash);
      for (std::size_t t = 0; t < std::min<std::size_t>(100, m.rows()); ++t) {
        time_snap.add({fmt(t + 1), fmt(m(t, 0))});
      }
      save_csv(time_snap, dir / "time_snapshot.csv", report);
      save_plot(dir / "time_snapshot.csv", label + ": element 1 over t", PlotKind::Line, report);

      CsvWriter space_snap({"i", "value"}, hash);
      for (std::size_t i = 0; i < kLatentDim; ++i) space_snap.add({fmt(i + 1), fmt(m(0, i))});
      save_csv(space_snap, dir / "space_snapshot.csv", report);
      save_plot(dir / "space_snapshot.csv", label + ": vector 1", PlotKind::Line, report);

      const HistogramResult h = histogram(m, cfg.histogram_bins);
      save_stats_csv(dir / "histogram.csv", hash, [&](std::ostream& o) { write_histogram_csv(h, o); },
                     report);
      save_plot(dir / "histogram.csv", label + ": histogram", PlotKind::Line, report, "bin_low",
                {"count"});

      const AutocorrResult at = autocorr_time(m, cfg.autocorr_maxlag);
      save_stats_csv(dir / "autocorr_time.csv", hash,
                     [&](std::ostream& o) { write_autocorr_csv(at, o); }, report);
      save_plot(dir / "autocorr_time.csv", label + ": temporal autocorrelation", PlotKind::Line,
                report);

      const AutocorrResult as = autocorr_space(m, cfg.autocorr_maxlag);
      save_stats_csv(dir / "autocorr_space.csv", hash,
                     [&](std::ostream& o) { write_autocorr_csv(as, o); }, report);
      save_plot(dir / "autocorr_space.csv", label + ": spatial autocorrelation", PlotKind::Line,
                report);

      const auto tl = at.most_negative_lag();
      const auto sl = as.most_negative_lag();
      summary.add({label, fmt(m.rows()), fmt(tl), fmt(at.value(static_cast<long>(tl))),
                   fmt(at.max_abs_nonzero()), fmt(white_noise_band(m.rows())), fmt(sl),
                   fmt(as.value(static_cast<long>(sl))), fmt(as.max_abs_nonzero()),
                   fmt(white_noise_band(kLatentDim)), "ok"});
    } catch (const std::exception& e) {
      ++report.failures;
      summary.add({label, "", "", "", "", "", "", "", "", "", failure_status(e)});
    }
  }
  save_csv(summary, out / "characterize_summary.csv", report);
  return report;
}

CommandReport cmd_train_eval(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  require_ssim_size(cfg);
  CommandReport report;
  write_config_echo(cfg, out, report);
  const std::uint64_t hash = cfg.hash();
  const ImageDataset data = make_dataset(cfg.dataset_spec());
  const ProximityConfig prox = proximity_config(cfg);
  ProximityConfig sanity = prox;
  sanity.fixed_prefix = kLatentDim;
  sanity.references = std::min<std::size_t>(prox.references, 20);
  sanity.neighbors = std::min<std::size_t>(prox.neighbors, 10);

  std::shared_ptr<const TraceSet> traces;
  if (any_chaos(cfg.sources)) {
    const std::size_t per_trial = std::max(training_rows(cfg.gan), cfg.diversity.image_count);
    traces = experiment_traces(cfg, rows_needed(cfg, per_trial), max_stride(cfg.sources));
  }

  CsvWriter trials({"source", "trial", "proximity", "diversity", "proximity_fixed100", "status"},
                   hash);
  CsvWriter summary({"source", "trials_ok", "proximity_mean", "proximity_std", "diversity_mean",
                     "diversity_std"},
                    hash);
  auto epochs = epoch_writer(cfg);
  for (const auto& label : cfg.sources) {
    std::vector<double> ps;
    std::vector<double> ds;
    std::unique_ptr<LatentSource> source;
    std::string source_error;
    try {
      source = std::make_unique<LatentSource>(cfg.source_spec(label, "train"), traces);
    } catch (const std::exception& e) {
      source_error = failure_status(e);
    }
    for (std::size_t n = 1; n <= cfg.trials; ++n) {
      progress("train-eval", label + " trial " + std::to_string(n) + "/" + std::to_string(cfg.trials));
      if (!source) {
        ++report.failures;
        trials.add({label, fmt(n), "", "", "", source_error});
        continue;
      }
      try {
        const GanModel model = run_training(cfg, *source, data, n, out, label, epochs.get());
        const double p = proximity_similarity(model, prox).value;
        const double d = diversity(model, diversity_config(cfg, n), *source).value;
        const double s = proximity_similarity(model, sanity).value;
        ps.push_back(p);
        ds.push_back(d);
        trials.add({label, fmt(n), fmt(p), fmt(d), fmt(s), "ok"});
      } catch (const std::exception& e) {
        ++report.failures;
        trials.add({label, fmt(n), "", "", "", failure_status(e)});
      }
    }
    const MeanStd pm = mean_std(ps);
    const MeanStd dm = mean_std(ds);
    summary.add({label, fmt(ps.size()), cell(pm, false), cell(pm, true), cell(dm, false),
                 cell(dm, true)});
  }
  save_csv(trials, out / "train_eval_trials.csv", report);
  save_csv(summary, out / "train_eval_summary.csv", report);
  if (epochs) save_csv(*epochs, out / "train_eval_epochs.csv", report);
  try {
    save_plot(out / "train_eval_summary.csv", "similarity in proximity vs diversity",
              PlotKind::Scatter, report, "proximity_mean", {"diversity_mean"});
  } catch (const ConfigError&) {
    // every trial failed; nothing to plot
  }
  return report;
}

CommandReport cmd_si_sweep(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  CommandReport report;
  write_config_echo(cfg, out, report);
  const std::uint64_t hash = cfg.hash();
  const ImageDataset data = make_dataset(cfg.dataset_spec());
  const ProximityConfig prox = proximity_config(cfg);
  const std::size_t top_stride = *std::max_element(cfg.sweep_strides.begin(), cfg.sweep_strides.end());
  const auto traces = experiment_traces(cfg, rows_needed(cfg, training_rows(cfg.gan)), top_stride);
  const int base_si = traces->sampling_interval_ps();
  const bool space = cfg.sweep_domain == "space";

  CsvWriter trials({"si_ps", "trial", "variant", "proximity", "status"}, hash);
  CsvWriter sweep({"si_ps", "stride", "latent_acf_lag1", "proximity_original",
                   "proximity_original_std", "proximity_surrogate", "proximity_surrogate_std",
                   "failed"},
                  hash);
  auto epochs = epoch_writer(cfg);
  struct Point {
    int si;
    double acf;
    double orig;
    double surr;
  };
  std::vector<Point> points;
  for (std::size_t stride : cfg.sweep_strides) {
    const int si = static_cast<int>(stride) * base_si;
    std::vector<double> orig;
    std::vector<double> surr;
    std::size_t failed = 0;
    double acf1 = std::numeric_limits<double>::quiet_NaN();
    std::unique_ptr<LatentSource> original;
    std::string source_error;
    try {
      original = std::make_unique<LatentSource>(
          space ? SourceSpec::chaos_space(si) : SourceSpec::chaos_time(si), traces);
      const auto m = original->matrix();
      const LatentMatrix probe = m->slice(0, std::min(cfg.characterize_rows, m->rows()));
      acf1 = (space ? autocorr_space(probe, 5) : autocorr_time(probe, 5)).value(1);
    } catch (const std::exception& e) {
      source_error = failure_status(e);
      original.reset();
    }
    for (std::size_t n = 1; n <= cfg.trials; ++n) {
      progress("si-sweep", "si " + std::to_string(si) + " trial " + std::to_string(n) + "/" +
                               std::to_string(cfg.trials));
      const std::string tag = "si" + std::to_string(si);
      if (!original) {
        failed += 2;
        trials.add({fmt(static_cast<std::size_t>(si)), fmt(n), "original", "", source_error});
        trials.add({fmt(static_cast<std::size_t>(si)), fmt(n), "surrogate", "", source_error});
        continue;
      }
      try {
        const GanModel model = run_training(cfg, *original, data, n, out, tag + "_original", epochs.get());
        const double p = proximity_similarity(model, prox).value;
        orig.push_back(p);
        trials.add({fmt(static_cast<std::size_t>(si)), fmt(n), "original", fmt(p), "ok"});
      } catch (const std::exception& e) {
        ++failed;
        trials.add({fmt(static_cast<std::size_t>(si)), fmt(n), "original", "", failure_status(e)});
      }
      try {
        const std::uint64_t shuffle = derive_seed(derive_seed(cfg.seed, hash_label("shuffle")), n);
        const LatentSource sur(space ? SourceSpec::surrogate_space(si, shuffle)
                                     : SourceSpec::surrogate_time(si, shuffle),
                               traces);
        const GanModel model = run_training(cfg, sur, data, n, out, tag + "_surrogate", epochs.get());
        const double p = proximity_similarity(model, prox).value;
        surr.push_back(p);
        trials.add({fmt(static_cast<std::size_t>(si)), fmt(n), "surrogate", fmt(p), "ok"});
      } catch (const std::exception& e) {
        ++failed;
        trials.add({fmt(static_cast<std::size_t>(si)), fmt(n), "surrogate", "", failure_status(e)});
      }
    }
    report.failures += failed;
    const MeanStd om = mean_std(orig);
    const MeanStd sm = mean_std(surr);
    sweep.add({fmt(static_cast<std::size_t>(si)), fmt(stride), fmt(acf1), cell(om, false),
               cell(om, true), cell(sm, false), cell(sm, true), fmt(failed)});
    points.push_back({si, acf1, om.mean, sm.mean});
  }

  CsvWriter extrema({"quantity", "si_ps", "value"}, hash);
  auto pick = [&](const char* name, auto key, bool want_max) {
    const Point* best = nullptr;
    for (const auto& p : points) {
      const double v = key(p);
      if (!std::isfinite(v)) continue;
      if (best == nullptr || (want_max ? v > key(*best) : v < key(*best))) best = &p;
    }
    if (best != nullptr) {
      extrema.add({name, fmt(static_cast<std::size_t>(best->si)), fmt(key(*best))});
    } else {
      extrema.add({name, "", ""});
    }
  };
  pick("latent_acf_lag1_min", [](const Point& p) { return p.acf; }, false);
  pick("proximity_original_max", [](const Point& p) { return p.orig; }, true);
  pick("proximity_surrogate_max", [](const Point& p) { return p.surr; }, true);

  save_csv(trials, out / "si_sweep_trials.csv", report);
  save_csv(sweep, out / "si_sweep.csv", report);
  save_csv(extrema, out / "si_sweep_extrema.csv", report);
  if (epochs) save_csv(*epochs, out / "si_sweep_epochs.csv", report);
  try {
    save_plot(out / "si_sweep.csv", "similarity in proximity vs sampling interval", PlotKind::Line,
              report, "si_ps", {"proximity_original", "proximity_surrogate"});
  } catch (const ConfigError&) {
  }
  return report;
}

CommandReport cmd_retrieval_matrix(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  require_ssim_size(cfg);
  CommandReport report;
  write_config_echo(cfg, out, report);
  const std::uint64_t hash = cfg.hash();
  const ImageDataset data = make_dataset(cfg.dataset_spec());
  const ProximityConfig prox = proximity_config(cfg);

  std::vector<std::string> all = cfg.retrieval_train_sources;
  all.insert(all.end(), cfg.retrieval_sources.begin(), cfg.retrieval_sources.end());
  std::shared_ptr<const TraceSet> traces;
  if (any_chaos(all)) {
    const std::size_t per_trial = std::max({training_rows(cfg.gan), cfg.diversity.image_count,
                                            cfg.distance_rows, prox.references});
    traces = experiment_traces(cfg, rows_needed(cfg, per_trial), max_stride(all));
  }

  std::vector<std::unique_ptr<LatentSource>> retrieve;
  std::vector<std::string> retrieve_error(cfg.retrieval_sources.size());
  for (std::size_t r = 0; r < cfg.retrieval_sources.size(); ++r) {
    try {
      retrieve.push_back(
          std::make_unique<LatentSource>(cfg.source_spec(cfg.retrieval_sources[r], "retrieve"), traces));
    } catch (const std::exception& e) {
      retrieve.push_back(nullptr);
      retrieve_error[r] = failure_status(e);
    }
  }
  // Minimum Hamming distance depends only on (retrieve source, trial).
  std::map<std::pair<std::size_t, std::size_t>, double> distance;
  auto min_distance = [&](std::size_t r, std::size_t n) {
    const auto key = std::make_pair(r, n);
    auto it = distance.find(key);
    if (it == distance.end()) {
      LatentStream s = retrieve[r]->stream(static_cast<int>(n));
      it = distance.emplace(key, min_pairwise_distance(s.next_batch(cfg.distance_rows), cfg.distance_bits)).first;
    }
    return it->second;
  };

  CsvWriter trials({"train_source", "retrieve_source", "trial", "proximity", "diversity",
                    "min_distance", "status"},
                   hash);
  CsvWriter matrix({"train_source", "retrieve_source", "trials_ok", "proximity_mean",
                    "proximity_std", "diversity_mean", "diversity_std", "min_distance_mean"},
                   hash);
  auto epochs = epoch_writer(cfg);
  for (const auto& train_label : cfg.retrieval_train_sources) {
    const std::size_t nr = cfg.retrieval_sources.size();
    std::vector<std::vector<double>> ps(nr);
    std::vector<std::vector<double>> ds(nr);
    std::vector<std::vector<double>> md(nr);
    std::unique_ptr<LatentSource> source;
    std::string source_error;
    try {
      source = std::make_unique<LatentSource>(cfg.source_spec(train_label, "train"), traces);
    } catch (const std::exception& e) {
      source_error = failure_status(e);
    }
    for (std::size_t n = 1; n <= cfg.trials; ++n) {
      progress("retrieval", train_label + " trial " + std::to_string(n) + "/" + std::to_string(cfg.trials));
      std::unique_ptr<GanModel> model;
      std::string train_error = source_error;
      if (source) {
        try {
          model = std::make_unique<GanModel>(
              run_training(cfg, *source, data, n, out, "retrieval_" + train_label, epochs.get()));
        } catch (const std::exception& e) {
          train_error = failure_status(e);
        }
      }
      for (std::size_t r = 0; r < nr; ++r) {
        const std::string& rl = cfg.retrieval_sources[r];
        if (!model || !retrieve[r]) {
          ++report.failures;
          trials.add({train_label, rl, fmt(n), "", "", "", model ? retrieve_error[r] : train_error});
          continue;
        }
        try {
          const double p = proximity_similarity(*model, prox, *retrieve[r]).value;
          const double d = diversity(*model, diversity_config(cfg, n), *retrieve[r]).value;
          const double h = min_distance(r, n);
          ps[r].push_back(p);
          ds[r].push_back(d);
          md[r].push_back(h);
          trials.add({train_label, rl, fmt(n), fmt(p), fmt(d), fmt(h), "ok"});
        } catch (const std::exception& e) {
          ++report.failures;
          trials.add({train_label, rl, fmt(n), "", "", "", failure_status(e)});
        }
      }
    }
    for (std::size_t r = 0; r < nr; ++r) {
      const MeanStd pm = mean_std(ps[r]);
      const MeanStd dm = mean_std(ds[r]);
      matrix.add({train_label, cfg.retrieval_sources[r], fmt(ps[r].size()), cell(pm, false),
                  cell(pm, true), cell(dm, false), cell(dm, true), fmt(mean_std(md[r]).mean)});
    }
  }
  save_csv(trials, out / "retrieval_trials.csv", report);
  save_csv(matrix, out / "retrieval_matrix.csv", report);
  if (epochs) save_csv(*epochs, out / "retrieval_epochs.csv", report);
  return report;
}

CommandReport cmd_synth_traces(const ExperimentConfig& cfg, const fs::path& out,
                               std::size_t length) {
  cfg.validate();
  CommandReport report;
  write_config_echo(cfg, out, report);
  SyntheticChaosConfig c = cfg.chaos;
  c.seed = derive_seed(cfg.seed, hash_label("chaos"));
  c.length = length;
  const TraceSet set = synthesize_trace_set(c, cfg.measurements, 4, 10);
  save_trace_set(set, out);
  report.outputs.push_back(out / "manifest.tsv");
  return report;
}

}  // namespace chaosgan

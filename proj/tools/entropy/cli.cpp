#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>

#include "colent/errors.hpp"
#include "colent/estimator.hpp"
#include "colent/io.hpp"
#include "colent/lowerbound.hpp"
#include "json.hpp"

namespace colent::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename T>
void take(const json& doc, const std::string& key, T& target, const std::string& source) {
  try {
    target = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw StructuralError(source + ": field '" + key + "' has the wrong type");
  }
}

// Modes come as a list; commas inside one entry also separate.
std::vector<std::string> split_modes(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& entry : raw) {
    std::stringstream ss(entry);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

std::string stem_of(const std::string& source) {
  if (!source.empty() && source.front() == '{') return "inline";
  return fs::path(source).stem().string();
}

TransferMatrix matrix_from(const std::string& source) {
  if (!source.empty() && source.front() == '{') return parse_matrix(source, "<inline matrix>");
  return load_matrix(source);
}

ModelDocument model_from(const std::string& source) {
  if (!source.empty() && source.front() == '{') return parse_model(source, "<inline model>");
  return load_model(source);
}

RateMethod rate_method(const std::string& name) {
  if (name == "tail_max") return RateMethod::tail_max;
  if (name == "regression") return RateMethod::regression;
  throw StructuralError("unknown rate method '" + name + "' (tail_max|regression)");
}

// Output files land in --out; without it only stdout is produced.
class Emitter {
 public:
  explicit Emitter(const ExperimentConfig& config) : config_(config) {
    if (config.format != "csv" && config.format != "json") {
      throw StructuralError("unknown format '" + config.format + "' (csv|json)");
    }
    if (!config.out.empty()) {
      std::error_code ec;
      fs::create_directories(config.out, ec);
      if (ec || !fs::is_directory(config.out)) {
        throw StructuralError("cannot create output directory " + config.out);
      }
    }
  }

  bool enabled() const { return !config_.out.empty(); }

  void series(const std::string& label, const ExperimentResult& r) {
    if (!enabled()) return;
    const std::string base = label + "_" + mode_name(r.mode);
    if (config_.format == "csv") {
      write(base + ".csv", series_csv({r}, label));
      if (r.mode == Mode::cpc || r.mode == Mode::qd) {
        write(base + "_audit.csv", audit_csv(r.audit));
      }
      return;
    }
    json doc;
    doc["label"] = label;
    doc["mode"] = mode_name(r.mode);
    json points = json::array();
    for (const auto& p : r.series.points) {
      points.push_back({{"n", p.n}, {"count", p.count}, {"exact", p.exact}});
    }
    doc["points"] = points;
    if (r.mode == Mode::cpc || r.mode == Mode::qd) {
      json audit = json::array();
      for (const auto& a : r.audit) {
        audit.push_back({{"n", a.n},
                         {"rank", a.rank},
                         {"approx_error", a.approx_error},
                         {"mult_defect", a.mult_defect},
                         {"trace_defect", a.trace_defect}});
      }
      doc["audit"] = audit;
    }
    write(base + ".json", doc.dump(2) + "\n");
  }

  void summary(const json& doc) {
    if (enabled()) write("summary.json", doc.dump(2) + "\n");
  }

 private:
  void write(const std::string& name, const std::string& contents) {
    write_file((fs::path(config_.out) / name).string(), contents);
  }

  const ExperimentConfig& config_;
};

SolverOptions solver_options(const ExperimentConfig& config) {
  SolverOptions s;
  s.exact_threshold = config.exact_threshold;
  return s;
}

json rate_json(const std::optional<RateEstimate>& rate) {
  if (!rate) return nullptr;
  return {{"slope", rate->slope},
          {"method", rate->method == RateMethod::tail_max ? "tail_max" : "regression"},
          {"tail_window", rate->tail_window},
          {"residual", rate->residual},
          {"upper_bound_only", rate->upper_bound_only}};
}

// One experiment per mode; one stdout line and one table each.
int run_series(const ExperimentConfig& config, const std::string& label,
               const std::function<ExperimentResult(Mode)>& experiment, std::ostream& out) {
  const RateMethod method = rate_method(config.method);
  if (config.n_max < 1) throw StructuralError("--n-max must be at least 1");
  Emitter emit(config);
  json experiments = json::array();
  for (const auto& name : config.modes) {
    const Mode mode = parse_mode(name);
    const ExperimentResult r = experiment(mode);
    std::optional<RateEstimate> rate;
    if (r.series.points.size() >= 3) rate = growth_rate(r.series, method);

    out << "label=" << label << " mode=" << mode_name(mode) << " n_max=" << config.n_max
        << " points=" << r.series.points.size();
    if (rate) {
      out << " slope=" << format_number(rate->slope)
          << " method=" << (method == RateMethod::tail_max ? "tail_max" : "regression")
          << " upper_bound_only=" << (rate->upper_bound_only ? "true" : "false");
    } else {
      out << " slope=none";
    }
    if (r.series.truncated) out << " truncated=\"" << r.series.truncation_reason << "\"";
    out << "\n";

    emit.series(label, r);
    experiments.push_back({{"label", label},
                           {"mode", mode_name(mode)},
                           {"n_max", config.n_max},
                           {"points", r.series.points.size()},
                           {"all_exact", r.series.all_exact()},
                           {"rate", rate_json(rate)},
                           {"truncated", r.series.truncated},
                           {"truncation_reason", r.series.truncation_reason}});
  }
  emit.summary({{"command", config.command}, {"experiments", experiments}});
  return 0;
}

int run_sft(const ExperimentConfig& config, std::ostream& out) {
  if (config.matrices.size() != 1) throw StructuralError("sft needs exactly one --matrix");
  const TransferMatrix matrix = matrix_from(config.matrices.front());
  ExperimentOptions options{solver_options(config), config.colours, config.epsilon};
  return run_series(
      config, stem_of(config.matrices.front()),
      [&](Mode mode) { return entropy_experiment(matrix, config.n_max, mode, options); }, out);
}

// cover, coloured, cpc and qd: the mode is implied by the subcommand.
int run_model_series(const ExperimentConfig& config, Mode mode, std::ostream& out) {
  ExperimentConfig fixed = config;
  fixed.modes = {mode_name(mode)};
  ExperimentOptions options{solver_options(config), config.colours, config.epsilon};
  if (!config.model.empty()) {
    const ModelDocument doc = model_from(config.model);
    return run_series(
        fixed, stem_of(config.model),
        [&](Mode m) { return entropy_experiment(doc.bundle, config.n_max, m, options); }, out);
  }
  if (config.matrices.size() == 1) {
    const TransferMatrix matrix = matrix_from(config.matrices.front());
    return run_series(
        fixed, stem_of(config.matrices.front()),
        [&](Mode m) { return entropy_experiment(matrix, config.n_max, m, options); }, out);
  }
  throw StructuralError(config.command + " needs --model or a single --matrix");
}

int run_sandwich(const ExperimentConfig& config, std::ostream& out) {
  if (config.model.empty()) throw StructuralError("sandwich needs --model");
  const ModelDocument doc = model_from(config.model);
  const SandwichReport r = sandwich_verdict(doc.bundle, config.n, solver_options(config));
  out << "N=" << r.subcover << " Nc=" << r.coloured << " bound=" << r.bound << " ";
  switch (r.verdict) {
    case Verdict::ok:
      out << "OK\n";
      break;
    case Verdict::violated:
      out << "VIOLATED (" << r.reason << ")\n";
      break;
    case Verdict::withheld:
      out << "WITHHELD (" << r.reason << ")\n";
      break;
  }
  Emitter emit(config);
  emit.summary({{"command", "sandwich"},
                {"label", stem_of(config.model)},
                {"n", r.n},
                {"colours", r.colours},
                {"N", r.subcover},
                {"Nc", r.coloured},
                {"bound", r.bound},
                {"subcover_exact", r.subcover_exact},
                {"coloured_exact", r.coloured_exact},
                {"verdict", verdict_name(r.verdict)},
                {"reason", r.reason}});
  return r.verdict == Verdict::violated ? 2 : 0;
}

int run_l1(const ExperimentConfig& config, std::ostream& out) {
  VectorFamily family;
  std::string label;
  if (!config.model.empty()) {
    const ModelDocument doc = model_from(config.model);
    if (doc.vectors.empty()) throw StructuralError("model has no 'vectors' for l1");
    family.kind = NormKind::sup;
    family.functions = doc.vectors;
    label = stem_of(config.model);
  } else if (config.family == "rademacher") {
    family = kerr_witness(config.m, config.depth);
    label = "rademacher";
  } else {
    throw StructuralError("unknown family '" + config.family + "' (rademacher)");
  }
  L1Options options;
  options.heuristic = config.heuristic;
  options.seed = config.seed;
  const EquivalenceReport r = l1_equivalence_constant(family, options);
  out << "K=" << (r.infinite ? std::string("inf") : format_number(r.K))
      << " exact=" << (r.exact ? "true" : "false") << " infinite=" << (r.infinite ? "true" : "false")
      << " size=" << family.size() << " kerr_bound_factor=" << format_number(r.kerr_bound_factor)
      << "\n";
  Emitter emit(config);
  emit.summary({{"command", "l1"},
                {"label", label},
                {"size", family.size()},
                {"K", r.infinite ? json(nullptr) : json(r.K)},
                {"infinite", r.infinite},
                {"exact", r.exact},
                {"min_norm", r.min_norm},
                {"coefficients", r.coefficients},
                {"kerr_bound_factor", r.kerr_bound_factor},
                {"complex_K_bound", r.infinite ? json(nullptr) : json(r.complex_K_bound)}});
  return 0;
}

int run_permanence(const ExperimentConfig& config, std::ostream& out) {
  std::vector<TransferMatrix> models;
  std::vector<std::string> labels;
  if (config.matrices.empty()) {
    models = {TransferMatrix::full_shift(2), TransferMatrix::full_shift(3),
              TransferMatrix::golden_mean()};
    labels = {"full2", "full3", "golden"};
  }
  for (const auto& m : config.matrices) {
    models.push_back(matrix_from(m));
    labels.push_back(stem_of(m));
  }
  PermanenceOptions options;
  options.seed = config.seed;
  options.solver = solver_options(config);
  const auto checks = permanence_suite(models, labels, options);
  bool all = true;
  json rows = json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    out << c.law << " " << c.label << " " << (c.passed ? "PASS" : "FAIL")
        << " deviation=" << format_number(c.deviation)
        << " tolerance=" << format_number(c.tolerance) << "\n";
    rows.push_back({{"law", c.law},
                    {"label", c.label},
                    {"passed", c.passed},
                    {"deviation", c.deviation},
                    {"tolerance", c.tolerance},
                    {"detail", c.detail}});
  }
  Emitter emit(config);
  emit.summary({{"command", "permanence"}, {"checks", rows}, {"passed", all}});
  return all ? 0 : 2;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              ExperimentConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw StructuralError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": malformed config");
  }
  if (!doc.is_object()) throw StructuralError(source + ": config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const json& value = it.value();
    if (key == "command") {
      take(doc, key, base.command, source);
    } else if (key == "model") {
      if (value.is_object()) {
        base.model = value.dump();
      } else {
        take(doc, key, base.model, source);
      }
    } else if (key == "matrix" || key == "matrices") {
      base.matrices.clear();
      const json list = value.is_array() && key == "matrices" ? value : json::array({value});
      for (const auto& m : list) {
        if (m.is_object()) {
          base.matrices.push_back(m.dump());
        } else if (m.is_string()) {
          base.matrices.push_back(m.get<std::string>());
        } else {
          throw StructuralError(source + ": field '" + key + "' has the wrong type");
        }
      }
    } else if (key == "mode") {
      if (value.is_array()) {
        take(doc, key, base.modes, source);
      } else {
        std::string one;
        take(doc, key, one, source);
        base.modes = {one};
      }
    } else if (key == "method") {
      take(doc, key, base.method, source);
    } else if (key == "n_max") {
      take(doc, key, base.n_max, source);
    } else if (key == "n") {
      take(doc, key, base.n, source);
    } else if (key == "epsilon") {
      take(doc, key, base.epsilon, source);
    } else if (key == "exact_threshold") {
      take(doc, key, base.exact_threshold, source);
    } else if (key == "colours") {
      take(doc, key, base.colours, source);
    } else if (key == "out") {
      take(doc, key, base.out, source);
    } else if (key == "seed") {
      take(doc, key, base.seed, source);
    } else if (key == "format") {
      take(doc, key, base.format, source);
    } else if (key == "family") {
      take(doc, key, base.family, source);
    } else if (key == "m") {
      take(doc, key, base.m, source);
    } else if (key == "depth") {
      take(doc, key, base.depth, source);
    } else if (key == "heuristic") {
      take(doc, key, base.heuristic, source);
    } else {
      throw StructuralError(source + ": unknown field '" + key + "'");
    }
  }
  return base;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy experiments on cell models and subshifts of finite type", "entropy"};
  app.require_subcommand(1);

  ExperimentConfig flags;
  std::string config_path;
  // Each flag that was given overrides the config document.
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> overrides;
  auto bind = [&](CLI::Option* opt, auto member) {
    overrides.emplace_back(opt, [member, &flags](ExperimentConfig& c) { c.*member = flags.*member; });
    return opt;
  };

  const std::vector<std::pair<std::string, std::string>> commands{
      {"sft", "Growth series of a subshift of finite type"},
      {"cover", "Minimal subcover counts of a cell model"},
      {"coloured", "Minimal coloured refinement counts of a cell model"},
      {"cpc", "Ranks of partition-of-unity approximation systems"},
      {"qd", "Ranks of quasidiagonal systems under the uniform trace"},
      {"l1", "l1-equivalence constant of a vector family"},
      {"sandwich", "Check N <= Nc <= (d+1) N on one dynamical join"},
      {"permanence", "Power, direct-sum and conjugacy laws on subshifts"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config; flags override its fields")
        ->check(CLI::ExistingFile);
    bind(sub->add_option("--matrix", flags.matrices, "Transfer matrix file (JSON or CSV)"),
         &ExperimentConfig::matrices);
    bind(sub->add_option("--model", flags.model, "Model bundle JSON"), &ExperimentConfig::model);
    bind(sub->add_option("--out", flags.out, "Output directory"), &ExperimentConfig::out);
    bind(sub->add_option("--format", flags.format, "Table format")
             ->check(CLI::IsMember({"csv", "json"})),
         &ExperimentConfig::format);
    bind(sub->add_option("--seed", flags.seed, "Seed for randomized subroutines"),
         &ExperimentConfig::seed);
    bind(sub->add_option("--exact-threshold", flags.exact_threshold,
                         "Largest kernel solved exactly"),
         &ExperimentConfig::exact_threshold);
    bind(sub->add_option("--colours", flags.colours, "Colour budget (0: dimension + 1)"),
         &ExperimentConfig::colours);
    if (name == "sft") {
      bind(sub->add_option("--mode", flags.modes, "plain|coloured|cpc|qd, comma separated")
               ->delimiter(','),
           &ExperimentConfig::modes);
    }
    if (name == "sft" || name == "cover" || name == "coloured" || name == "cpc" || name == "qd") {
      bind(sub->add_option("--n-max", flags.n_max, "Longest dynamical join"),
           &ExperimentConfig::n_max);
      bind(sub->add_option("--epsilon", flags.epsilon, "Accuracy for the qd conversion"),
           &ExperimentConfig::epsilon);
      bind(sub->add_option("--method", flags.method, "Growth-rate estimator")
               ->check(CLI::IsMember({"tail_max", "regression"})),
           &ExperimentConfig::method);
    }
    if (name == "sandwich") {
      bind(sub->add_option("--n", flags.n, "Join length"), &ExperimentConfig::n);
    }
    if (name == "l1") {
      bind(sub->add_option("--family", flags.family, "Built-in family")
               ->check(CLI::IsMember({"rademacher"})),
           &ExperimentConfig::family);
      bind(sub->add_option("--m", flags.m, "Base family size"), &ExperimentConfig::m);
      bind(sub->add_option("--depth", flags.depth, "Number of shifts"), &ExperimentConfig::depth);
      bind(sub->add_flag("--heuristic", flags.heuristic, "Sample orthants beyond the cap"),
           &ExperimentConfig::heuristic);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    ExperimentConfig config;
    if (!config_path.empty()) config = parse_config(read_file(config_path), config_path);
    for (auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(config);
    }
    config.command = app.get_subcommands().front()->get_name();
    config.modes = split_modes(config.modes);
    if (config.modes.empty()) throw StructuralError("no mode given");
    if (!(config.epsilon > 0.0)) throw StructuralError("epsilon must be positive");

    const std::string& cmd = config.command;
    if (cmd == "sft") return run_sft(config, out);
    if (cmd == "cover") return run_model_series(config, Mode::plain, out);
    if (cmd == "coloured") return run_model_series(config, Mode::coloured, out);
    if (cmd == "cpc") return run_model_series(config, Mode::cpc, out);
    if (cmd == "qd") return run_model_series(config, Mode::qd, out);
    if (cmd == "l1") return run_l1(config, out);
    if (cmd == "sandwich") return run_sandwich(config, out);
    return run_permanence(config, out);
  } catch (const BoundViolation& e) {
    err << "verdict failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace colent::cli

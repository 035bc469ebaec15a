// Command-line surface over the ndpoly library. One subcommand per workflow
// step; every artifact is written atomically and is byte-identical across
// reruns with the same inputs and seed. Output is plain text (NO_COLOR is
// honored trivially: nothing ever emits color codes).

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndpoly/data.hpp"
#include "ndpoly/errors.hpp"
#include "ndpoly/expression.hpp"
#include "ndpoly/metrics.hpp"
#include "ndpoly/model.hpp"
#include "ndpoly/pipeline.hpp"
#include "ndpoly/spectral.hpp"

namespace {

using namespace ndpoly;

// Shortest round-trip decimal form, matching the expression emitter.
std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    std::string part = text.substr(start, end - start);
    const auto first = part.find_first_not_of(" \t");
    if (first == std::string::npos) {
      part.clear();
    } else {
      part = part.substr(first, part.find_last_not_of(" \t") - first + 1);
    }
    if (!part.empty()) parts.push_back(std::move(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

NegativePolicy policy_from_flag(const std::string& name) {
  if (name == "reject") return NegativePolicy::Reject;
  if (name == "clamp") return NegativePolicy::Clamp;
  throw ValidationError("unknown negative policy '" + name + "'");
}

// Status and diagnostics go to stderr; stdout carries only the products
// (tables, expressions, matrices), so piping them stays clean.
void print_rejections(const ParseReport& report) {
  std::cerr << report.summary() << "\n";
  const std::size_t shown = std::min<std::size_t>(report.rejections.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    std::cerr << "warning: " << report.rejections[i] << "\n";
  }
  if (report.rejections.size() > shown) {
    std::cerr << "warning: " << report.rejections.size() - shown
              << " further rows rejected\n";
  }
}

struct DiscoverArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  long long k_max = 0;
  double epsilon = 0.0;
  std::string methods;
  std::string split;
  bool cross_validate_folds = false;
  CLI::Option* opt_seed = nullptr;
  CLI::Option* opt_k_max = nullptr;
  CLI::Option* opt_epsilon = nullptr;
  CLI::Option* opt_methods = nullptr;
  CLI::Option* opt_split = nullptr;
};

void run_discover(const DiscoverArgs& args) {
  DiscoveryConfig config = discovery_config_from_json(read_file(args.config_path));
  if (args.opt_seed->count() > 0) config.seed = args.seed;
  if (args.opt_k_max->count() > 0) config.sweep.k_max = static_cast<Index>(args.k_max);
  if (args.opt_epsilon->count() > 0) config.sweep.epsilon = args.epsilon;
  if (args.opt_methods->count() > 0) {
    config.sweep.methods.clear();
    for (const std::string& name : split_list(args.methods)) {
      config.sweep.methods.push_back(selection_method_from_string(name));
    }
    if (config.sweep.methods.empty()) {
      throw ValidationError("--methods: at least one selection method required");
    }
  }
  if (args.opt_split->count() > 0) {
    config.split.strategy = split_strategy_from_string(args.split);
  }
  if (config.sweep.k_max < 1) {
    throw ValidationError("config: k_max must be >= 1");
  }
  if (config.data_path.empty()) {
    throw ValidationError("config: 'data' path required");
  }

  // Relative data paths resolve against the config file, so a config and its
  // samples travel together as a unit.
  std::filesystem::path data_path(config.data_path);
  if (data_path.is_relative()) {
    data_path = std::filesystem::path(args.config_path).parent_path() / data_path;
  }

  ParseReport parse_report;
  const SampleTable table = read_samples(data_path.string(), config.schema, &parse_report);
  print_rejections(parse_report);

  const DiscoveryResult result = discover(table, config);
  for (const std::string& warning : result.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path out(args.out_dir);
  save_model(result.model, (out / "model.json").string());
  write_file_atomic((out / "sweep.json").string(), discovery_result_to_json(result));
  write_file_atomic((out / "sweep.txt").string(), format_sweep_table(result.report));
  write_file_atomic((out / "evaluation.json").string(),
                    evaluation_to_json(result.evaluation));

  std::cout << format_sweep_table(result.report);
  std::cout << "fold '" << result.fold_name << "': train accuracy "
            << format_double(result.train_accuracy) << ", test accuracy "
            << format_double(result.test_accuracy);
  if (result.validation_accuracy) {
    std::cout << ", validation accuracy " << format_double(*result.validation_accuracy);
  }
  std::cout << "\nselected:";
  for (const FeatureDescriptor& d : result.model.descriptors) {
    std::cout << ' ' << descriptor_name(d);
  }
  std::cout << "\nwrote model.json, sweep.json, sweep.txt, evaluation.json to "
            << args.out_dir << "\n";

  if (args.cross_validate_folds) {
    const CrossValidationReport cv = cross_validate(table, config);
    write_file_atomic((out / "cv_report.json").string(), cross_validation_to_json(cv));
    std::cout << format_cross_validation(cv);
    std::cout << "wrote cv_report.json to " << args.out_dir << "\n";
  }
}

struct EvaluateArgs {
  std::string model_path;
  std::string samples_path;
  std::string schema_path;
  std::string bands;
  std::string label_column = "label";
  std::string positive;
  std::string negative;
  std::string negative_policy = "reject";
  double scale_factor = 1.0;
  std::string out_path = "evaluation.json";
  CLI::Option* opt_schema = nullptr;
  CLI::Option* opt_bands = nullptr;
  CLI::Option* opt_positive = nullptr;
  CLI::Option* opt_negative = nullptr;
};

void run_evaluate(const EvaluateArgs& args) {
  const TrainedModel model = load_model(args.model_path);

  SampleSchema schema;
  if (args.opt_schema->count() > 0) {
    schema = sample_schema_from_json(read_file(args.schema_path));
  } else if (args.opt_bands->count() > 0) {
    schema.band_columns = split_list(args.bands);
    schema.label_column = args.label_column;
    schema.negative_policy = policy_from_flag(args.negative_policy);
    schema.scale_factor = args.scale_factor;
  } else {
    throw ValidationError("evaluate: provide --schema or --bands");
  }
  if (args.opt_positive->count() > 0) schema.positive_label = args.positive;
  if (args.opt_negative->count() > 0) schema.negative_label = args.negative;
  if (schema.positive_label.empty()) schema.positive_label = model.positive_label;
  if (schema.negative_label.empty()) schema.negative_label = model.negative_label;

  ParseReport parse_report;
  const SampleTable table = read_samples(args.samples_path, schema, &parse_report);
  print_rejections(parse_report);

  if (table.band_count() != model.band_count) {
    throw ValidationError("evaluate: model expects " + std::to_string(model.band_count) +
                          " bands, samples provide " + std::to_string(table.band_count()));
  }

  const std::vector<std::string> predictions = model.predict_batch(table.bands);
  EvaluationReport report;
  report.cm = confusion(predictions, table.labels, schema.positive_label,
                        schema.negative_label);
  report.metrics = derived_metrics(report.cm);
  report.positive_label = schema.positive_label;
  report.negative_label = schema.negative_label;

  std::cout << format_evaluation(report);
  write_file_atomic(args.out_path, evaluation_to_json(report));
  std::cout << "wrote " << args.out_path << "\n";
}

struct ExportArgs {
  std::string model_path;
  std::string dialect = "generic-infix";
  std::string bands;
  CLI::Option* opt_bands = nullptr;
};

void run_export(const ExportArgs& args) {
  const TrainedModel model = load_model(args.model_path);
  std::vector<std::string> names;
  if (args.opt_bands->count() > 0) names = split_list(args.bands);
  std::cout << export_expression(model, dialect_from_string(args.dialect), names) << "\n";
}

struct EmbedArgs {
  std::string mode;
  std::string model_path;
  std::string samples_path;
  std::string bands;
  int degree = 2;
  double epsilon = kDefaultEpsilon;
  std::string negative_policy = "reject";
  double scale_factor = 1.0;
  std::string out_path;
  CLI::Option* opt_out = nullptr;
};

void write_or_print(const std::string& out_path, const std::string& contents,
                    bool to_file) {
  if (to_file) {
    write_file_atomic(out_path, contents);
    std::cout << "wrote " << out_path << "\n";
  } else {
    std::cout << contents;
  }
}

void run_embed(const EmbedArgs& args) {
  const bool to_file = args.opt_out->count() > 0;
  if (args.mode == "class") {
    if (args.model_path.empty()) {
      throw ValidationError("embed --mode class requires --model");
    }
    const TrainedModel model = load_model(args.model_path);
    const Vector embedding = model.class_embedding();
    std::string out;
    for (Index i = 0; i < embedding.size(); ++i) {
      out += format_double(embedding[i]);
      out += '\n';
    }
    write_or_print(args.out_path, out, to_file);
    return;
  }

  // pixel mode
  if (args.samples_path.empty() || args.bands.empty()) {
    throw ValidationError("embed --mode pixel requires --samples and --bands");
  }
  SampleSchema schema;
  schema.band_columns = split_list(args.bands);
  schema.negative_policy = policy_from_flag(args.negative_policy);
  schema.scale_factor = args.scale_factor;
  ParseReport parse_report;
  const SampleTable table = read_samples(args.samples_path, schema, &parse_report);
  print_rejections(parse_report);

  const FeatureSpace space = enumerate_features(table.band_count(), args.degree);
  const Matrix features = evaluate_feature_matrix(table.bands, space, args.epsilon);
  std::string out;
  for (Index i = 0; i < features.rows(); ++i) {
    for (Index j = 0; j < features.cols(); ++j) {
      if (j) out += '\t';
      out += format_double(features(i, j));
    }
    out += '\n';
  }
  write_or_print(args.out_path, out, to_file);
}

struct SynthArgs {
  std::string out_path;
  long long count = 2000;
  int bands = 10;
  std::uint64_t seed = 7;
  double noise = 0.05;
  double separation = 0.5;
  std::string positive = "weed";
  std::string negative = "crop";
};

void run_synth(const SynthArgs& args) {
  SyntheticOptions options;
  options.samples = static_cast<Index>(args.count);
  options.band_count = args.bands;
  options.seed = args.seed;
  options.noise = args.noise;
  options.separation = args.separation;
  options.positive_label = args.positive;
  options.negative_label = args.negative;
  const SampleTable table = generate_synthetic(options);
  write_samples(args.out_path, table);
  std::cout << "wrote " << table.size() << " samples (" << table.band_count()
            << " bands) to " << args.out_path << "\n";
}

struct ExpandArgs {
  std::string samples_path;
  std::string bands;
  int degree = 2;
  double epsilon = kDefaultEpsilon;
  std::string label_column;
  std::string positive;
  std::string negative;
  std::string negative_policy = "reject";
  double scale_factor = 1.0;
  std::string out_path;
};

void run_expand(const ExpandArgs& args) {
  SampleSchema schema;
  schema.band_columns = split_list(args.bands);
  schema.label_column = args.label_column;
  schema.positive_label = args.positive;
  schema.negative_label = args.negative;
  schema.negative_policy = policy_from_flag(args.negative_policy);
  schema.scale_factor = args.scale_factor;
  ParseReport parse_report;
  const SampleTable table = read_samples(args.samples_path, schema, &parse_report);
  print_rejections(parse_report);

  const FeatureSpace space = enumerate_features(table.band_count(), args.degree);
  const Matrix features = evaluate_feature_matrix(table.bands, space, args.epsilon);
  const bool with_labels = !table.labels.empty();

  std::string out;
  for (Index j = 0; j < space.size(); ++j) {
    if (j) out += '\t';
    out += descriptor_name(space.descriptor(j));
  }
  if (with_labels) {
    out += '\t';
    out += args.label_column;
  }
  out += '\n';
  for (Index i = 0; i < features.rows(); ++i) {
    for (Index j = 0; j < features.cols(); ++j) {
      if (j) out += '\t';
      out += format_double(features(i, j));
    }
    if (with_labels) {
      out += '\t';
      out += table.labels[static_cast<std::size_t>(i)];
    }
    out += '\n';
  }
  write_file_atomic(args.out_path, out);
  std::cout << "wrote " << features.rows() << " x " << features.cols()
            << " feature matrix to " << args.out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normalized-difference polynomial index discovery toolkit"};
  app.require_subcommand(1);

  DiscoverArgs discover_args;
  auto* discover_cmd = app.add_subcommand(
      "discover", "run selection sweep + SVM training end to end from a JSON config");
  discover_cmd->add_option("--config", discover_args.config_path, "JSON configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  discover_cmd->add_option("--out", discover_args.out_dir, "output directory for artifacts")
      ->required();
  discover_args.opt_seed =
      discover_cmd->add_option("--seed", discover_args.seed, "override the master seed");
  discover_args.opt_k_max = discover_cmd->add_option(
      "--k-max", discover_args.k_max, "override the sweep upper bound on k");
  discover_args.opt_epsilon = discover_cmd->add_option(
      "--epsilon", discover_args.epsilon, "override the sweet-spot threshold");
  discover_args.opt_methods = discover_cmd->add_option(
      "--methods", discover_args.methods,
      "comma-separated selection methods (select_k_best,rfe,l1_svm)");
  discover_args.opt_split = discover_cmd->add_option(
      "--split", discover_args.split,
      "override the split strategy (random|year|spatial|spatiotemporal)");
  discover_cmd->add_flag("--cross-validate", discover_args.cross_validate_folds,
                         "also run every usable fold and write cv_report.json");
  discover_cmd->callback([&] { run_discover(discover_args); });

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "score a saved model against labeled samples");
  evaluate_cmd->add_option("--model", evaluate_args.model_path, "model document")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--samples", evaluate_args.samples_path, "CSV sample file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_args.opt_schema = evaluate_cmd->add_option(
      "--schema", evaluate_args.schema_path,
      "schema JSON file (same shape as the config's schema block)");
  evaluate_args.opt_bands = evaluate_cmd->add_option(
      "--bands", evaluate_args.bands, "comma-separated band column names");
  evaluate_cmd->add_option("--label-column", evaluate_args.label_column,
                           "label column name (with --bands; default 'label')");
  evaluate_args.opt_positive = evaluate_cmd->add_option(
      "--label-positive", evaluate_args.positive, "positive class label (default: model's)");
  evaluate_args.opt_negative = evaluate_cmd->add_option(
      "--label-negative", evaluate_args.negative, "negative class label (default: model's)");
  evaluate_cmd
      ->add_option("--negative-policy", evaluate_args.negative_policy,
                   "negative reflectance handling (with --bands)")
      ->check(CLI::IsMember({"reject", "clamp"}));
  evaluate_cmd->add_option("--scale-factor", evaluate_args.scale_factor,
                           "divide raw cells by this (with --bands)");
  evaluate_cmd->add_option("--out", evaluate_args.out_path,
                           "machine-readable report path (default evaluation.json)");
  evaluate_cmd->callback([&] { run_evaluate(evaluate_args); });

  ExportArgs export_args;
  auto* export_cmd = app.add_subcommand("export-expression",
                                        "print a model as one arithmetic expression");
  export_cmd->add_option("--model", export_args.model_path, "model document")
      ->required()
      ->check(CLI::ExistingFile);
  export_cmd
      ->add_option("--dialect", export_args.dialect,
                   "expression dialect (generic-infix|earth-engine)")
      ->capture_default_str();
  export_args.opt_bands = export_cmd->add_option(
      "--bands", export_args.bands, "comma-separated band names (default B1..Bn)");
  export_cmd->callback([&] { run_export(export_args); });

  EmbedArgs embed_args;
  auto* embed_cmd =
      app.add_subcommand("embed", "write pixel-level or class-level embeddings");
  embed_cmd->add_option("--mode", embed_args.mode, "pixel or class")
      ->required()
      ->check(CLI::IsMember({"pixel", "class"}));
  embed_cmd->add_option("--model", embed_args.model_path,
                        "model document (class mode)");
  embed_cmd->add_option("--samples", embed_args.samples_path, "CSV sample file (pixel mode)");
  embed_cmd->add_option("--bands", embed_args.bands,
                        "comma-separated band column names (pixel mode)");
  embed_cmd->add_option("--degree", embed_args.degree, "feature space degree (pixel mode)")
      ->check(CLI::Range(1, 2));
  embed_cmd->add_option("--epsilon", embed_args.epsilon,
                        "normalized-difference denominator epsilon (pixel mode)");
  embed_cmd
      ->add_option("--negative-policy", embed_args.negative_policy,
                   "negative reflectance handling (pixel mode)")
      ->check(CLI::IsMember({"reject", "clamp"}));
  embed_cmd->add_option("--scale-factor", embed_args.scale_factor,
                        "divide raw cells by this (pixel mode)");
  embed_args.opt_out =
      embed_cmd->add_option("--out", embed_args.out_path, "output path (default stdout)");
  embed_cmd->callback([&] { run_embed(embed_args); });

  SynthArgs synth_args;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate the planted-product synthetic scene");
  synth_cmd->add_option("--out", synth_args.out_path, "output CSV path")->required();
  synth_cmd->add_option("--count", synth_args.count, "number of samples")
      ->capture_default_str();
  synth_cmd->add_option("--bands", synth_args.bands, "number of bands")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_args.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--noise", synth_args.noise, "additive Gaussian band noise")
      ->capture_default_str();
  synth_cmd
      ->add_option("--separation", synth_args.separation,
                   "class-mean gap of the planted product")
      ->capture_default_str();
  synth_cmd->add_option("--label-positive", synth_args.positive, "positive class label")
      ->capture_default_str();
  synth_cmd->add_option("--label-negative", synth_args.negative, "negative class label")
      ->capture_default_str();
  synth_cmd->callback([&] { run_synth(synth_args); });

  ExpandArgs expand_args;
  auto* expand_cmd = app.add_subcommand(
      "expand", "export the full feature matrix for a sample file (TSV)");
  expand_cmd->add_option("--samples", expand_args.samples_path, "CSV sample file")
      ->required()
      ->check(CLI::ExistingFile);
  expand_cmd->add_option("--bands", expand_args.bands, "comma-separated band column names")
      ->required();
  expand_cmd->add_option("--degree", expand_args.degree, "feature space degree")
      ->check(CLI::Range(1, 2));
  expand_cmd->add_option("--epsilon", expand_args.epsilon,
                         "normalized-difference denominator epsilon");
  expand_cmd->add_option("--label-column", expand_args.label_column,
                         "pass this label column through to the output");
  expand_cmd->add_option("--label-positive", expand_args.positive,
                         "positive class label (with --label-column)");
  expand_cmd->add_option("--label-negative", expand_args.negative,
                         "negative class label (with --label-column)");
  expand_cmd
      ->add_option("--negative-policy", expand_args.negative_policy,
                   "negative reflectance handling")
      ->check(CLI::IsMember({"reject", "clamp"}));
  expand_cmd->add_option("--scale-factor", expand_args.scale_factor,
                         "divide raw cells by this");
  expand_cmd->add_option("--out", expand_args.out_path, "output TSV path")->required();
  expand_cmd->callback([&] { run_expand(expand_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "sparsetree/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "sparsetree/acceptance.hpp"
#include "sparsetree/config.hpp"
#include "sparsetree/diagnostics.hpp"
#include "sparsetree/green.hpp"
#include "sparsetree/moments.hpp"
#include "sparsetree/records.hpp"
#include "sparsetree/segmentation.hpp"
#include "sparsetree/stats.hpp"

namespace sparsetree::cli {

namespace {

using nlohmann::json;

struct Context {
  std::string command;
  ExperimentConfig config;
  std::ostream& out;
  std::ostream& err;
  RecordWriter* records = nullptr;
  CsvTable csv;
};

std::vector<VertexId> descending_ray(const TreeBall& ball, VertexId source) {
  ball.require(source);
  std::vector<VertexId> ray{source};
  while (ball.child_count(ray.back()) > 0) ray.push_back(*ball.children(ray.back()).begin());
  return ray;
}

std::vector<VertexId> resolve_targets(const ExperimentConfig& c, const TreeBall& ball) {
  if (c.ray_targets) return descending_ray(ball, c.source);
  for (auto t : c.targets) ball.require(t);
  return c.targets;
}

json estimate_json(const MomentEstimate& e) {
  return {{"target", e.target}, {"distance", e.distance}, {"mean", e.mean},
          {"std_error", e.std_error}, {"samples", e.samples}};
}

json fit_json(const DecayFit& f) {
  return {{"rate", f.rate},
          {"prefactor", f.prefactor},
          {"r_squared", f.r_squared},
          {"min_distance", f.min_distance},
          {"max_distance", f.max_distance},
          {"points_used", f.points_used},
          {"excluded", f.excluded},
          {"no_decay", f.no_decay}};
}

std::shared_ptr<const TreeBall> make_ball(const ExperimentConfig& c) {
  return std::make_shared<const TreeBall>(TreeBall::build(c.tree));
}

int cmd_tree(Context& ctx) {
  const auto& c = ctx.config;
  json payload;
  payload["vertices"] = ball_size_exact(c.tree, c.tree.radius);
  payload["junction_depths"] = junction_depths(c.tree, c.tree.radius);
  try {
    const auto ball = TreeBall::build(c.tree);
    std::size_t junctions = 0;
    for (VertexId x = 0; x < ball.size(); ++x) junctions += ball.is_junction(x) ? 1 : 0;
    payload["materialized"] = true;
    payload["built_vertices"] = ball.size();
    payload["junction_vertices"] = junctions;
  } catch (const BallTooLarge&) {
    payload["materialized"] = false;
  }
  if (c.tree.gamma > 1.0) {
    payload["dimension_limit"] = dimension_limit(c.tree);
    if (c.tree.radius >= 2) payload["dimension_estimate"] = dimension_estimate(c.tree, c.tree.radius);
  }
  ctx.records->write("tree_stats", payload);

  if (c.tree.gamma > 1.0) {
    json rows = json::array();
    ctx.csv.header = {"radius", "ball_size", "dimension_estimate"};
    for (std::int64_t r = 10; r <= 1'000'000; r *= 10) {
      try {
        const auto size = ball_size_exact(c.tree, r);
        const auto dim = dimension_estimate(c.tree, r);
        rows.push_back({{"radius", r}, {"ball_size", size}, {"dimension_estimate", dim}});
        ctx.csv.rows.push_back({static_cast<double>(r), static_cast<double>(size), dim});
      } catch (const std::overflow_error&) {
        break;
      }
    }
    ctx.records->write("dimension_table", {{"rows", rows}, {"limit", dimension_limit(c.tree)}});
  }
  return kExitOk;
}

int cmd_green(Context& ctx) {
  const auto& c = ctx.config;
  const auto ball = make_ball(c);
  const auto targets = resolve_targets(c, *ball);
  const auto v = sample_potential(c.disorder, *ball, c.realization);
  const auto h = assemble(ball, c.laplacian, v, c.disorder.lambda);
  const auto column = resolvent_column(h, c.source, c.z);
  ctx.csv.header = {"distance", "re", "im", "abs"};
  for (auto t : targets) {
    const auto g = column[t];
    const auto d = ball->distance(c.source, t);
    ctx.records->write("green_entry", {{"x", c.source}, {"y", t}, {"distance", d},
                                       {"re", g.real()}, {"im", g.imag()}, {"abs", std::abs(g)}});
    ctx.csv.rows.push_back({static_cast<double>(d), g.real(), g.imag(), std::abs(g)});
  }
  return kExitOk;
}

int cmd_moments(Context& ctx) {
  const auto& c = ctx.config;
  const auto ball = make_ball(c);
  MomentRequest req;
  req.tree = c.tree;
  req.kind = c.laplacian;
  req.disorder = c.disorder;
  req.source = c.source;
  req.targets = resolve_targets(c, *ball);
  req.z = c.z;
  req.s = c.s;
  req.samples = c.samples;
  req.validate();
  const auto estimates = fractional_moment(ball, req, c.workers);
  ctx.csv.header = {"distance", "mean", "std_error"};
  for (const auto& e : estimates) {
    ctx.records->write("moment_estimate", estimate_json(e));
    ctx.csv.rows.push_back({static_cast<double>(e.distance), e.mean, e.std_error});
  }
  try {
    auto payload = fit_json(fit_decay(estimates));
    payload["segmentation_rate"] = segmentation_decay_rate(c.L0);
    ctx.records->write("decay_fit", payload);
  } catch (const std::invalid_argument& e) {
    ctx.err << "decay fit skipped: " << e.what() << '\n';
  }
  return kExitOk;
}

int cmd_minami(Context& ctx) {
  const auto& c = ctx.config;
  MinamiRequest req;
  req.length = c.length;
  req.kind = c.laplacian;
  req.disorder = c.disorder;
  req.s = c.s;
  req.z = c.z;
  req.samples = c.samples;
  const auto result = minami_scan(req, c.workers);
  ctx.csv.header = {"distance", "mean", "std_error"};
  for (const auto& e : result.estimates) {
    ctx.records->write("minami_estimate", estimate_json(e));
    ctx.csv.rows.push_back({static_cast<double>(e.distance), e.mean, e.std_error});
  }
  ctx.records->write("decay_fit", fit_json(result.fit));
  return kExitOk;
}

int cmd_probe(Context& ctx) {
  const auto& c = ctx.config;
  BoundProbeRequest req;
  req.tree = c.tree;
  req.kind = c.laplacian;
  req.region_size = c.region_size;
  req.disorder = c.disorder;
  req.s = c.s;
  req.energy = c.z.energy;
  req.etas = c.etas;
  req.samples = c.samples;
  req.pairs = c.pairs;
  const auto result = bound_probe(req, c.workers);
  ctx.csv.header = {"eta", "max_mean"};
  for (const auto& p : result.points) {
    json estimates = json::array();
    for (const auto& e : p.estimates) estimates.push_back(estimate_json(e));
    ctx.records->write("bound_probe_point", {{"eta", p.eta}, {"max_mean", p.max_mean}, {"estimates", estimates}});
    ctx.csv.rows.push_back({p.eta, p.max_mean});
  }
  json pairs = json::array();
  for (const auto& [x, y] : result.pairs) pairs.push_back({x, y});
  ctx.records->write("bound_probe_summary",
                     {{"region", result.region}, {"pairs", pairs}, {"ratio_smallest_to_largest_eta", result.ratio}});
  return kExitOk;
}

int cmd_segment(Context& ctx) {
  const auto& c = ctx.config;
  const auto ball = make_ball(c);
  const auto result = segment_path(*ball, c.source, c.target, c.L0);
  const auto report = verify_segmentation(*ball, result, c.target);
  json pairs = json::array();
  for (const auto& p : result.pairs) {
    pairs.push_back({{"x", p.x}, {"v", p.v}, {"x_offset", p.x_offset}, {"v_offset", p.v_offset}});
  }
  ctx.records->write("segmentation", {{"pairs", pairs},
                                      {"l", result.count()},
                                      {"L0", result.L0},
                                      {"path_length", result.path_length},
                                      {"segmentation_rate", segmentation_decay_rate(result.L0)}});
  json props = json::array();
  for (std::size_t i = 0; i < report.properties.size(); ++i) {
    props.push_back({{"property", i + 1}, {"passed", report.properties[i].passed},
                     {"witness", report.properties[i].witness}});
  }
  ctx.records->write("segmentation_report", {{"well_formed", report.well_formed},
                                             {"structure_witness", report.structure_witness},
                                             {"single_junction", report.single_junction},
                                             {"properties", props},
                                             {"all_passed", report.all_passed()}});
  return report.all_passed() ? kExitOk : kExitVerificationFailed;
}

int cmd_spectrum(Context& ctx) {
  const auto& c = ctx.config;
  const auto ball = make_ball(c);
  ball->require(c.target);
  const auto v = sample_potential(c.disorder, *ball, c.realization);
  const auto h = assemble(ball, c.laplacian, v, c.disorder.lambda);
  const auto dec = spectrum_full(h);
  const auto metrics = eigen_metrics(dec, *ball);

  std::vector<double> iprs;
  ctx.csv.header = {"energy", "ipr", "decay_rate"};
  for (std::size_t n = 0; n < metrics.size(); ++n) {
    const auto& m = metrics[n];
    const double e = dec.eigenvalues(static_cast<Eigen::Index>(n));
    iprs.push_back(m.ipr);
    ctx.records->write("eigen_metrics", {{"index", n}, {"energy", e}, {"ipr", m.ipr}, {"center", m.center},
                                         {"decay_rate", m.decay_rate}, {"decay_r_squared", m.decay_r_squared}});
    ctx.csv.rows.push_back({e, m.ipr, m.decay_rate});
  }
  std::vector<double> sorted = iprs;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);

  const auto atoms = spectral_measure(dec, c.target);
  const SpectralPoint probe{0.0, 1.0};
  const double stieltjes = std::abs(stieltjes_transform(atoms, probe.z()) - green_entry(h, c.target, c.target, probe));
  json atom_list = json::array();
  double weight = 0.0;
  for (const auto& a : atoms) {
    atom_list.push_back({a.energy, a.weight});
    weight += a.weight;
  }
  ctx.records->write("spectral_measure", {{"site", c.target}, {"atoms", atom_list}, {"total_weight", weight}});

  json summary{{"vertices", ball->size()},
               {"median_ipr", median},
               {"delocalized_ipr", 1.0 / static_cast<double>(ball->size())},
               {"stieltjes_residual_at_i", stieltjes}};
  CompensatedSum trace;
  for (double e : dec.eigenvalues) trace.add(e);
  CompensatedSum diag;
  for (double d : h.diagonal()) diag.add(d);
  summary["trace_residual"] = std::abs(trace.value() - diag.value());
  if (metrics.size() >= kMinLevels) {
    const auto spacing = spacing_statistics(std::span<const double>(dec.eigenvalues.data(), metrics.size()));
    summary["ks_distance_to_exponential"] = spacing.ks_distance;
  }
  ctx.records->write("spectrum_summary", summary);
  return kExitOk;
}

int cmd_verify(Context& ctx) {
  AcceptanceOptions options;
  options.quick = ctx.config.quick;
  options.workers = ctx.config.workers;
  bool all = true;
  const auto results = run_acceptance(options, [&](const CriterionResult& r) {
    ctx.out << format_result_line(r) << std::endl;
  });
  for (const auto& r : results) {
    all = all && r.passed;
    if (ctx.records) {
      ctx.records->write("acceptance_criterion", {{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                                                  {"detail", r.detail}, {"time_limit_seconds", r.time_limit}});
    }
  }
  ctx.out << (all ? "all criteria passed" : "one or more criteria FAILED") << std::endl;
  return all ? kExitOk : kExitVerificationFailed;
}

const std::map<std::string, std::pair<std::string, std::function<int(Context&)>>>& commands() {
  static const std::map<std::string, std::pair<std::string, std::function<int(Context&)>>> table{
      {"tree", {"ball statistics and dimension table", cmd_tree}},
      {"green", {"Green function entries G(source, target; z) for one realization", cmd_green}},
      {"moments", {"fractional-moment scan over disorder with exponential decay fit", cmd_moments}},
      {"minami", {"one-dimensional fractional-moment scan on segments of Z", cmd_minami}},
      {"probe", {"boundedness of restricted fractional moments as eta decreases", cmd_probe}},
      {"segment", {"path segmentation and its property report", cmd_segment}},
      {"spectrum", {"finite-volume spectral diagnostics", cmd_spectrum}},
      {"verify", {"run the acceptance suite", cmd_verify}},
  };
  return table;
}

std::filesystem::path default_output(const std::string& command) {
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
    return std::filesystem::path(dir) / (command + ".jsonl");
  }
  return {};
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anderson model laboratory on sparse trees"};
  app.require_subcommand(1);
  std::string config_file;
  std::map<std::string, std::string> flag_values;
  bool quick_flag = false;

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands()) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_file, "flat key = value config file (flags override it)");
    for (const auto& key : config_keys()) {
      if (key == "quick") continue;
      sub->add_option("--" + key, flag_values[key]);
    }
    sub->add_flag("--quick", quick_flag, "reduced instance counts (verify)");
    subs[name] = sub;
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }

  ExperimentConfig config;
  try {
    RawConfig raw = config_file.empty() ? RawConfig{} : read_config_file(config_file);
    auto* sub = subs.at(command);
    for (const auto& key : config_keys()) {
      if (key == "quick") continue;
      if (sub->count("--" + key) > 0) raw[key] = flag_values[key];
    }
    if (quick_flag) raw["quick"] = "true";
    config = ExperimentConfig::from_raw(raw);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  }

  auto output = config.output.empty() ? default_output(command) : config.output;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) {
      err << "cannot open output " << output << '\n';
      return kExitUsage;
    }
  }
  const bool records_to_stdout = output.empty() && command != "verify";
  std::unique_ptr<RecordWriter> writer;
  if (!output.empty()) {
    writer = std::make_unique<RecordWriter>(file, config.to_json());
  } else if (records_to_stdout) {
    writer = std::make_unique<RecordWriter>(out, config.to_json());
  }

  Context ctx{command, config, out, err, writer.get(), {}};
  const auto started = std::chrono::steady_clock::now();
  const auto started_at = timestamp_utc();
  int code = kExitOk;
  try {
    code = commands().at(command).second(ctx);
  } catch (const std::invalid_argument& e) {
    err << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << command << ": " << e.what() << '\n';
    return kExitVerificationFailed;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (!output.empty()) {
    file.close();
    write_metadata(output, {{"command", command},
                            {"started_at", started_at},
                            {"wall_seconds", seconds},
                            {"workers", resolve_workers(config.workers)},
                            {"records", writer ? writer->written() : 0},
                            {"exit_code", code}});
  }
  if (!config.csv.empty() && !ctx.csv.header.empty()) ctx.csv.write(config.csv);
  return code;
}

}  // namespace sparsetree::cli

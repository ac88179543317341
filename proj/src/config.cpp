#include "sparsetree/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sparsetree {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (t.empty()) throw ConfigError("empty element in list '" + value + "'");
    out.push_back(std::move(t));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

Distribution make_distribution(const std::string& name, const std::vector<double>& params) {
  auto need_two = [&] {
    if (params.size() != 2) {
      throw ConfigError("dist_params: " + name + " takes exactly two parameters");
    }
  };
  if (name == "uniform") {
    if (params.empty()) return UniformDisorder{};
    need_two();
    return UniformDisorder{params[0], params[1]};
  }
  if (name == "gaussian") {
    if (params.empty()) return GaussianDisorder{};
    need_two();
    return GaussianDisorder{params[0], params[1]};
  }
  if (name == "cauchy") {
    if (params.empty()) return CauchyDisorder{};
    need_two();
    return CauchyDisorder{params[0], params[1]};
  }
  if (name == "bernoulli") {
    throw ConfigError(
        "distribution: bernoulli disorder is rejected. It has no bounded density, and "
        "localization for the Anderson-Bernoulli model on these trees is an open problem");
  }
  throw ConfigError("distribution: unknown distribution '" + name +
                    "' (expected uniform, gaussian or cauchy)");
}

nlohmann::json distribution_json(const Distribution& d) {
  return std::visit(
      [](const auto& dist) -> nlohmann::json {
        using T = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<T, UniformDisorder>) {
          return {{"name", "uniform"}, {"params", {dist.lower, dist.upper}}};
        } else if constexpr (std::is_same_v<T, GaussianDisorder>) {
          return {{"name", "gaussian"}, {"params", {dist.mean, dist.sd}}};
        } else {
          return {{"name", "cauchy"}, {"params", {dist.location, dist.scale}}};
        }
      },
      d);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "k",       "gamma",  "radius", "laplacian",   "distribution", "dist_params", "lambda",
      "s",       "energy", "eta",    "samples",     "seed",         "source",      "targets",
      "target",  "realization", "L0", "length",     "region_size",  "etas",        "pairs",
      "quick",   "output", "csv",    "workers"};
  return keys;
}

RawConfig parse_config_text(std::string_view text, std::string_view origin) {
  RawConfig raw;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const auto where = std::string(origin) + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
    if (raw.contains(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    raw.emplace(std::move(key), std::move(value));
  }
  return raw;
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

ExperimentConfig ExperimentConfig::from_raw(const RawConfig& raw) {
  const auto& keys = config_keys();
  for (const auto& [key, value] : raw) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  ExperimentConfig c;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  auto id = [&](const char* key, const std::string& v) { return parse_integer<VertexId>(key, v); };

  if (auto v = get("k")) c.tree.k = parse_integer<int>("k", *v);
  if (auto v = get("gamma")) c.tree.gamma = parse_real("gamma", *v);
  if (auto v = get("radius")) c.tree.radius = parse_integer<std::int64_t>("radius", *v);
  if (auto v = get("laplacian")) {
    try {
      c.laplacian = parse_laplacian_kind(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("laplacian: ") + e.what());
    }
  }
  {
    const std::string name = get("distribution") ? *get("distribution") : "uniform";
    std::vector<double> params;
    if (auto v = get("dist_params")) {
      for (const auto& item : split_list(*v)) params.push_back(parse_real("dist_params", item));
    }
    c.disorder.distribution = make_distribution(name, params);
  }
  if (auto v = get("lambda")) c.disorder.lambda = parse_real("lambda", *v);
  if (auto v = get("seed")) c.disorder.master_seed = parse_integer<std::uint64_t>("seed", *v);
  if (auto v = get("s")) c.s = parse_real("s", *v);
  if (auto v = get("energy")) c.z.energy = parse_real("energy", *v);
  if (auto v = get("eta")) c.z.eta = parse_real("eta", *v);
  if (auto v = get("samples")) c.samples = parse_integer<std::size_t>("samples", *v);
  if (auto v = get("source")) c.source = id("source", *v);
  if (auto v = get("targets")) {
    if (*v == "ray") {
      c.ray_targets = true;
    } else {
      c.ray_targets = false;
      for (const auto& item : split_list(*v)) c.targets.push_back(id("targets", item));
    }
  }
  if (auto v = get("target")) c.target = id("target", *v);
  if (auto v = get("realization")) c.realization = parse_integer<std::uint64_t>("realization", *v);
  if (auto v = get("L0")) c.L0 = parse_integer<int>("L0", *v);
  if (auto v = get("length")) c.length = parse_integer<std::size_t>("length", *v);
  if (auto v = get("region_size")) c.region_size = parse_integer<std::size_t>("region_size", *v);
  if (auto v = get("etas")) {
    c.etas.clear();
    for (const auto& item : split_list(*v)) c.etas.push_back(parse_real("etas", item));
  }
  if (auto v = get("pairs")) c.pairs = parse_integer<std::size_t>("pairs", *v);
  if (auto v = get("quick")) c.quick = parse_bool("quick", *v);
  if (auto v = get("output")) c.output = *v;
  if (auto v = get("csv")) c.csv = *v;
  if (auto v = get("workers")) c.workers = parse_integer<unsigned>("workers", *v);

  auto check = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(key) + ": " + e.what());
    }
  };
  check("tree", [&] { c.tree.validate(); });
  check("disorder", [&] { c.disorder.validate(); });
  check("eta", [&] { c.z.validate(); });
  if (!(c.s > 0.0 && c.s < 1.0)) {
    throw ConfigError("s: the moment exponent must satisfy 0 < s < 1, got " + std::to_string(c.s));
  }
  if (c.samples < 1) throw ConfigError("samples: must be >= 1");
  if (c.L0 < 1) throw ConfigError("L0: must be >= 1");
  if (c.length < 3) throw ConfigError("length: must be >= 3");
  if (c.region_size < 1) throw ConfigError("region_size: must be >= 1");
  if (c.pairs < 1) throw ConfigError("pairs: must be >= 1");
  for (std::size_t i = 0; i < c.etas.size(); ++i) {
    check("etas", [&] { SpectralPoint{c.z.energy, c.etas[i]}.validate(); });
    if (i > 0 && !(c.etas[i] < c.etas[i - 1])) throw ConfigError("etas: must be strictly descending");
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["k"] = tree.k;
  j["gamma"] = tree.gamma;
  j["radius"] = tree.radius;
  j["laplacian"] = std::string(to_string(laplacian));
  j["distribution"] = distribution_json(disorder.distribution);
  j["lambda"] = disorder.lambda;
  j["seed"] = disorder.master_seed;
  j["s"] = s;
  j["energy"] = z.energy;
  j["eta"] = z.eta;
  j["samples"] = samples;
  j["source"] = source;
  if (ray_targets) {
    j["targets"] = "ray";
  } else {
    j["targets"] = targets;
  }
  j["target"] = target;
  j["realization"] = realization;
  j["L0"] = L0;
  j["length"] = length;
  j["region_size"] = region_size;
  j["etas"] = etas;
  j["pairs"] = pairs;
  j["quick"] = quick;
  return j;
}

}  // namespace sparsetree

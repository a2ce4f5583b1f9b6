#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace leadsim {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const char* key : required) {
    if (!obj.contains(key)) config_error(where + " is missing \"" + key + "\"");
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : required) known = known || it.key() == key;
    for (const char* key : optional) known = known || it.key() == key;
    if (!known) config_error(where + " has unknown key \"" + it.key() + "\"");
  }
}

double require_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    config_error(where + "." + std::string(key) + " must be a number");
  }
  return obj[key].get<double>();
}

LeadTimeSpec leadtime_from_json(const json& lt) {
  if (!lt.is_object() || !lt.contains("kind") || !lt["kind"].is_string()) {
    config_error("system.leadtime must be an object with a \"kind\" string");
  }
  const std::string kind = lt["kind"].get<std::string>();
  try {
    if (kind == "exponential") {
      require_keys(lt, "system.leadtime", {"kind", "mean"}, {});
      return LeadTimeSpec::exponential(require_number(lt, "system.leadtime", "mean"));
    }
    if (kind == "shifted_exponential") {
      require_keys(lt, "system.leadtime", {"kind", "shift", "mean"}, {});
      return LeadTimeSpec::shifted_exponential(require_number(lt, "system.leadtime", "shift"),
                                               require_number(lt, "system.leadtime", "mean"));
    }
    if (kind == "uniform") {
      require_keys(lt, "system.leadtime", {"kind", "lo", "hi"}, {});
      return LeadTimeSpec::uniform(require_number(lt, "system.leadtime", "lo"),
                                   require_number(lt, "system.leadtime", "hi"));
    }
    if (kind == "pareto") {
      require_keys(lt, "system.leadtime", {"kind", "q", "tau"}, {});
      return LeadTimeSpec::pareto(require_number(lt, "system.leadtime", "q"),
                                  require_number(lt, "system.leadtime", "tau"));
    }
    if (kind == "deterministic") {
      require_keys(lt, "system.leadtime", {"kind", "d"}, {});
      return LeadTimeSpec::deterministic(require_number(lt, "system.leadtime", "d"));
    }
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
  config_error("system.leadtime.kind \"" + kind + "\" is not one of exponential, "
               "shifted_exponential, uniform, pareto, deterministic");
}

}  // namespace

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Gbs: return "gbs";
    case PolicyKind::Cbs: return "cbs";
    case PolicyKind::Artificial: return "artificial";
  }
  return "?";
}

ExperimentConfig::ExperimentConfig(json doc) : doc_(std::move(doc)) {}

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) config_error("not valid JSON");
  validate(doc);
  return ExperimentConfig(std::move(doc));
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void ExperimentConfig::validate(const json& doc) {
  require_keys(doc, "document", {"system", "cost", "policy"}, {"protocol", "output", "mdp"});

  const json& system = doc["system"];
  require_keys(system, "system", {"r", "leadtime"}, {"beta"});
  const double r = require_number(system, "system", "r");
  const LeadTimeSpec lt = leadtime_from_json(system["leadtime"]);
  try {
    if (system.contains("beta")) {
      SystemParams check(r, lt, require_number(system, "system", "beta"));
      (void)check;
    } else {
      SystemParams check(r, lt);
      (void)check;
    }
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }

  const json& cost = doc["cost"];
  require_keys(cost, "cost", {"h", "theta"}, {});
  try {
    CostParams check(require_number(cost, "cost", "h"), require_number(cost, "cost", "theta"));
    (void)check;
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }

  const json& policy = doc["policy"];
  require_keys(policy, "policy", {"kind"}, {"gamma", "f", "x_star", "base", "rounding"});
  if (policy.contains("rounding")) {
    if (!policy["rounding"].is_string() ||
        (policy["rounding"].get<std::string>() != "ceil" &&
         policy["rounding"].get<std::string>() != "floor")) {
      config_error("policy.rounding must be \"ceil\" or \"floor\"");
    }
  }
  if (!policy["kind"].is_string()) config_error("policy.kind must be a string");
  const std::string kind = policy["kind"].get<std::string>();
  if (kind != "gbs" && kind != "cbs" && kind != "artificial") {
    config_error("policy.kind must be gbs, cbs or artificial");
  }
  if (kind == "gbs" || kind == "artificial") {
    const double gamma = require_number(policy, "policy", "gamma");
    if (!(gamma > 0.0)) config_error("policy.gamma must be > 0");
    if (policy.contains("f")) {
      if (policy["f"].is_string()) {
        const std::string f = policy["f"].get<std::string>();
        if (f != "inf" && f != "auto") config_error("policy.f must be a number, \"inf\" or \"auto\"");
      } else if (!policy["f"].is_number() || !(policy["f"].get<double>() > 0.0)) {
        config_error("policy.f must be a positive number, \"inf\" or \"auto\"");
      }
    }
    if (policy.contains("x_star") && !policy["x_star"].is_number()) {
      if (!policy["x_star"].is_string() || policy["x_star"].get<std::string>() != "auto") {
        config_error("policy.x_star must be a number or \"auto\"");
      }
    }
  }
  if (policy.contains("base") && !policy["base"].is_number_integer()) {
    config_error("policy.base must be an integer");
  }

  if (doc.contains("protocol")) {
    const json& protocol = doc["protocol"];
    require_keys(protocol, "protocol", {}, {"horizon", "warmup", "replications", "seed"});
    Protocol p;
    if (protocol.contains("horizon")) p.horizon = require_number(protocol, "protocol", "horizon");
    if (protocol.contains("warmup")) p.warmup = require_number(protocol, "protocol", "warmup");
    if (protocol.contains("replications")) {
      if (!protocol["replications"].is_number_integer()) {
        config_error("protocol.replications must be an integer");
      }
      p.replications = protocol["replications"].get<int>();
    }
    if (protocol.contains("seed") && !protocol["seed"].is_number_unsigned() &&
        !protocol["seed"].is_number_integer()) {
      config_error("protocol.seed must be an integer");
    }
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      config_error(e.what());
    }
  }

  if (doc.contains("output")) {
    const json& output = doc["output"];
    require_keys(output, "output", {}, {"path", "format"});
    if (output.contains("path") && !output["path"].is_string()) {
      config_error("output.path must be a string");
    }
    if (output.contains("format")) {
      if (!output["format"].is_string()) config_error("output.format must be a string");
      const std::string fmt = output["format"].get<std::string>();
      if (fmt != "csv" && fmt != "json") config_error("output.format must be csv or json");
    }
  }

  if (doc.contains("mdp")) {
    const json& mdp = doc["mdp"];
    require_keys(mdp, "mdp", {}, {"kappa0", "kappa_max", "stabilization", "g_tol"});
    for (const char* key : {"kappa0", "kappa_max", "stabilization", "g_tol"}) {
      if (mdp.contains(key) && (!mdp[key].is_number() || !(mdp[key].get<double>() > 0.0))) {
        config_error(std::string("mdp.") + key + " must be a positive number");
      }
    }
  }
}

void ExperimentConfig::set(const std::string& dotted_key, const std::string& value) {
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;  // plain string

  json updated = doc_;
  json* node = &updated;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot - start);
    if (part.empty()) config_error("empty key segment in \"" + dotted_key + "\"");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
  validate(updated);
  doc_ = std::move(updated);
}

std::string ExperimentConfig::to_json() const { return doc_.dump(2); }

ResolvedConfig ExperimentConfig::resolve() const {
  const json& doc = doc_;
  const LeadTimeSpec lt = leadtime_from_json(doc["system"]["leadtime"]);
  SystemParams sys(doc["system"]["r"].get<double>(), lt);
  CostParams cost(doc["cost"]["h"].get<double>(), doc["cost"]["theta"].get<double>());

  Protocol protocol;
  if (doc.contains("protocol")) {
    const json& p = doc["protocol"];
    if (p.contains("horizon")) protocol.horizon = p["horizon"].get<double>();
    if (p.contains("warmup")) protocol.warmup = p["warmup"].get<double>();
    if (p.contains("replications")) protocol.replications = p["replications"].get<int>();
    if (p.contains("seed")) protocol.seed = p["seed"].get<std::uint64_t>();
  }

  const json& policy = doc["policy"];
  const std::string kind = policy["kind"].get<std::string>();

  ResolvedConfig out{SimConfig{sys, cost, GbsParams{}, protocol}, PolicyKind::Gbs,
                     0.0,  0.0,  0.0, -1, std::string{}, std::string{"csv"}};
  if (kind == "cbs") {
    out.kind = PolicyKind::Cbs;
    out.cbs_base = policy.contains("base") ? policy["base"].get<long>()
                                           : choose_cbs_base(cost, sys);
    out.sim.policy = GbsParams::cbs(out.cbs_base, sys);
  } else {
    out.kind = kind == "gbs" ? PolicyKind::Gbs : PolicyKind::Artificial;
    const double gamma = policy["gamma"].get<double>();
    double f = std::numeric_limits<double>::infinity();
    if (policy.contains("f")) {
      if (policy["f"].is_number()) {
        f = policy["f"].get<double>();
      } else if (policy["f"].get<std::string>() == "auto") {
        f = std::pow(sys.lead_demand(), 0.75);
      }
    }
    double x_star = 0.0;
    if (!policy.contains("x_star") ||
        (policy["x_star"].is_string() && policy["x_star"].get<std::string>() == "auto")) {
      x_star = choose_xstar(cost, sys, gamma);
    } else {
      x_star = policy["x_star"].get<double>();
    }
    OrderRounding rounding = OrderRounding::Ceil;
    if (policy.contains("rounding") && policy["rounding"].get<std::string>() == "floor") {
      rounding = OrderRounding::Floor;
    }
    out.sim.policy = GbsParams(gamma, f, x_star, rounding);
  }
  out.x_star = out.sim.policy.x_star;
  out.gamma_x_star = out.sim.policy.gamma * out.sim.policy.x_star;
  out.base = out.sim.policy.base(sys);

  if (doc.contains("output")) {
    const json& output = doc["output"];
    if (output.contains("path")) out.out_path = output["path"].get<std::string>();
    if (output.contains("format")) out.format = output["format"].get<std::string>();
  }
  return out;
}

namespace {

const std::map<std::string, std::map<std::string, double>>& preset_gamma_tables() {
  static const std::map<std::string, std::map<std::string, double>> tables = {
      {"table1",
       {{"2", 1.6}, {"10", 2.2}, {"20", 2.4}, {"100", 3.4}, {"200", 4.8}, {"400", 5.6},
        {"600", 5.8}, {"800", 6.8}, {"1000", 6.8}, {"1200", 7.8}, {"1400", 7.8},
        {"1600", 8.6}, {"1800", 8.6}, {"2000", 8.6}}},
      {"table2",
       {{"2", 1.4}, {"10", 1.8}, {"20", 2.2}, {"100", 2.8}, {"200", 3.2}, {"400", 3.8},
        {"600", 4.4}, {"800", 4.4}, {"1000", 4.8}, {"1200", 5.2}, {"1400", 5.4},
        {"1600", 5.0}, {"1800", 5.6}, {"2000", 5.2}}},
      {"table3",
       {{"h9t1", 2.0}, {"h6t1", 2.0}, {"h3t1", 2.0}, {"h1t1", 2.6}, {"h1t3", 2.6},
        {"h1t6", 2.8}, {"h1t9", 3.0}}},
      {"table4",
       {{"2", 1.4}, {"10", 1.6}, {"20", 1.8}, {"100", 2.6}, {"200", 3.2}, {"400", 3.8},
        {"600", 4.0}, {"800", 4.2}, {"1000", 4.4}, {"1200", 5.0}, {"1400", 5.2},
        {"1600", 5.4}, {"1800", 5.4}, {"2000", 5.4}}},
      {"table5",
       {{"2", 1.6}, {"10", 1.8}, {"20", 2.4}, {"100", 3.8}, {"200", 4.6}, {"400", 5.6},
        {"600", 5.8}, {"800", 6.4}, {"1000", 6.8}, {"1200", 7.6}, {"1400", 8.0},
        {"1600", 8.0}, {"1800", 8.2}, {"2000", 8.4}}},
      {"table6",
       {{"2", 1.6}, {"10", 2.2}, {"20", 2.4}, {"100", 3.4}, {"200", 4.8}, {"400", 5.6},
        {"600", 5.8}, {"800", 6.8}, {"1000", 6.8}}},
  };
  return tables;
}

json leadtime_json_for(const std::string& table) {
  if (table == "table2") {
    return json{{"kind", "shifted_exponential"}, {"shift", 0.2}, {"mean", 1.8}};
  }
  if (table == "table4") return json{{"kind", "uniform"}, {"lo", 0.0}, {"hi", 4.0}};
  if (table == "table5") return json{{"kind", "pareto"}, {"q", 3.0}, {"tau", 0.25}};
  return json{{"kind", "exponential"}, {"mean", 2.0}};
}

std::pair<double, double> table3_costs(const std::string& row) {
  static const std::map<std::string, std::pair<double, double>> costs = {
      {"h9t1", {9.0, 1.0}}, {"h6t1", {6.0, 1.0}}, {"h3t1", {3.0, 1.0}}, {"h1t1", {1.0, 1.0}},
      {"h1t3", {1.0, 3.0}}, {"h1t6", {1.0, 6.0}}, {"h1t9", {1.0, 9.0}}};
  const auto it = costs.find(row);
  if (it == costs.end()) config_error("table3 row must be one of h9t1..h1t9");
  return it->second;
}

}  // namespace

double preset_gamma(const std::string& table, const std::string& row) {
  const auto& tables = preset_gamma_tables();
  const auto t = tables.find(table);
  if (t == tables.end()) config_error("unknown preset table \"" + table + "\"");
  const auto r = t->second.find(row);
  if (r == t->second.end()) config_error("unknown row \"" + row + "\" in " + table);
  return r->second;
}

std::vector<std::string> preset_rows(const std::string& table) {
  if (table == "table3") return {"h9t1", "h6t1", "h3t1", "h1t1", "h1t3", "h1t6", "h1t9"};
  std::vector<std::string> rows = {"2",   "10",  "20",   "100",  "200",  "400",  "600",
                                   "800", "1000", "1200", "1400", "1600", "1800", "2000"};
  if (table == "table6") rows.resize(9);
  const auto& tables = preset_gamma_tables();
  if (tables.find(table) == tables.end()) config_error("unknown preset table \"" + table + "\"");
  return rows;
}

ExperimentConfig ExperimentConfig::preset(const std::string& table, const std::string& row) {
  const double gamma = preset_gamma(table, row);

  double r = 0.0;
  double h = 1.0, theta = 1.0;
  if (table == "table3") {
    r = 10.0;  // mean lead-time demand 20 at mean lead time 2
    std::tie(h, theta) = table3_costs(row);
  } else {
    const double lead_demand = std::stod(row);
    r = lead_demand / 2.0;  // all grids use mean lead time 2
  }

  json doc;
  doc["system"] = {{"r", r}, {"leadtime", leadtime_json_for(table)}};
  doc["cost"] = {{"h", h}, {"theta", theta}};
  // The published tables were produced with truncated order quantities.
  doc["policy"] = {{"kind", "gbs"}, {"gamma", gamma}, {"f", "inf"}, {"x_star", "auto"},
                   {"rounding", "floor"}};
  doc["protocol"] = {{"horizon", 800.0}, {"warmup", 200.0}, {"replications", 100}, {"seed", 12345}};
  validate(doc);
  return ExperimentConfig(std::move(doc));
}

}  // namespace leadsim

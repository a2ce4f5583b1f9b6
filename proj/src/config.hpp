#pragma once

#include <string>

#include <json.hpp>

#include "sim.hpp"

namespace leadsim {

enum class PolicyKind { Gbs, Cbs, Artificial };

std::string to_string(PolicyKind kind);

/// Fully resolved experiment: concrete policy parameters plus the derived
/// quantities worth echoing back (x*, gamma*x*, the base level X**).
struct ResolvedConfig {
  SimConfig sim;
  PolicyKind kind = PolicyKind::Gbs;
  double x_star = 0.0;
  double gamma_x_star = 0.0;  // the base-level shift gamma * x*
  double base = 0.0;          // X** = X* + gamma * x*
  long cbs_base = -1;         // integer base level when kind == Cbs
  std::string out_path;
  std::string format = "csv";
};

/// Schema-validated JSON experiment description with sections
/// system / cost / policy / protocol / output.
class ExperimentConfig {
public:
  static ExperimentConfig parse(const std::string& json_text);
  static ExperimentConfig load(const std::string& path);

  /// Named reproductions of the published parameter grids. Tables 1, 2, 4,
  /// 5 and 6 are keyed by mean lead-time demand ("2".."2000"); table 3 by
  /// the cost pair ("h9t1", ..., "h1t9").
  static ExperimentConfig preset(const std::string& table, const std::string& row);

  /// Sets a dotted-path key ("protocol.seed", "policy.gamma") from a string;
  /// numbers, booleans and JSON literals are parsed, anything else is kept
  /// as a string. Re-validates the document.
  void set(const std::string& dotted_key, const std::string& value);

  std::string to_json() const;
  const nlohmann::json& doc() const noexcept { return doc_; }

  ResolvedConfig resolve() const;

private:
  explicit ExperimentConfig(nlohmann::json doc);
  static void validate(const nlohmann::json& doc);

  nlohmann::json doc_;
};

/// Gamma used by the published grid for a given table/row; throws for
/// unknown rows.
double preset_gamma(const std::string& table, const std::string& row);

/// Row keys of a preset table in publication order.
std::vector<std::string> preset_rows(const std::string& table);

}  // namespace leadsim

#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "edgecache/cache_table.hpp"
#include "edgecache/evaluation.hpp"
#include "edgecache/model.hpp"
#include "edgecache/workload.hpp"

namespace edgecache {

/// Malformed configuration or data file. `where` names the offending field
/// (e.g. "workload.zipf_alpha") or the line/column of a syntax error.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Parses JSON text, reporting syntax errors with line and column.
nlohmann::json parse_json(const std::string& text, const std::string& source);
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

DomainConfig domain_from_json(const nlohmann::json& j, const std::string& where = "domain");
nlohmann::json domain_to_json(const DomainConfig& cfg);

WorkloadSpec workload_spec_from_json(const nlohmann::json& j, int mec_count,
                                     const std::string& where = "workload");
SimConfig sim_config_from_json(const nlohmann::json& j, const std::string& where = "simulation");

nlohmann::json workload_to_json(const RequestAggregate& agg);
RequestAggregate workload_from_json(const nlohmann::json& j);

nlohmann::json placement_to_json(const CacheTable& table);
CacheTable placement_from_json(const nlohmann::json& j);

}  // namespace edgecache

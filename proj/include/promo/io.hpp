#ifndef PROMO_IO_HPP
#define PROMO_IO_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "promo/engine.hpp"
#include "promo/lab.hpp"
#include "promo/oracle.hpp"

namespace promo {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kTableFormat = 1;
inline constexpr int kCsvSchema = 1;

Json to_json(const TypeChain& chain);
TypeChain chain_from_json(const Json& j);

Json to_json(const WorkerSpec& spec);
/// Reads a worker. The chain is inline, a file reference {"file": path}
/// resolved against `base`, or a generator {"family": ...}; pi may also be
/// "type" (pi(x) = grid value) and pi or cost a constant.
WorkerSpec spec_from_json(const Json& j, double step, const std::filesystem::path& base = {});

Json to_json(const ContestConfig& cfg);
ContestConfig config_from_json(const Json& j, const std::filesystem::path& base = {});
ContestConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
/// Hash of the canonical JSON of a spec (doubles printed round-trip exact).
std::string spec_hash(const WorkerSpec& spec);
std::string config_hash(const ContestConfig& cfg);

Json to_json(const IndexTable& table);
/// Rebuilds the table for `model` from JSON. Throws ConfigError when the
/// document belongs to another spec or another state set.
IndexTable table_from_json(const Json& j, const WorkerModel& model);

/// Table source backed by `dir`: reads <hash>.json when it matches, refuses
/// stale files and rebuilds them. `log` receives one line per lookup.
TableProvider cached_tables(const std::filesystem::path& dir,
                            std::function<void(const std::string&)> log = {});

Json to_json(const ContestSummary& s);
Json to_json(const ExperimentReport& r);
Json to_json(const EnumerationReport& r, const std::string& instance_hash);
Json to_json(const IrReport& r);

/// "# promo <kind> v<schema>" header line, then a column header.
std::string csv_header(const std::string& kind, const std::vector<std::string>& columns);
std::string report_csv(const ExperimentReport& r);
std::string table_csv(const IndexTable& t);
/// One row per event plus a summary row per trace.
std::string trace_csv(const std::vector<ContestTrace>& traces, long first_replication = 0);

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string version = kToolVersion;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;
};

Json to_json(const RunManifest& m);

/// Writes `text` to `path` through a temporary file, fsyncs and renames.
void write_file_synced(const std::filesystem::path& path, const std::string& text);
/// The document's compact form, or pretty with a trailing newline.
std::string dump(const Json& j);

} // namespace promo

#endif // PROMO_IO_HPP

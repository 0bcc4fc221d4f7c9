#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdsched/core.hpp"
#include "crowdsched/online.hpp"

namespace crowdsched {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Synthetic workload parameters. Phi_i is the total contact time; the
/// instance stores phi_i = Phi_i / 2.
struct SyntheticConfig {
  std::size_t m = 10;
  std::size_t tasks_per_worker = 25;
  Range phi_total_range{1.0, 30.0};
  double alpha_mean = 30.0;
  double alpha_std = 30.0;  // standard deviation, truncated below at 1
  Range beta_range{0.5, 2.0};
  Range gamma_range{0.1, 2.0};
  Range weight_range{1.0, 100.0};  // integer bounds
  std::uint64_t seed = 0;

  std::size_t tasks() const { return m * tasks_per_worker; }
  /// Throws std::invalid_argument on empty, reversed or nonpositive ranges,
  /// non-integer weight bounds or a negative alpha_std.
  void validate() const;
};

/// Field names match the struct; missing fields keep their defaults and
/// unknown ones raise ParseError.
SyntheticConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const SyntheticConfig& config);
SyntheticConfig load_config(const std::filesystem::path& path);

/// p_ij = alpha_j beta_i gamma_ij. Worker i draws Phi_i then beta_i from
/// derive_seed(seed, {0, i}); task j draws alpha_j then w_j from
/// derive_seed(seed, {1, j}) and its gammas from derive_seed(seed, {2, j}).
Instance generate(const SyntheticConfig& config);

/// One line of a contact trace: `device_id start end`.
struct ContactRecord {
  std::string device;
  double start = 0.0;
  double end = 0.0;
};

/// Whitespace separated `device_id start end` per line. Blank lines and
/// lines starting with '#' are skipped. Throws ParseError with the line
/// number on malformed records, start > end or negative times.
std::vector<ContactRecord> read_contacts(std::istream& in);
std::vector<ContactRecord> load_contacts(const std::filesystem::path& path);

struct WorkerStats {
  std::string device;
  std::size_t contacts = 0;
  double total_gap = 0.0;  // sum of gaps between successive contact starts
  double lambda = 0.0;     // (contacts - 1) / total_gap
  double phi = 0.0;        // 1 / lambda
};

struct TraceStats {
  std::vector<WorkerStats> workers;   // selected, lambda descending
  std::vector<std::string> warnings;  // devices dropped for a zero total gap
  std::size_t eligible = 0;           // devices with a usable estimate
};

/// Per-device meeting rate from successive contact starts; devices with
/// fewer than two contacts are dropped, the top_k largest rates are kept
/// (ties by device id). Throws std::invalid_argument when nothing is left.
TraceStats ingest_trace(const std::vector<ContactRecord>& records, std::size_t top_k = 128);

/// Workers from the trace statistics, tasks from the synthetic recipe with
/// n = workers * tasks_per_worker. beta is fixed to 1 unless keep_beta.
Instance instance_from_trace(const TraceStats& stats, SyntheticConfig tasks, bool keep_beta = false);

/// Meeting traces in the contact format: device id = worker index and
/// start = end = meeting time, after a `# horizon <h>` line.
void write_meeting_trace(std::ostream& out, const MeetingTrace& trace);
MeetingTrace read_meeting_trace(std::istream& in);

}  // namespace crowdsched

#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace orbivortex::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/** UTC wall-clock in ISO-8601; the one report field excluded from
 * byte-identity comparisons. */
std::string timestamp_utc();

/** Assemble the standard report envelope: version, timestamp, command,
 * resolved config, and the command-specific result. */
nlohmann::json make_report(const std::string& command, const nlohmann::json& config,
                           const nlohmann::json& result);

/** Reals with 17 significant digits (round-trip exact). */
std::string format_real(double x);

/** Write via a temporary in the same directory plus rename, so readers never
 * observe a partial file. Throws std::runtime_error on I/O failure. */
void write_text_atomic(const std::string& path, const std::string& text);

/** Serialize the report (2-space indent, sorted keys, trailing newline) to
 * the path, or to stdout when the path is empty. */
void emit_report(const nlohmann::json& report, const std::string& path);

/** CSV field dump: a `# kind,n1,n2` provenance comment, one header line,
 * then the data rows (pre-formatted by the caller). */
void write_csv(const std::string& path, const std::string& provenance,
               const std::string& header, const std::vector<std::string>& rows);

} // namespace orbivortex::cli

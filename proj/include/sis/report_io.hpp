#pragma once

#include <iosfwd>
#include <string>

#include <vector>

#include "sis/ensemble.hpp"
#include "sis/pathstats.hpp"
#include "sis/verify.hpp"

// Serialization of reports and path records. Doubles are printed with
// shortest-round-trip precision (%.17g), so emitted numbers parse back to
// the identical bits; JSON key order is fixed, which makes reports from
// equal runs byte-identical. NaN (an unavailable regression slope) maps to
// JSON null and to "nan" in CSV.

namespace sis {

enum class OutputFormat { Csv, Json };

// Round-trip-exact decimal rendering of one double.
std::string format_double(double v);

// Ensemble report. CSV: one pinned header line, one row per path, then a
// "#summary" comment block. JSON: one object mirroring EnsembleReport.
void emit_report(const EnsembleReport& rep, OutputFormat fmt, std::ostream& os);

// Recorded series of a single path plus its summary block.
void emit_path(const PathRecord& rec, OutputFormat fmt, std::ostream& os);

// Regime classification as key=value lines (CSV mode) or one JSON object.
void emit_regime(const RegimeReport& regime, OutputFormat fmt, std::ostream& os);

// Verdicts as "[PASS]/[FAIL] name predicted=... measured=... tolerance=..."
// lines or a JSON array.
void emit_verdicts(const std::vector<Verdict>& verdicts, OutputFormat fmt,
                   std::ostream& os);

// Inverse of the JSON emitter (per-path rows included). Throws on
// malformed input.
EnsembleReport parse_report_json(const std::string& text);

}  // namespace sis

#pragma once

#include <iosfwd>
#include <limits>
#include <string>

#include "sis/ensemble.hpp"
#include "sis/report_io.hpp"

// Command-line driver. Kept in the library so the whole flag/config/exit
// path is exercisable in-process by tests; the binary is a thin main().

namespace sis {

// Everything one run needs. Model fields start unset (NaN) so the driver
// can tell "missing" from "given"; scheme/ensemble/output carry usable
// defaults. Values come from a JSON config file first, then flags override
// field by field.
struct RunConfig {
    ModelParams model{std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
    SchemeConfig scheme{};
    EnsembleConfig ensemble{100, 0, 0};
    OutputFormat output = OutputFormat::Csv;
    std::string out_path = "-";
    bool dump_paths = false;
};

// Loads a JSON run config ({"model": {...}, "scheme": {...},
// "ensemble": {...}, "output": ..., "out_path": ..., "dump_paths": ...},
// every section and field optional) on top of the defaults.
RunConfig load_run_config(const std::string& path);

// Runs one invocation. Exit codes: 0 success, 1 invalid parameters or
// usage, 2 verification failure, 3 I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace sis

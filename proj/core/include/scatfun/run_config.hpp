#pragma once

#include <iosfwd>
#include <string>

#include "scatfun/harness.hpp"

namespace scatfun::config {

struct ParsedRun {
    harness::ExperimentConfig experiment;
    std::string out_dir = "out";
};

/**
 * Strict INI-style run configuration:
 *
 *   [grid]        L, Ktilde, P
 *   [cover]       full = true | boxes = "a b; a b; ..." | file = path
 *   [model]       id = C1|C2|C3 (+ optional parameter overrides)
 *   [weights]     mode = random_unimodular | fiducial_file | explicit
 *                 file = path | values = "re im re im ..."
 *   [experiment]  J, J_sweep = "16,64,...", master_seed
 *   [output]      directory
 *
 * Unknown sections or keys are fatal (ParseError with the line number);
 * semantic problems (aliasing cover, invalid fiducial file, ...) raise
 * ValidationError.
 */
ParsedRun parse_config(const std::string& path);
ParsedRun parse_config_text(const std::string& text, const std::string& source_name = "<memory>");

/// Snapshot that parse_config_text maps back to an equivalent ParsedRun.
std::string snapshot(const ParsedRun& run);

/**
 * Batch run: executes the experiment (J_sweep if present, else single J) and
 * writes exactly {config.snapshot, truth.csv, estimate.csv, report.txt,
 * mse.csv, plot.py} into out_dir. Returns a process exit code; on failure
 * nothing is left behind in out_dir.
 */
int run(const ParsedRun& run, std::ostream& diag);

/// `diagnose` front end: seed conditioning table for a weights source
/// ("path" or "random:L"). Returns a process exit code.
int diagnose(const std::string& weights_source, std::uint64_t seed, std::ostream& os);

/// `verify` front end: factorization oracle sweep, spectral identity, Welch
/// floor. Prints one PASS/FAIL line per check; returns a process exit code.
int verify_suite(std::ostream& os);

}  // namespace scatfun::config

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace igp::cli {

/// Runs the igpsim driver. Returns 0 on success; on failure writes exactly
/// one line "error: <kind>: <message>" to err and returns nonzero
/// (2 for usage errors, 1 otherwise).
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "<value>" or "<lo>:<hi>:<n>" (n >= 2 points, inclusive).
std::vector<double> parse_k_grid(const std::string& text);

/// Output directory after the IGP_OUTPUT_DIR override.
std::string resolve_output_dir(const std::string& configured);

}  // namespace igp::cli

#pragma once

#include <string>

#include "adae/forcing.hpp"

namespace adae {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitViolation = 2, kExitSmoothness = 3 };

/// Forcing JSON, one of
///   {"type":"polynomial","coeffs":[[...],...],"coeffs_im":[[...],...]}
///   {"type":"piecewise","breaks":[...],"pieces":[{"coeffs":...,"coeffs_im":...,"rate":[re,im]}, ...]}
///   {"type":"sampled","t0":0,"dt":h,"samples":[[...] per time],"samples_im":...}
/// coeffs[j] is the coefficient vector of t^j.
ForcingSignal parse_forcing_json(const std::string& text, Index dim);

/// [x1, x2, ...] or [[re, im], ...].
CVector parse_vector_json(const std::string& text, Index dim);

int run_cli(int argc, char** argv);

}  // namespace adae

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "superlin/detector_models.hpp"

namespace superlin::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr const char* kSeedEnvVar = "SUPERLIN_SEED";

/// Runs one command line (args[0] is the program name). Returns the process
/// exit code: 0 on success (verdicts such as "no feasible attack" included),
/// 1 when the computation failed, 2 for usage errors.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// "1,2,4", "lin:START:STOP:COUNT" or "log:START:STOP:COUNT".
std::vector<double> parse_number_list(const std::string& text);

struct LoadedDetector {
  Detector model;
  std::string input_path;  // empty for analytic models
};

/// Inline model specs:
///   kind=linear,eta=E
///   kind=superlinear,eta1=E1,eta2=E2
///   kind=worst-case,eta=E
///   kind=fixed,p_f=P,p_h=P[,p_q=P]
///   kind=curve,path=FILE
///   kind=grid,path=FILE
LoadedDetector parse_detector_spec(const std::string& spec);

}  // namespace superlin::cli

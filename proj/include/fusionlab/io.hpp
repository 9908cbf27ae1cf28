#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fusionlab/classify.hpp"
#include "fusionlab/fusion.hpp"
#include "fusionlab/optimizer.hpp"

#include "json.hpp"

namespace fusionlab {

using Json = nlohmann::ordered_json;

/// 12 significant digits, '.' separator whatever the locale.
std::string format_number(double x);
/// x rounded to 12 significant digits, for JSON output.
double round12(double x);

/// {"matrix": [[[re, im] x 4] x 4]}, row-major.
Json matrix_to_json(const FusionMatrix &u);
/// Throws MalformedInput on shape errors and NotUnitary via validate_unitary.
FusionMatrix matrix_from_json(const Json &j, double tol = kDefaultUnitaryTol);
FusionMatrix read_matrix_file(const std::filesystem::path &path, double tol = kDefaultUnitaryTol);
/// Builtin name, "haar:<seed>" for one Haar draw, otherwise a path to a
/// matrix file.
FusionMatrix resolve_matrix(const std::string &source, double tol = kDefaultUnitaryTol);

Json coefficients_to_json(const StateCoefficients &c);
Json classification_to_json(const StateClass &c);

/// Outcome table plus entanglement report and classification for every
/// outcome. Entropies are scaled by ln 2 when base is Nats.
Json analysis_report(const FusionMatrix &u, NeighborArity arity, EntropyBase base = EntropyBase::Bits,
                     double tol = kDefaultClassifyTol);

/// Writes to a sibling temporary file, then renames over path.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

std::string sweep_expectation_csv(const std::vector<SweepRow> &rows, EntropyBase base = EntropyBase::Bits);
std::string sweep_threshold_csv(const std::vector<SweepRow> &rows, EntropyBase base = EntropyBase::Bits);
std::string scatter_csv(const ScatterResult &r, ObjectiveKind kind, EntropyBase base = EntropyBase::Bits);
/// One row per RunningStats: quantity, count, mean, stddev.
std::string scatter_summary_csv(const ScatterResult &r, ObjectiveKind kind, const std::vector<double> &s_targets,
                                EntropyBase base = EntropyBase::Bits);

}  // namespace fusionlab

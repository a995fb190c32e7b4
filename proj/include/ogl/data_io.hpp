#pragma once

#include <cstdint>
#include <string>

#include "ogl/group_model.hpp"

namespace ogl {

struct Dataset {
  Matrix A;
  Vector b;
  std::vector<std::string> feature_names;
};

// Seeded synthetic generator spec: g groups of group_size laid out as a
// chain, consecutive groups sharing `overlap` indices; x_true is nonzero on
// `active_groups` randomly chosen groups; b = A x_true + sigma * noise.
struct SynthSpec {
  int p = 0;
  int n = 0;
  int g = 0;
  int group_size = 0;
  int overlap = 0;
  int active_groups = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SynthData {
  Dataset data;
  GroupStructure gs;
  Vector x_true;
};

Matrix load_matrix_csv(const std::string& path);
Vector load_vector(const std::string& path);
GroupStructure load_groups(const std::string& path, int p);

void write_matrix_csv(const std::string& path, const Matrix& A);
void write_vector(const std::string& path, const Vector& v);
void write_groups(const std::string& path, const GroupStructure& gs);

// 17-significant-digit decimal form; round-trips binary64 exactly.
std::string format_double(double value);

SynthData synth_overlap_dataset(const SynthSpec& spec);

// Mean of the per-class misclassification rates. Labels must be +-1 with
// both classes present; predictions are thresholded at 0.
double balanced_error_rate(const Vector& predictions, const Vector& labels);

}  // namespace ogl

#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ogl/errors.hpp"

namespace ogl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Index sets G_i with positive weights w_i over p features. Groups may
// overlap and need not cover every feature; uncovered features only see the
// l1 part of the penalty. Construct through validate_groups so the
// invariants (sorted, deduplicated, in-range, nonempty, w_i > 0) hold.
struct GroupStructure {
  int p = 0;
  std::vector<std::vector<int>> groups;  // each strictly ascending
  std::vector<double> weights;
  std::vector<std::string> names;  // empty, or one per group

  int g() const { return static_cast<int>(groups.size()); }
};

struct PenaltyParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

void validate_params(const PenaltyParams& params);

GroupStructure validate_groups(std::vector<std::vector<int>> raw_groups,
                               std::vector<double> weights, int p,
                               std::vector<std::string> names = {});

// lambda1*||x||_1 + lambda2 * sum_i w_i ||x_{G_i}||
double penalty_value(const Vector& x, const GroupStructure& gs,
                     const PenaltyParams& params);

double group_norm(const Vector& x, const std::vector<int>& group);

struct GroupStats {
  int g = 0;
  int p = 0;
  double mean_group_size = 0.0;
  int max_group_size = 0;
  int features_covered = 0;
  double mean_appearance_frequency = 0.0;  // sum |G_i| / covered
};

GroupStats group_stats(const GroupStructure& gs);

}  // namespace ogl
